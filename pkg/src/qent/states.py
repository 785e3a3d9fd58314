"""Two-qubit density matrices: validation, Bloch decomposition, named families,
random ensembles and the JSON state-file format.

Basis order is |00>, |01>, |10>, |11>; Pauli index 1, 2, 3 means X, Y, Z.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from qent.errors import (
    BlochOutOfBall,
    NotHermitian,
    NotPSD,
    ParamOutOfRange,
    StateFormatError,
    TraceNotOne,
    ZeroVector,
)
from qent.smallmat import eigvalsh_batch

HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = -1e-10
ENSEMBLE_NAME = "ginibre-hilbert-schmidt"

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = np.stack([SX, SY, SZ])

# operator bases for Tr(rho O): sigma_i x I, I x sigma_i, sigma_i x sigma_j
LOCAL_A = np.stack([np.kron(s, I2) for s in PAULIS])
LOCAL_B = np.stack([np.kron(I2, s) for s in PAULIS])
CORR = np.stack([[np.kron(si, sj) for sj in PAULIS] for si in PAULIS])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated two-qubit state.  Build it with :func:`validate` or a constructor."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __eq__(self, other):
        return isinstance(other, DensityMatrix) and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


@dataclass(frozen=True)
class BlochForm:
    """Local Bloch vectors ``r`` (qubit A), ``s`` (qubit B) and correlation matrix ``c``."""

    r: np.ndarray
    s: np.ndarray
    c: np.ndarray


def validate(raw):
    """Check Hermiticity, unit trace and positivity; return a :class:`DensityMatrix`.

    The accepted matrix is symmetrised as ``(m + m^H)/2``.
    """
    m = np.array(raw, dtype=np.complex128)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > HERMITIAN_TOL:
        raise NotHermitian(f"Hermiticity violated: max |rho - rho^H| = {dev:.3e} > {HERMITIAN_TOL:g}")
    m = 0.5 * (m + m.conj().T)
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise TraceNotOne(f"unit trace violated: trace = {tr!r}, |trace - 1| = {abs(tr - 1):.3e}")
    lam_min = float(eigvalsh_batch(m[None])[0, -1])
    if lam_min < PSD_TOL:
        raise NotPSD(f"positivity violated: minimum eigenvalue {lam_min:.3e} < {PSD_TOL:g}")
    return DensityMatrix(m)


def as_density(rho):
    return rho if isinstance(rho, DensityMatrix) else validate(rho)


def bloch_decompose_batch(rhos):
    """Return ``(r, s, c)`` arrays of shape (B, 3), (B, 3), (B, 3, 3)."""
    rhos = np.asarray(rhos)
    # Tr(rho O) = sum_ab rho_ab O_ba
    r = np.einsum("nab,iba->ni", rhos, LOCAL_A).real
    s = np.einsum("nab,iba->ni", rhos, LOCAL_B).real
    c = np.einsum("nab,ijba->nij", rhos, CORR).real
    return r, s, c


def bloch_decompose(rho):
    m = as_density(rho).matrix
    r, s, c = bloch_decompose_batch(m[None])
    return BlochForm(r[0], s[0], c[0])


def reconstruct(b):
    """Rebuild the density matrix from a :class:`BlochForm`."""
    r = np.asarray(b.r, dtype=float)
    s = np.asarray(b.s, dtype=float)
    c = np.asarray(b.c, dtype=float)
    m = (
        np.eye(4, dtype=np.complex128)
        + np.einsum("i,iab->ab", r, LOCAL_A)
        + np.einsum("i,iab->ab", s, LOCAL_B)
        + np.einsum("ij,ijab->ab", c, CORR)
    ) / 4.0
    return validate(m)


def purity(rho):
    m = as_density(rho).matrix
    return float(np.real(np.einsum("ab,ba->", m, m)))


def purity_batch(rhos):
    rhos = np.asarray(rhos)
    return np.real(np.einsum("nab,nba->n", rhos, rhos))


def _check_param(name, x):
    if not (0.0 <= x <= 1.0):
        raise ParamOutOfRange(f"{name} = {x!r} outside [0, 1]")


def mems(p):
    """Maximally entangled mixed state: weight ``p`` on (|00> - |11>)/sqrt(2), ``1 - p`` on |01>."""
    _check_param("p", p)
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 0] = m[3, 3] = p / 2
    m[0, 3] = m[3, 0] = -p / 2
    m[1, 1] = 1 - p
    return DensityMatrix(m)


def werner(r):
    """Werner state ``r |Phi+><Phi+| + (1 - r) I/4``."""
    _check_param("r", r)
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 0] = m[3, 3] = (1 + r) / 4
    m[1, 1] = m[2, 2] = (1 - r) / 4
    m[0, 3] = m[3, 0] = r / 2
    return DensityMatrix(m)


FAMILIES = {"mems": mems, "werner": werner}


def family_state(name, x):
    try:
        ctor = FAMILIES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    return ctor(x)


def pure_state(amplitudes):
    psi = np.asarray(amplitudes, dtype=np.complex128).reshape(4)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ZeroVector("state vector has zero norm")
    psi = psi / norm
    return DensityMatrix(np.outer(psi, psi.conj()))


def product_state(a, b):
    """``(I + a.sigma)/2 (x) (I + b.sigma)/2`` for Bloch vectors in the unit ball."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    for name, vec in (("a", a), ("b", b)):
        if vec.shape != (3,):
            raise ValueError(f"Bloch vector {name} must have 3 components")
        if np.linalg.norm(vec) > 1 + 1e-12:
            raise BlochOutOfBall(f"|{name}| = {np.linalg.norm(vec):.6g} > 1")
    rho_a = 0.5 * (I2 + np.einsum("i,iab->ab", a, PAULIS))
    rho_b = 0.5 * (I2 + np.einsum("i,iab->ab", b, PAULIS))
    return DensityMatrix(np.kron(rho_a, rho_b))


def _ginibre(seed, rank, index):
    rng = np.random.default_rng([seed, index])
    return rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))


def random_states(seed, rank, start, count):
    """Stack of ``count`` random states for stream indices ``start .. start+count-1``.

    Sample ``k`` depends only on ``(seed, k)``, so chunks can be generated in
    any order or in parallel and still agree with a serial run.
    """
    if not 1 <= rank <= 4:
        raise ValueError(f"rank must be in [1, 4], got {rank}")
    g = np.stack([_ginibre(seed, rank, k) for k in range(start, start + count)])
    m = g @ np.conj(np.swapaxes(g, 1, 2))
    tr = np.real(np.trace(m, axis1=1, axis2=2))
    return m / tr[:, None, None]


def random_state(seed, rank=4, index=0):
    """Ginibre-induced random state ``G G^H / Tr(G G^H)`` with ``G`` of shape (4, rank)."""
    return DensityMatrix(random_states(seed, rank, index, 1)[0])


def to_json_dict(rho):
    m = np.asarray(as_density(rho).matrix)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def from_json_dict(obj):
    """Parse ``{"re": 4x4, "im": 4x4}`` and validate the result."""
    if not isinstance(obj, dict):
        raise StateFormatError("state JSON must be an object with fields 're' and 'im'")
    parts = []
    for field in ("re", "im"):
        if field not in obj:
            raise StateFormatError(f"missing field '{field}'")
        try:
            arr = np.array(obj[field], dtype=np.float64)
        except (TypeError, ValueError):
            raise StateFormatError(f"field '{field}' must be a 4x4 array of numbers") from None
        if arr.shape != (4, 4):
            raise StateFormatError(f"field '{field}' has shape {arr.shape}, expected (4, 4)")
        if not np.all(np.isfinite(arr)):
            raise StateFormatError(f"field '{field}' contains non-finite values")
        parts.append(arr)
    return validate(parts[0] + 1j * parts[1])


def dumps_state(rho):
    return json.dumps(to_json_dict(rho))


def load_state(path):
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"invalid JSON in {path}: {exc}") from None
    return from_json_dict(obj)


def save_state(rho, path):
    Path(path).write_text(dumps_state(rho) + "\n")
