"""Scalar entanglement criteria for two-qubit states and their verdicts.

Quantities per state:

* ``s_linear``  linear entropy ``(4/3)(1 - Tr rho^2)``
* ``q_value``   ``3(1 - S_L) - |r|^2 - |s|^2``, which equals ``sum c_ij^2``
* ``m_value``   sum of the two largest eigenvalues of ``C^T C`` (CHSH violation iff > 1)
* ``n_value``   ``Tr sqrt(C^T C)`` (teleportation usefulness iff > 1)
* ``concurrence`` Wootters concurrence, the ground-truth oracle together with PPT

Everything is computed on stacks of matrices first; the single-state
functions are thin wrappers so the audit and :func:`classify` share one
numerical path.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from qent.errors import DegenerateCorrelation, NonUnitVector
from qent.smallmat import eig_sym3, eigvalsh_batch, partial_transpose_batch, psd_sqrt_batch
from qent.states import CORR, PAULIS, as_density, bloch_decompose_batch, purity_batch

TWO_THIRDS = 2.0 / 3.0
CONCURRENCE_TOL = 1e-10
PPT_TOL = -1e-10
LAMBDA_CLIP = -1e-12
UNIT_TOL = 1e-9
SPIN_FLIP_FLOOR = 16 * np.finfo(float).eps

_YY = np.kron(PAULIS[1], PAULIS[1])


@dataclass(frozen=True)
class MeasurementSettings:
    """Four measurement directions of a CHSH experiment.

    Vectors are renormalised on construction; a norm deviating from 1 by more
    than 1e-9 raises :class:`NonUnitVector`.
    """

    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,):
                raise NonUnitVector(f"{name} must have 3 components, got shape {vec.shape}")
            norm = float(np.linalg.norm(vec))
            if not abs(norm - 1.0) <= UNIT_TOL:
                raise NonUnitVector(f"{name} is not a unit vector: norm {norm!r} deviates from 1 by more than {UNIT_TOL:g}")
            object.__setattr__(self, name, vec / norm)

    def as_array(self):
        return np.stack([self.a, self.a_prime, self.b, self.b_prime])

    def to_json_dict(self):
        return {k: getattr(self, k).tolist() for k in ("a", "a_prime", "b", "b_prime")}

    @classmethod
    def from_json_dict(cls, obj):
        missing = [k for k in ("a", "a_prime", "b", "b_prime") if k not in obj]
        if missing:
            raise NonUnitVector(f"settings missing field(s): {', '.join(missing)}")
        return cls(obj["a"], obj["a_prime"], obj["b"], obj["b_prime"])


@dataclass(frozen=True)
class CriteriaReport:
    s_linear: float
    q_value: float
    m_value: float
    n_value: float
    concurrence: float
    min_ppt_eigenvalue: float
    bloch_norms: tuple
    refined_sl_bound: float
    bell_chsh_violating: bool
    q_detected: bool
    paper_linear_entropy_flag: bool
    teleportation_useful: bool
    oracle_entangled: bool
    is_ppt: bool

    def to_dict(self):
        d = asdict(self)
        d["bloch_norms"] = list(self.bloch_norms)
        return d

    def flag_signature(self):
        return signature(self.bell_chsh_violating, self.q_detected, self.teleportation_useful,
                         self.paper_linear_entropy_flag)


def signature(m, q, n, sl):
    """Compact label of the detector flags, e.g. ``M0Q1N1L0``."""
    return f"M{int(m)}Q{int(q)}N{int(n)}L{int(sl)}"


def correlation_eigenvalues_batch(c):
    """Descending eigenvalues of ``C^T C`` for a stack of 3x3 correlation matrices."""
    ctc = np.einsum("nki,nkj->nij", c, c)
    ctc = 0.5 * (ctc + np.swapaxes(ctc, 1, 2))
    return eigvalsh_batch(ctc.astype(np.complex128))


def concurrence_witness_batch(rhos):
    """``mu_1 - mu_2 - mu_3 - mu_4`` from the spectrum of ``sqrt(sqrt(rho) rho~ sqrt(rho))``.

    The concurrence is ``max(0, witness)``; the raw value is kept so the
    audit can tell how far a separable state sits from the boundary.
    """
    rhos = np.asarray(rhos)
    root = psd_sqrt_batch(rhos)
    flipped = _YY @ np.conj(rhos) @ _YY
    herm = root @ flipped @ root
    herm = 0.5 * (herm + np.conj(np.swapaxes(herm, 1, 2)))
    lam = eigvalsh_batch(herm)
    # eigenvalues at rounding level would contribute ~sqrt(eps) after the square root
    floor = SPIN_FLIP_FLOOR * np.maximum(lam[:, :1], 0.0)
    mu = np.sqrt(np.where(lam <= floor, 0.0, lam))
    return mu[:, 0] - mu[:, 1] - mu[:, 2] - mu[:, 3]


def evaluate_batch(rhos):
    """All scalar criteria for a stack of valid density matrices.

    Returns a dict of arrays keyed by ``s_linear``, ``q_value``, ``m_value``,
    ``n_value``, ``concurrence``, ``concurrence_witness``,
    ``min_ppt_eigenvalue``, ``r_norm_sq``, ``s_norm_sq``, ``q_from_c`` and
    ``ctc_eigenvalues``.
    """
    rhos = np.asarray(rhos, dtype=np.complex128)
    r, s, c = bloch_decompose_batch(rhos)
    s_lin = (4.0 / 3.0) * (1.0 - purity_batch(rhos))
    r2 = np.sum(r * r, axis=1)
    s2 = np.sum(s * s, axis=1)
    lam = correlation_eigenvalues_batch(c)
    root_lam = np.sqrt(np.where(lam < 0.0, 0.0, lam))
    witness = concurrence_witness_batch(rhos)
    return {
        "s_linear": s_lin,
        "q_value": 3.0 * (1.0 - s_lin) - r2 - s2,
        "q_from_c": np.sum(c * c, axis=(1, 2)),
        "m_value": lam[:, 0] + lam[:, 1],
        "n_value": np.sum(root_lam, axis=1),
        "concurrence": np.maximum(witness, 0.0),
        "concurrence_witness": witness,
        "min_ppt_eigenvalue": eigvalsh_batch(partial_transpose_batch(rhos))[:, -1],
        "r_norm_sq": r2,
        "s_norm_sq": s2,
        "ctc_eigenvalues": lam,
    }


def flags_from_values(v):
    """Verdict flags from :func:`evaluate_batch` output; strict thresholds, no epsilon band."""
    s_lin = v["s_linear"]
    return {
        "bell_chsh_violating": v["m_value"] > 1.0,
        "q_detected": v["q_value"] > 1.0,
        "paper_linear_entropy_flag": (s_lin > 0.0) & (s_lin < TWO_THIRDS),
        "teleportation_useful": v["n_value"] > 1.0,
        "oracle_entangled": v["concurrence"] > CONCURRENCE_TOL,
        "is_ppt": v["min_ppt_eigenvalue"] >= PPT_TOL,
    }


def _one(rho, key):
    m = as_density(rho).matrix
    return float(evaluate_batch(m[None])[key][0])


def linear_entropy(rho):
    m = as_density(rho).matrix
    return float((4.0 / 3.0) * (1.0 - purity_batch(m[None])[0]))


def q_value(rho):
    m = as_density(rho).matrix
    r, s, _ = bloch_decompose_batch(m[None])
    return 3.0 * (1.0 - linear_entropy(rho)) - float(r[0] @ r[0] + s[0] @ s[0])


def correlation_eigenvalues(rho):
    m = as_density(rho).matrix
    _, _, c = bloch_decompose_batch(m[None])
    return correlation_eigenvalues_batch(c)[0]


def m_value(rho):
    """Horodecki quantity: the state violates some CHSH inequality iff this exceeds 1."""
    lam = correlation_eigenvalues(rho)
    return float(lam[0] + lam[1])


def n_value(rho):
    lam = correlation_eigenvalues(rho)
    return float(np.sum(np.sqrt(np.where(lam < 0.0, 0.0, lam))))


def concurrence(rho):
    m = as_density(rho).matrix
    return float(max(concurrence_witness_batch(m[None])[0], 0.0))


def ppt_check(rho):
    """Return ``(is_ppt, min_eigenvalue)`` of the partial transpose; exact separability test for 2x2."""
    m = as_density(rho).matrix
    lam_min = float(eigvalsh_batch(partial_transpose_batch(m[None]))[0, -1])
    return lam_min >= PPT_TOL, lam_min


def bell_operator(settings):
    """``a.sigma (x) (b + b').sigma + a'.sigma (x) (b - b').sigma``."""
    a, ap, b, bp = settings.as_array()
    t = np.outer(a, b + bp) + np.outer(ap, b - bp)
    return np.einsum("ij,ijkl->kl", t, CORR)


def chsh_value(rho, settings):
    m = as_density(rho).matrix
    return float(np.real(np.einsum("ab,ba->", m, bell_operator(settings))))


def chsh_values(rho, directions):
    """CHSH values for many settings at once.

    ``directions`` has shape (K, 4, 3), rows ordered ``a, a', b, b'`` and
    already unit-normalised.
    """
    m = as_density(rho).matrix
    d = np.asarray(directions, dtype=float)
    a, ap, b, bp = d[:, 0], d[:, 1], d[:, 2], d[:, 3]
    t = np.einsum("ki,kj->kij", a, b + bp) + np.einsum("ki,kj->kij", ap, b - bp)
    ops = np.einsum("kij,ijab->kab", t, CORR)
    return np.real(np.einsum("ab,kba->k", m, ops))


def random_directions(n, seed):
    """``n`` random settings as an (n, 4, 3) array of uniformly distributed unit vectors."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n, 4, 3))
    return v / np.linalg.norm(v, axis=2, keepdims=True)


def _orthogonal_unit(v):
    trial = np.eye(3)[int(np.argmin(np.abs(v)))]
    w = trial - (trial @ v) * v
    return w / np.linalg.norm(w)


def chsh_optimal_settings(rho):
    """Settings reaching the maximal CHSH value ``2 sqrt(M)``.

    Bob's directions lie in the plane of the two leading eigenvectors of
    ``C^T C``; Alice measures along ``C`` applied to each of them.
    """
    m = as_density(rho).matrix
    _, _, c = bloch_decompose_batch(m[None])
    c = c[0]
    spec = eig_sym3(c.T @ c)
    lam = np.clip(spec.eigenvalues, 0.0, None)
    if lam[0] <= 1e-15:
        raise DegenerateCorrelation("correlation matrix vanishes; every CHSH value is 0")
    e1, e2 = spec.eigenvectors[:, 0], spec.eigenvectors[:, 1]
    theta = math.atan2(math.sqrt(lam[1]), math.sqrt(lam[0]))
    b = math.cos(theta) * e1 + math.sin(theta) * e2
    bp = math.cos(theta) * e1 - math.sin(theta) * e2
    a = c @ e1
    a = a / np.linalg.norm(a)
    ce2 = c @ e2
    if np.linalg.norm(ce2) > 1e-12:
        ap = ce2 / np.linalg.norm(ce2)
    else:
        ap = _orthogonal_unit(a)
    return MeasurementSettings(a, ap, b, bp)


def report_from_values(v, i=0):
    flags = flags_from_values(v)
    r2 = float(v["r_norm_sq"][i])
    s2 = float(v["s_norm_sq"][i])
    return CriteriaReport(
        s_linear=float(v["s_linear"][i]),
        q_value=float(v["q_value"][i]),
        m_value=float(v["m_value"][i]),
        n_value=float(v["n_value"][i]),
        concurrence=float(v["concurrence"][i]),
        min_ppt_eigenvalue=float(v["min_ppt_eigenvalue"][i]),
        bloch_norms=(r2, s2),
        refined_sl_bound=TWO_THIRDS - (r2 + s2) / 3.0,
        **{k: bool(f[i]) for k, f in flags.items()},
    )


def classify(rho):
    """Evaluate every criterion and verdict for one state.

    Each flag is computed on its own so disagreements between them, and with
    the concurrence oracle, stay visible.
    """
    m = as_density(rho).matrix
    return report_from_values(evaluate_batch(m[None]))


def classify_batch(rhos):
    v = evaluate_batch(rhos)
    return [report_from_values(v, i) for i in range(len(v["s_linear"]))]
