"""Dense kernels for 2x2, 3x3 and 4x4 matrices.

The Hermitian eigensolver is a cyclic Jacobi iteration.  A compiled version
(``_jacobi_ext``) is used when it was built; otherwise the vectorised numpy
implementation in ``_jacobi_py`` takes over.  Set ``QENT_PURE_PYTHON=1`` to
force the fallback, or call :func:`set_backend` at runtime.
"""

import os
from dataclasses import dataclass

import numpy as np

from qent.errors import NoConvergence, NotHermitian, NotPSD
from qent.smallmat import _jacobi_py

try:
    from qent.smallmat import _jacobi_ext
except ImportError:  # extension not built
    _jacobi_ext = None

__all__ = [
    "Spectrum",
    "eig_hermitian",
    "eig_sym3",
    "psd_sqrt",
    "partial_transpose",
    "eigh_batch",
    "eigvalsh_batch",
    "psd_sqrt_batch",
    "partial_transpose_batch",
    "available_backends",
    "get_backend",
    "set_backend",
]

OFFDIAG_TOL = 1e-13
MAX_SWEEPS = 100
HERMITIAN_TOL = 1e-9
PSD_CLIP = -1e-10

_BACKENDS = {"python": _jacobi_py.eigh_batch}
if _jacobi_ext is not None:
    _BACKENDS["cython"] = _jacobi_ext.eigh_batch

_active = "python" if (_jacobi_ext is None or os.environ.get("QENT_PURE_PYTHON")) else "cython"


def available_backends():
    return sorted(_BACKENDS)


def get_backend():
    return _active


def set_backend(name):
    """Select the eigensolver backend (``"cython"`` or ``"python"``); returns the previous one."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    prev, _active = _active, name
    return prev


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (descending) and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigh_batch(mats):
    """Eigendecompose a stack of Hermitian matrices, no input checks.

    Returns ``(w, v)`` with ``w`` descending along the last axis.
    """
    mats = np.asarray(mats)
    w, v, status = _BACKENDS[_active](mats, OFFDIAG_TOL, MAX_SWEEPS)
    if np.any(status < 0):
        bad = int(np.flatnonzero(status < 0)[0])
        raise NoConvergence(f"Jacobi iteration exceeded {MAX_SWEEPS} sweeps (batch index {bad})")
    return w, v


def eigvalsh_batch(mats):
    return eigh_batch(mats)[0]


def _check_hermitian(m):
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if dev > HERMITIAN_TOL:
        raise NotHermitian(f"max |m - m^H| = {dev:.3e} exceeds {HERMITIAN_TOL:g}")
    return 0.5 * (m + m.conj().T)


def eig_hermitian(m):
    """Eigendecomposition of a Hermitian matrix of size at most 4.

    Raises
    ------
    NotHermitian
        If ``max|m - m^H| > 1e-9``.
    NoConvergence
        If the sweep budget runs out.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 3, 4):
        raise ValueError(f"expected a square 2x2, 3x3 or 4x4 matrix, got shape {m.shape}")
    m = _check_hermitian(m)
    w, v = eigh_batch(m[None])
    return Spectrum(w[0], v[0])


def eig_sym3(m):
    """Eigendecomposition of a real symmetric 3x3 matrix; eigenvectors are real."""
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (3, 3):
        raise ValueError(f"expected shape (3, 3), got {m.shape}")
    m = 0.5 * (m + m.T)
    w, v = eigh_batch(m[None].astype(np.complex128))
    return Spectrum(w[0], np.real(v[0]))


def psd_sqrt_batch(mats, clip=PSD_CLIP):
    w, v = eigh_batch(mats)
    if np.any(w < clip):
        raise NotPSD(f"eigenvalue {w.min():.3e} below {clip:g}")
    root = np.sqrt(np.clip(w, 0.0, None))
    r = np.einsum("bij,bj,bkj->bik", v, root, v.conj())
    return 0.5 * (r + np.conj(np.swapaxes(r, 1, 2)))


def psd_sqrt(m):
    """Hermitian PSD square root; eigenvalues in [-1e-10, 0) are clipped to zero."""
    m = np.asarray(m, dtype=np.complex128)
    m = _check_hermitian(m)
    return psd_sqrt_batch(m[None])[0]


def partial_transpose_batch(rhos):
    """Transpose on the second qubit: ``out[2i+j, 2k+l] = in[2i+l, 2k+j]``."""
    rhos = np.asarray(rhos)
    t = rhos.reshape(-1, 2, 2, 2, 2).transpose(0, 1, 4, 3, 2)
    return t.reshape(rhos.shape)


def partial_transpose(rho):
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
    return partial_transpose_batch(rho[None])[0]
