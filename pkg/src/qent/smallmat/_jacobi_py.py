"""Cyclic complex Jacobi eigensolver, numpy fallback.

Rotations are vectorised across the batch axis, so a stack of matrices costs
roughly the same number of numpy calls as a single one.  Matrices that have
already converged receive identity rotations.
"""

import numpy as np

# off-diagonal magnitudes below this are treated as zero (phase would overflow)
TINY = 1e-300


def eigh_batch(a, tol, max_sweeps):
    """Diagonalise a stack of Hermitian matrices.

    Parameters
    ----------
    a : ndarray, shape (B, n, n)
        Hermitian input; not modified.
    tol : float
        Convergence threshold on the off-diagonal Frobenius norm, scaled by
        ``min(1, ||a||_F)``.  One extra sweep follows convergence.
    max_sweeps : int
        Hard cap on cyclic sweeps.

    Returns
    -------
    w : ndarray, shape (B, n)
        Eigenvalues in descending order.
    v : ndarray, shape (B, n, n)
        Eigenvectors as columns, ordered like ``w``.
    status : ndarray of int, shape (B,)
        Sweeps used per matrix, or -1 where the cap was hit.
    """
    a = np.array(a, dtype=np.complex128, copy=True)
    nb, n = a.shape[0], a.shape[1]
    v = np.zeros_like(a)
    v[:, np.arange(n), np.arange(n)] = 1.0
    status = np.full(nb, -1, dtype=np.int64)
    offdiag = ~np.eye(n, dtype=bool)
    scale = np.minimum(1.0, np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2))))

    for sweep in range(max_sweeps + 1):
        off = np.sqrt(np.sum(np.abs(a[:, offdiag]) ** 2, axis=1))
        # a matrix converged on an earlier sweep has had its polishing sweep
        finished = (status >= 0) | (off == 0.0)
        status[(status < 0) & (off <= tol * scale)] = sweep
        if np.all(finished) or sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[:, p, q]
                ag = np.abs(g)
                active = ag > TINY
                safe = np.where(active, ag, 1.0)
                e = np.where(active, (g.real - 1j * g.imag) / safe, 1.0)
                theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe)
                t = 1.0 / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(theta < 0.0, -t, t)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = np.where(active, t * c, 0.0)
                c = np.where(active, c, 1.0)
                c_ = c[:, None]
                s_ = s[:, None]
                e_ = e[:, None]

                colp = a[:, :, p].copy()
                colq = a[:, :, q]
                a[:, :, p] = c_ * colp - s_ * e_ * colq
                a[:, :, q] = s_ * colp + c_ * e_ * colq
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :]
                a[:, p, :] = c_ * rowp - s_ * np.conj(e_) * rowq
                a[:, q, :] = s_ * rowp + c_ * np.conj(e_) * rowq
                a[active, p, q] = 0.0
                a[active, q, p] = 0.0

                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                v[:, :, p] = c_ * vp - s_ * e_ * vq
                v[:, :, q] = s_ * vp + c_ * e_ * vq

    w = np.real(np.diagonal(a, axis1=1, axis2=2)).copy()
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v, status
