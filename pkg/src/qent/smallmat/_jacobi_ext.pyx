# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled cyclic complex Jacobi eigensolver for stacks of small Hermitian matrices."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, hypot, fabs

cnp.import_array()


cdef inline double complex _conj(double complex z) noexcept nogil:
    return z.real - 1j * z.imag


cdef long _jacobi_one(double complex[:, ::1] a, double complex[:, ::1] v,
                      double[::1] w, double tol, long max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k, p, q
    cdef long sweep, used = -1
    cdef double off, ag, theta, t, c, s, tmp, scale = 0.0
    cdef bint polish = False
    cdef double complex g, e, ec, x, y

    for i in range(n):
        for j in range(n):
            v[i, j] = 1.0 if i == j else 0.0

    for i in range(n):
        for j in range(n):
            scale += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
    scale = sqrt(scale)
    if scale > 1.0:
        scale = 1.0

    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
        if polish or off == 0.0:
            if used < 0:
                used = sweep
            break
        if sqrt(off) <= tol * scale:
            # converged; one more sweep polishes near-degenerate pairs
            used = sweep
            polish = True
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                ag = hypot(g.real, g.imag)
                if ag <= 1e-300:
                    continue
                e = g.real / ag - 1j * (g.imag / ag)
                ec = _conj(e)
                theta = (a[q, q].real - a[p, p].real) / (2.0 * ag)
                t = 1.0 / (fabs(theta) + hypot(theta, 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * e * y
                    a[k, q] = s * x + c * e * y
                for k in range(n):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * ec * y
                    a[q, k] = s * x + c * ec * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    x = v[k, p]
                    y = v[k, q]
                    v[k, p] = c * x - s * e * y
                    v[k, q] = s * x + c * e * y

    for i in range(n):
        w[i] = a[i, i].real
    # insertion sort, descending, carrying eigenvector columns
    for i in range(1, n):
        j = i
        while j > 0 and w[j - 1] < w[j]:
            tmp = w[j - 1]
            w[j - 1] = w[j]
            w[j] = tmp
            for k in range(n):
                x = v[k, j - 1]
                v[k, j - 1] = v[k, j]
                v[k, j] = x
            j -= 1
    return used


def eigh_batch(a_in, double tol, long max_sweeps):
    """Same contract as the numpy fallback: returns ``(w, v, status)``."""
    cdef double complex[:, :, ::1] a = np.array(a_in, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t nb = a.shape[0], n = a.shape[1], b
    w_arr = np.empty((nb, n), dtype=np.float64)
    v_arr = np.empty((nb, n, n), dtype=np.complex128)
    st_arr = np.empty(nb, dtype=np.int64)
    cdef double[:, ::1] w = w_arr
    cdef double complex[:, :, ::1] v = v_arr
    cdef cnp.int64_t[::1] st = st_arr
    with nogil:
        for b in range(nb):
            st[b] = _jacobi_one(a[b], v[b], w[b], tol, max_sweeps)
    return w_arr, v_arr, st_arr
