# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

Every function here has a numpy twin in :mod:`coprime_doa._pure` with the
same signature and the same floating-point recipe.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, ceil, cos, sin, M_PI, INFINITY

cnp.import_array()

cdef double TWO_PI = 2.0 * M_PI


cdef inline double _wrap_closed_right(double x) nogil:
    # (-pi, pi]
    cdef double r = x - TWO_PI * ceil((x - M_PI) / TWO_PI)
    if r <= -M_PI:
        r += TWO_PI
    elif r > M_PI:
        r -= TWO_PI
    return r


cdef inline double _wrap_closed_left(double x) nogil:
    # [-pi, pi)
    cdef double r = x - TWO_PI * floor((x + M_PI) / TWO_PI)
    if r >= M_PI:
        r -= TWO_PI
    elif r < -M_PI:
        r += TWO_PI
    return r


cdef inline double _centered(double x, double period) nogil:
    # representative of x modulo period in [-period/2, period/2)
    return x - period * floor(x / period + 0.5)


def project_lifts(double rep_n, double rep_m, int m, int n):
    """Nearest-segment projection by exhaustive lift enumeration.

    Returns ``(psi, cost, k, l)``.
    """
    cdef double tn = TWO_PI / n
    cdef double tm = TWO_PI / m
    cdef double best = INFINITY
    cdef double best_psi = 0.0
    cdef int best_k = 0, best_l = 0
    cdef int k, l
    cdef double a, b, delta, cost
    for k in range(n):
        a = rep_n + k * tn
        for l in range(m):
            b = rep_m + l * tm
            delta = _wrap_closed_right(a - b)
            cost = 0.5 * delta * delta
            if cost < best:
                best = cost
                best_psi = _wrap_closed_left(b + 0.5 * delta)
                best_k = k
                best_l = l
    return best_psi, best, best_k, best_l


def grid_argmin(double[::1] rep_n, double[::1] rep_m, int m, int n,
                Py_ssize_t grid_size):
    """Brute-force minimiser of the two-period residue cost on a uniform grid.

    The grid is ``-pi + i * 2*pi/grid_size`` for ``i < grid_size``; the cost
    at a grid point is ``d_n**2 + d_m**2`` with ``d_T`` the distance to the
    nearest alias of the residue modulo ``2*pi/T``.  Returns the winning grid
    index for every pair.
    """
    cdef Py_ssize_t npairs = rep_n.shape[0]
    if rep_m.shape[0] != npairs:
        raise ValueError("rep_n and rep_m must have the same length")
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(npairs, dtype=np.int64)
    cdef double tn = TWO_PI / n
    cdef double tm = TWO_PI / m
    cdef double hn = 0.5 * tn
    cdef double hm = 0.5 * tm
    cdef double step = TWO_PI / grid_size
    cdef Py_ssize_t block = 4096
    cdef Py_ssize_t p, start, stop, i, best_i
    cdef double x, y, c, best, psi0
    with nogil:
        for p in range(npairs):
            best = INFINITY
            best_i = 0
            start = 0
            while start < grid_size:
                # resynchronise exactly at each block to bound drift
                psi0 = -M_PI + start * step
                x = _centered(psi0 - rep_n[p], tn)
                y = _centered(psi0 - rep_m[p], tm)
                stop = start + block
                if stop > grid_size:
                    stop = grid_size
                for i in range(start, stop):
                    c = x * x + y * y
                    if c < best:
                        best = c
                        best_i = i
                    x += step
                    if x >= hn:
                        x -= tn
                    y += step
                    if y >= hm:
                        y -= tm
                start = stop
            out[p] = best_i
    return out


def music_spectrum(cnp.int64_t[::1] positions, double complex[:, ::1] projector,
                   double[::1] grid):
    """Evaluate ``1 / (a^H Q a)`` for each grid angle.

    ``projector`` is the noise-subspace projector ``Q = E_n E_n^H``.
    """
    cdef Py_ssize_t nl = positions.shape[0]
    cdef Py_ssize_t ng = grid.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(ng, dtype=np.float64)
    cdef double[::1] cr = np.empty(nl)
    cdef double[::1] ci = np.empty(nl)
    cdef Py_ssize_t g, r, c
    cdef double acc, vr, vi, qr, qi, ph
    with nogil:
        for g in range(ng):
            for r in range(nl):
                ph = positions[r] * grid[g]
                cr[r] = cos(ph)
                ci[r] = sin(ph)
            acc = 0.0
            for r in range(nl):
                vr = 0.0
                vi = 0.0
                for c in range(nl):
                    qr = projector[r, c].real
                    qi = projector[r, c].imag
                    vr = vr + qr * cr[c] - qi * ci[c]
                    vi = vi + qr * ci[c] + qi * cr[c]
                # conj(a_r) * v_r, real part
                acc = acc + cr[r] * vr + ci[r] * vi
            if acc < 1e-300:
                acc = 1e-300
            out[g] = 1.0 / acc
    return out
