"""Pure numpy fallback for the compiled kernels in ``_core.pyx``."""

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def _wrap_closed_right(x):
    r = x - TWO_PI * math.ceil((x - math.pi) / TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    elif r > math.pi:
        r -= TWO_PI
    return r


def _wrap_closed_left(x):
    r = x - TWO_PI * math.floor((x + math.pi) / TWO_PI)
    if r >= math.pi:
        r -= TWO_PI
    elif r < -math.pi:
        r += TWO_PI
    return r


def project_lifts(rep_n, rep_m, m, n):
    tn = TWO_PI / n
    tm = TWO_PI / m
    best = math.inf
    best_psi, best_k, best_l = 0.0, 0, 0
    for k in range(n):
        a = rep_n + k * tn
        for l in range(m):
            b = rep_m + l * tm
            delta = _wrap_closed_right(a - b)
            cost = 0.5 * delta * delta
            if cost < best:
                best = cost
                best_psi = _wrap_closed_left(b + 0.5 * delta)
                best_k, best_l = k, l
    return best_psi, best, best_k, best_l


def grid_argmin(rep_n, rep_m, m, n, grid_size):
    rep_n = np.ascontiguousarray(rep_n, dtype=np.float64)
    rep_m = np.ascontiguousarray(rep_m, dtype=np.float64)
    if rep_n.shape != rep_m.shape:
        raise ValueError("rep_n and rep_m must have the same length")
    tn = TWO_PI / n
    tm = TWO_PI / m
    grid = -math.pi + np.arange(grid_size) * (TWO_PI / grid_size)
    out = np.empty(rep_n.shape[0], dtype=np.int64)
    for p in range(rep_n.shape[0]):
        x = grid - rep_n[p]
        x -= tn * np.floor(x / tn + 0.5)
        y = grid - rep_m[p]
        y -= tm * np.floor(y / tm + 0.5)
        out[p] = np.argmin(x * x + y * y)
    return out


def music_spectrum(positions, projector, grid):
    a = np.exp(1j * np.outer(np.asarray(positions, dtype=np.float64), grid))
    denom = np.einsum("lg,lc,cg->g", a.conj(), projector, a).real
    return 1.0 / np.maximum(denom, 1e-300)
