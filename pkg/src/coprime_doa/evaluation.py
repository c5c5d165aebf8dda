"""Cramér-Rao bound, a grid-MUSIC reference estimator and error metrics."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import kernels
from .array_model import CoprimeGeometry, SourceScenario, steering_matrix
from .exceptions import CoprimeDOAError, EstimationFailure
from .subspace import decompose

TWO_PI = 2.0 * np.pi
EIGENGAP_RTOL = 1e-8


@dataclass(frozen=True)
class CrbResult:
    bounds: np.ndarray
    k: int


@dataclass(frozen=True)
class SpectrumEstimate:
    grid: np.ndarray
    spectrum: np.ndarray
    peaks: np.ndarray


def stochastic_crb(geom: CoprimeGeometry, scenario: SourceScenario, k: int) -> CrbResult:
    """Unconditional (Gaussian-source) CRB on each electrical angle.

    ``CRB = sigma^2/(2K) * inv(Re[(D^H P_A^perp D) .* (P A^H R^-1 A P)^T])``
    with ``D`` the derivative of the steering matrix.
    """
    if scenario.noise_power <= 0:
        raise CoprimeDOAError("CRB requires a positive noise power")
    if k < 1:
        raise CoprimeDOAError("CRB requires K >= 1")
    p = np.asarray(geom.positions, dtype=float)
    a = steering_matrix(geom, scenario.doas)
    deriv = 1j * p[:, None] * a
    gram = a.conj().T @ a
    if np.linalg.cond(gram) > 1e12:
        raise CoprimeDOAError("steering matrix is rank deficient (coincident sources?)")
    size = a.shape[0]
    proj_perp = np.eye(size) - a @ np.linalg.solve(gram, a.conj().T)
    pw = np.diag(scenario.powers)
    sigma2 = scenario.noise_power
    r = a @ pw @ a.conj().T + sigma2 * np.eye(size)
    h = deriv.conj().T @ proj_perp @ deriv
    g = pw @ a.conj().T @ np.linalg.solve(r, a) @ pw
    fim = np.real(h * g.T)
    crb = sigma2 / (2.0 * k) * np.linalg.inv(fim)
    return CrbResult(np.real(np.diag(crb)).copy(), k)


def grid_music(r_hat, geom: CoprimeGeometry, d: int, grid_size: int = 8192) -> SpectrumEstimate:
    """MUSIC pseudo-spectrum of the full coprime array on a uniform grid.

    Peaks are refined by a parabola through the log-spectrum at the three
    grid samples around each local maximum.
    """
    min_grid = 4 * geom.m * geom.n
    if grid_size < min_grid:
        raise CoprimeDOAError(f"grid_size must be >= {min_grid}")
    sub = decompose(r_hat, d)
    trace = float(np.sum(sub.lambda_s) + np.sum(sub.lambda_n))
    if sub.lambda_s[-1] - sub.lambda_n[0] <= EIGENGAP_RTOL * max(trace, np.finfo(float).tiny):
        raise EstimationFailure("no eigengap between signal and noise subspaces")
    step = TWO_PI / grid_size
    grid = -np.pi + np.arange(grid_size) * step
    projector = np.ascontiguousarray(sub.e_n @ sub.e_n.conj().T)
    positions = np.ascontiguousarray(geom.positions, dtype=np.int64)
    spectrum = np.asarray(kernels.music_spectrum(positions, projector, grid))

    left = np.roll(spectrum, 1)
    right = np.roll(spectrum, -1)
    candidates = np.flatnonzero((spectrum > left) & (spectrum >= right))
    candidates = candidates[np.argsort(-spectrum[candidates], kind="stable")]
    chosen = []
    for i in candidates:
        sep = [min(abs(i - j), grid_size - abs(i - j)) for j in chosen]
        if all(s >= 2 for s in sep):
            chosen.append(int(i))
        if len(chosen) == d:
            break
    if len(chosen) < d:
        raise EstimationFailure(f"found {len(chosen)} spectral peaks, need {d}")

    logs = np.log(spectrum)
    peaks = []
    for i in chosen:
        y0, y1, y2 = logs[i - 1], logs[i], logs[(i + 1) % grid_size]
        denom = y0 - 2.0 * y1 + y2
        offset = 0.5 * (y0 - y2) / denom if denom < 0 else 0.0
        offset = float(np.clip(offset, -0.5, 0.5))
        peaks.append(wrap(grid[i] + offset * step))
    return SpectrumEstimate(grid, spectrum, np.sort(np.asarray(peaks)))


def wrap(x):
    """Circular difference convention: wrap to ``(-pi, pi]``."""
    r = -(np.mod(-np.asarray(x, dtype=float) + np.pi, TWO_PI) - np.pi)
    return float(r) if np.ndim(r) == 0 else r


def matched_errors(estimates, truth) -> np.ndarray:
    """Circular errors after matching each trial's estimates to the truth.

    ``estimates`` is ``(trials, D)``; a row containing NaN is a failed trial
    and gets the worst-case error ``pi`` for every source.  Columns of the
    result follow the order of ``truth``.
    """
    truth = np.atleast_1d(np.asarray(truth, dtype=float))
    est = np.asarray(estimates, dtype=float)
    if est.ndim == 1:
        est = est[:, None]
    if est.shape[1] != truth.shape[0]:
        raise CoprimeDOAError("estimate rows must have one entry per source")
    out = np.empty_like(est)
    for t, row in enumerate(est):
        if np.any(~np.isfinite(row)):
            out[t] = np.pi
            continue
        diff = wrap(row[:, None] - truth[None, :])
        ri, ci = linear_sum_assignment(diff ** 2)
        out[t, ci] = diff[ri, ci]
    return out


def mse(estimates, truth) -> np.ndarray:
    """Per-source mean squared circular error over trials."""
    err = matched_errors(estimates, truth)
    return np.mean(err ** 2, axis=0)
