"""Combine two folded subarray estimates into unambiguous angles.

A true angle ``psi`` maps to the residue pair ``(psi mod 2pi/N, psi mod
2pi/M)`` inside the rectangle ``[-pi, -pi+2pi/N) x [-pi, -pi+2pi/M)``.  As
``psi`` sweeps ``[-pi, pi)`` the pair traces ``M+N-1`` slope-one segments,
and coprimality makes the map a bijection.  A noisy pair is projected onto
the nearest segment (with wrap-around across the rectangle edges).

Argument order throughout: the residue with period ``2pi/N`` comes first
(``rep_n``), the residue with period ``2pi/M`` second (``rep_m``).
"""

import bisect
import itertools
from dataclasses import dataclass
from math import gcd
from typing import Sequence

import numpy as np

from . import kernels
from .exceptions import CoprimeDOAError, GeometryError
from .mode_estimator import fold_to_fundamental

TWO_PI = 2.0 * np.pi
INTERVAL_TOL = 1e-9
EXHAUSTIVE_MAX_SOURCES = 6


def _check_pair(m, n):
    if m < 2 or n < 2 or m == n or gcd(m, n) != 1:
        raise GeometryError(f"(m={m}, n={n}) is not a valid coprime pair")


@dataclass(frozen=True)
class Segment:
    index: int
    psi_lo: float
    psi_hi: float
    k: int
    l: int


@dataclass(frozen=True)
class SegmentMap:
    m: int
    n: int
    segments: tuple

    @property
    def breakpoints(self):
        return [s.psi_lo for s in self.segments]

    def locate(self, psi: float) -> Segment:
        """Segment whose half-open interval contains ``psi``."""
        i = bisect.bisect_right(self.breakpoints, psi) - 1
        return self.segments[max(i, 0)]

    def residues(self, psi: float):
        """``(rep_n, rep_m)`` of an angle."""
        return residues_of(psi, self.m, self.n)

    def table_rows(self):
        """Lookup-table rows ``(segment_index, psi_lo, psi_hi, k, l)``."""
        return [(s.index, s.psi_lo, s.psi_hi, s.k, s.l) for s in self.segments]

    def format_table(self) -> str:
        header = f"{'segment':>7}  {'psi_lo':>16}  {'psi_hi':>16}  {'k':>3}  {'l':>3}"
        lines = [header]
        for s in self.segments:
            lines.append(f"{s.index:>7}  {s.psi_lo:>16.12g}  {s.psi_hi:>16.12g}"
                         f"  {s.k:>3}  {s.l:>3}")
        return "\n".join(lines)


@dataclass(frozen=True)
class ProjectionResult:
    psi: float
    cost: float
    lifts: tuple


@dataclass(frozen=True)
class PairingResult:
    assignment: tuple
    doas: tuple
    total_cost: float
    strategy: str
    members: tuple = ()


def build_segment_map(m: int, n: int) -> SegmentMap:
    """Enumerate the ``m + n - 1`` segments covering ``[-pi, pi)``.

    Work in units of ``2pi/(m*n)``: breakpoints sit at multiples of ``m``
    (period ``2pi/n``) and of ``n`` (period ``2pi/m``).
    """
    _check_pair(m, n)
    mn = m * n
    cuts = sorted({k * m for k in range(n)} | {l * n for l in range(m)})
    cuts.append(mn)
    segments = []
    for i, (u0, u1) in enumerate(zip(cuts[:-1], cuts[1:])):
        segments.append(Segment(i, -np.pi + TWO_PI * u0 / mn, -np.pi + TWO_PI * u1 / mn,
                                u0 // m, u0 // n))
    return SegmentMap(m, n, tuple(segments))


def residues_of(psi: float, m: int, n: int):
    """Fold an angle into both fundamental intervals."""
    return fold_to_fundamental(n * psi, n), fold_to_fundamental(m * psi, m)


def lifts_are_consistent(k: int, l: int, m: int, n: int) -> bool:
    """Whether alias indices ``(k, l)`` share a segment."""
    c = l * n - k * m
    return -n < c < m


def lifts_from_offset(c: int, m: int, n: int):
    """Solve ``l*n - k*m = c`` with ``0 <= k < n`` and ``0 <= l < m``.

    ``c`` is the segment offset ``(rep_n - rep_m) * m * n / (2 pi)``; valid
    offsets are ``-n < c < m``.
    """
    _check_pair(m, n)
    if not -n < c < m:
        raise CoprimeDOAError(f"offset {c} is not in ({-n}, {m})")
    l = (c * pow(n, -1, m)) % m
    k = (-c * pow(m, -1, n)) % n
    return k, l


def residues_to_psi_crt(k: int, l: int, m: int, n: int) -> float:
    """Start of the segment on which alias indices ``(k, l)`` live."""
    _check_pair(m, n)
    if not (0 <= k < n and 0 <= l < m):
        raise CoprimeDOAError(f"alias indices out of range: k={k}, l={l}")
    if not lifts_are_consistent(k, l, m, n):
        raise CoprimeDOAError(f"(k={k}, l={l}) does not lie on any segment")
    return float(-np.pi + TWO_PI * max(k * m, l * n) / (m * n))


def _check_rep(rep, period, label):
    if not (-np.pi - INTERVAL_TOL <= rep < -np.pi + period + INTERVAL_TOL):
        raise CoprimeDOAError(f"{label}={rep!r} is outside [-pi, -pi + {period!r})")


def project_single(rep_n: float, rep_m: float, m: int, n: int) -> ProjectionResult:
    """Nearest point on the segment set to the measured residue pair."""
    _check_pair(m, n)
    _check_rep(rep_n, TWO_PI / n, "rep_n")
    _check_rep(rep_m, TWO_PI / m, "rep_m")
    psi, cost, k, l = kernels.project_lifts(float(rep_n), float(rep_m), m, n)
    return ProjectionResult(psi, cost, (k, l))


def torus_cost(psi, rep_n, rep_m, m, n):
    """Squared distance between an angle's residues and a measured pair."""
    tn, tm = TWO_PI / n, TWO_PI / m
    x = np.asarray(psi, dtype=float) - rep_n
    y = np.asarray(psi, dtype=float) - rep_m
    x = x - tn * np.round(x / tn)
    y = y - tm * np.round(y / tm)
    return x * x + y * y


def brute_force_project(rep_n, rep_m, m: int, n: int, grid_size: int = 10**6):
    """Grid-search minimiser of :func:`torus_cost`, for validation.

    Returns ``(psi, cost)`` arrays; ``psi`` is the winning grid point.
    """
    _check_pair(m, n)
    rep_n = np.atleast_1d(np.asarray(rep_n, dtype=np.float64))
    rep_m = np.atleast_1d(np.asarray(rep_m, dtype=np.float64))
    idx = kernels.grid_argmin(np.ascontiguousarray(rep_n), np.ascontiguousarray(rep_m),
                              m, n, grid_size)
    psi = -np.pi + np.asarray(idx) * (TWO_PI / grid_size)
    return psi, torus_cost(psi, rep_n, rep_m, m, n)


def pair_and_project(reps_n: Sequence[float], reps_m: Sequence[float], m: int, n: int,
                     strategy: str = "auto") -> PairingResult:
    """Match each ``rep_n`` with one ``rep_m`` and project every pair.

    ``exhaustive`` scores all ``D!`` assignments by total projection cost;
    ``greedy`` repeatedly takes the cheapest unused pair.  ``auto`` picks
    exhaustive up to six sources.
    """
    d = len(reps_n)
    if len(reps_m) != d:
        raise CoprimeDOAError(f"estimate lists differ in length ({d} vs {len(reps_m)})")
    if d == 0:
        raise CoprimeDOAError("no estimates to pair")
    if strategy == "auto":
        strategy = "exhaustive" if d <= EXHAUSTIVE_MAX_SOURCES else "greedy"
    table = [[project_single(a, b, m, n) for b in reps_m] for a in reps_n]
    cost = np.array([[p.cost for p in row] for row in table])

    if strategy == "exhaustive":
        best, best_perm = np.inf, None
        for perm in itertools.permutations(range(d)):
            total = sum(cost[i, j] for i, j in enumerate(perm))
            if total < best:
                best, best_perm = total, perm
        assignment = best_perm
    elif strategy == "greedy":
        free_i, free_j = set(range(d)), set(range(d))
        chosen = {}
        order = sorted(((cost[i, j], i, j) for i in range(d) for j in range(d)))
        for _, i, j in order:
            if i in free_i and j in free_j:
                chosen[i] = j
                free_i.discard(i)
                free_j.discard(j)
        assignment = tuple(chosen[i] for i in range(d))
    else:
        raise CoprimeDOAError(f"unknown pairing strategy {strategy!r}")

    members = tuple(table[i][j] for i, j in enumerate(assignment))
    return PairingResult(tuple(assignment), tuple(p.psi for p in members),
                         float(sum(p.cost for p in members)), strategy, members)
