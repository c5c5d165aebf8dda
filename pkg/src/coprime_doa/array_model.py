"""Coprime array geometry, steering vectors and snapshot synthesis.

All angles are electrical angles ``psi`` in radians: sensor ``l`` sits at
``p_l`` half-wavelengths from the reference and sees phase ``p_l * psi``.
"""

from dataclasses import dataclass, field
from math import gcd
from typing import Optional, Sequence, Union

import numpy as np

from .exceptions import CoprimeDOAError, GeometryError

SubarraySelector = Optional[int]


@dataclass(frozen=True)
class CoprimeGeometry:
    """Two uniform linear subarrays sharing the sensor at the origin.

    Subarray 1 has ``n`` sensors with step ``m``; subarray 2 has ``m``
    sensors with step ``n``.  ``positions`` lists subarray 1 first, then the
    non-shared sensors of subarray 2.
    """

    m: int
    n: int
    positions: tuple = field(repr=False)
    subarray1_idx: tuple = field(repr=False)
    subarray2_idx: tuple = field(repr=False)

    @property
    def size(self):
        return len(self.positions)

    def subarray_indices(self, which: SubarraySelector) -> np.ndarray:
        """Row indices for ``which`` (1, 2 or None for the full array)."""
        if which is None:
            return np.arange(self.size)
        if which == 1:
            return np.asarray(self.subarray1_idx)
        if which == 2:
            return np.asarray(self.subarray2_idx)
        raise GeometryError(f"subarray selector must be 1, 2 or None, got {which!r}")

    def subarray_spacing(self, which: int) -> int:
        """Inter-element step of a subarray in half-wavelengths."""
        if which == 1:
            return self.m
        if which == 2:
            return self.n
        raise GeometryError(f"subarray selector must be 1 or 2, got {which!r}")

    def subarray_positions(self, which: SubarraySelector) -> np.ndarray:
        return np.asarray(self.positions, dtype=np.int64)[self.subarray_indices(which)]


def make_geometry(m: int, n: int) -> CoprimeGeometry:
    """Build the coprime array for spacing multipliers ``m`` and ``n``.

    >>> make_geometry(3, 2).positions
    (0, 3, 2, 4)
    """
    if int(m) != m or int(n) != n:
        raise GeometryError(f"m and n must be integers, got m={m!r}, n={n!r}")
    m, n = int(m), int(n)
    if m < 2 or n < 2:
        raise GeometryError(f"m and n must both be >= 2, got m={m}, n={n}")
    if m == n:
        raise GeometryError(f"m and n must differ, got m=n={m}")
    if gcd(m, n) != 1:
        raise GeometryError(f"m={m} and n={n} are not coprime (gcd={gcd(m, n)})")
    sub1 = [i * m for i in range(n)]
    sub2_extra = [i * n for i in range(1, m)]
    positions = tuple(sub1 + sub2_extra)
    idx1 = tuple(range(n))
    idx2 = (0,) + tuple(range(n, n + m - 1))
    return CoprimeGeometry(m, n, positions, idx1, idx2)


def steering_vector(geom: CoprimeGeometry, psi: float,
                    which: SubarraySelector = None) -> np.ndarray:
    """Array response ``exp(1j * p_l * psi)`` over the selected sensors."""
    p = geom.subarray_positions(which)
    return np.exp(1j * p * float(psi))


def steering_matrix(geom: CoprimeGeometry, doas: Sequence[float],
                    which: SubarraySelector = None) -> np.ndarray:
    """Columns are steering vectors for each angle in ``doas``."""
    p = geom.subarray_positions(which).astype(np.float64)
    return np.exp(1j * np.outer(p, np.asarray(doas, dtype=np.float64)))


@dataclass(frozen=True)
class SourceScenario:
    doas: tuple
    powers: tuple
    noise_power: float

    def __post_init__(self):
        doas = tuple(float(x) for x in np.atleast_1d(self.doas))
        powers = tuple(float(x) for x in np.atleast_1d(self.powers))
        object.__setattr__(self, "doas", doas)
        object.__setattr__(self, "powers", powers)
        if len(doas) < 1:
            raise CoprimeDOAError("at least one source is required")
        if len(powers) != len(doas):
            raise CoprimeDOAError("powers and doas must have the same length")
        if len(set(doas)) != len(doas):
            raise CoprimeDOAError("source angles must be distinct")
        if any(not (-np.pi <= d < np.pi) for d in doas):
            raise CoprimeDOAError("source angles must lie in [-pi, pi)")
        if any(p <= 0 for p in powers):
            raise CoprimeDOAError("source powers must be strictly positive")
        if self.noise_power < 0:
            raise CoprimeDOAError("noise power must be non-negative")

    @property
    def num_sources(self):
        return len(self.doas)

    @classmethod
    def from_snr(cls, doas, snr_db: float):
        """Unit-power sources with ``noise_power = 10**(-snr_db/10)``."""
        doas = tuple(np.atleast_1d(doas).tolist())
        return cls(doas, (1.0,) * len(doas), snr_to_noise_power(snr_db))


def snr_to_noise_power(snr_db: float) -> float:
    return float(10.0 ** (-float(snr_db) / 10.0))


@dataclass(frozen=True)
class SnapshotSet:
    """``L x K`` complex observations; column ``k`` is one snapshot."""

    data: np.ndarray

    @property
    def k(self):
        return self.data.shape[1]

    def rows(self, idx) -> "SnapshotSet":
        return SnapshotSet(self.data[np.asarray(idx)])

    def to_csv(self, path_or_buf):
        """One row per sensor, cells formatted as ``re+imj``."""
        lines = [",".join(f"{z.real:.12g}{z.imag:+.12g}j" for z in row)
                 for row in self.data]
        text = "\n".join(lines) + "\n"
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(text)


def complex_normal(rng: np.random.Generator, shape, variance=1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with the given variance.

    ``variance`` broadcasts against ``shape`` (per-row variances are allowed).
    """
    scale = np.sqrt(np.asarray(variance, dtype=np.float64) / 2.0)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return scale * (re + 1j * im)


def synthesize_snapshots(geom: CoprimeGeometry, scenario: SourceScenario, k: int,
                         seed: Union[int, np.random.Generator, np.random.SeedSequence]
                         ) -> SnapshotSet:
    """Draw ``k`` snapshots of ``y = A x + w`` with Gaussian sources and noise."""
    if k < 1:
        raise CoprimeDOAError(f"snapshot count must be >= 1, got {k}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    a = steering_matrix(geom, scenario.doas)
    powers = np.asarray(scenario.powers)[:, None]
    x = complex_normal(rng, (scenario.num_sources, k), powers)
    w = complex_normal(rng, (geom.size, k), scenario.noise_power)
    return SnapshotSet(a @ x + w)


def sample_covariance(snaps: Union[SnapshotSet, np.ndarray]) -> np.ndarray:
    """``(1/K) sum_k y(k) y(k)^H``, symmetrised to be exactly Hermitian."""
    y = snaps.data if isinstance(snaps, SnapshotSet) else np.asarray(snaps)
    if y.ndim != 2 or y.shape[1] < 1:
        raise CoprimeDOAError("snapshots must be an L x K matrix with K >= 1")
    r = (y @ y.conj().T) / y.shape[1]
    return 0.5 * (r + r.conj().T)


def model_covariance(geom: CoprimeGeometry, scenario: SourceScenario,
                     which: SubarraySelector = None) -> np.ndarray:
    """Exact covariance ``A P A^H + sigma^2 I``."""
    a = steering_matrix(geom, scenario.doas, which)
    r = (a * np.asarray(scenario.powers)) @ a.conj().T
    return r + scenario.noise_power * np.eye(a.shape[0])
