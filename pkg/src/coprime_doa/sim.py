"""Monte Carlo sweeps over SNR or snapshot count."""

import csv
import io
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .array_model import (SourceScenario, make_geometry, sample_covariance,
                          synthesize_snapshots)
from .disambiguator import build_segment_map, pair_and_project
from .evaluation import grid_music, matched_errors, stochastic_crb
from .exceptions import CoprimeDOAError
from .mode_estimator import estimate_subarray

CSV_HEADER = ["sweep_axis", "sweep_value", "source_index", "mse", "crb",
              "gross_error_rate", "trials"]
ESTIMATORS = ("coprime-mode", "grid-music")

_ANGLE_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*(\*?\s*pi)?\s*$")


def parse_angle(text: str) -> float:
    """Parse ``"0.1pi"``, ``"-pi"``, ``"0.25*pi"`` or a plain radian value."""
    s = str(text).strip().lower()
    neg = s.startswith("-") and s[1:].strip().startswith("pi")
    if neg:
        s = s[1:]
    match = _ANGLE_RE.match(s)
    if not match or (match.group(1) is None and match.group(2) is None):
        raise CoprimeDOAError(f"cannot parse angle {text!r}")
    value = float(match.group(1)) if match.group(1) is not None else 1.0
    if match.group(2):
        value *= np.pi
    return -value if neg else value


def parse_angles(text) -> Tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(float(x) if not isinstance(x, str) else parse_angle(x) for x in text)
    return tuple(parse_angle(part) for part in str(text).split(",") if part.strip())


def parse_sweep(text, kind=float) -> Tuple:
    """``"start:step:stop"`` (inclusive) or a comma-separated list."""
    if isinstance(text, (list, tuple)):
        return tuple(kind(x) for x in text)
    s = str(text).strip()
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise CoprimeDOAError(f"sweep must be start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step == 0 or (stop - start) * step < 0:
            raise CoprimeDOAError(f"sweep {text!r} does not reach its stop value")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        values = [round(start + i * step, 12) for i in range(count)]
        return tuple(kind(v) for v in values)
    return tuple(kind(float(p)) for p in s.split(",") if p.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: either over ``snr_db`` (fixed ``snapshots``) or over
    ``k_sweep`` (fixed single ``snr_db``)."""

    m: int = 5
    n: int = 7
    doas: tuple = (0.1 * np.pi,)
    snapshots: int = 100
    snr_db: tuple = (-20.0,)
    k_sweep: Optional[tuple] = None
    trials: int = 100
    seed: int = 0
    estimator: str = "coprime-mode"
    strategy: str = "auto"
    iterations: int = 2
    music_grid: int = 8192

    def __post_init__(self):
        object.__setattr__(self, "doas", tuple(float(x) for x in self.doas))
        object.__setattr__(self, "snr_db", tuple(float(x) for x in np.atleast_1d(self.snr_db)))
        if self.k_sweep is not None:
            object.__setattr__(self, "k_sweep", tuple(int(x) for x in self.k_sweep))
            if len(self.snr_db) != 1:
                raise CoprimeDOAError("a snapshot sweep needs exactly one SNR value")
            if any(k < 1 for k in self.k_sweep):
                raise CoprimeDOAError("snapshot counts must be >= 1")
        if self.trials < 1:
            raise CoprimeDOAError("trials must be >= 1")
        if self.snapshots < 1:
            raise CoprimeDOAError("snapshots must be >= 1")
        if self.seed < 0:
            raise CoprimeDOAError("seed must be non-negative")
        if self.estimator not in ESTIMATORS:
            raise CoprimeDOAError(f"estimator must be one of {ESTIMATORS}")
        make_geometry(self.m, self.n)
        SourceScenario(self.doas, (1.0,) * len(self.doas), 1.0)

    @property
    def sweep_axis(self) -> str:
        return "k" if self.k_sweep is not None else "snr_db"

    @property
    def sweep_values(self) -> tuple:
        return self.k_sweep if self.k_sweep is not None else self.snr_db

    def operating_point(self, sweep_value) -> Tuple[float, int]:
        """``(snr_db, K)`` for one sweep value."""
        if self.k_sweep is not None:
            return self.snr_db[0], int(sweep_value)
        return float(sweep_value), self.snapshots

    @property
    def gross_threshold(self) -> float:
        return np.pi / max(self.m, self.n)


@dataclass
class SweepPoint:
    sweep_value: float
    mse: np.ndarray
    crb: np.ndarray
    gross_error_rate: float
    trials: int
    failures: int
    wall_time: float
    estimates: np.ndarray = field(repr=False)


@dataclass
class SweepResult:
    config: ExperimentConfig
    points: List[SweepPoint]

    @property
    def wall_time(self):
        return sum(p.wall_time for p in self.points)


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent PCG64 stream for one trial.

    The stream depends only on ``(seed, trial_index)``, so a trial sees the
    same underlying draws at every sweep point.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial_index)]))


def estimate_coprime(snaps, geom, d, strategy="auto", iterations=2):
    """Subarray MODE on both subarrays followed by pairing and projection."""
    reps_m = estimate_subarray(snaps, geom, 1, d, iterations).reps
    reps_n = estimate_subarray(snaps, geom, 2, d, iterations).reps
    return pair_and_project(reps_n, reps_m, geom.m, geom.n, strategy)


def run_trial(config: ExperimentConfig, sweep_value, trial_index: int) -> np.ndarray:
    """Angles estimated in one trial, sorted; all-NaN if the estimator failed."""
    geom = make_geometry(config.m, config.n)
    snr_db, k = config.operating_point(sweep_value)
    scenario = SourceScenario.from_snr(config.doas, snr_db)
    d = scenario.num_sources
    snaps = synthesize_snapshots(geom, scenario, k, trial_rng(config.seed, trial_index))
    try:
        if config.estimator == "coprime-mode":
            doas = estimate_coprime(snaps, geom, d, config.strategy, config.iterations).doas
        else:
            doas = grid_music(sample_covariance(snaps), geom, d, config.music_grid).peaks
    except (CoprimeDOAError, np.linalg.LinAlgError):
        return np.full(d, np.nan)
    return np.sort(np.asarray(doas, dtype=float))


def _run_chunk(config, sweep_value, indices):
    return [run_trial(config, sweep_value, i) for i in indices]


def run_point(config: ExperimentConfig, sweep_value, workers: int = 1) -> SweepPoint:
    start = time.perf_counter()
    indices = list(range(config.trials))
    if workers > 1:
        chunks = [indices[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [config] * workers,
                                  [sweep_value] * workers, chunks))
        rows = [None] * config.trials
        for chunk, part in zip(chunks, parts):
            for i, row in zip(chunk, part):
                rows[i] = row
    else:
        rows = _run_chunk(config, sweep_value, indices)
    estimates = np.vstack(rows)
    truth = np.asarray(config.doas)
    errors = matched_errors(estimates, truth)
    failures = int(np.sum(np.any(~np.isfinite(estimates), axis=1)))
    gross = float(np.mean(np.any(np.abs(errors) > config.gross_threshold, axis=1)))
    snr_db, k = config.operating_point(sweep_value)
    scenario = SourceScenario.from_snr(config.doas, snr_db)
    crb = stochastic_crb(make_geometry(config.m, config.n), scenario, k).bounds
    return SweepPoint(sweep_value, np.mean(errors ** 2, axis=0), crb, gross,
                      config.trials, failures, time.perf_counter() - start, estimates)


def run_sweep(config: ExperimentConfig, workers: int = 1) -> SweepResult:
    """Run every sweep point in ascending order of the swept quantity."""
    values = sorted(config.sweep_values)
    return SweepResult(config, [run_point(config, v, workers) for v in values])


def _fmt(x) -> str:
    return format(float(x), ".12g")


def sweep_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    axis = result.config.sweep_axis
    for point in result.points:
        for s in range(point.mse.shape[0]):
            writer.writerow([axis, _fmt(point.sweep_value), s, _fmt(point.mse[s]),
                             _fmt(point.crb[s]), _fmt(point.gross_error_rate), point.trials])
    return buf.getvalue()


def segment_csv(m: int, n: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["segment_index", "psi_lo", "psi_hi", "k", "l"])
    for idx, lo, hi, k, l in build_segment_map(m, n).table_rows():
        writer.writerow([idx, _fmt(lo), _fmt(hi), k, l])
    return buf.getvalue()


def run_summary(result: SweepResult) -> str:
    cfg = result.config
    lines = ["# coprime DOA sweep"]
    for key, value in asdict(cfg).items():
        lines.append(f"{key} = {value}")
    lines.append("")
    lines.append(f"{cfg.sweep_axis:>10}  {'mse/crb':>12}  {'gross':>8}  {'failed':>6}  {'seconds':>8}")
    for p in result.points:
        ratio = float(np.max(p.mse / p.crb))
        lines.append(f"{_fmt(p.sweep_value):>10}  {ratio:>12.4g}  {p.gross_error_rate:>8.4f}"
                     f"  {p.failures:>6d}  {p.wall_time:>8.3f}")
    lines.append("")
    lines.append(f"total wall time: {result.wall_time:.3f} s")
    return "\n".join(lines) + "\n"


def emit_outputs(result: SweepResult, out_path, segments_path=None, summary_path=None):
    """Write the sweep CSV, optional segment table and a text summary.

    Returns the list of paths written.
    """
    written = []
    with open(out_path, "w") as fh:
        fh.write(sweep_csv(result))
    written.append(str(out_path))
    if segments_path is not None:
        with open(segments_path, "w") as fh:
            fh.write(segment_csv(result.config.m, result.config.n))
        written.append(str(segments_path))
    if summary_path is None:
        summary_path = f"{out_path}.summary.txt"
    with open(summary_path, "w") as fh:
        fh.write(run_summary(result))
    written.append(str(summary_path))
    return written
