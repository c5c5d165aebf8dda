"""Command-line entry point: ``coprime-doa {simulate,segments,project,snapshots}``."""

import argparse
import sys

import numpy as np

from .array_model import SourceScenario, make_geometry, synthesize_snapshots
from .disambiguator import build_segment_map, project_single
from .exceptions import CoprimeDOAError
from .sim import (ESTIMATORS, ExperimentConfig, emit_outputs, parse_angle,
                  parse_angles, parse_sweep, run_summary, run_sweep, segment_csv,
                  sweep_csv)

# config-file keys accepted by `simulate`, mapped to their parsers
_SIM_KEYS = {
    "m": int,
    "n": int,
    "doas": parse_angles,
    "snapshots": int,
    "snr_db": parse_sweep,
    "k_sweep": lambda s: parse_sweep(s, int),
    "trials": int,
    "seed": int,
    "estimator": str,
    "strategy": str,
    "iterations": int,
    "music_grid": int,
    "out": str,
    "segments_out": str,
    "workers": int,
}


def read_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CoprimeDOAError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _SIM_KEYS:
                raise CoprimeDOAError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def _add_geometry(p):
    p.add_argument("--m", type=int, default=None,
                   help="step of subarray 1 in half-wavelengths (default 5)")
    p.add_argument("--n", type=int, default=None,
                   help="step of subarray 2 in half-wavelengths (default 7)")


def build_parser():
    parser = argparse.ArgumentParser(prog="coprime-doa",
                                     description="Search-free DOA estimation for coprime arrays.")
    parser.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo MSE sweep over SNR or snapshots")
    _add_geometry(sim)
    sim.add_argument("--config", help="flat key = value file; flags override it")
    sim.add_argument("--doas", help='comma-separated angles, e.g. "0.1pi,-0.3pi"')
    sim.add_argument("--snapshots", help="snapshot count K for an SNR sweep")
    sim.add_argument("--snr-db", dest="snr_db", help="start:step:stop (inclusive) or list")
    sim.add_argument("--k-sweep", dest="k_sweep", help="snapshot counts, list or start:step:stop")
    sim.add_argument("--trials")
    sim.add_argument("--seed")
    sim.add_argument("--estimator", choices=ESTIMATORS)
    sim.add_argument("--strategy", choices=("auto", "exhaustive", "greedy"))
    sim.add_argument("--iterations")
    sim.add_argument("--music-grid", dest="music_grid")
    sim.add_argument("--workers", help="worker processes (results do not depend on this)")
    sim.add_argument("--out", help="sweep CSV path (stdout if omitted)")
    sim.add_argument("--segments-out", dest="segments_out", help="also write the segment table CSV")

    seg = sub.add_parser("segments", help="print the segment lookup table")
    _add_geometry(seg)
    seg.add_argument("--out", help="write the table as CSV instead of aligned text")

    proj = sub.add_parser("project", help="disambiguate one residue pair")
    proj.add_argument("rep1", help="residue modulo 2pi/N, in [-pi, -pi + 2pi/N)")
    proj.add_argument("rep2", help="residue modulo 2pi/M, in [-pi, -pi + 2pi/M)")
    _add_geometry(proj)

    snap = sub.add_parser("snapshots", help="dump one synthetic snapshot matrix as CSV")
    _add_geometry(snap)
    snap.add_argument("--doas", default="0.1pi")
    snap.add_argument("--snapshots", type=int, default=100)
    snap.add_argument("--snr-db", dest="snr_db", type=float, default=0.0)
    snap.add_argument("--seed", type=int, default=0)
    snap.add_argument("--out")
    return parser


def _geometry_args(args):
    return (5 if args.m is None else args.m), (7 if args.n is None else args.n)


def _simulate(args):
    raw = read_config(args.config) if args.config else {}
    for key in _SIM_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    parsed = {k: _SIM_KEYS[k](v) if isinstance(v, str) and _SIM_KEYS[k] is not str else v
              for k, v in raw.items()}
    out = parsed.pop("out", None)
    segments_out = parsed.pop("segments_out", None)
    workers = int(parsed.pop("workers", 1))
    config = ExperimentConfig(**parsed)
    result = run_sweep(config, workers=workers)
    if out:
        for path in emit_outputs(result, out, segments_out):
            print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(sweep_csv(result))
        sys.stderr.write(run_summary(result))
    return 0


def _segments(args):
    m, n = _geometry_args(args)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(segment_csv(m, n))
    else:
        print(build_segment_map(m, n).format_table())
    return 0


def _project(args):
    m, n = _geometry_args(args)
    res = project_single(parse_angle(args.rep1), parse_angle(args.rep2), m, n)
    print(f"psi   = {res.psi:.12g}  ({res.psi / np.pi:.12g} pi)")
    print(f"cost  = {res.cost:.12g}")
    print(f"lifts = k={res.lifts[0]}, l={res.lifts[1]}")
    return 0


def _snapshots(args):
    m, n = _geometry_args(args)
    geom = make_geometry(m, n)
    scenario = SourceScenario.from_snr(parse_angles(args.doas), args.snr_db)
    snaps = synthesize_snapshots(geom, scenario, args.snapshots, args.seed)
    snaps.to_csv(args.out if args.out else sys.stdout)
    return 0


_VALUE_FLAGS = ("--snr-db", "--doas", "--k-sweep")


def _join_negative_values(argv):
    # argparse would read "-20:4:20" or "-0.1pi" as an option
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_negative_values(argv))
    handler = {"simulate": _simulate, "segments": _segments,
               "project": _project, "snapshots": _snapshots}[args.command]
    try:
        return handler(args)
    except (CoprimeDOAError, OSError) as exc:
        print(f"coprime-doa: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
