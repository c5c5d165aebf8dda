"""Compare the compiled and pure-numpy kernel backends.

    python benchmarks/bench_kernels.py [--quick]

Kernel timings call each backend directly.  The end-to-end row runs a short
SNR sweep in a subprocess per backend, since the active backend is fixed at
import time.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from coprime_doa import kernels

M, N = 5, 7


def timeit(fn, repeat=3):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_project(mod, count):
    rng = np.random.default_rng(0)
    rn = -np.pi + rng.random(count) * 2 * np.pi / N
    rm = -np.pi + rng.random(count) * 2 * np.pi / M
    return timeit(lambda: [mod.project_lifts(a, b, M, N) for a, b in zip(rn, rm)])


def bench_grid(mod, pairs, grid):
    rng = np.random.default_rng(1)
    rn = -np.pi + rng.random(pairs) * 2 * np.pi / N
    rm = -np.pi + rng.random(pairs) * 2 * np.pi / M
    return timeit(lambda: mod.grid_argmin(rn, rm, M, N, grid), repeat=1)


def bench_music(mod, grid):
    rng = np.random.default_rng(2)
    x = rng.standard_normal((11, 10)) + 1j * rng.standard_normal((11, 10))
    q, _ = np.linalg.qr(x)
    proj = np.ascontiguousarray(q @ q.conj().T)
    pos = np.array([0, 5, 10, 15, 20, 25, 30, 7, 14, 21, 28], dtype=np.int64)
    g = np.linspace(-np.pi, np.pi, grid, endpoint=False)
    return timeit(lambda: mod.music_spectrum(pos, proj, g))


def bench_sweep(pure, trials):
    env = dict(os.environ)
    env.pop("COPRIME_DOA_PURE", None)
    if pure:
        env["COPRIME_DOA_PURE"] = "1"
    code = ("import time; from coprime_doa.sim import ExperimentConfig, run_sweep;"
            f"c = ExperimentConfig(snr_db=(0.0, 10.0), trials={trials}, estimator='{{}}');"
            "run_sweep(ExperimentConfig(trials=2, estimator=c.estimator));"
            "t = time.perf_counter(); run_sweep(c); print(time.perf_counter() - t)")
    out = {}
    for est in ("coprime-mode", "grid-music"):
        res = subprocess.run([sys.executable, "-c", code.format(est)], env=env,
                             capture_output=True, text=True, check=True)
        out[est] = float(res.stdout.strip())
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()
    scale = 0.1 if args.quick else 1.0
    n_proj = int(20_000 * scale)
    n_pairs = max(2, int(20 * scale))
    n_music = 10_000
    trials = max(10, int(200 * scale))

    backends = kernels.available_backends()
    rows = []
    for name in backends:
        mod = kernels.get_backend(name)
        rows.append((name,
                     bench_project(mod, n_proj),
                     bench_grid(mod, n_pairs, 10**6),
                     bench_music(mod, n_music)))
    print(f"{'backend':<10}{'project_lifts':>18}{'grid_argmin':>18}{'music_spectrum':>18}")
    print(f"{'':<10}{f'({n_proj} calls)':>18}{f'({n_pairs}x1e6 grid)':>18}{f'({n_music} pts)':>18}")
    for name, a, b, c in rows:
        print(f"{name:<10}{a:>17.4f}s{b:>17.4f}s{c:>17.4f}s")
    if len(rows) == 2:
        ratios = [p / c for c, p in zip(rows[0][1:], rows[1][1:])]
        print(f"{'speedup':<10}" + "".join(f"{r:>17.1f}x" for r in ratios))

    print(f"\nend-to-end sweep, 2 SNR points x {trials} trials")
    for name in backends:
        t = bench_sweep(name == "pure", trials)
        print(f"{name:<10}" + "".join(f"{k:>14}: {v:7.3f}s" for k, v in t.items()))


if __name__ == "__main__":
    main()
