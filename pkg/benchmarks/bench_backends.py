"""Benchmark the numba backend against the pure-numpy/Python fallback.

The backend is chosen at import time from the SODSIM_DISABLE_NUMBA
environment variable, so each configuration runs in its own subprocess.

Usage: python3 benchmarks/bench_backends.py [--n 2000] [--reps 5]
"""

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json
import sys
import time

import numpy as np

from sodsim._accel import NUMBA_ENABLED
from sodsim.core import RngHandle
from sodsim.experiments import grid_minimize_theta
from sodsim.isotonic import pava

n, reps = json.loads(sys.argv[1])
rng = RngHandle(2024, 0).generator()

# warm-up triggers JIT compilation so it is excluded from the timings
pava(rng.standard_normal(16))
grid_minimize_theta(rng.standard_normal((16, 2)), rng.standard_normal(16), 0.1)

v = rng.standard_normal(n)
t0 = time.perf_counter()
for _ in range(reps * 50):
    fitted = pava(v)
pava_s = (time.perf_counter() - t0) / (reps * 50)

X = rng.standard_normal((n, 2))
y = X @ np.array([0.6, 0.8]) + 0.5 * rng.standard_normal(n)
t0 = time.perf_counter()
for _ in range(reps):
    theta, u = grid_minimize_theta(X, y, 0.001)
grid_s = (time.perf_counter() - t0) / reps

print(json.dumps({
    "numba": NUMBA_ENABLED,
    "pava_s": pava_s,
    "grid_s": grid_s,
    "pava_checksum": float(fitted.sum()),
    "theta_hat": theta,
}))
"""


def run_backend(disable_numba: bool, n: int, reps: int) -> dict:
    env = dict(os.environ, SODSIM_DISABLE_NUMBA="1" if disable_numba else "0")
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, json.dumps([n, reps])],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000, help="problem size")
    ap.add_argument("--reps", type=int, default=5, help="timed repetitions")
    args = ap.parse_args()

    numba = run_backend(False, args.n, args.reps)
    fallback = run_backend(True, args.n, args.reps)
    if not numba["numba"]:
        print("warning: numba unavailable; both runs used the fallback")
    if numba["pava_checksum"] != fallback["pava_checksum"] or \
            numba["theta_hat"] != fallback["theta_hat"]:
        print("ERROR: backends disagree on results")
        return 1

    print(f"problem size n={args.n}, theta-grid 1571 angles")
    print(f"{'kernel':<14}{'numba':>12}{'fallback':>12}{'speedup':>10}")
    for label, key in (("pava", "pava_s"), ("theta-grid", "grid_s")):
        a, b = numba[key], fallback[key]
        print(f"{label:<14}{a:>11.4g}s{b:>11.4g}s{b / a:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
