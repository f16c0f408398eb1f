"""Compare the numba kernels with their pure Python versions.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--end-to-end [--config NAME]]

Kernel timings call each compiled function and its ``py_func``.  With
``--end-to-end`` a master run (default Bianchi -15) is timed twice in subprocesses,
once with KLEINIAN_DISABLE_NUMBA=1.
"""
import argparse
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from kleinian import _accel, _kernels as K

ROOT = Path(__file__).resolve().parents[1]


def _time(fn, args, repeat):
    fn(*args)  # warm up (triggers compilation)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def cases(rng):
    A = rng.normal(size=(8, 8))
    G = A @ A.T + np.eye(8)
    q, _ = K.fp_decompose(G)
    mats = rng.normal(size=(60, 2, 2)) + 1j * rng.normal(size=(60, 2, 2))
    mats /= np.sqrt(np.linalg.det(mats))[:, None, None]
    P = np.array([[40.0 + 3j, 11.0], [2.0j, 1.0]])
    P /= np.sqrt(np.linalg.det(P))
    f = np.array([3, 0, 1], dtype=np.int64)
    primes = np.array([p for p in range(3, 4000) if all(p % d for d in range(2, int(p ** 0.5) + 1))],
                      dtype=np.int64)
    X = K.fp_enumerate(q, 6.0, True)
    return [
        ("fp_enumerate (dim 8)", K.fp_enumerate, (q, 6.0, True)),
        ("quad_values", K.quad_values, (X, G)),
        ("reduce_loop (60 gens)", K.reduce_loop, (mats, P, 1e-9, 5000)),
        ("zeta_local_factors (p<4000)", K.zeta_local_factors, (f, primes, np.zeros(len(primes), np.bool_))),
    ]


def end_to_end(name):
    cfg = ROOT / "configs" / f"{name}.json"
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, KLEINIAN_DISABLE_NUMBA=flag)
        t = time.perf_counter()
        subprocess.run([sys.executable, "-m", "kleinian.cli", "volume", str(cfg)], env=env, check=True,
                       capture_output=True)
        out[flag] = time.perf_counter() - t
    label = name + " volume (subprocess)"
    print(f"{label:32s} numba {out['0']:9.3f}s  python {out['1']:9.3f}s  "
          f"x{out['1'] / out['0']:.1f}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--end-to-end", action="store_true")
    ap.add_argument("--config", default="bianchi_15", help="config name for --end-to-end")
    args = ap.parse_args()
    if not _accel.USE_NUMBA:
        print("numba is disabled; only the fallback is available")
        return
    rng = np.random.default_rng(0)
    for name, fn, a in cases(rng):
        fast = _time(fn, a, args.repeat)
        slow = _time(fn.py_func, a, args.repeat)
        print(f"{name:32s} numba {fast * 1e3:9.3f}ms python {slow * 1e3:9.3f}ms  x{slow / fast:.1f}")
    if args.end_to_end:
        end_to_end(args.config)


if __name__ == "__main__":
    main()
