"""Time the numba kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--steps 20000] [--repeat 3]

The fallback is the same source run with ``TSBITLAB_DISABLE_NUMBA=1``; it
is timed in a child process so that no compiled helper leaks into it.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(kernels, steps):
    rng = np.random.default_rng(0)
    bits = (rng.random(steps) < 0.6).astype(np.uint8)
    xs = np.sort(rng.random(steps // 10))
    return {
        "error_prob_walk": (kernels.error_prob_walk, (bits, 0.4)),
        "beta_tail_walk": (kernels.beta_tail_walk, (steps + 1, steps, 0.5, 10**7, 1e-15)),
        "beta_cdf_many": (kernels.beta_cdf_many, (30, 20, xs)),
        "worst_case_bits": (kernels.worst_case_bits, (steps, steps // 3, 2, 5, 0, 1)),
    }


def measure(steps, repeat):
    from tsbitlab import kernels

    out = {}
    for name, (fn, fargs) in cases(kernels, steps).items():
        fn(*fargs)  # compile outside the timed region
        out[name] = best_time(lambda: fn(*fargs), repeat)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps(measure(args.steps, args.repeat)))
        return
    env = dict(os.environ, TSBITLAB_DISABLE_NUMBA="1")
    child = subprocess.run(
        [sys.executable, __file__, "--child", "--steps", str(args.steps), "--repeat", str(args.repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    py = json.loads(child.stdout)
    jit = measure(args.steps, args.repeat)
    print(f"{'kernel':<18} {'numba_s':>10} {'python_s':>10} {'speedup':>9}")
    for name in jit:
        print(f"{name:<18} {jit[name]:>10.5f} {py[name]:>10.5f} {py[name] / jit[name]:>8.1f}x")


if __name__ == "__main__":
    main()
