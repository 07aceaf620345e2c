"""Time the compiled and pure-Python exchange kernels on the same workload.

    python3 benchmarks/bench_exchange.py [--agents 1000] [--steps 1000000] [--repeat 3]

Both kernels consume identical pre-drawn random arrays, so the final holdings
are compared for equality before any timing is reported.
"""

import argparse
import time

import numpy as np

from econgeom import money as mn
from econgeom._ext import compiled_kernels, python_kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--agents", type=int, default=1000)
    ap.add_argument("--steps", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--rule", choices=["random_split", "fixed_delta"], default="random_split")
    args = ap.parse_args(argv)

    e = mn.init_ensemble(args.agents, 5.0 * args.agents, seed=1)
    rule = mn.ExchangeRule(args.rule, 1.0)
    backends = {"python": python_kernels}
    if compiled_kernels is not None:
        backends["cython"] = compiled_kernels
    else:
        print("compiled kernels unavailable; timing pure Python only")

    results = {}
    for name, kern in backends.items():
        t, run = best_of(lambda: mn.run_exchange(e, args.steps, rule, kernels=kern), args.repeat)
        results[name] = (t, run.final.holdings)
        print(f"{name:>7}: {t:8.3f} s  ({args.steps / t / 1e6:7.2f} M exchanges/s)")

    if len(results) == 2:
        same = np.array_equal(results["python"][1], results["cython"][1])
        print(f"identical holdings: {same}")
        print(f"speedup: {results['python'][0] / results['cython'][0]:.1f}x")
        return 0 if same else 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
