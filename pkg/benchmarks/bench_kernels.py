"""Time evaluate, jacobian and batched Newton under the numba and numpy backends.

Usage: python3 benchmarks/bench_kernels.py [--batch 512] [--repeat 5]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from spohn_lab import _kernels
from spohn_lab.catalog import named_graph
from spohn_lab.game import random_game
from spohn_lab.numeric import compile_system
from spohn_lab.graph import Graph
from spohn_lab.numeric import _problem
from spohn_lab.spohnci import build_system


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=512)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    rng = np.random.default_rng(0)
    print(f"{'graph':<10}{'kernel':<10}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name in ("line4", "cycle4", "figure2"):
        g = named_graph(name)
        cs = compile_system(build_system(g, random_game(rng, g.n)).polynomials)
        X = rng.uniform(0.1, 2.0, size=(args.batch, cs.n))
        kernels = {
            "evaluate": lambda b: cs.evaluate(X, b),
            "jacobian": lambda b: cs.jacobian(X, b),
        }
        if name == "line4":
            # Newton needs a square system: the dehomogenized Nash system the solver runs
            sq = _problem(Graph.empty(g.n), random_game(rng, g.n, generic=True)).F
            Xs = rng.uniform(0.1, 2.0, size=(args.batch, sq.n))
            kernels["newton"] = lambda b: sq.newton(Xs, 1e-10, 50, b)
        for label, fn in kernels.items():
            for b in backends:
                fn(b)  # warm-up, includes JIT compilation
            t = [best_of(lambda: fn(b), args.repeat) for b in backends]
            speed = f"{t[0] / t[-1]:>9.1f}x" if len(t) > 1 else ""
            print(f"{name:<10}{label:<10}" + "".join(f"{x * 1e3:>10.2f}ms" for x in t) + speed)


if __name__ == "__main__":
    main()
