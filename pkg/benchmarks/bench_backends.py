#!/usr/bin/env python3
"""Benchmark the compiled pivot kernel against the numpy fallback.

Builds a batch of mesh relaxations of growing size, solves each with both
backends, checks they agree pivot for pivot, and prints wall-clock totals.

    python3 benchmarks/bench_backends.py [--repeat 5]
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from layersched.lp import available_backends, solve_lp  # noqa: E402
from layersched.mesh import build_relaxation  # noqa: E402
from layersched.model import NetworkKind, Task  # noqa: E402
from layersched.simulate import gen_network  # noqa: E402


def collect_programs():
    programs = []
    for rows, cols, n in [(2, 2, 40), (3, 3, 120), (4, 4, 200), (5, 5, 400), (6, 6, 600)]:
        for seed in range(3):
            net = gen_network(NetworkKind.MESH_QUADRANT, (rows, cols), seed)
            lp, _ = build_relaxation(net, Task(n))
            programs.append((f"{rows}x{cols} n={n} seed={seed}", lp))
    return programs


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5, help="timing repetitions")
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled backend not built; run: python3 setup.py build_ext --inplace")
        return 1

    programs = collect_programs()
    print(f"{len(programs)} programs, {args.repeat} repetitions per backend\n")
    print(f"{'program':<22} {'pivots':>7} {'python ms':>10} {'compiled ms':>12} {'speedup':>8}")

    totals = {"python": 0.0, "compiled": 0.0}
    for label, lp in programs:
        times = {}
        pivots = {}
        for backend in ("python", "compiled"):
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                sol = solve_lp(lp, backend=backend)
                best = min(best, time.perf_counter() - t0)
            times[backend] = best
            pivots[backend] = sol.iterations
            totals[backend] += best
        if pivots["python"] != pivots["compiled"]:
            print(f"backend mismatch on {label}: {pivots}")
            return 1
        print(
            f"{label:<22} {pivots['compiled']:>7} {times['python'] * 1e3:>10.3f} "
            f"{times['compiled'] * 1e3:>12.3f} {times['python'] / times['compiled']:>8.2f}x"
        )

    print(
        f"\ntotal: python {totals['python'] * 1e3:.1f} ms, "
        f"compiled {totals['compiled'] * 1e3:.1f} ms, "
        f"speedup {totals['python'] / totals['compiled']:.2f}x"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
