"""Time the hot kernels with numba and with the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Each backend runs in its own interpreter because the choice is made at import
time from ``UDLAB_DISABLE_NUMBA``.
"""

import argparse
import json
import os
import subprocess
import sys
import time

CASES = ("linear_forest_1d", "max_clique_g40", "chromatic_g40", "induced_odd_cycle_g30", "edge_residual")


def run_cases(repeat: int) -> dict:
    import numpy as np

    from udlab._accel import backend
    from udlab.embed import edge_residual_max
    from udlab.realize import linear_forest_kernel
    from udlab.rng import trial_graph
    from udlab.solvers import chromatic_number, clique_number, largest_induced_cycle

    g1 = trial_graph(4096, 1.0 / 4096, 0, 0)
    eu, ev = g1.edges[:, 0].copy(), g1.edges[:, 1].copy()
    g40 = trial_graph(40, 0.5, 0, 1)
    g30 = trial_graph(30, 0.5, 0, 2)
    x = np.random.default_rng(0).normal(size=(2000, 3))
    rg = trial_graph(2000, 0.01, 0, 3)
    ru, rv = rg.edges[:, 0].copy(), rg.edges[:, 1].copy()

    work = {
        "linear_forest_1d": lambda: linear_forest_kernel(g1.n, eu, ev),
        "max_clique_g40": lambda: clique_number(g40),
        "chromatic_g40": lambda: chromatic_number(g40),
        "induced_odd_cycle_g30": lambda: largest_induced_cycle(g30, "odd"),
        "edge_residual": lambda: edge_residual_max(x, ru, rv),
    }
    out = {"backend": backend()}
    for name in CASES:
        work[name]()  # compile / warm up
        best = float("inf")
        for _ in range(repeat):
            t = time.perf_counter()
            work[name]()
            best = min(best, time.perf_counter() - t)
        out[name] = best
    return out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps(run_cases(args.repeat)))
        return
    results = []
    for disable in ("0", "1"):
        env = dict(os.environ, UDLAB_DISABLE_NUMBA=disable)
        proc = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(args.repeat)],
                              env=env, capture_output=True, text=True, check=True)
        results.append(json.loads(proc.stdout.strip().splitlines()[-1]))
    fast, slow = results
    print(f"{'kernel':28s} {fast['backend']:>12s} {slow['backend']:>12s} {'speedup':>9s}")
    for name in CASES:
        print(f"{name:28s} {fast[name]:12.6f} {slow[name]:12.6f} {slow[name] / fast[name]:9.1f}")


if __name__ == "__main__":
    main()
