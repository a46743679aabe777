"""Compare the compiled kernels against the pure-Python fallback.

Times the keep/removal kernels on a dense blow-up level (lifted instances
have one conflict pair per edge, far too sparse to separate the backends),
the brute-force search on a small gadget, and one full pipeline pass on a
lifted high-girth regular instance.

    python benchmarks/bench_kernels.py [--n 300] [--delta 6] [--levels 3] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from conflictcolour import _kernels
from conflictcolour.instances import (
    adaptable_lift,
    blowup,
    edge_colour_labels,
    gen_high_girth_regular,
    reduce_k_colouring,
)
from conflictcolour.procedure import CompiledInstance, run_procedure


def _best_of(repeat: int, fn) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_keep_pass(comp: CompiledInstance, backend, repeat: int) -> float:
    live = comp.live0.copy()
    coloured = np.zeros(comp.n, dtype=np.uint8)
    keep = np.ones(comp.n * comp.m, dtype=np.float64)
    t = np.zeros(comp.n * comp.m, dtype=np.int32)

    def run():
        keep.fill(1.0)
        t.fill(0)
        backend.keep_pass(
            comp.k_dst, comp.k_cdst, comp.k_src, comp.k_csrc,
            live, coloured, 0.01, comp.m, keep, t,
        )

    return _best_of(repeat, run)


def bench_removals(comp: CompiledInstance, backend, repeat: int) -> float:
    rng = np.random.default_rng(7)
    live_before = comp.live0.copy()
    start_unc = np.ones(comp.n, dtype=np.uint8)
    live2 = live_before.reshape(comp.n, comp.m)
    assigned = np.full(comp.n, -1, dtype=np.int64)
    for v in range(0, comp.n, 2):  # activate half the vertices
        cols = np.nonzero(live2[v])[0]
        if cols.size:
            assigned[v] = cols[rng.integers(cols.size)]

    def run():
        live = live_before.copy()
        backend.apply_removals(
            comp.removal_off, comp.r_dst, comp.r_cdst,
            assigned, start_unc, live_before, live, comp.m,
        )

    return _best_of(repeat, run)


def bench_brute(backend, repeat: int) -> float:
    from conflictcolour import finisher
    from conflictcolour.graph import MultiGraph
    from conflictcolour.instances import InstanceBundle

    # The gadget family prunes instantly at every size, so use a dense
    # random uncolourable instance: the search exhausts the whole tree,
    # which makes the timing deterministic.
    rng = np.random.default_rng(0)
    n, ell = 13, 4
    g = MultiGraph(n)
    for u in range(n):
        for v in range(u + 1, n):
            for _ in range(4):
                g.add_constraint(
                    u, v,
                    (int(rng.integers(1, ell + 1)), int(rng.integers(1, ell + 1))),
                )
    bundle = InstanceBundle(
        graph=g, lists=[set(range(1, ell + 1)) for _ in range(n)], meta={}
    )
    saved = finisher._kernels
    finisher._kernels = backend
    try:
        return _best_of(repeat, lambda: finisher.brute_force(bundle, budget=10**9))
    finally:
        finisher._kernels = saved


def bench_pipeline(bundle, backend, repeat: int) -> float:
    from conflictcolour import procedure

    saved = procedure._kernels
    procedure._kernels = backend
    try:
        return _best_of(repeat, lambda: run_procedure(bundle, seed=11))
    finally:
        procedure._kernels = saved


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--delta", type=int, default=6)
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = [_kernels.get_backend("python")]
    compiled = None
    try:
        compiled = _kernels.get_backend("compiled")
        backends.append(compiled)
    except ImportError:
        print("compiled backend unavailable; timing python only")

    dense = reduce_k_colouring([(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], 2)
    for _ in range(args.levels):
        dense = blowup(dense)
    comp = CompiledInstance(dense)
    print(
        f"kernel instance: blow-up level {args.levels}, n={comp.n} "
        f"m={comp.m} colours, {len(comp.k_dst)} conflict tuples"
    )

    skeleton = gen_high_girth_regular(args.n, args.delta, seed=3)
    lists = [set(range(1, 3 * args.delta + 1)) for _ in range(skeleton.n)]
    bundle = adaptable_lift(edge_colour_labels(skeleton), lists, skeleton.n)
    print(
        f"pipeline instance: n={bundle.graph.n} "
        f"{bundle.graph.n_constraints} constraints, backend={_kernels.BACKEND}"
    )

    rows = []
    for backend in backends:
        rows.append(
            (
                backend.BACKEND,
                bench_keep_pass(comp, backend, args.repeat),
                bench_removals(comp, backend, args.repeat),
                bench_brute(backend, args.repeat),
                bench_pipeline(bundle, backend, args.repeat),
            )
        )

    print(f"{'backend':>10} {'keep_pass':>12} {'removals':>12} {'brute':>12} {'pipeline':>12}")
    for name, k, r, b, p in rows:
        print(f"{name:>10} {k*1e3:>10.3f}ms {r*1e3:>10.3f}ms {b*1e3:>10.3f}ms {p*1e3:>10.3f}ms")
    if compiled is not None and len(rows) == 2:
        py, cy = rows
        print(
            f"{'speed-up':>10} {py[1]/cy[1]:>11.1f}x {py[2]/cy[2]:>11.1f}x "
            f"{py[3]/cy[3]:>11.1f}x {py[4]/cy[4]:>11.1f}x"
        )


if __name__ == "__main__":
    main()
