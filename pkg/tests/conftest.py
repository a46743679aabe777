"""Shared fixtures: a randomized small-instance corpus and the statistics ensemble.

Both are deterministic — fixed seeds, fixed sampling order — so a failure
reproduces exactly.
"""

from __future__ import annotations

import numpy as np
import pytest

import conflictcolour as cc


def _creates_short_cycle(adj: list[set[int]], u: int, v: int) -> bool:
    """Would the simple edge (u, v) close a 3- or 4-cycle?"""
    if adj[u] & adj[v]:
        return True
    for w in adj[u]:
        if (adj[w] & adj[v]) - {u, v}:
            return True
    return False


def random_small_bundle(rng: np.random.Generator) -> cc.InstanceBundle:
    """One random girth-legal instance: 2–8 vertices, colours from {1..4}.

    Re-sampling an existing skeleton edge adds a parallel constraint, so a
    healthy share of the corpus is a genuine multigraph.
    """
    n = int(rng.integers(2, 9))
    g = cc.MultiGraph(n)
    adj: list[set[int]] = [set() for _ in range(n)]
    for _ in range(int(rng.integers(2, 14))):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u == v:
            continue
        if u > v:
            u, v = v, u
        if v not in adj[u]:
            if _creates_short_cycle(adj, u, v):
                continue
            adj[u].add(v)
            adj[v].add(u)
        g.add_constraint(u, v, (int(rng.integers(1, 5)), int(rng.integers(1, 5))))
    lists = []
    for _v in range(n):
        size = int(rng.integers(1, 5))
        lists.append(set(rng.choice(np.arange(1, 5), size=size, replace=False).tolist()))
    return cc.InstanceBundle(g, lists, meta={"generator": "test-corpus"})


@pytest.fixture(scope="session")
def small_corpus() -> list[cc.InstanceBundle]:
    rng = np.random.default_rng(20260816)
    bundles = [random_small_bundle(rng) for _ in range(520)]
    with_parallel = sum(
        1
        for b in bundles
        if any(
            len(b.graph.constraints_between(u, v)) > 1
            for u, v in {(u, v) for u, v, _ in b.graph.edges()}
        )
    )
    # the corpus must actually exercise multigraphs
    assert with_parallel >= 40
    return bundles


def make_ensemble_bundle() -> tuple[cc.InstanceBundle, cc.TheoryParams]:
    """The fixed 100-vertex, 4-regular, girth-5 instance used for statistics."""
    g = cc.gen_high_girth_regular(100, 4, seed=11)
    labelled = cc.edge_colour_labels(g)
    lists = cc.copy_lists([{1, 2, 3} for _ in range(g.n)])
    bundle = cc.adaptable_lift(labelled, lists)
    return bundle, cc.compute_params(4, 1.0)


@pytest.fixture(scope="session")
def first_iteration_ensemble():
    """10^4 independent first iterations of the procedure on a fixed instance.

    Lists have exactly floor(L_0) = 3 colours, so truncation is a no-op and
    every surviving colour went through the conflict-removal + equalizing-flip
    gauntlet.  Collected per repetition:

      * survival of the 20 lexicographically-first (v, c) pairs with t_0 = 1
      * the post-iteration list size of each sampled vertex
      * the surviving-conflict count t' of each sampled pair
    """
    reps = 10_000
    bundle, params = make_ensemble_bundle()
    g = bundle.graph
    state = cc.ProcedureState(bundle, params, seed=0, mode="theory")

    t0_all: dict[tuple[int, int], int] = {}
    for v in range(g.n):
        for c in sorted(bundle.lists[v]):
            t0_all[(v, c)] = cc.t_total(g, bundle.lists, {}, v, c)
    pairs = [vc for vc in sorted(t0_all) if t0_all[vc] == 1][:20]
    assert len(pairs) == 20
    verts = sorted({v for v, _ in pairs})

    survive = np.zeros((reps, len(pairs)), dtype=np.int8)
    ell1 = np.zeros((reps, len(verts)), dtype=np.int16)
    tprime = np.zeros((reps, len(pairs)), dtype=np.int32)
    clamps = 0
    for r in range(reps):
        state.reset(np.random.SeedSequence([77, r]))
        stats = cc.run_iteration(state)
        clamps += stats.clamps
        lists_now = state.lists
        for j, (v, c) in enumerate(pairs):
            survive[r, j] = 1 if c in lists_now[v] else 0
        for j, v in enumerate(verts):
            ell1[r, j] = len(lists_now[v])
        tp = cc.measure_t_prime(state, stats, pairs=pairs)
        for j, vc in enumerate(pairs):
            tprime[r, j] = tp[vc]

    return {
        "reps": reps,
        "bundle": bundle,
        "params": params,
        "keep0": state.traj.rows[0].keep,
        "l_target": int(state.traj.rows[0].L),
        "pairs": pairs,
        "verts": verts,
        "t0": t0_all,
        "survive": survive,
        "ell1": ell1,
        "tprime": tprime,
        "clamps": clamps,
    }
