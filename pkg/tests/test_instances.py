from __future__ import annotations

import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import conflictcolour as cc
import oracles
from conftest import random_small_bundle

FIVE_CYCLE = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]


# ----------------------------------------------------------------- example1


def test_gadget_core_constraint_multiset():
    b = cc.gen_example1(2, 4)
    pair_counts = Counter((u, v) for u, v, _ in b.graph.edges())
    (core_pair,) = [p for p, k in pair_counts.items() if k == 4]
    cons = sorted(
        (con.first, con.second) for con in b.graph.constraints_between(*core_pair)
    )
    assert cons == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert cc.brute_force(b) is None


def test_gadget_trivial_single_pair():
    b = cc.gen_example1(1, 1)
    assert b.graph.n_constraints == 1
    assert all(lst == {1} for lst in b.lists if lst)
    assert cc.brute_force(b) is None


def test_gadget_ell3_has_no_proper_colouring():
    b = cc.gen_example1(3, 9)
    assert oracles.exhaustive_search(b) is None
    assert oracles.count_colourings(b) % 9 == 0


def test_gadget_padding_reaches_target_degree_without_short_cycles():
    for ell, delta in ((2, 4), (2, 7), (3, 11)):
        b = cc.gen_example1(ell, delta)
        assert b.graph.max_degree() == delta
        assert b.graph.validate_girth()
        assert oracles.girth_ok_oracle(b.graph)
        assert b.graph.conflict_degree() == ell


def test_gadget_rejects_small_target_degree():
    with pytest.raises(cc.ParameterError):
        cc.gen_example1(2, 3)


# ------------------------------------------------------------------ blow-up


def star_d1_bundle() -> cc.InstanceBundle:
    """A 3-star: list size 2, max degree 3, conflict degree 1."""
    g = cc.MultiGraph(4)
    g.add_constraint(0, 1, (1, 1))
    g.add_constraint(0, 2, (1, 1))
    g.add_constraint(0, 3, (2, 2))
    lists = [{1, 2}, {1, 2}, {1, 2}, {1, 2}]
    return cc.InstanceBundle(g, lists, meta={"colour_universe": "2"})


def test_blowup_squares_lists_and_multiplies_degrees():
    base = star_d1_bundle()
    assert base.graph.conflict_degree() == 1
    assert base.graph.max_degree() == 3
    big = cc.blowup(base)
    assert all(lst == set(range(1, 5)) for lst in big.lists)
    assert big.graph.max_degree() == 12
    assert big.graph.conflict_degree() == 2
    assert oracles.conflict_degree_oracle(big.graph) == 2


def test_blowup_of_gadget_core():
    big = cc.blowup(cc.gen_example1(2, 4))
    assert big.graph.conflict_degree() == 4


def test_blowup_preserves_uncolourability():
    base = cc.reduce_k_colouring(FIVE_CYCLE, 2)
    assert cc.brute_force(base) is None
    big = cc.blowup(base)
    assert oracles.count_colourings(big) == 4**5
    assert cc.brute_force(big) is None


def test_blowup_preserves_colourability():
    base = cc.reduce_k_colouring([(0, 1), (1, 2), (2, 3)], 2)  # path: 2-colourable
    assert cc.brute_force(base) is not None
    big = cc.blowup(base)
    witness = cc.brute_force(big)
    assert witness is not None
    assert cc.verify_colouring(big.graph, witness, lists=big.lists)


def test_blowup_rejects_ragged_lists():
    g = cc.MultiGraph(2)
    g.add_constraint(0, 1, (1, 1))
    with pytest.raises(cc.ParameterError):
        cc.blowup(cc.InstanceBundle(g, [{1, 2}, {1}]))


def test_blowup_iterate_identity_at_level_zero():
    base = star_d1_bundle()
    same, trace = cc.blowup_iterate(base, 0)
    assert trace.rows == [(2, 3, 1)]
    assert sorted(
        (u, v, con.first, con.second) for u, v, con in same.graph.edges()
    ) == sorted((u, v, con.first, con.second) for u, v, con in base.graph.edges())


def test_blowup_iterate_two_levels_measured():
    base = cc.reduce_k_colouring(FIVE_CYCLE, 2)
    built, trace = cc.blowup_iterate(base, 2)
    assert trace.rows == [(2, 4, 1), (4, 16, 2), (16, 256, 8)]
    # identities, and the final level measured straight off the built graph
    for (l0, d0, k0), (l1, d1, k1) in zip(trace.rows, trace.rows[1:]):
        assert l1 == l0 * l0
        assert d1 == d0 * l0 * l0
        assert k1 == k0 * l0
    assert built.graph.max_degree() == 256
    assert oracles.conflict_degree_oracle(built.graph) == 8
    assert 8 == round(16 ** (1 - 2**-2))  # D_2 = l_2^(3/4)
    trace.validate()


def test_blowup_levels_match_single_step_applications():
    base = cc.reduce_k_colouring(FIVE_CYCLE, 2)
    one = cc.blowup(base)
    two = cc.blowup(one)
    _, trace = cc.blowup_iterate(base, 2)
    assert trace.rows[1][2] == oracles.conflict_degree_oracle(one.graph)
    assert trace.rows[2][2] == oracles.conflict_degree_oracle(two.graph)


def test_blowup_iterate_budget_stop_returns_partial_trace():
    base = cc.reduce_k_colouring(FIVE_CYCLE, 2)
    with pytest.raises(cc.ResourceBudgetError) as exc:
        cc.blowup_iterate(base, 6)
    err = exc.value
    assert len(err.trace.rows) >= 3
    err.trace.validate()
    assert err.bundle.graph.n_constraints <= 2_000_000


def test_blowup_trace_prediction_matches_build():
    predicted = cc.BlowupTrace.predict(2, 4, 1, 2)
    base = cc.reduce_k_colouring(FIVE_CYCLE, 2)
    _, trace = cc.blowup_iterate(base, 2)
    assert predicted.rows == trace.rows


# ------------------------------------------------------------------ f_alpha


def test_f_alpha_anchor_values():
    assert cc.f_alpha(1.0) == 0.5
    assert cc.f_alpha(2.0) == 7 / 8
    assert cc.f_alpha(2.0 * math.sqrt(2.0)) == 15 / 16


def test_f_alpha_rejects_below_one():
    with pytest.raises(cc.ParameterError):
        cc.f_alpha(0.99)


def test_f_alpha_is_a_staircase():
    grid = np.linspace(1.0, 16.0, 400)
    values = [cc.f_alpha(float(a)) for a in grid]
    assert all(b >= a for a, b in zip(values, values[1:]))
    for val in values:
        k = -math.log2(1.0 - val) - 1.0
        assert abs(k - round(k)) < 1e-9  # every value is 1 - 2^(-k-1)


# --------------------------------------------------------------- reductions


def test_k_reduction_triangle_two_colours():
    b = cc.reduce_k_colouring([(0, 1), (1, 2), (0, 2)], 2)
    assert cc.brute_force(b) is None


def test_k_reduction_single_edge_one_colour():
    b = cc.reduce_k_colouring([(0, 1)], 1)
    assert cc.brute_force(b) is None


def test_k_reduction_five_cycle_three_colours():
    b = cc.reduce_k_colouring(FIVE_CYCLE, 3)
    witness = cc.brute_force(b)
    assert witness is not None
    assert cc.verify_colouring(b.graph, witness, lists=b.lists)


def test_k_reduction_multiplicity_structure():
    b = cc.reduce_k_colouring([(0, 1)], 3)
    cons = sorted(
        (con.first, con.second) for con in b.graph.constraints_between(0, 1)
    )
    assert cons == [(1, 1), (2, 2), (3, 3)]
    assert b.graph.conflict_degree() == 1


@pytest.mark.parametrize("seed", range(10))
def test_k_reduction_verdict_matches_backtracker(seed):
    rng = np.random.default_rng(3000 + seed)
    n = int(rng.integers(3, 7))
    edges = sorted(
        {
            tuple(sorted(rng.choice(n, size=2, replace=False).tolist()))
            for _ in range(int(rng.integers(2, 9)))
        }
    )
    k = int(rng.integers(2, 4))
    verdict = cc.brute_force(cc.reduce_k_colouring(edges, k)) is not None
    assert verdict == (oracles.backtrack_k_colouring(n, edges, k) is not None)


# ----------------------------------------------------------- adaptable lift


def test_lift_turns_labels_into_diagonal_constraints():
    b = cc.adaptable_lift([(0, 1, 9)], [{9, 2}, {9, 2}])
    (con,) = b.graph.constraints_between(0, 1)
    assert (con.first, con.second) == (9, 9)


def test_lift_of_simple_labelling_has_degree_one():
    g = cc.gen_high_girth_regular(30, 3, seed=1)
    b = cc.adaptable_lift(
        cc.edge_colour_labels(g), cc.copy_lists([{1, 2, 3, 4} for _ in range(g.n)])
    )
    assert b.graph.conflict_degree() == 1


def test_lift_counts_repeated_parallel_labels():
    b = cc.adaptable_lift(
        [(0, 1, 3), (0, 1, 3)], [{3, 4}, {3, 4}]
    )
    assert b.graph.conflict_degree() == 2


# ----------------------------------------------------- regular generator


def test_regular_generator_small():
    g = cc.gen_high_girth_regular(10, 3, seed=0)
    assert all(g.degree(v) == 3 for v in range(10))
    assert g.validate_girth()
    assert oracles.girth_ok_exhaustive(g)


def test_regular_generator_impossible_size():
    with pytest.raises(cc.GenerationError):
        cc.gen_high_girth_regular(4, 3, seed=0)


def test_regular_generator_medium():
    g = cc.gen_high_girth_regular(50, 4, seed=7)
    assert all(g.degree(v) == 4 for v in range(50))
    assert g.validate_girth()
    assert oracles.girth_ok_oracle(g)


def test_regular_generator_is_deterministic():
    a = cc.gen_high_girth_regular(30, 3, seed=5)
    b = cc.gen_high_girth_regular(30, 3, seed=5)
    assert sorted(
        (u, v) for u, v, _ in a.edges()
    ) == sorted((u, v) for u, v, _ in b.edges())
    c = cc.gen_high_girth_regular(30, 3, seed=6)
    assert sorted((u, v) for u, v, _ in a.edges()) != sorted(
        (u, v) for u, v, _ in c.edges()
    )


# -------------------------------------------------------------------- I/O


def _bundles_equal(a: cc.InstanceBundle, b: cc.InstanceBundle) -> bool:
    return (
        a.graph.n == b.graph.n
        and sorted((u, v, con.first, con.second) for u, v, con in a.graph.edges())
        == sorted((u, v, con.first, con.second) for u, v, con in b.graph.edges())
        and list(map(set, a.lists)) == list(map(set, b.lists))
        and a.meta == b.meta
    )


def test_roundtrip_gadget(tmp_path):
    b = cc.gen_example1(2, 4)
    path = str(tmp_path / "gadget.txt")
    cc.write_instance(b, path)
    assert _bundles_equal(b, cc.read_instance(path))


def test_roundtrip_corpus_slice(tmp_path, small_corpus):
    for i, b in enumerate(small_corpus[:30]):
        path = str(tmp_path / f"inst{i}.txt")
        cc.write_instance(b, path)
        assert _bundles_equal(b, cc.read_instance(path))


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_roundtrip_random_bundles(tmp_path_factory, seed):
    b = random_small_bundle(np.random.default_rng(seed))
    path = str(tmp_path_factory.mktemp("io") / "inst.txt")
    cc.write_instance(b, path)
    assert _bundles_equal(b, cc.read_instance(path))


def test_malformed_file_raises_format_error(tmp_path):
    path = tmp_path / "garbage.txt"
    path.write_text("not an instance\n")
    with pytest.raises(cc.InstanceFormatError):
        cc.read_instance(str(path))


def test_generators_are_pure_functions_of_seed():
    a = cc.gen_example1(2, 6)
    b = cc.gen_example1(2, 6)
    assert _bundles_equal(a, b)
