from __future__ import annotations

import math

import pytest

import conflictcolour as cc
import oracles

EPS_GRID = (0.01, 0.1, 1.0, 10.0, 45.0, 100.0)


def rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


# ----------------------------------------------------------------- constants


def test_beta_at_eps_one_is_eleven_seventy_seconds():
    p = cc.compute_params(10**6, 1.0)
    assert abs(p.beta - 11 / 72) < 1e-15


def test_k_at_eps_one():
    p = cc.compute_params(10**6, 1.0)
    assert rel(p.K, 0.1300) < 1e-3  # quoted to four figures
    K, beta, _, _ = oracles.params_oracle(10**6, 1.0)
    assert rel(p.K, K) < 1e-12
    assert rel(p.beta, beta) < 1e-12


def test_initial_values_at_desk_scale():
    p = cc.compute_params(10**6, 1.0)
    assert rel(p.L0, 515.0) < 1e-3
    assert rel(p.T0, 1941.8) < 1e-3
    r0 = p.T0 / p.L0
    assert rel(r0, math.log(10**6) / (math.sqrt(2) + 0.5) ** 2) < 1e-12


@pytest.mark.parametrize("delta", (3, 4, 10, 10**6, 10**9))
@pytest.mark.parametrize("epsilon", EPS_GRID)
def test_params_match_independent_evaluation(delta, epsilon):
    p = cc.compute_params(delta, epsilon)
    K, beta, L0, T0 = oracles.params_oracle(delta, epsilon)
    assert rel(p.K, K) < 1e-12
    assert rel(p.beta, beta) < 1e-12
    assert rel(p.L0, L0) < 1e-12
    assert rel(p.T0, T0) < 1e-12


def test_params_precondition():
    with pytest.raises(cc.ParameterError):
        cc.compute_params(2, 1.0)
    with pytest.raises(cc.ParameterError):
        cc.compute_params(10, 0.0)


@pytest.mark.parametrize("epsilon", EPS_GRID)
def test_constant_grid_invariants(epsilon):
    p = cc.compute_params(10**6, epsilon)
    assert 0.0 < p.beta < 0.5
    assert p.K > 0.0
    assert cc.keep_floor(p) >= 0.5
    damp = epsilon * math.exp(-epsilon)
    assert (1 + damp / 20) * (1 + damp / 30) <= (1 + damp / 10) + 1e-15
    lhs = 0.5 - ((1 + damp / 10) / (math.sqrt(2) + epsilon / 2)) ** 2
    assert lhs > 0.5 * (epsilon / (epsilon + 3)) ** 2


def test_keep_bound_endpoints():
    p = cc.compute_params(10**6, 1.0)
    lower = cc.keep_floor(p)
    upper = cc.keep_ceiling(p)
    damp = math.exp(-1.0)
    assert rel(lower, math.exp(-p.K * (1 + damp / 20) / (math.sqrt(2) + 0.5) ** 2)) < 1e-12
    assert rel(upper, 1 - p.K / (10 * p.ln_delta)) < 1e-12
    assert 0.5 <= lower < upper < 1.0


# ------------------------------------------------------------------ keep_i


def test_keep_is_one_for_empty_product():
    p = cc.compute_params(10**6, 1.0)
    assert cc.keep_i(100.0, 0.0, p) == 1.0


def test_keep_limit_for_huge_lists():
    p = cc.compute_params(10**6, 1.0)
    assert cc.keep_i(1e9, 1.0, p) > 0.999


def test_keep_at_initial_point_sits_in_lemma_band():
    p = cc.compute_params(10**6, 1.0)
    k = cc.keep_i(p.L0, p.T0, p)
    assert cc.keep_floor(p) <= k <= cc.keep_ceiling(p)
    assert rel(k, oracles.keep_oracle(p.L0, p.T0, 10**6, 1.0)) < 1e-12


def test_keep_rejects_nonpositive_base():
    p = cc.compute_params(10**6, 1.0)
    with pytest.raises(cc.TrajectoryBreakdownError):
        cc.keep_i(1e-9, 10.0, p)


# -------------------------------------------------------------------- step


def test_step_with_zero_t_reduces_to_pure_shrink():
    p = cc.compute_params(10**6, 1.0)
    L1, T1 = cc.step(100.0, 0.0, p)
    assert rel(L1, 100.0 - 100.0 ** (1 - p.beta / 2)) < 1e-12
    assert T1 == 0.0


def test_one_step_from_initial_point():
    p = cc.compute_params(10**6, 1.0)
    keep0 = cc.keep_i(p.L0, p.T0, p)
    L1, T1 = cc.step(p.L0, p.T0, p)
    assert L1 < p.L0 * keep0
    # the ratio T/L only *descends* once the error terms are negligible,
    # which a million-vertex Delta is far from; the log-domain witness in
    # test_lemma_checks_are_not_vacuous_in_log_domain covers the descent
    eL, eT, ek = oracles.step_oracle(p.L0, p.T0, 10**6, 1.0)
    assert rel(L1, eL) < 1e-12
    assert rel(T1, eT) < 1e-12
    assert rel(keep0, ek) < 1e-12


def test_primed_step_is_the_pure_product():
    p = cc.compute_params(10**6, 1.0)
    keep0 = cc.keep_i(p.L0, p.T0, p)
    Lp1, Tp1 = cc.step_primed(p.L0, p.T0, keep0, p)
    assert Lp1 == p.L0 * keep0
    assert Tp1 < p.T0


# --------------------------------------------------------------- trajectory


def test_trajectory_rows_recompute_independently():
    p = cc.compute_params(10**6, 1.0)
    tr = cc.run_trajectory(p)
    assert tr.rows[0].Lp == tr.rows[0].L
    assert tr.rows[0].Tp == tr.rows[0].T
    for prev, cur in zip(tr.rows, tr.rows[1:]):
        eL, eT, ek = oracles.step_oracle(prev.L, prev.T, 10**6, 1.0)
        assert rel(prev.keep, ek) < 1e-9
        assert rel(cur.L, eL) < 1e-9
        assert rel(cur.T, eT) < 1e-9
        assert rel(cur.Lp, prev.Lp * ek) < 1e-9
        assert rel(cur.ratio, cur.T / cur.L) < 1e-12


def test_trajectory_stops_at_desk_scale_for_large_epsilon():
    tr = cc.run_trajectory(cc.compute_params(10**6, 45.0))
    assert tr.stopped
    assert tr.i_star == 0
    assert tr.i_star <= tr.i_hat
    assert tr.rows[tr.i_star].T < tr.rows[tr.i_star].L / 8


def test_trajectory_breaks_down_at_desk_scale_for_small_epsilon():
    tr = cc.run_trajectory(cc.compute_params(10**6, 1.0))
    assert tr.breakdown
    assert tr.i_star is None
    floor = cc.compute_params(10**6, 1.0).breakdown_floor
    assert min(tr.rows[-1].L, tr.rows[-1].T) < floor


def test_trajectory_breaks_down_immediately_for_tiny_delta():
    tr = cc.run_trajectory(cc.compute_params(10, 1.0))
    assert tr.breakdown
    assert len(tr.rows) <= 2


def test_i_hat_formula():
    p = cc.compute_params(10**6, 1.0)
    expected = (2.0 / (p.K * cc.keep_floor(p))) * p.ln_delta * math.log(p.ln_delta)
    assert rel(cc.i_hat(p), expected) < 1e-12


# ------------------------------------------------------------ lemma checks


@pytest.mark.parametrize("delta", (10**6, 10**9, 10**12))
@pytest.mark.parametrize("epsilon", (0.5, 1.0, 45.0))
def test_lemma_report_clean_on_grid(delta, epsilon):
    tr = cc.run_trajectory(cc.compute_params(delta, epsilon))
    rep = cc.verify_lemmas(tr, slack=1e-9)
    assert rep.ok, rep.violations


def test_lemma_checks_are_not_vacuous_in_log_domain():
    """At ln(delta) = 2600 the preconditions hold for the whole descent."""
    lt = cc.run_trajectory_log(2600.0, 1.0)
    assert lt.i_star is not None
    rep = cc.verify_lemmas_log(lt, slack=1e-9)
    assert rep.ok, rep.violations[:3]
    assert rep.ratio_checked > 100_000
    assert rep.keep_checked > 100_000
    assert rep.i_star_ok


def test_log_and_linear_trajectories_agree_at_desk_scale():
    p = cc.compute_params(10**6, 1.0)
    lin = cc.run_trajectory(p)
    log = cc.run_trajectory_log(math.log(10**6), 1.0)
    n = min(len(lin.rows), len(log.rows))
    assert n >= 2
    for lr, gr in zip(lin.rows[:n], log.rows[:n]):
        assert rel(lr.L, math.exp(gr.lnL)) < 1e-6
        assert rel(lr.T, math.exp(gr.lnT)) < 1e-6
        assert rel(lr.keep, gr.keep) < 1e-6


# ------------------------------------------------------------------ regime


def test_regime_large_epsilon_corollary():
    for delta in (10**3, 10**6, 10**9):
        ln_d = math.log(delta)
        list_size = math.ceil(50 * math.sqrt(delta / ln_d))
        d = int(delta**0.2)
        assert cc.check_regime(delta, 45.0, d, list_size)


def test_regime_rejects_conflict_degree_delta():
    assert not cc.check_regime(10**6, 1.0, 10**6, 10**6)


def test_regime_desk_scale_degree_one():
    delta = 10**6
    size = math.ceil((2 * math.sqrt(2) + 1) * math.sqrt(delta / math.log(delta)))
    assert cc.check_regime(delta, 1.0, 1, size)


# --------------------------------------------------------------------- CSV


def test_trajectory_csv_shape():
    tr = cc.run_trajectory(cc.compute_params(10**6, 1.0))
    text = cc.trajectory_csv(tr)
    lines = text.strip().splitlines()
    assert lines[0] == "i,L,T,Lp,Tp,Keep,ratio"
    assert len(lines) == len(tr.rows) + 1
    first = lines[1].split(",")
    assert first[0] == "0"
    assert rel(float(first[1]), tr.rows[0].L) < 1e-12
