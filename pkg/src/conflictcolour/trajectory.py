"""Deterministic recurrence machinery: constants, trajectories, lemma checks.

The colouring procedure is steered by two coupled sequences: L_i (the list
size every vertex is truncated to) and T_i (the bound on how many live
constraints any (vertex, colour) pair faces).  Each iteration multiplies
both by the survival probability

    Keep_i = (1 - K(1+eps*e^-eps/30) / (L_i ln Delta))^(T_i)

and adds an error-absorption perturbation: -L^(1-beta/2) on the L side,
+T^(1-beta/2) on the T side.  The primed sequences drop the perturbations.
A run *stops* at the first i with T_i < L_i/8 (the finisher can take over)
and *breaks down* if either value falls below Delta^(eps^2/(2(eps+4)^2)),
the floor assumed by every lemma.

Everything here is plain float64.  The analysis lemmas are only theorems
for Delta large enough that the perturbation terms are dominated — far
beyond float64 for the interesting epsilon — so each row also gets a
*regime* evaluation recording which sufficiency conditions hold, and
:func:`verify_lemmas` asserts each inequality exactly on the rows its
proof's conditions cover.  :func:`run_trajectory_log` reruns everything in
log-domain arithmetic so those regimes are actually reachable (ln Delta in
the thousands) and the lemma checks are exercised non-vacuously.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .instances import ParameterError

SQRT2 = math.sqrt(2.0)


class TrajectoryBreakdownError(ArithmeticError):
    """keep_i called outside its domain (non-positive base)."""


@dataclass(frozen=True)
class TheoryParams:
    """The constants of the analysis for one (Delta, epsilon)."""

    delta: int
    epsilon: float
    K: float
    beta: float
    L0: float
    T0: float

    @property
    def ln_delta(self) -> float:
        return math.log(self.delta)

    @property
    def activation(self) -> float:
        """Per-iteration activation probability K/ln(Delta)."""
        return self.K / self.ln_delta

    @property
    def eps_term(self) -> float:
        """eps * e^-eps, the knob all the slack factors share."""
        return self.epsilon * math.exp(-self.epsilon)

    @property
    def slack10(self) -> float:
        return 1.0 + self.eps_term / 10.0

    @property
    def slack20(self) -> float:
        return 1.0 + self.eps_term / 20.0

    @property
    def slack30(self) -> float:
        return 1.0 + self.eps_term / 30.0

    @property
    def breakdown_floor(self) -> float:
        """Delta^(eps^2 / (2(eps+4)^2)), the L/T floor the lemmas assume."""
        e = self.epsilon
        return self.delta ** (0.5 * e * e / ((e + 4.0) ** 2))


def compute_params(delta: int, epsilon: float) -> TheoryParams:
    """Evaluate K, beta, L0, T0 for (Delta, epsilon).

    K = (sqrt2 + eps/2)^2 / (1 + eps e^-eps/20) * ln(1 + eps e^-eps/10)
    beta = 1/2 - ((eps+4)/(eps+5))^2 / 2
    L0 = (sqrt2 + eps/2) sqrt(Delta/lnDelta),  T0 = sqrt(Delta lnDelta)/(sqrt2 + eps/2)
    """
    if delta < 3:
        raise ParameterError(f"delta must be >= 3, got {delta}")
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    root = SQRT2 + epsilon / 2.0
    eps_term = epsilon * math.exp(-epsilon)
    K = root * root / (1.0 + eps_term / 20.0) * math.log1p(eps_term / 10.0)
    beta = 0.5 - 0.5 * ((epsilon + 4.0) / (epsilon + 5.0)) ** 2
    ln_delta = math.log(delta)
    L0 = root * math.sqrt(delta / ln_delta)
    T0 = math.sqrt(delta * ln_delta) / root
    return TheoryParams(delta=delta, epsilon=epsilon, K=K, beta=beta, L0=L0, T0=T0)


def keep_i(L: float, T: float, p: TheoryParams) -> float:
    """Survival probability bound (1 - K(1+e/30)/(L lnDelta))^T."""
    if L <= 0:
        raise TrajectoryBreakdownError(f"keep_i needs L > 0, got {L}")
    if T < 0:
        raise TrajectoryBreakdownError(f"keep_i needs T >= 0, got {T}")
    base = 1.0 - p.K * p.slack30 / (L * p.ln_delta)
    if base <= 0.0:
        raise TrajectoryBreakdownError(
            f"non-positive base {base} at L={L} (trajectory breakdown)"
        )
    return base**T


def keep_floor(p: TheoryParams) -> float:
    """e^(-K(1+eps e^-eps/20)/(sqrt2+eps/2)^2); algebraically this equals
    1/(1 + eps e^-eps/10), which is why it is at least 1/2 for every eps."""
    return math.exp(-p.K * p.slack20 / (SQRT2 + p.epsilon / 2.0) ** 2)


def keep_ceiling(p: TheoryParams) -> float:
    return 1.0 - p.K / (10.0 * p.ln_delta)


def i_hat(p: TheoryParams) -> float:
    """(2/(Kc)) lnDelta lnlnDelta with c = the keep floor."""
    return 2.0 / (p.K * keep_floor(p)) * p.ln_delta * math.log(p.ln_delta)


def step(L: float, T: float, p: TheoryParams) -> tuple[float, float]:
    """One unprimed recurrence step from (L_i, T_i) to (L_{i+1}, T_{i+1})."""
    k = keep_i(L, T, p)
    L1 = L * k - L ** (1.0 - p.beta / 2.0)
    T1 = T * (1.0 - p.activation * k) * k + T ** (1.0 - p.beta / 2.0)
    return L1, T1


def step_primed(Lp: float, Tp: float, keep: float, p: TheoryParams) -> tuple[float, float]:
    """Primed step: same Keep_i (from the unprimed pair), no perturbations."""
    return Lp * keep, Tp * (1.0 - p.activation * keep) * keep


@dataclass(frozen=True)
class TrajectoryRow:
    i: int
    L: float
    T: float
    Lp: float
    Tp: float
    keep: float
    ratio: float


@dataclass
class Trajectory:
    params: TheoryParams
    rows: list[TrajectoryRow] = field(default_factory=list)
    i_star: int | None = None
    i_hat: float = 0.0
    breakdown: bool = False

    @property
    def stopped(self) -> bool:
        return self.i_star is not None


def run_trajectory(p: TheoryParams, max_rows: int = 1_000_000) -> Trajectory:
    """Iterate the recurrences until stop or breakdown, recording all rows.

    Stop is checked before breakdown: T_i < L_i/8 sets i_star = i even if
    the same row also dips under the precondition floor (large epsilon
    makes r_0 < 1/8, so row 0 stops immediately and that is the documented
    outcome, not a breakdown).  The stop/breakdown row itself is recorded;
    Keep on a terminal row is evaluated when its base permits, else NaN.
    """
    traj = Trajectory(params=p, i_hat=i_hat(p))
    L, T = p.L0, p.T0
    Lp, Tp = p.L0, p.T0
    floor = p.breakdown_floor
    i = 0
    while True:
        try:
            k = keep_i(L, T, p)
        except TrajectoryBreakdownError:
            k = math.nan
        ratio = T / L if L != 0.0 else math.inf
        traj.rows.append(TrajectoryRow(i=i, L=L, T=T, Lp=Lp, Tp=Tp, keep=k, ratio=ratio))
        if T < L / 8.0:
            traj.i_star = i
            return traj
        if min(L, T) < floor or math.isnan(k):
            traj.breakdown = True
            return traj
        if i >= max_rows:
            traj.breakdown = True
            return traj
        L, T = step(L, T, p)
        Lp, Tp = step_primed(Lp, Tp, k, p)
        i += 1


def trajectory_csv(traj: Trajectory) -> str:
    """Rows as CSV with the fixed header i,L,T,Lp,Tp,Keep,ratio."""
    lines = ["i,L,T,Lp,Tp,Keep,ratio"]
    for r in traj.rows:
        lines.append(f"{r.i},{r.L!r},{r.T!r},{r.Lp!r},{r.Tp!r},{r.keep!r},{r.ratio!r}")
    return "\n".join(lines) + "\n"


def check_regime(
    delta: int, epsilon: float, conflict_degree: int, list_size: int
) -> bool:
    """Both hypotheses of the headline theorem, evaluated numerically:
    D(tau) <= Delta^(eps^2/(4(eps+5)^2)) and list size >= (2 sqrt2 + eps) sqrt(Delta/lnDelta).
    """
    e = epsilon
    d_cap = delta ** (0.25 * e * e / ((e + 5.0) ** 2))
    l_floor = (2.0 * SQRT2 + e) * math.sqrt(delta / math.log(delta))
    return conflict_degree <= d_cap and list_size >= l_floor


# -- regime evaluation and lemma verification --------------------------------
#
# The lemmas are asymptotic.  Their proofs need, beyond the stated
# hypotheses (rows above the breakdown floor, T_i >= L_i/8), a "Delta
# sufficiently large" that concretely instantiates to the three
# inequalities below at each row.  c1 lets the T-side perturbation be
# absorbed (T^(1-beta/8) <= (K/lnDelta) T Keep^2 needs T^(beta/8) >=
# lnDelta/(K Keep^2), weakened here to lnDelta/K since Keep <= 1 is
# two-sidedly close to 1 exactly when the regime holds); c2 absorbs both
# perturbation terms into the contraction; c3 keeps L dominant over sqrt(T)
# so the L-side perturbation is the smaller one.


@dataclass(frozen=True)
class RowRegime:
    hypotheses: bool  # above the floor and not yet stopped
    c1: bool
    c2: bool
    c3: bool

    @property
    def full(self) -> bool:
        return self.hypotheses and self.c1 and self.c2 and self.c3


def row_regime(row: TrajectoryRow, p: TheoryParams) -> RowRegime:
    floor = p.breakdown_floor
    hyp = min(row.L, row.T) >= floor and row.T >= row.L / 8.0
    if not (row.L > 0 and row.T > 0) or math.isnan(row.keep):
        return RowRegime(False, False, False, False)
    c1 = row.T ** (p.beta / 8.0) >= p.ln_delta / p.K
    c2 = row.keep**2 >= row.T ** (-p.beta / 8.0) + row.T ** (-3.0 * p.beta / 8.0)
    c3 = row.L >= math.sqrt(row.T)
    return RowRegime(hyp, c1, c2, c3)


@dataclass
class LemmaReport:
    """Outcome of the per-row lemma checks on one trajectory.

    ``*_checked`` counts rows (or transitions) where the corresponding
    lemma's conditions held and the inequality was asserted; a failure
    lands in ``violations``.  Vacuous rows are skipped, never counted as
    passes.
    """

    ratio_checked: int = 0
    keep_checked: int = 0
    drift_checked: int = 0
    violations: list[str] = field(default_factory=list)
    i_star_ok: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.violations and self.i_star_ok is not False


REL_SLACK = 1e-9


def verify_lemmas(traj: Trajectory, slack: float = REL_SLACK) -> LemmaReport:
    """Assert the recurrence lemmas on every row their conditions cover.

    - ratio monotone (r_{i+1} < r_i): asserted on transitions whose source
      row, and all earlier rows, are fully in-regime.
    - Keep_i in [keep_floor, 1 - K/(10 lnDelta)]: asserted on row i when
      the stated hypotheses hold through row i and rows < i are in-regime
      (row 0 thus needs no regime at all).
    - |L_i - L'_i| <= L'_i^(1-beta/4), same on the T side: asserted under
      the same conditions as Keep (row 0 is trivially 0 <= bound).
    - where i_star exists: i_star <= i_hat.
    """
    p = traj.params
    rep = LemmaReport()
    regimes = [row_regime(r, p) for r in traj.rows]
    lo, hi = keep_floor(p), keep_ceiling(p)

    prefix_in_regime = True  # all rows strictly before the current one
    hyp_prefix = True  # stated hypotheses through the current row
    for idx, row in enumerate(traj.rows):
        hyp_prefix = hyp_prefix and regimes[idx].hypotheses
        if hyp_prefix and prefix_in_regime:
            if not math.isnan(row.keep):
                rep.keep_checked += 1
                if not (lo * (1 - slack) <= row.keep <= hi * (1 + slack)):
                    rep.violations.append(
                        f"row {idx}: Keep {row.keep} outside [{lo}, {hi}]"
                    )
            rep.drift_checked += 1
            if abs(row.L - row.Lp) > row.Lp ** (1.0 - p.beta / 4.0) * (1 + slack):
                rep.violations.append(
                    f"row {idx}: |L-L'| {abs(row.L - row.Lp)} exceeds "
                    f"{row.Lp ** (1.0 - p.beta / 4.0)}"
                )
            if abs(row.T - row.Tp) > row.Tp ** (1.0 - p.beta / 4.0) * (1 + slack):
                rep.violations.append(
                    f"row {idx}: |T-T'| {abs(row.T - row.Tp)} exceeds "
                    f"{row.Tp ** (1.0 - p.beta / 4.0)}"
                )
        if idx + 1 < len(traj.rows) and prefix_in_regime and regimes[idx].full:
            rep.ratio_checked += 1
            if not traj.rows[idx + 1].ratio <= row.ratio * (1 + slack):
                rep.violations.append(
                    f"transition {idx}->{idx + 1}: ratio rose "
                    f"{row.ratio} -> {traj.rows[idx + 1].ratio}"
                )
        prefix_in_regime = prefix_in_regime and regimes[idx].full

    if traj.i_star is not None:
        rep.i_star_ok = traj.i_star <= traj.i_hat * (1 + slack)
    return rep


# -- log-domain runner --------------------------------------------------------


@dataclass(frozen=True)
class LogRow:
    i: int
    lnL: float
    lnT: float
    lnLp: float
    lnTp: float
    keep: float

    @property
    def ln_ratio(self) -> float:
        return self.lnT - self.lnL


@dataclass
class LogTrajectory:
    ln_delta: float
    epsilon: float
    K: float
    beta: float
    rows: list[LogRow] = field(default_factory=list)
    i_star: int | None = None
    i_hat: float = 0.0
    breakdown: bool = False
    truncated: bool = False


def _log_keep(lnL: float, lnT: float, K30: float, ln_lndelta: float) -> float:
    """Keep for astronomically scaled L, T given as logs.

    With x = K(1+e/30)/(L lnDelta), Keep = (1-x)^T = exp(T ln(1-x)).
    T*x = exp(lnK30 + lnT - lnL - lnlnDelta) is always moderate; the
    higher-order corrections enter at relative size x, which is far below
    float resolution whenever L is large enough to need this code path,
    but are carried anyway so the function agrees with keep_i on
    overlapping scales.
    """
    lnx = K30 - lnL - ln_lndelta
    m = math.exp(lnx + lnT)
    x = math.exp(lnx) if lnx > -700.0 else 0.0
    if x >= 1.0:
        raise TrajectoryBreakdownError(f"non-positive base at lnL={lnL}")
    # T*log1p(-x) = -m * (1 + x/2 + x^2/3 + ...)
    return math.exp(-m * (1.0 + x * (0.5 + x / 3.0)))


def run_trajectory_log(
    ln_delta: float, epsilon: float, max_rows: int = 5_000_000
) -> LogTrajectory:
    """The exact analogue of :func:`run_trajectory` on (lnL, lnT).

    Lets Delta = e^ln_delta go far beyond float64 (the lemma regime for
    small epsilon starts near lnDelta ~ 2500).  Keep values stay linear
    floats; only L and T are carried in logs.
    """
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    if ln_delta < math.log(3):
        raise ParameterError(f"ln_delta too small: {ln_delta}")
    root = SQRT2 + epsilon / 2.0
    eps_term = epsilon * math.exp(-epsilon)
    K = root * root / (1.0 + eps_term / 20.0) * math.log1p(eps_term / 10.0)
    beta = 0.5 - 0.5 * ((epsilon + 4.0) / (epsilon + 5.0)) ** 2
    ln_lndelta = math.log(ln_delta)
    lnL = math.log(root) + 0.5 * (ln_delta - ln_lndelta)
    lnT = 0.5 * (ln_delta + ln_lndelta) - math.log(root)
    lnLp, lnTp = lnL, lnT
    K30 = math.log(K * (1.0 + eps_term / 30.0))
    act = K / ln_delta
    c = math.exp(-K * (1.0 + eps_term / 20.0) / (root * root))
    out = LogTrajectory(
        ln_delta=ln_delta,
        epsilon=epsilon,
        K=K,
        beta=beta,
        i_hat=2.0 / (K * c) * ln_delta * ln_lndelta,
    )
    ln_floor = 0.5 * epsilon * epsilon / ((epsilon + 4.0) ** 2) * ln_delta
    ln8 = math.log(8.0)
    i = 0
    while True:
        try:
            k = _log_keep(lnL, lnT, K30, ln_lndelta)
        except TrajectoryBreakdownError:
            k = math.nan
        out.rows.append(LogRow(i=i, lnL=lnL, lnT=lnT, lnLp=lnLp, lnTp=lnTp, keep=k))
        if lnT < lnL - ln8:
            out.i_star = i
            return out
        if min(lnL, lnT) < ln_floor or math.isnan(k):
            out.breakdown = True
            return out
        if i >= max_rows:
            out.breakdown = True
            out.truncated = True
            return out
        g = act * k
        l_pert = math.exp(-0.5 * beta * lnL)  # L^(-beta/2) relative term
        t_pert = math.exp(-0.5 * beta * lnT)
        l_factor = k - l_pert
        if l_factor <= 0:
            out.breakdown = True
            return out
        lnL = lnL + math.log(l_factor)
        lnT = lnT + math.log((1.0 - g) * k + t_pert)
        lnLp = lnLp + math.log(k)
        lnTp = lnTp + math.log((1.0 - g) * k)
        i += 1


def verify_lemmas_log(traj: LogTrajectory, slack: float = REL_SLACK) -> LemmaReport:
    """The :func:`verify_lemmas` checks, rewritten for log-domain rows."""
    rep = LemmaReport()
    beta, K, ln_delta = traj.beta, traj.K, traj.ln_delta
    eps_term = traj.epsilon * math.exp(-traj.epsilon)
    root = SQRT2 + traj.epsilon / 2.0
    lo = math.exp(-K * (1.0 + eps_term / 20.0) / (root * root))
    hi = 1.0 - K / (10.0 * ln_delta)
    ln_floor = 0.5 * traj.epsilon**2 / ((traj.epsilon + 4.0) ** 2) * ln_delta
    ln8 = math.log(8.0)
    ln_slack = math.log1p(slack)

    def regime(row: LogRow) -> tuple[bool, bool]:
        hyp = min(row.lnL, row.lnT) >= ln_floor and row.lnT >= row.lnL - ln8
        if math.isnan(row.keep):
            return False, False
        c1 = (beta / 8.0) * row.lnT >= math.log(ln_delta / K)
        c2 = row.keep**2 >= math.exp(-beta / 8.0 * row.lnT) + math.exp(
            -3.0 * beta / 8.0 * row.lnT
        )
        c3 = row.lnL >= 0.5 * row.lnT
        return hyp, hyp and c1 and c2 and c3

    def ln_abs_diff(ln_a: float, ln_b: float) -> float:
        """ln|e^ln_a - e^ln_b| without leaving log space."""
        hi_, lo_ = max(ln_a, ln_b), min(ln_a, ln_b)
        d = math.expm1(lo_ - hi_)  # in (-1, 0]
        if d == 0.0:
            return -math.inf
        return hi_ + math.log(-d)

    prefix = True
    hyp_prefix = True
    for idx, row in enumerate(traj.rows):
        hyp, full = regime(row)
        hyp_prefix = hyp_prefix and hyp
        if hyp_prefix and prefix:
            if not math.isnan(row.keep):
                rep.keep_checked += 1
                if not (lo * (1 - slack) <= row.keep <= hi * (1 + slack)):
                    rep.violations.append(
                        f"row {idx}: Keep {row.keep} outside [{lo}, {hi}]"
                    )
            rep.drift_checked += 1
            bound_l = (1.0 - beta / 4.0) * row.lnLp + ln_slack
            if ln_abs_diff(row.lnL, row.lnLp) > bound_l:
                rep.violations.append(f"row {idx}: log L-drift bound exceeded")
            bound_t = (1.0 - beta / 4.0) * row.lnTp + ln_slack
            if ln_abs_diff(row.lnT, row.lnTp) > bound_t:
                rep.violations.append(f"row {idx}: log T-drift bound exceeded")
        if idx + 1 < len(traj.rows) and prefix and full:
            rep.ratio_checked += 1
            if not traj.rows[idx + 1].ln_ratio <= row.ln_ratio + ln_slack:
                rep.violations.append(
                    f"transition {idx}->{idx + 1}: log ratio rose "
                    f"{row.ln_ratio} -> {traj.rows[idx + 1].ln_ratio}"
                )
        prefix = prefix and full

    if traj.i_star is not None:
        rep.i_star_ok = traj.i_star <= traj.i_hat * (1 + slack)
    return rep
