"""Driver for the wasteful colouring procedure.

One iteration runs six steps in a fixed order: truncate the lists to the
target size, activate each uncoloured vertex independently, draw one
uniform colour per activated vertex, apply the conflict removals those
draws force on uncoloured neighbours, uncolour both endpoints of any
constraint violated by this iteration's assignments, then perform the
equalizing flips that push every colour's survival probability down to
the common value Keep_i.

Sampling is two-phase: all activation and colour draws complete before
any removal is applied, so the removal pass sees a consistent snapshot.
Each named substream draws a fixed shape per iteration — unactivated
vertices still consume a colour draw, every post-truncation slot
consumes a flip coin — which keeps one vertex's outcome from shifting
another vertex's samples and makes transcripts replayable from (bundle,
params, seed) alone.

The hot passes (survival products, t-counts, removal application) live
in the kernels; this module owns orchestration and the per-iteration
event log that the replay tests re-derive removals from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Colouring, ListAssignment, t_count
from .instances import InstanceBundle, ParameterError
from .trajectory import (
    TheoryParams,
    Trajectory,
    TrajectoryBreakdownError,
    check_regime,
    compute_params,
    keep_i,
    run_trajectory,
)

STATS_HEADER = (
    "seed,i,min_list,max_t,activations,assignments,uncolourings,"
    "flips,clamps,stuck_count"
)

READY = "ready-for-finisher"
STUCK = "stuck"
MAX_ITERS = "max-iters"

DEFAULT_MAX_ITERS = 50

_SUBSTREAMS = ("truncation", "activation", "colour", "flip", "finisher")


class ProcedureAbort(RuntimeError):
    """A run cannot continue; run_procedure converts this into an outcome."""


class PViolationError(ProcedureAbort):
    """Theory mode found an uncoloured vertex with too few colours."""

    def __init__(self, iteration: int, vertex: int, list_size: int, required: int):
        super().__init__(
            f"P({iteration}) violated: vertex {vertex} has {list_size} "
            f"colours, needs {required}"
        )
        self.iteration = iteration
        self.vertex = vertex
        self.list_size = list_size
        self.required = required


class InfeasibleInstanceError(ProcedureAbort):
    """Pruning emptied a list: the procedure cannot start on this instance."""

    def __init__(self, vertices: list[int]):
        super().__init__(
            "pruning emptied the lists of "
            + ", ".join(f"vertex {v}" for v in vertices)
        )
        self.vertices = tuple(vertices)


class CompiledInstance:
    """Flat-array image of a bundle, shared by the kernels.

    Colours are re-indexed into a dense 0..m-1 range (``universe`` maps
    an index back to the original id).  Every physical constraint
    (u, v, (cu, cv)) contributes two directed entries, one per
    orientation: "src drew csrc, so cdst leaves dst's list".  The entries
    are materialised twice — once grouped by (dst, cdst, src) for the
    survival/t pass, and once as a CSR indexed by src*m + csrc for the
    removal pass.
    """

    def __init__(self, bundle: InstanceBundle) -> None:
        g = bundle.graph
        self.bundle = bundle
        self.n = g.n
        self.universe = bundle.colour_universe()
        self.m = len(self.universe)
        self.cindex = {c: k for k, c in enumerate(self.universe)}

        nc = g.n_constraints
        pc_u = np.empty(nc, dtype=np.int64)
        pc_v = np.empty(nc, dtype=np.int64)
        pc_cu = np.empty(nc, dtype=np.int64)
        pc_cv = np.empty(nc, dtype=np.int64)
        for j, (u, v, k) in enumerate(g.edges()):
            pc_u[j] = u
            pc_v[j] = v
            pc_cu[j] = self.cindex[k.first]
            pc_cv[j] = self.cindex[k.second]
        self.pc_u, self.pc_v, self.pc_cu, self.pc_cv = pc_u, pc_v, pc_cu, pc_cv

        src = np.concatenate([pc_u, pc_v]).astype(np.int32)
        csrc = np.concatenate([pc_cu, pc_cv]).astype(np.int32)
        dst = np.concatenate([pc_v, pc_u]).astype(np.int32)
        cdst = np.concatenate([pc_cv, pc_cu]).astype(np.int32)

        order = np.lexsort((csrc, src, cdst, dst))
        self.k_dst = np.ascontiguousarray(dst[order])
        self.k_cdst = np.ascontiguousarray(cdst[order])
        self.k_src = np.ascontiguousarray(src[order])
        self.k_csrc = np.ascontiguousarray(csrc[order])

        order = np.lexsort((cdst, dst, csrc, src))
        self.r_dst = np.ascontiguousarray(dst[order])
        self.r_cdst = np.ascontiguousarray(cdst[order])
        keys = src[order].astype(np.int64) * self.m + csrc[order]
        counts = np.bincount(keys, minlength=self.n * self.m)
        self.removal_off = np.zeros(self.n * self.m + 1, dtype=np.int64)
        np.cumsum(counts, out=self.removal_off[1:])

        live0 = np.zeros(self.n * self.m, dtype=np.uint8)
        for v, s in enumerate(bundle.lists):
            for c in s:
                live0[v * self.m + self.cindex[c]] = 1
        self.live0 = live0

    def count_t(self, live: np.ndarray, coloured: np.ndarray) -> np.ndarray:
        """t(v,c) for every live pair of an uncoloured v (flat n*m int32)."""
        keep = np.ones(self.n * self.m, dtype=np.float64)
        t = np.zeros(self.n * self.m, dtype=np.int32)
        _kernels.keep_pass(
            self.k_dst, self.k_cdst, self.k_src, self.k_csrc,
            live, coloured, 0.0, self.m, keep, t,
        )
        return t


@dataclass
class IterationStats:
    """Event log of one iteration.

    The aggregate counters feed the CSV export; the event maps hold
    enough detail to re-derive every single list removal from the seed
    (the replay test does exactly that) and to evaluate t' afterwards.
    Colours are original ids throughout.
    """

    iteration: int
    mode: str
    l_target: int
    keep_global: float
    t_bound: float
    activations: int
    assignments: int
    uncolourings: int
    flips: int
    clamps: int
    stuck_count: int
    min_list: int
    max_t: int
    # event detail
    start_uncoloured: frozenset[int]
    pre_lists: dict[int, frozenset[int]]
    removed_truncation: dict[int, frozenset[int]]
    conflict_removals: dict[tuple[int, int], tuple[int, ...]]
    flip_removals: frozenset[tuple[int, int]]
    activated: frozenset[int]
    drawn: dict[int, int]
    retained: dict[int, int]
    uncoloured_step5: frozenset[int]
    keep_vc: dict[tuple[int, int], float]
    t_before: dict[tuple[int, int], int]


class ProcedureState:
    """Mutable state of one run plus its named random substreams.

    ``mode`` selects where the per-iteration targets come from: "theory"
    follows the trajectory's L_i/T_i/Keep_i rows exactly (and enforces
    the list-size property P(i) before each iteration), "adaptive"
    replaces them with the measured min list size and max t.  The
    activation probability is K/ln(Delta) in both.

    Test hooks: ``activation_override`` replaces the activation
    probability (and the survival products' use of it) for the next
    iterations; ``equalizing_enabled = False`` evaluates but never
    applies the flips.  Neither changes the stream shapes.
    """

    def __init__(
        self,
        bundle: InstanceBundle,
        params: TheoryParams,
        seed: int | np.random.SeedSequence = 0,
        mode: str = "adaptive",
    ) -> None:
        if mode not in ("theory", "adaptive"):
            raise ParameterError(f"unknown mode {mode!r}")
        self.bundle = bundle
        self.params = params
        self.mode = mode
        self.comp = CompiledInstance(bundle)
        self.traj: Trajectory | None = (
            run_trajectory(params) if mode == "theory" else None
        )
        sizes = [len(s) for s in bundle.lists]
        self.regime_ok = check_regime(
            params.delta,
            params.epsilon,
            bundle.graph.conflict_degree(),
            min(sizes, default=0),
        )
        self.activation_override: float | None = None
        self.equalizing_enabled = True
        self.reset(seed)

    def reset(self, seed: int | np.random.SeedSequence) -> None:
        """Rewind to iteration 0 with fresh substreams; arrays are reused."""
        self.seed = seed
        ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self.rngs = dict(
            zip(_SUBSTREAMS, map(np.random.default_rng, ss.spawn(len(_SUBSTREAMS))))
        )
        self.live = self.comp.live0.copy()
        self.coloured = np.zeros(self.comp.n, dtype=np.uint8)
        self.colour_of = np.full(self.comp.n, -1, dtype=np.int64)
        self.iteration = 0
        self.stuck: set[int] = {v for v, s in enumerate(self.bundle.lists) if not s}
        self.stats: list[IterationStats] = []
        self.abort: str | None = None
        self.prune_removed: int | None = None

    # -- views --------------------------------------------------------------

    @property
    def rng_seed(self) -> int | np.random.SeedSequence:
        return self.seed

    @property
    def colouring(self) -> Colouring:
        uni = self.comp.universe
        return {
            int(v): uni[self.colour_of[v]] for v in np.nonzero(self.coloured)[0]
        }

    @property
    def lists(self) -> ListAssignment:
        """Current live lists materialised with original colour ids."""
        uni = self.comp.universe
        live2 = self.live.reshape(self.comp.n, self.comp.m)
        return [
            {uni[c] for c in np.nonzero(live2[v])[0]} for v in range(self.comp.n)
        ]

    def list_size(self, v: int) -> int:
        m = self.comp.m
        return int(self.live[v * m : (v + 1) * m].sum())

    def uncoloured(self) -> list[int]:
        return [int(v) for v in np.nonzero(self.coloured == 0)[0]]

    def active_vertices(self) -> list[int]:
        """Uncoloured vertices that are not stuck, ascending."""
        return [v for v in self.uncoloured() if v not in self.stuck]

    def __repr__(self) -> str:
        return (
            f"ProcedureState(n={self.comp.n}, iteration={self.iteration}, "
            f"coloured={int(self.coloured.sum())}, stuck={len(self.stuck)}, "
            f"mode={self.mode!r})"
        )


def _activation(state: ProcedureState) -> float:
    if state.activation_override is not None:
        return state.activation_override
    return state.params.activation


def _planned_l(state: ProcedureState) -> int:
    """List-size target for the coming iteration.

    Theory mode reads floor(L_i) off the trajectory row (aborting when
    the trajectory is exhausted, broke down, or dipped below one colour);
    adaptive mode takes the smallest current list among the vertices
    still in play.
    """
    if state.mode == "theory":
        traj = state.traj
        assert traj is not None
        if state.iteration >= len(traj.rows):
            raise ProcedureAbort(
                f"trajectory exhausted at iteration {state.iteration}"
            )
        row = traj.rows[state.iteration]
        if math.isnan(row.keep):
            raise ProcedureAbort(
                f"trajectory breakdown at iteration {state.iteration}"
            )
        target = int(row.L)
        if target < 1:
            raise ProcedureAbort(
                f"trajectory list target below 1 at iteration {state.iteration}"
            )
        return target
    sizes = [state.list_size(v) for v in state.active_vertices()]
    if not sizes:
        raise ProcedureAbort("no uncoloured unstuck vertices")
    return min(sizes)


def prune_bad_colours(state: ProcedureState) -> int:
    """Remove every (v, c) with t_0(v,c) > T_0, all at once.

    The one-shot list cleaning that runs before iteration 0.  Decisions
    are taken against the initial lists simultaneously, so a removal
    cannot create another.  The per-vertex removal count obeys the
    degree-sum bound: removed(v) * T_0 < sum_c t_0(v,c) <= deg(v), hence
    removed(v) < deg(v)/T_0 — asserted below.

    Raises InfeasibleInstanceError when some list empties: the procedure
    cannot start from this instance (run_procedure reports it as stuck).
    """
    if state.iteration != 0:
        raise ParameterError("prune_bad_colours must run before iteration 0")
    comp = state.comp
    n, m = comp.n, comp.m
    t = comp.count_t(state.live, state.coloured)
    bad = (t > state.params.T0) & (state.live != 0)
    per_vertex = bad.reshape(n, m).sum(axis=1)
    for v in np.nonzero(per_vertex)[0]:
        bound = state.bundle.graph.degree(int(v)) / state.params.T0
        assert per_vertex[v] <= bound + 1e-9, (
            f"prune removed {per_vertex[v]} colours at vertex {v}, "
            f"degree-sum bound is {bound}"
        )
    state.live[bad] = 0
    removed = int(bad.sum())
    state.prune_removed = removed
    emptied = [
        v
        for v in range(n)
        if state.coloured[v] == 0
        and v not in state.stuck
        and state.list_size(v) == 0
    ]
    if emptied:
        raise InfeasibleInstanceError(emptied)
    return removed


def keep_vc(state: ProcedureState, v: int, c: int, list_size: int | None = None) -> float:
    """Survival product for one pair: prod over uncoloured neighbours u of
    (1 - a * t(v,u,c) / L).

    Reference implementation against the current lists (the kernels
    compute the same products in bulk during an iteration).  ``list_size``
    defaults to the coming iteration's truncation target.  An empty
    product — isolated vertex, or all t zero — is exactly 1.  A factor
    that is not positive (possible at desk scale) clamps the whole
    product to 0; the batch path counts such clamps in the stats.
    """
    comp = state.comp
    if state.coloured[v]:
        raise ParameterError(f"vertex {v} is coloured")
    cidx = comp.cindex.get(c)
    if cidx is None or not state.live[v * comp.m + cidx]:
        raise ParameterError(f"colour {c} is not live at vertex {v}")
    big_l = float(list_size if list_size is not None else _planned_l(state))
    a = _activation(state)
    g = state.bundle.graph
    lists = state.lists
    colouring = state.colouring
    out = 1.0
    for u in g.neighbours(v):
        factor = 1.0 - a * t_count(g, lists, colouring, v, u, c) / big_l
        out *= max(factor, 0.0)
    return out


def run_iteration(state: ProcedureState) -> IterationStats:
    """Execute one full iteration and append its stats.

    Steps, in order: (1) truncate every in-play list to the target size
    by removing a seeded uniform subset of the excess; (2) independent
    activation coin per vertex; (3) uniform colour draw per activated
    vertex (unactivated vertices consume a dummy draw); (4) each
    assignment (u <- c) removes every constrained partner colour from
    uncoloured neighbours' lists, all against the post-truncation
    snapshot; (5) both endpoints of any constraint matched by two
    this-iteration assignments are uncoloured (the step-4 removals they
    caused stand); (6) equalizing flip per post-truncation slot with
    probability Eq = 1 - Keep_global/Keep(v,c) clamped to [0,1], applied
    to colours still live.  Vertices whose list empties are marked stuck;
    the partial colouring stays proper (asserted).

    Theory mode aborts with PViolationError if some in-play vertex
    cannot be truncated *down* to the target.
    """
    comp = state.comp
    p = state.params
    n, m = comp.n, comp.m
    uni = comp.universe
    live = state.live
    live2 = live.reshape(n, m)

    active = state.active_vertices()
    if not active:
        raise ProcedureAbort("no uncoloured unstuck vertices")
    l_target = _planned_l(state)
    a = _activation(state)

    start_unc = np.asarray(state.coloured == 0, dtype=np.uint8)
    start_uncoloured = frozenset(int(v) for v in np.nonzero(start_unc)[0])
    pre_lists = {
        v: frozenset(uni[c] for c in np.nonzero(live2[v])[0]) for v in active
    }

    keep_global = math.nan
    t_bound = math.nan
    if state.mode == "theory":
        assert state.traj is not None
        row = state.traj.rows[state.iteration]
        for v in active:
            if len(pre_lists[v]) < l_target:
                raise PViolationError(
                    state.iteration, v, len(pre_lists[v]), l_target
                )
        keep_global = row.keep
        t_bound = row.T

    # -- step 1: truncation --------------------------------------------
    rng = state.rngs["truncation"]
    removed_truncation: dict[int, frozenset[int]] = {}
    for v in active:
        cols = np.nonzero(live2[v])[0]
        if cols.shape[0] > l_target:
            drop = rng.permutation(cols.shape[0])[l_target:]
            live2[v, cols[drop]] = 0
            removed_truncation[v] = frozenset(uni[int(c)] for c in cols[drop])

    live_snap = live.copy()
    av = np.asarray(active, dtype=np.int64)
    # every in-play row now has exactly l_target live colours
    cols_mat = np.nonzero(live2[av])[1].reshape(len(av), l_target)
    keys = av[:, None] * m + cols_mat

    keep_flat = np.ones(n * m, dtype=np.float64)
    t_flat = np.zeros(n * m, dtype=np.int32)
    _kernels.keep_pass(
        comp.k_dst, comp.k_cdst, comp.k_src, comp.k_csrc,
        live_snap, state.coloured, a / l_target, m, keep_flat, t_flat,
    )
    keep_vals = keep_flat[keys]
    t_vals = t_flat[keys]

    if state.mode == "adaptive":
        t_bound = float(t_vals.max()) if t_vals.size else 0.0
        try:
            keep_global = keep_i(float(l_target), t_bound, p)
        except TrajectoryBreakdownError as exc:
            raise ProcedureAbort(f"survival bound broke down: {exc}") from None

    keep_map: dict[tuple[int, int], float] = {}
    t_map: dict[tuple[int, int], int] = {}
    for r_i, v in enumerate(active):
        for s_i in range(l_target):
            cid = uni[int(cols_mat[r_i, s_i])]
            keep_map[(v, cid)] = float(keep_vals[r_i, s_i])
            t_map[(v, cid)] = int(t_vals[r_i, s_i])

    # -- steps 2-3: activation and colour draws (two-phase: sampled now,
    # applied below) -----------------------------------------------------
    act_draws = state.rngs["activation"].random(len(active))
    slot_draws = state.rngs["colour"].integers(0, l_target, size=len(active))
    act_mask = act_draws < a
    assigned = np.full(n, -1, dtype=np.int64)
    chosen = cols_mat[np.arange(len(av)), slot_draws]
    assigned[av[act_mask]] = chosen[act_mask]
    activated = frozenset(int(v) for v in av[act_mask])
    drawn = {
        int(v): uni[int(c)] for v, c in zip(av[act_mask], chosen[act_mask])
    }

    # -- step 4: conflict removals ---------------------------------------
    ev_dst, ev_cdst, ev_src = _kernels.apply_removals(
        comp.removal_off, comp.r_dst, comp.r_cdst,
        assigned, start_unc, live_snap, live, m,
    )
    causers: dict[tuple[int, int], list[int]] = {}
    for d, cd, s in zip(ev_dst.tolist(), ev_cdst.tolist(), ev_src.tolist()):
        causers.setdefault((d, uni[cd]), []).append(s)
    conflict_removals = {k: tuple(ws) for k, ws in causers.items()}

    # -- step 5: uncolour violated this-iteration pairs -------------------
    viol = (assigned[comp.pc_u] == comp.pc_cu) & (assigned[comp.pc_v] == comp.pc_cv)
    if viol.any():
        unc5 = frozenset(
            int(x) for x in np.concatenate([comp.pc_u[viol], comp.pc_v[viol]])
        )
    else:
        unc5 = frozenset()
    retained = {v: c for v, c in drawn.items() if v not in unc5}

    # -- step 6: equalizing flips ------------------------------------------
    flip_draws = state.rngs["flip"].random((len(active), l_target))
    safe = np.where(keep_vals > 0.0, keep_vals, 1.0)
    eq_raw = 1.0 - keep_global / safe
    clamps = int(
        np.count_nonzero(keep_vals <= 0.0)
        + np.count_nonzero((keep_vals > 0.0) & (eq_raw < 0.0))
    )
    eq = np.where(keep_vals > 0.0, np.clip(eq_raw, 0.0, 1.0), 0.0)
    flip_removals: set[tuple[int, int]] = set()
    if state.equalizing_enabled:
        win = flip_draws < eq
        if win.any():
            wkeys = keys[win]
            still = live[wkeys] != 0
            live[wkeys[still]] = 0
            rws, cls = np.nonzero(win)
            for r_i, s_i in zip(rws[still].tolist(), cls[still].tolist()):
                flip_removals.add((int(av[r_i]), uni[int(cols_mat[r_i, s_i])]))

    # -- commit -----------------------------------------------------------
    for v in retained:
        state.coloured[v] = 1
        state.colour_of[v] = assigned[v]
    new_stuck = {
        v for v in active if state.coloured[v] == 0 and not live2[v].any()
    }
    state.stuck |= new_stuck

    # -- end-of-iteration aggregates ---------------------------------------
    in_play = [v for v in range(n) if state.coloured[v] == 0 and v not in state.stuck]
    if in_play:
        t_after = comp.count_t(live, state.coloured).reshape(n, m)
        min_list = int(live2[in_play].sum(axis=1).min())
        max_t = int(t_after[in_play].max())
    else:
        min_list = 0
        max_t = 0

    both = (state.coloured[comp.pc_u] != 0) & (state.coloured[comp.pc_v] != 0)
    bad = (
        both
        & (state.colour_of[comp.pc_u] == comp.pc_cu)
        & (state.colour_of[comp.pc_v] == comp.pc_cv)
    )
    assert not bad.any(), "partial colouring lost properness"

    stats = IterationStats(
        iteration=state.iteration,
        mode=state.mode,
        l_target=l_target,
        keep_global=float(keep_global),
        t_bound=float(t_bound),
        activations=len(activated),
        assignments=len(retained),
        uncolourings=len(unc5),
        flips=len(flip_removals),
        clamps=clamps,
        stuck_count=len(state.stuck),
        min_list=min_list,
        max_t=max_t,
        start_uncoloured=start_uncoloured,
        pre_lists=pre_lists,
        removed_truncation=removed_truncation,
        conflict_removals=conflict_removals,
        flip_removals=frozenset(flip_removals),
        activated=activated,
        drawn=drawn,
        retained=retained,
        uncoloured_step5=unc5,
        keep_vc=keep_map,
        t_before=t_map,
    )
    state.stats.append(stats)
    state.iteration += 1
    return stats


def measure_t_prime(
    state: ProcedureState,
    stats: IterationStats,
    pairs: list[tuple[int, int]] | None = None,
) -> dict[tuple[int, int], int]:
    """The wasteful upper count t'(v,c) for the iteration just recorded.

    A directed label (c, c') in T(v, u) with c' in u's pre-truncation
    list counts unless u started the iteration coloured, or u retained a
    colour during it, or c' was conflict-removed at u by some w != v, or
    c' was flip-removed at u.  Removals caused by v itself are ignored,
    and so are truncation losses — the count is deliberately an
    overestimate, which is what makes t_{i+1}(v,c) <= t'(v,c) hold.

    ``pairs`` defaults to every (v, pre-truncation colour of v) with v in
    play at the iteration start.
    """
    g = state.bundle.graph
    if pairs is None:
        pairs = [
            (v, c)
            for v in sorted(stats.pre_lists)
            for c in sorted(stats.pre_lists[v])
        ]
    out: dict[tuple[int, int], int] = {}
    for v, c in pairs:
        total = 0
        for u in g.neighbours(v):
            if u not in stats.start_uncoloured or u in stats.retained:
                continue
            pre_u = stats.pre_lists.get(u)
            if pre_u is None:
                continue  # u was stuck at iteration start: empty list
            for k in g.constraints_between(v, u):
                if k.first != c or k.second not in pre_u:
                    continue
                if any(w != v for w in stats.conflict_removals.get((u, k.second), ())):
                    continue
                if (u, k.second) in stats.flip_removals:
                    continue
                total += 1
        out[(v, c)] = total
    return out


def _adaptive_ready(state: ProcedureState, active: list[int]) -> bool:
    """Finisher precondition: measured max t(v,c) <= min list size / 8."""
    comp = state.comp
    t = comp.count_t(state.live, state.coloured).reshape(comp.n, comp.m)
    live2 = state.live.reshape(comp.n, comp.m)
    sizes = live2[active].sum(axis=1)
    return int(t[active].max()) <= float(sizes.min()) / 8.0


def run_procedure(
    bundle: InstanceBundle,
    params: TheoryParams | None = None,
    seed: int | np.random.SeedSequence = 0,
    max_iters: int | None = None,
    mode: str = "adaptive",
) -> tuple[ProcedureState, str]:
    """Prune, then iterate until a finisher-ready state, stuck, or budget.

    Theory mode runs exactly the trajectory's i* iterations and then
    declares readiness (that is the analysed schedule; if the trajectory
    broke down before its stopping time the run ends as "max-iters").
    Adaptive mode stops as soon as the measured max t(v,c) is at most an
    eighth of the min list size.  P-violations, survival-bound
    breakdowns, and lists emptied by the initial prune all surface as
    outcome "stuck" with ``state.abort`` set — never as exceptions.

    ``params`` defaults to epsilon = 1 at the instance's max degree
    (floored at 3, the smallest degree the constants are defined for).
    Girth validation is a hard precondition; the regime hypotheses are
    checked and recorded on the state but are *not* required.
    """
    g = bundle.graph
    if not g.validate_girth():
        raise ParameterError("instance contains a 3- or 4-cycle")
    if params is None:
        params = compute_params(max(3, g.max_degree()), 1.0)
    if max_iters is None:
        max_iters = DEFAULT_MAX_ITERS
    state = ProcedureState(bundle, params, seed=seed, mode=mode)
    try:
        prune_bad_colours(state)
    except InfeasibleInstanceError as exc:
        state.stuck |= set(exc.vertices)
        state.abort = str(exc)
        return state, STUCK

    horizon = 0
    if mode == "theory":
        assert state.traj is not None
        horizon = (
            state.traj.i_star
            if state.traj.stopped
            else max(len(state.traj.rows) - 1, 0)
        )

    while True:
        active = state.active_vertices()
        if not active:
            break
        if mode == "theory":
            if state.iteration >= horizon:
                if state.traj.stopped:
                    break
                return state, MAX_ITERS
        elif _adaptive_ready(state, active):
            break
        if state.iteration >= max_iters:
            return state, MAX_ITERS
        try:
            run_iteration(state)
        except ProcedureAbort as exc:
            state.abort = str(exc)
            return state, STUCK

    if state.stuck:
        return state, STUCK
    return state, READY


def stats_rows(seed: int, stats_list: list[IterationStats]) -> list[str]:
    """One CSV row per iteration, matching STATS_HEADER."""
    return [
        f"{seed},{s.iteration},{s.min_list},{s.max_t},{s.activations},"
        f"{s.assignments},{s.uncolourings},{s.flips},{s.clamps},{s.stuck_count}"
        for s in stats_list
    ]


def stats_csv(seed: int, stats_list: list[IterationStats]) -> str:
    return "\n".join([STATS_HEADER, *stats_rows(seed, stats_list)]) + "\n"
