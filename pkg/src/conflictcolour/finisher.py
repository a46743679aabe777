"""Completion of a prepared partial colouring, plus the exhaustive oracle.

When every surviving (v, c) sits in at most an eighth of a list's worth
of constraints, a uniformly random assignment from lists truncated to
exactly ell satisfies the local-lemma accounting p = 1/ell^2, d <=
ell^2/4, 4pd <= 1, so a proper completion exists.  ``check_reed``
evaluates that hypothesis on real lists; ``resample_colouring`` makes
the existence constructive by redrawing both endpoints of the first
violated constraint until none remain.  ``brute_force`` is the
ground-truth oracle the tests compare everything against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Colouring, ListAssignment, verify_colouring
from .instances import InstanceBundle, ParameterError
from .procedure import CompiledInstance


class SearchBudgetError(RuntimeError):
    """brute_force's candidate space exceeds its budget (says nothing
    about colourability)."""

    def __init__(self, product: int, budget: int):
        super().__init__(
            f"search space of {product} colourings exceeds the budget of {budget}"
        )
        self.product = product
        self.budget = budget


@dataclass(frozen=True)
class ReedCondition:
    """The completion hypothesis and its local-lemma accounting.

    ``worst_t`` is the largest constraint count any live (v, c) carries;
    the hypothesis is worst_t <= ell/8.  ``measured_d`` is the largest
    dependency count over live constraints — the d that the 4pd <= 1
    accounting actually needs, bounded by ell^2/4 whenever the
    hypothesis holds.
    """

    ell: int
    worst_t: int
    lll_p: float
    lll_d: float
    satisfied: bool
    measured_d: int

    @property
    def four_p_d(self) -> float:
        return 4.0 * self.lll_p * self.lll_d


def check_reed(
    bundle: InstanceBundle,
    lists: ListAssignment,
    ell: int,
    partial: Colouring | None = None,
) -> ReedCondition:
    """Evaluate the completion hypothesis for the given lists.

    worst_t = max over uncoloured v and c in lists[v] of the number of
    constraints (c, c') in T(v, u) with u uncoloured and c' in lists[u];
    satisfied iff worst_t <= ell/8.  Vertices in ``partial`` are out of
    the game: they contribute no counts and their lists are exempt from
    the size precondition (every in-play list must have >= ell colours).
    """
    if ell < 1:
        raise ParameterError(f"ell must be >= 1, got {ell}")
    g = bundle.graph
    fixed = partial or {}
    for v in range(g.n):
        if v not in fixed and len(lists[v]) < ell:
            raise ParameterError(
                f"vertex {v} has {len(lists[v])} colours, needs >= {ell}"
            )
    # t(v,c) for every in-play pair, via the constraint scan
    t: dict[tuple[int, int], int] = {}
    for u, v, k in g.edges():
        if u in fixed or v in fixed:
            continue
        if k.first in lists[u] and k.second in lists[v]:
            t[(u, k.first)] = t.get((u, k.first), 0) + 1
            t[(v, k.second)] = t.get((v, k.second), 0) + 1
    worst_t = max(t.values(), default=0)
    # dependency count per live constraint: events sharing an endpoint
    per_vertex = {v: 0 for v in range(g.n)}
    for (v, _c), cnt in t.items():
        per_vertex[v] += cnt
    measured_d = 0
    for u, v, k in g.edges():
        if u in fixed or v in fixed:
            continue
        if k.first in lists[u] and k.second in lists[v]:
            d = per_vertex[u] + per_vertex[v]
            if d > measured_d:
                measured_d = d
    return ReedCondition(
        ell=ell,
        worst_t=worst_t,
        lll_p=1.0 / (ell * ell),
        lll_d=ell * ell / 4.0,
        satisfied=worst_t <= ell / 8.0,
        measured_d=measured_d,
    )


def _fold_partial(
    g, lists: ListAssignment, fixed: Colouring
) -> list[set[int]] | None:
    """Candidate sets for uncoloured vertices with the partial colouring
    folded in: any colour that would clash with a fixed neighbour's
    colour is dropped.  Returns None when some candidate set empties."""
    cand: list[set[int]] = [set(lists[v]) if v not in fixed else set() for v in range(g.n)]
    for u, v, k in g.edges():
        if u in fixed and v not in fixed:
            if fixed[u] == k.first:
                cand[v].discard(k.second)
        elif v in fixed and u not in fixed:
            if fixed[v] == k.second:
                cand[u].discard(k.first)
    for v in range(g.n):
        if v not in fixed and not cand[v]:
            return None
    return cand


def resample_colouring(
    bundle: InstanceBundle,
    lists: ListAssignment,
    ell: int,
    seed: int | np.random.SeedSequence | np.random.Generator = 0,
    max_resamples: int | None = None,
    partial: Colouring | None = None,
    override: bool = False,
    return_info: bool = False,
):
    """Complete ``partial`` to a proper colouring, or report failure.

    Truncates every candidate list to exactly ell colours (a seeded
    uniform subset), assigns uniformly at random, then repeatedly picks
    the first violated constraint in canonical order and redraws both of
    its endpoints, up to ``max_resamples`` (default: 100 * constraint
    count * ell).  Returns the merged colouring, or None on exhaustion —
    never an improper colouring.

    The completion hypothesis (check_reed on the folded lists) and the
    list-size floor are enforced unless ``override`` is set; overridden
    runs truncate short lists to their full size instead.  With
    ``return_info`` the result is (colouring_or_None, info) where info
    carries the resample count, the truncated lists, and the hypothesis
    verdict (None when overridden past a size violation).
    """
    g = bundle.graph
    fixed: Colouring = dict(partial or {})
    if not verify_colouring(g, fixed):
        raise ParameterError("partial colouring is already improper")
    rng = np.random.default_rng(seed)
    if max_resamples is None:
        max_resamples = 100 * g.n_constraints * ell

    info: dict = {"resamples": 0, "reed": None, "truncated": None}

    def result(col):
        return (col, info) if return_info else col

    cand = _fold_partial(g, lists, fixed)
    if cand is None:
        return result(None)

    reed: ReedCondition | None = None
    try:
        reed = check_reed(bundle, [set(s) for s in cand], ell, partial=fixed)
    except ParameterError:
        if not override:
            raise
    info["reed"] = reed
    if not override and reed is not None and not reed.satisfied:
        raise ParameterError(
            f"completion hypothesis fails: worst_t={reed.worst_t} > {ell}/8"
        )

    free = [v for v in range(g.n) if v not in fixed]
    comp = CompiledInstance(bundle)
    cindex = comp.cindex
    uni = comp.universe

    # truncate to exactly ell (or everything, for overridden short lists)
    truncated: dict[int, list[int]] = {}
    for v in free:
        cols = sorted(cand[v])
        size = min(ell, len(cols))
        if len(cols) > size:
            pick = rng.permutation(len(cols))[:size]
            cols = sorted(cols[i] for i in pick)
        truncated[v] = cols
    info["truncated"] = truncated

    sigma = np.full(g.n, -1, dtype=np.int64)
    for v, c in fixed.items():
        sigma[v] = cindex[c]
    cand_dense = {v: np.asarray([cindex[c] for c in truncated[v]], dtype=np.int64) for v in free}
    for v in free:
        sigma[v] = cand_dense[v][rng.integers(0, len(cand_dense[v]))]

    pc_u, pc_v = comp.pc_u, comp.pc_v
    pc_cu, pc_cv = comp.pc_cu, comp.pc_cv
    resamples = 0
    while True:
        viol = (sigma[pc_u] == pc_cu) & (sigma[pc_v] == pc_cv)
        j = int(np.argmax(viol)) if viol.any() else -1
        if j < 0:
            break
        if resamples >= max_resamples:
            info["resamples"] = resamples
            return result(None)
        u, v = int(pc_u[j]), int(pc_v[j])
        sigma[u] = cand_dense[u][rng.integers(0, len(cand_dense[u]))]
        sigma[v] = cand_dense[v][rng.integers(0, len(cand_dense[v]))]
        resamples += 1
    info["resamples"] = resamples

    out: Colouring = dict(fixed)
    for v in free:
        out[v] = uni[sigma[v]]
    assert verify_colouring(g, out), "resampling produced an improper colouring"
    return result(out)


def brute_force(bundle: InstanceBundle, budget: int = 10**7) -> Colouring | None:
    """Exhaustive search over the list product space.

    Returns the lexicographically-first proper colouring under the
    canonical vertex order (candidates ascending), or None when no
    proper colouring exists.  A product space larger than ``budget``
    raises SearchBudgetError — deliberately distinct from "uncolourable".
    """
    g = bundle.graph
    n = g.n
    product = 1
    for s in bundle.lists:
        product *= len(s)
        if product > budget:
            raise SearchBudgetError(product, budget)

    comp = CompiledInstance(bundle)
    cindex = comp.cindex
    uni = comp.universe

    cand_off = np.zeros(n + 1, dtype=np.int64)
    cand_cols_parts = []
    for v in range(n):
        cols = sorted(cindex[c] for c in bundle.lists[v])
        cand_off[v + 1] = cand_off[v] + len(cols)
        cand_cols_parts.append(cols)
    cand_cols = np.asarray(
        [c for part in cand_cols_parts for c in part], dtype=np.int64
    )

    # constraints grouped under their later endpoint, for pruning
    groups: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
    for u, v, k in g.edges():
        groups[v].append((u, cindex[k.first], cindex[k.second]))
    grp_off = np.zeros(n + 1, dtype=np.int64)
    g_u_parts: list[int] = []
    g_cu_parts: list[int] = []
    g_cv_parts: list[int] = []
    for v in range(n):
        grp_off[v + 1] = grp_off[v] + len(groups[v])
        for u, cu, cv in groups[v]:
            g_u_parts.append(u)
            g_cu_parts.append(cu)
            g_cv_parts.append(cv)
    g_u = np.asarray(g_u_parts, dtype=np.int64)
    g_cu = np.asarray(g_cu_parts, dtype=np.int64)
    g_cv = np.asarray(g_cv_parts, dtype=np.int64)

    choice = _kernels.brute_force_search(
        cand_off, cand_cols, grp_off, g_u, g_cu, g_cv, n
    )
    if choice is None:
        return None
    out = {v: uni[int(choice[v])] for v in range(n)}
    assert verify_colouring(g, out, bundle.lists)
    return out
