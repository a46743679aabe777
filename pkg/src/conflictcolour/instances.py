"""Instance generators, reductions, and the instance file format.

An :class:`InstanceBundle` is the unit everything else consumes: a
constraint multigraph, a list assignment, and free-form provenance metadata.
The two adversarial constructions here — the two-core gadget of
:func:`gen_example1` and the :func:`blowup` transformation — produce
instances whose conflict degree is far below the trivial bound while being
uncolourable, which is what makes them useful stress inputs.  The remaining
generators are plumbing: k-colouring and adaptable-instance reductions into
conflict form, and a configuration-model generator for the C3/C4-free
regular graphs the colouring procedure is designed for.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph import ListAssignment, MultiGraph, copy_lists

FORMAT_VERSION = 1


class ParameterError(ValueError):
    """Generator or reduction called with out-of-domain parameters."""


class GenerationError(RuntimeError):
    """A randomized generator exhausted its retry budget."""


class InstanceFormatError(ValueError):
    """Instance file malformed; message carries the offending line number."""


class ResourceBudgetError(RuntimeError):
    """An iterated construction outgrew its configured budget.

    Carries whatever was built before the limit: ``trace`` holds the levels
    completed so far and ``bundle`` the last instance actually constructed.
    """

    def __init__(self, message: str, trace: BlowupTrace, bundle: InstanceBundle):
        super().__init__(message)
        self.trace = trace
        self.bundle = bundle


@dataclass
class InstanceBundle:
    """(graph, lists, meta) — the tuple (G, tau, L) plus provenance."""

    graph: MultiGraph
    lists: ListAssignment
    meta: dict[str, str] = field(default_factory=dict)

    def colour_universe(self) -> list[int]:
        """Sorted union of list colours and constraint colours."""
        universe = self.graph.colours_used()
        for s in self.lists:
            universe |= s
        return sorted(universe)

    def record_list_sizes(self) -> None:
        sizes = [len(s) for s in self.lists]
        self.meta["list_size_min"] = str(min(sizes, default=0))
        self.meta["list_size_max"] = str(max(sizes, default=0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InstanceBundle):
            return NotImplemented
        return (
            self.graph == other.graph
            and self.lists == other.lists
            and self.meta == other.meta
        )


def _uniform_lists(n: int, ell: int) -> ListAssignment:
    return [set(range(1, ell + 1)) for _ in range(n)]


# -- Example 1: the two-core gadget ----------------------------------------


def gen_example1(ell: int, target_delta: int) -> InstanceBundle:
    """Two core vertices joined by every ordered pair from [ell] x [ell].

    The core alone is uncolourable (whatever pair of colours the two ends
    pick is one of the ell^2 constraints) yet its conflict degree is only
    ell.  When ``target_delta`` exceeds the core degree ell^2, a disjoint
    star is appended — a fresh hub with ``target_delta`` pendant leaves,
    each edge constrained (1,1) — raising the max degree without touching
    the core, the conflict degree, or girth validity.
    """
    if ell < 1:
        raise ParameterError(f"ell must be >= 1, got {ell}")
    if target_delta < ell * ell:
        raise ParameterError(
            f"target_delta {target_delta} below core degree {ell * ell}"
        )
    pad = target_delta > ell * ell
    n = 2 + (1 + target_delta if pad else 0)
    g = MultiGraph(n)
    for a in range(1, ell + 1):
        for b in range(1, ell + 1):
            g.add_constraint(0, 1, (a, b))
    if pad:
        hub = 2
        for leaf in range(3, 3 + target_delta):
            g.add_constraint(hub, leaf, (1, 1))
    bundle = InstanceBundle(
        graph=g,
        lists=_uniform_lists(n, ell),
        meta={
            "generator": "example1",
            "ell": str(ell),
            "target_delta": str(target_delta),
        },
    )
    bundle.record_list_sizes()
    return bundle


# -- Example 2: the blow-up ------------------------------------------------


@dataclass
class BlowupTrace:
    """Per-level (ell_i, delta_i, D_i) records of an iterated blow-up."""

    rows: list[tuple[int, int, int]]

    def validate(self) -> None:
        """Assert the level recurrences hold exactly on every step."""
        for i in range(1, len(self.rows)):
            ell0, delta0, d0 = self.rows[i - 1]
            ell1, delta1, d1 = self.rows[i]
            if ell1 != ell0 * ell0:
                raise AssertionError(f"level {i}: ell {ell1} != {ell0}^2")
            if delta1 != delta0 * ell0 * ell0:
                raise AssertionError(f"level {i}: delta {delta1} != {delta0}*{ell0}^2")
            if d1 != d0 * ell0:
                raise AssertionError(f"level {i}: D {d1} != {d0}*{ell0}")

    @classmethod
    def predict(cls, ell: int, delta: int, d: int, levels: int) -> BlowupTrace:
        """Unroll the recurrences arithmetically, no graphs built."""
        rows = [(ell, delta, d)]
        for _ in range(levels):
            rows.append((ell * ell, delta * ell * ell, d * ell))
            ell, delta, d = rows[-1]
        return cls(rows)

    def to_json(self) -> str:
        return json.dumps(self.rows)

    @classmethod
    def from_json(cls, text: str) -> BlowupTrace:
        return cls([tuple(row) for row in json.loads(text)])


def _measured_row(b: InstanceBundle) -> tuple[int, int, int]:
    sizes = {len(s) for s in b.lists}
    if len(sizes) != 1:
        raise ParameterError("blow-up levels need uniform list sizes")
    return (sizes.pop(), b.graph.max_degree(), b.graph.conflict_degree())


def blowup(b: InstanceBundle) -> InstanceBundle:
    """One level of the Example-2 construction.

    The universe [ell] becomes [ell^2], partitioned into ell contiguous
    blocks C_1..C_ell of size ell (block C_i = {(i-1)ell+1 .. i*ell}); each
    constraint (i, j) is replaced by all of P_ij = C_i x C_j, enumerated in
    row-major order.  List sizes square, max degree multiplies by ell^2,
    and the conflict degree multiplies by ell: for a colour x in block C_i,
    the constraints with first component x are exactly ell per original
    constraint with first component i.
    """
    sizes = {frozenset(s) for s in b.lists}
    if len(sizes) != 1:
        raise ParameterError("blowup requires all lists equal")
    ell = len(next(iter(sizes)))
    if next(iter(sizes)) != frozenset(range(1, ell + 1)):
        raise ParameterError(f"blowup requires colour universe [1..{ell}]")

    def block(i: int) -> range:
        return range((i - 1) * ell + 1, i * ell + 1)

    g = MultiGraph(b.graph.n)
    for u, v, k in b.graph.edges():
        for x in block(k.first):
            for y in block(k.second):
                g.add_constraint(u, v, (x, y))
    out = InstanceBundle(
        graph=g,
        lists=_uniform_lists(b.graph.n, ell * ell),
        meta=dict(b.meta),
    )
    prior = (
        BlowupTrace.from_json(b.meta["blowup_trace"])
        if "blowup_trace" in b.meta
        else BlowupTrace([_measured_row(b)])
    )
    prior.rows.append(_measured_row(out))
    out.meta["blowup_trace"] = prior.to_json()
    out.meta["generator"] = b.meta.get("generator", "unknown") + "+blowup"
    out.record_list_sizes()
    return out


def blowup_iterate(
    b: InstanceBundle, k: int, max_constraints: int = 2_000_000
) -> tuple[InstanceBundle, BlowupTrace]:
    """Apply :func:`blowup` k times, tracking the measured trace.

    Every trace row is measured from the built graph, not computed from the
    recurrences — the recurrences are what the tests check the measurements
    against.  Raises :class:`ResourceBudgetError` (carrying the partial
    trace and the last built level) as soon as the *next* level would
    exceed ``max_constraints``.
    """
    if k < 0:
        raise ParameterError(f"negative level count {k}")
    trace = BlowupTrace([_measured_row(b)])
    cur = b
    for level in range(1, k + 1):
        ell = trace.rows[-1][0]
        next_m = cur.graph.n_constraints * ell * ell
        if next_m > max_constraints:
            raise ResourceBudgetError(
                f"level {level} needs {next_m} constraints "
                f"(budget {max_constraints})",
                trace=trace,
                bundle=cur,
            )
        cur = blowup(cur)
        trace.rows.append(_measured_row(cur))
    return cur, trace


def f_alpha(alpha: float) -> float:
    """f(alpha) = 1 - 2^(-floor(log_sqrt2(alpha)) - 1), for alpha >= 1.

    The floor is taken by integer comparison against alpha^2 (the power of
    sqrt(2) test doubles into a power-of-2 test), so boundary inputs such
    as alpha = 2*sqrt(2) land on the correct stair.
    """
    if alpha < 1:
        raise ParameterError(f"f_alpha domain is alpha >= 1, got {alpha}")
    a2 = alpha * alpha
    k = max(0, math.floor(2 * math.log2(alpha)))
    while 2.0 ** (k + 1) <= a2:
        k += 1
    while k > 0 and 2.0**k > a2:
        k -= 1
    return 1.0 - 2.0 ** (-k - 1)


# -- reductions -------------------------------------------------------------


def reduce_k_colouring(
    simple_edges: Iterable[tuple[int, int]], k: int
) -> InstanceBundle:
    """k-colourability of a simple graph as a conflict instance.

    Each simple edge becomes k parallel constraints (j, j), j in [k] — the
    multiplicity-k multigraph whose proper conflict colourings are exactly
    the proper k-colourings of the input.
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    edges = [(min(u, v), max(u, v)) for u, v in simple_edges]
    if any(u == v for u, v in edges):
        raise ParameterError("self-loop in simple edge list")
    if len(edges) != len(set(edges)):
        raise ParameterError("duplicate edge in simple edge list")
    n = max((v for e in edges for v in e), default=-1) + 1
    g = MultiGraph(n)
    for u, v in edges:
        for j in range(1, k + 1):
            g.add_constraint(u, v, (j, j))
    bundle = InstanceBundle(
        graph=g,
        lists=_uniform_lists(n, k),
        meta={"generator": "kreduce", "k": str(k)},
    )
    bundle.record_list_sizes()
    return bundle


def adaptable_lift(
    labelled_edges: Iterable[tuple[int, int, int]],
    lists: ListAssignment,
    n_vertices: int | None = None,
) -> InstanceBundle:
    """Adaptable instance (one colour label per edge) to conflict form.

    Label c becomes constraint (c, c).  On a simple graph the result has
    conflict degree at most 1; repeated labels between the same pair (a
    multigraph input) raise it to the label's multiplicity.
    """
    edges = list(labelled_edges)
    n = n_vertices if n_vertices is not None else (
        max((max(u, v) for u, v, _ in edges), default=-1) + 1
    )
    if len(lists) != n:
        raise ParameterError(f"lists has {len(lists)} entries for {n} vertices")
    g = MultiGraph(n)
    for u, v, c in edges:
        g.add_constraint(u, v, (c, c))
    bundle = InstanceBundle(
        graph=g,
        lists=copy_lists(lists),
        meta={"generator": "adaptlift"},
    )
    bundle.record_list_sizes()
    return bundle


def edge_colour_labels(g: MultiGraph) -> list[tuple[int, int, int]]:
    """Greedy proper edge colouring as an adaptable labelling.

    Edges are scanned in canonical order; each takes the smallest positive
    colour unused at both endpoints, so at most 2*Delta - 1 colours appear
    and every colour occurs at most once per vertex — which is what makes
    the lifted instance's t-counts all 0/1.  Parallel edges are each
    labelled separately.
    """
    used: list[set[int]] = [set() for _ in range(g.n)]
    out: list[tuple[int, int, int]] = []
    for u, v, _ in g.edges():
        c = 1
        while c in used[u] or c in used[v]:
            c += 1
        used[u].add(c)
        used[v].add(c)
        out.append((u, v, c))
    return out


# -- high-girth regular graphs ----------------------------------------------


def gen_high_girth_regular(n: int, delta: int, seed: int) -> MultiGraph:
    """Simple delta-regular graph with no 3- or 4-cycles, or GenerationError.

    Configuration model: pair up n*delta stubs uniformly, then repair
    defects (loops, parallel edges, edges lying on a C3 or C4) by swapping
    a random defective edge with a random other edge.  After each swap the
    defect set is recomputed from scratch — quadratic but simple, and the
    instance sizes this project runs at make it cheap.  The swap budget is
    100*n; exhausting it (e.g. n=4, delta=3, where no such graph exists)
    raises :class:`GenerationError`.
    """
    if n < 1 or delta < 1:
        raise ParameterError(f"need n, delta >= 1, got ({n}, {delta})")
    if (n * delta) % 2 != 0:
        raise ParameterError(f"n*delta must be even, got {n}*{delta}")
    if delta >= n:
        raise ParameterError(f"delta {delta} needs more than {n} vertices")
    rng = np.random.default_rng(np.random.SeedSequence([0x9E37, seed, n, delta]))

    stubs = np.repeat(np.arange(n), delta)
    rng.shuffle(stubs)
    edges: list[list[int]] = [
        [int(stubs[2 * i]), int(stubs[2 * i + 1])] for i in range(len(stubs) // 2)
    ]

    def defective_indices() -> list[int]:
        adj: list[set[int]] = [set() for _ in range(n)]
        counts: dict[tuple[int, int], int] = {}
        for a, b in edges:
            if a != b:
                adj[a].add(b)
                adj[b].add(a)
                key = (min(a, b), max(a, b))
                counts[key] = counts.get(key, 0) + 1
        bad = []
        for idx, (a, b) in enumerate(edges):
            if a == b:
                bad.append(idx)
                continue
            if counts[(min(a, b), max(a, b))] > 1:
                bad.append(idx)
                continue
            # C3 through edge ab: a common neighbour.
            if adj[a] & adj[b]:
                bad.append(idx)
                continue
            # C4 through edge ab: x-y edge with x ~ b, y ~ a, x != y.
            on_c4 = False
            for x in adj[b]:
                if x == a:
                    continue
                for y in adj[x]:
                    if y != b and y != a and y in adj[a]:
                        on_c4 = True
                        break
                if on_c4:
                    break
            if on_c4:
                bad.append(idx)
        return bad

    budget = 100 * n
    swaps = 0
    while True:
        bad = defective_indices()
        if not bad:
            break
        if swaps >= budget:
            raise GenerationError(
                f"no C3/C4-free {delta}-regular graph found on {n} vertices "
                f"within {budget} swaps"
            )
        swaps += 1
        i = bad[int(rng.integers(len(bad)))]
        j = int(rng.integers(len(edges)))
        if i == j:
            continue
        # swap one endpoint of each; coin picks which crossing
        if rng.integers(2) == 0:
            edges[i][1], edges[j][1] = edges[j][1], edges[i][1]
        else:
            edges[i][1], edges[j][0] = edges[j][0], edges[i][1]

    # skeleton only: callers attach their own labelling and lists
    skeleton = MultiGraph(n)
    for a, b in edges:
        skeleton.add_constraint(a, b, (1, 1))
    return skeleton


# -- instance file format ----------------------------------------------------


def write_instance(bundle: InstanceBundle, path: str) -> None:
    """Textual instance format, fixed field order, diff-friendly.

    Header (version, n_vertices, colour_universe_size), then a [lists]
    section with one sorted-colour line per vertex, a [constraints] section
    with one "u v c_for_u c_for_v" line per constraint in canonical order,
    and a [meta] section of key=value lines sorted by key.
    """
    lines = [
        f"version {FORMAT_VERSION}",
        f"n_vertices {bundle.graph.n}",
        f"colour_universe_size {len(bundle.colour_universe())}",
        "[lists]",
    ]
    for v in range(bundle.graph.n):
        lines.append(" ".join(str(c) for c in sorted(bundle.lists[v])))
    lines.append("[constraints]")
    for u, v, k in bundle.graph.edges():
        lines.append(f"{u} {v} {k.first} {k.second}")
    lines.append("[meta]")
    for key in sorted(bundle.meta):
        value = bundle.meta[key]
        if "\n" in key or "\n" in value or "=" in key:
            raise InstanceFormatError(f"meta key {key!r} not representable")
        lines.append(f"{key}={value}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_instance(path: str) -> InstanceBundle:
    """Parse the instance format; errors carry 1-based line numbers."""
    with open(path, encoding="utf-8") as fh:
        raw = fh.read().splitlines()

    def fail(ln: int, msg: str) -> InstanceFormatError:
        return InstanceFormatError(f"{path}:{ln}: {msg}")

    header: dict[str, int] = {}
    idx = 0
    for key in ("version", "n_vertices", "colour_universe_size"):
        if idx >= len(raw):
            raise fail(idx + 1, f"missing header field {key}")
        parts = raw[idx].split()
        if len(parts) != 2 or parts[0] != key:
            raise fail(idx + 1, f"expected '{key} <int>', got {raw[idx]!r}")
        try:
            header[key] = int(parts[1])
        except ValueError:
            raise fail(idx + 1, f"non-integer {key}") from None
        idx += 1
    if header["version"] != FORMAT_VERSION:
        raise fail(1, f"unsupported version {header['version']}")
    n = header["n_vertices"]
    if n < 0:
        raise fail(2, "negative n_vertices")

    if idx >= len(raw) or raw[idx] != "[lists]":
        raise fail(idx + 1, "expected [lists]")
    idx += 1
    lists: ListAssignment = []
    for v in range(n):
        if idx >= len(raw):
            raise fail(idx + 1, f"missing list for vertex {v}")
        line = raw[idx]
        try:
            lists.append({int(tok) for tok in line.split()})
        except ValueError:
            raise fail(idx + 1, f"bad colour in list line {line!r}") from None
        idx += 1

    if idx >= len(raw) or raw[idx] != "[constraints]":
        raise fail(idx + 1, "expected [constraints]")
    idx += 1
    g = MultiGraph(n)
    while idx < len(raw) and raw[idx] != "[meta]":
        parts = raw[idx].split()
        if len(parts) != 4:
            raise fail(idx + 1, f"expected 'u v c_u c_v', got {raw[idx]!r}")
        try:
            u, v, cu, cv = (int(p) for p in parts)
            g.add_constraint(u, v, (cu, cv))
        except Exception as exc:  # rewrap with a line number
            raise fail(idx + 1, str(exc)) from None
        idx += 1

    if idx >= len(raw) or raw[idx] != "[meta]":
        raise fail(idx + 1, "expected [meta]")
    idx += 1
    meta: dict[str, str] = {}
    while idx < len(raw):
        line = raw[idx]
        if line:
            if "=" not in line:
                raise fail(idx + 1, f"expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            meta[key] = value
        idx += 1

    bundle = InstanceBundle(graph=g, lists=lists, meta=meta)
    declared = header["colour_universe_size"]
    actual = len(bundle.colour_universe())
    if declared != actual:
        raise fail(3, f"colour_universe_size {declared} but computed {actual}")
    return bundle
