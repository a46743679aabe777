"""Multigraph model for conflict list colouring.

A conflict instance attaches to each edge uv an *ordered* pair of colours
(c, c'): the constraint is violated exactly when u receives c and v receives
c'.  Parallel edges are simply multiple constraints on the same vertex pair,
so the multigraph G and the labelling tau live in one structure.  Degrees
count constraints (each parallel edge counts separately).  The girth
condition used throughout bans 3- and 4-cycles of the *underlying simple
graph* only; 2-cycles are the whole point of the parallel-edge encoding and
are always permitted.

Orientation convention: a constraint is stored once, on the pair (u, v) with
u < v, components ordered u-first.  The reversed view T(v,u) swaps the
components and is computed on demand, never stored.
"""

from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple

Vertex = int
Colour = int

# A partial colouring: vertex -> colour for the assigned subset of vertices.
Colouring = dict[int, int]

# Candidate colours per vertex, indexed by vertex id.
ListAssignment = list[set[int]]


class StructuralError(ValueError):
    """Malformed graph mutation: self-loop, bad vertex id, bad colour."""


class Constraint(NamedTuple):
    """Ordered colour pair on an edge.

    ``first`` restricts the first vertex of the oriented pair, ``second``
    the second: stored on (u, v), it fires iff sigma(u) = first and
    sigma(v) = second.
    """

    first: Colour
    second: Colour

    def swapped(self) -> Constraint:
        return Constraint(self.second, self.first)


class MultiGraph:
    """Vertices plus per-pair multisets of ordered colour-pair constraints."""

    __slots__ = ("n", "_pairs", "_deg", "_adj")

    def __init__(self, n_vertices: int) -> None:
        if n_vertices < 0:
            raise StructuralError(f"negative vertex count {n_vertices}")
        self.n = n_vertices
        # canonical pair (u < v) -> list of constraints oriented u-first
        self._pairs: dict[tuple[int, int], list[Constraint]] = {}
        self._deg = [0] * n_vertices
        self._adj: list[set[int]] = [set() for _ in range(n_vertices)]

    # -- construction ---------------------------------------------------

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise StructuralError(f"vertex {v} out of range [0, {self.n})")

    def add_constraint(self, u: int, v: int, c: tuple[int, int]) -> None:
        """Append constraint ``c`` to T(u, v); degrees of u and v go up by 1.

        ``c`` is the pair (colour forbidden at u, colour forbidden at v);
        it is reoriented internally if u > v.
        """
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise StructuralError(f"self-loop at vertex {u}")
        cu, cv = c
        if cu < 0 or cv < 0:
            raise StructuralError(f"negative colour in constraint {c!r}")
        if u > v:
            u, v, cu, cv = v, u, cv, cu
        self._pairs.setdefault((u, v), []).append(Constraint(cu, cv))
        self._deg[u] += 1
        self._deg[v] += 1
        self._adj[u].add(v)
        self._adj[v].add(u)

    # -- accessors --------------------------------------------------------

    def degree(self, v: int) -> int:
        return self._deg[v]

    def max_degree(self) -> int:
        return max(self._deg, default=0)

    def neighbours(self, v: int) -> tuple[int, ...]:
        return tuple(sorted(self._adj[v]))

    def constraints_between(self, u: int, v: int) -> tuple[Constraint, ...]:
        """T(u, v): all constraints on the pair, oriented u-first."""
        if u < v:
            return tuple(self._pairs.get((u, v), ()))
        return tuple(c.swapped() for c in self._pairs.get((v, u), ()))

    def edges(self) -> Iterator[tuple[int, int, Constraint]]:
        """All constraints as (u, v, c) with u < v, pairs in sorted order."""
        for pair in sorted(self._pairs):
            u, v = pair
            for c in self._pairs[pair]:
                yield u, v, c

    @property
    def n_constraints(self) -> int:
        return sum(len(cs) for cs in self._pairs.values())

    def colours_used(self) -> set[int]:
        return {c for cs in self._pairs.values() for k in cs for c in k}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiGraph):
            return NotImplemented
        if self.n != other.n or self._pairs.keys() != other._pairs.keys():
            return False
        return all(
            sorted(self._pairs[p]) == sorted(other._pairs[p]) for p in self._pairs
        )

    def __repr__(self) -> str:
        return f"MultiGraph(n={self.n}, constraints={self.n_constraints})"

    # -- structural checks ------------------------------------------------

    def conflict_degree(self) -> int:
        """D(tau): max over ordered pairs (u,v) and colours c of the number
        of constraints in T(u,v) with first component c.

        Both orientations of every stored pair are scanned; an edgeless
        graph has conflict degree 0.
        """
        best = 0
        for cs in self._pairs.values():
            firsts: dict[int, int] = {}
            seconds: dict[int, int] = {}
            for k in cs:
                firsts[k.first] = firsts.get(k.first, 0) + 1
                seconds[k.second] = seconds.get(k.second, 0) + 1
            for counts in (firsts, seconds):
                m = max(counts.values())
                if m > best:
                    best = m
        return best

    def validate_girth(self) -> bool:
        """True iff the underlying simple graph has no 3- or 4-cycle.

        A triangle exists iff some edge's endpoints share a neighbour; a
        4-cycle exists iff some vertex pair has two distinct common
        neighbours.  Both reduce to one scan over the wedges (paths of
        length 2): an adjacent wedge pair is a triangle, a repeated wedge
        pair is a 4-cycle.  O(sum of squared degrees).
        """
        seen: set[tuple[int, int]] = set()
        for x in range(self.n):
            nbrs = sorted(self._adj[x])
            for i in range(len(nbrs)):
                a = nbrs[i]
                adj_a = self._adj[a]
                for j in range(i + 1, len(nbrs)):
                    b = nbrs[j]
                    if b in adj_a:
                        return False  # triangle x-a-b
                    if (a, b) in seen:
                        return False  # second common neighbour of (a, b)
                    seen.add((a, b))
        return True


# -- colouring-state counts ------------------------------------------------


def t_count(
    g: MultiGraph,
    lists: ListAssignment,
    colouring: Colouring,
    v: int,
    u: int,
    c: int,
) -> int:
    """t(v,u,c): constraints (c,c') in T(v,u) whose partner c' is live at u.

    Zero when u is coloured (a coloured neighbour is out of the game; the
    colours it forbids were already removed from live lists).
    """
    if u in colouring:
        return 0
    lu = lists[u]
    return sum(1 for k in g.constraints_between(v, u) if k.first == c and k.second in lu)


def t_total(
    g: MultiGraph,
    lists: ListAssignment,
    colouring: Colouring,
    v: int,
    c: int,
) -> int:
    """t(v,c) = sum over neighbours u of t(v,u,c)."""
    return sum(t_count(g, lists, colouring, v, u, c) for u in g.neighbours(v))


def verify_colouring(
    g: MultiGraph,
    colouring: Colouring,
    lists: ListAssignment | None = None,
) -> bool:
    """True iff no constraint with both endpoints coloured is violated.

    Partial colourings check only fully-assigned constraints.  When
    ``lists`` is given, additionally require every assigned colour to be a
    member of its vertex's list.
    """
    for (u, v), cs in g._pairs.items():
        cu = colouring.get(u)
        if cu is None:
            continue
        cv = colouring.get(v)
        if cv is None:
            continue
        for k in cs:
            if cu == k.first and cv == k.second:
                return False
    if lists is not None:
        for v, c in colouring.items():
            if c not in lists[v]:
                return False
    return True


def copy_lists(lists: Iterable[set[int]]) -> ListAssignment:
    return [set(s) for s in lists]
