"""Clusters of infinitely near points: proximity structure, dual graph, chains.

A cluster is a finite set of points equal or infinitely near to a single
origin O, closed under taking predecessors.  Points are kept in an admissible
total order (index 0 is O, every proximity target precedes the point).  Each
non-origin point records the point in whose first neighbourhood it lies (its
parent) and the set of one or two earlier points it is proximate to: one for
a free point, two for a satellite.

Everything here is unweighted; virtual multiplicities live in `weighted`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import ClusterError

ORIGIN = 0


@dataclass(frozen=True)
class Diagnostic:
    """One violated skeleton rule, attached to the offending point."""

    rule: str
    point: Optional[int]
    message: str

    def __str__(self) -> str:
        where = "" if self.point is None else f" at point {self.point}"
        return f"[{self.rule}]{where}: {self.message}"


@dataclass(frozen=True)
class ClusterSkeleton:
    """Ordered point set with parent and proximity structure.

    `parents[p]` is None for the origin; `proximities[p]` is a frozenset of
    earlier indices (empty for the origin).  Tags are unique human-readable
    names used by the DSL and all reports.
    """

    parents: tuple[Optional[int], ...]
    proximities: tuple[frozenset[int], ...]
    tags: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.parents)

    @property
    def points(self) -> range:
        return range(len(self.parents))

    def is_free(self, p: int) -> bool:
        return p != ORIGIN and len(self.proximities[p]) == 1

    def is_satellite(self, p: int) -> bool:
        return len(self.proximities[p]) == 2

    def second_target(self, p: int) -> Optional[int]:
        """The non-parent proximity target of a satellite, else None."""
        for q in self.proximities[p]:
            if q != self.parents[p]:
                return q
        return None

    @cached_property
    def proximate_to(self) -> tuple[tuple[int, ...], ...]:
        """For each q, the points of the cluster proximate to q (ascending)."""
        rows: list[list[int]] = [[] for _ in self.points]
        for p in self.points:
            for q in self.proximities[p]:
                if 0 <= q < len(rows):
                    rows[q].append(p)
        return tuple(tuple(sorted(row)) for row in rows)

    def proximate_count(self, q: int) -> int:
        """r_q, the number of cluster points proximate to q."""
        return len(self.proximate_to[q])

    @cached_property
    def ancestor_sets(self) -> tuple[frozenset[int], ...]:
        """Predecessors of each point (the points it is infinitely near to)."""
        sets: list[frozenset[int]] = []
        for p in self.points:
            par = self.parents[p]
            if par is None:
                sets.append(frozenset())
            else:
                sets.append(sets[par] | {par})
        return tuple(sets)

    def geq(self, p: int, q: int) -> bool:
        """True if p is infinitely near or equal to q."""
        return p == q or q in self.ancestor_sets[p]

    def predecessors(self, p: int) -> frozenset[int]:
        """p together with every point preceding it."""
        return self.ancestor_sets[p] | {p}

    @cached_property
    def tag_index(self) -> dict:
        return {tag: p for p, tag in enumerate(self.tags)}

    def index_of(self, tag: str) -> int:
        try:
            return self.tag_index[tag]
        except KeyError:
            raise ClusterError(f"no point tagged {tag!r}") from None

    @cached_property
    def satellite_pairs(self) -> dict:
        """Map {a, b} -> satellite point proximate to both a and b."""
        pairs = {}
        for p in self.points:
            if len(self.proximities[p]) == 2:
                pairs.setdefault(self.proximities[p], p)
        return pairs

    def require_valid(self) -> "ClusterSkeleton":
        problems = validate(self)
        if problems:
            raise ClusterError(
                "invalid skeleton: " + "; ".join(str(d) for d in problems)
            )
        return self


def validate(skeleton: ClusterSkeleton) -> list[Diagnostic]:
    """Check every skeleton rule; return one diagnostic per violation.

    An empty list means the skeleton is a valid Enriques-diagram structure.
    Rules follow the order/closure/proximity axioms, plus two structural
    rules: unique tags, and at most one satellite per proximity pair (two
    points at the same intersection of exceptional components cannot exist,
    and without this rule the dual graph need not be a tree).
    """
    out: list[Diagnostic] = []
    n = len(skeleton)
    if n == 0:
        return [Diagnostic("single-origin", None, "empty cluster has no origin")]
    if skeleton.parents[ORIGIN] is not None or skeleton.proximities[ORIGIN]:
        out.append(
            Diagnostic("single-origin", ORIGIN, "origin must have no parent and no proximities")
        )

    seen_tags: dict = {}
    for p, tag in enumerate(skeleton.tags):
        if tag in seen_tags:
            out.append(Diagnostic("tag-duplicate", p, f"tag {tag!r} already used by point {seen_tags[tag]}"))
        else:
            seen_tags[tag] = p

    for p in range(1, n):
        prox = skeleton.proximities[p]
        parent = skeleton.parents[p]
        if not prox or parent is None:
            out.append(Diagnostic("single-origin", p, "non-origin point with no proximities (second origin)"))
            continue
        bad_target = False
        for q in prox:
            if not 0 <= q < n:
                out.append(Diagnostic("target-missing", p, f"proximity target {q} is not a point of the cluster"))
                bad_target = True
            elif q >= p:
                out.append(Diagnostic("admissible-order", p, f"proximity target {q} does not precede the point"))
                bad_target = True
        if len(prox) > 2:
            out.append(Diagnostic("proximity-count", p, f"proximate to {len(prox)} points; at most 2 allowed"))
        if parent not in prox:
            out.append(Diagnostic("parent-membership", p, "parent is not among the proximity targets"))
            continue
        if bad_target or len(prox) > 2:
            continue
        if len(prox) == 2:
            other = next(q for q in prox if q != parent)
            if other not in skeleton.proximities[parent]:
                out.append(
                    Diagnostic(
                        "satellite-inheritance",
                        p,
                        f"satellite target {other} is not a proximity target of the parent {parent}",
                    )
                )

    pair_owner: dict = {}
    for p in range(1, n):
        prox = skeleton.proximities[p]
        if len(prox) == 2 and all(0 <= q < p for q in prox):
            if prox in pair_owner:
                out.append(
                    Diagnostic(
                        "satellite-occupied",
                        p,
                        f"points {pair_owner[prox]} and {p} are both proximate to the same pair",
                    )
                )
            else:
                pair_owner[prox] = p
    return out


class SkeletonBuilder:
    """Incremental constructor; `build()` validates and freezes the result."""

    def __init__(self):
        self._parents: list[Optional[int]] = []
        self._prox: list[frozenset[int]] = []
        self._tags: list[str] = []

    def _add(self, parent: Optional[int], prox: frozenset[int], tag: Optional[str]) -> int:
        p = len(self._parents)
        if tag is None:
            tag = "O" if p == ORIGIN else f"p{p}"
        self._parents.append(parent)
        self._prox.append(prox)
        self._tags.append(tag)
        return p

    def origin(self, tag: str = "O") -> int:
        if self._parents:
            raise ClusterError("origin must be the first point")
        return self._add(None, frozenset(), tag)

    def free(self, parent: int, tag: Optional[str] = None) -> int:
        return self._add(parent, frozenset({parent}), tag)

    def satellite(self, parent: int, other: int, tag: Optional[str] = None) -> int:
        return self._add(parent, frozenset({parent, other}), tag)

    def build(self) -> ClusterSkeleton:
        skeleton = ClusterSkeleton(tuple(self._parents), tuple(self._prox), tuple(self._tags))
        return skeleton.require_valid()


def chain_skeleton(length: int, tags: Optional[Sequence[str]] = None) -> ClusterSkeleton:
    """Origin followed by `length - 1` free points, each over the previous."""
    b = SkeletonBuilder()
    prev = b.origin(tags[0] if tags else "O")
    for i in range(1, length):
        prev = b.free(prev, tags[i] if tags else None)
    return b.build()


def extend_point(
    skeleton: ClusterSkeleton, targets: Iterable[int], tag: Optional[str] = None
) -> ClusterSkeleton:
    """Append one new point proximate to `targets`; parent is the latest target."""
    targets = frozenset(targets)
    if not 1 <= len(targets) <= 2:
        raise ClusterError("a new point must be proximate to one or two existing points")
    for q in targets:
        if not 0 <= q < len(skeleton):
            raise ClusterError(f"proximity target {q} is not a point of the cluster")
    parent = max(targets)
    if tag is None:
        tag = _fresh_tag("w", skeleton.tags)
    elif tag in skeleton.tag_index:
        raise ClusterError(f"tag {tag!r} already in use")
    extended = ClusterSkeleton(
        skeleton.parents + (parent,),
        skeleton.proximities + (targets,),
        skeleton.tags + (tag,),
    )
    if len(targets) == 2:
        other = min(targets)
        if other not in skeleton.proximities[parent]:
            raise ClusterError(
                f"cannot attach satellite: {skeleton.tags[other]} is not a proximity "
                f"target of {skeleton.tags[parent]}"
            )
        if targets in skeleton.satellite_pairs:
            raise ClusterError(
                "satellite position already occupied by point "
                f"{skeleton.tags[skeleton.satellite_pairs[targets]]}"
            )
    return extended


def _fresh_tag(stem: str, used: Sequence[str]) -> str:
    taken = set(used)
    if stem not in taken:
        return stem
    i = 1
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


def restrict(
    skeleton: ClusterSkeleton, keep: Iterable[int]
) -> tuple[ClusterSkeleton, tuple[int, ...]]:
    """Sub-skeleton on `keep` (which must be predecessor-closed).

    Returns the restricted skeleton and the kept old indices in order.
    """
    kept = tuple(sorted(set(keep)))
    index = {old: new for new, old in enumerate(kept)}
    parents: list[Optional[int]] = []
    prox: list[frozenset[int]] = []
    for old in kept:
        for q in skeleton.proximities[old]:
            if q not in index:
                raise ClusterError(
                    f"restriction is not predecessor-closed: {skeleton.tags[old]} "
                    f"needs {skeleton.tags[q]}"
                )
        par = skeleton.parents[old]
        parents.append(None if par is None else index[par])
        prox.append(frozenset(index[q] for q in skeleton.proximities[old]))
    return (
        ClusterSkeleton(tuple(parents), tuple(prox), tuple(skeleton.tags[old] for old in kept)),
        kept,
    )


def canonical(skeleton: ClusterSkeleton) -> ClusterSkeleton:
    """Relabel points into the canonical admissible order.

    Depth-first from the origin, visiting children sorted by subtree size
    then tag.  Two skeletons equal up to an order-preserving relabeling have
    identical canonical forms.
    """
    skeleton.require_valid()
    children: list[list[int]] = [[] for _ in skeleton.points]
    for p in skeleton.points:
        par = skeleton.parents[p]
        if par is not None:
            children[par].append(p)

    size = [1] * len(skeleton)
    for p in reversed(skeleton.points):
        par = skeleton.parents[p]
        if par is not None:
            size[par] += size[p]

    order: list[int] = []
    stack = [ORIGIN]
    while stack:
        p = stack.pop()
        order.append(p)
        for c in sorted(children[p], key=lambda c: (size[c], skeleton.tags[c]), reverse=True):
            stack.append(c)
    index = {old: new for new, old in enumerate(order)}
    parents = tuple(
        None if skeleton.parents[old] is None else index[skeleton.parents[old]] for old in order
    )
    prox = tuple(frozenset(index[q] for q in skeleton.proximities[old]) for old in order)
    return ClusterSkeleton(parents, prox, tuple(skeleton.tags[old] for old in order))


# -- Proximity matrix ---------------------------------------------------------


@dataclass(frozen=True)
class ProximityMatrix:
    """Lower-triangular unimodular matrix: 1 on the diagonal, -1 at (p, q) iff p -> q."""

    rows: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.rows)

    def transpose(self) -> "ProximityMatrix":
        n = len(self.rows)
        return ProximityMatrix(tuple(tuple(self.rows[i][j] for i in range(n)) for j in range(n)))

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(r * x for r, x in zip(row, vec)) for row in self.rows)

    def inverse(self) -> "ProximityMatrix":
        """Exact integer inverse (forward substitution; determinant is 1)."""
        n = len(self.rows)
        inv = [[0] * n for _ in range(n)]
        for j in range(n):
            col = [0] * n
            col[j] = 1
            for i in range(j, n):
                s = col[i] - sum(self.rows[i][k] * inv[k][j] for k in range(j, i))
                inv[i][j] = s
        return ProximityMatrix(tuple(tuple(row) for row in inv))


def proximity_matrix(skeleton: ClusterSkeleton) -> ProximityMatrix:
    skeleton.require_valid()
    n = len(skeleton)
    rows = []
    for p in range(n):
        row = [0] * n
        row[p] = 1
        for q in skeleton.proximities[p]:
            row[q] = -1
        rows.append(tuple(row))
    return ProximityMatrix(tuple(rows))


# -- Dual graph and chains -----------------------------------------------------


@dataclass(frozen=True)
class DualGraph:
    """Intersection tree of the exceptional components, with vertex weights.

    Vertices carry the original point indices; `weight(p)` is r_p + 1, the
    negative of the self-intersection of the component of p.
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    weights: tuple[int, ...]

    @cached_property
    def adjacency(self) -> dict:
        adj = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    def weight(self, p: int) -> int:
        return self.weights[self.vertices.index(p)]

    def degree(self, p: int) -> int:
        return len(self.adjacency[p])

    def are_adjacent(self, p: int, q: int) -> bool:
        return q in self.adjacency[p]

    def chain(self, a: int, b: int) -> tuple[int, ...]:
        """The unique path from a to b (inclusive)."""
        if a not in self.adjacency or b not in self.adjacency:
            raise ClusterError("chain endpoints must be vertices of the graph")
        if a == b:
            return (a,)
        back = {a: None}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            if u == b:
                break
            for v in self.adjacency[u]:
                if v not in back:
                    back[v] = u
                    queue.append(v)
        if b not in back:
            raise ClusterError("graph is disconnected; no chain exists")
        path = [b]
        while path[-1] != a:
            path.append(back[path[-1]])
        path.reverse()
        return tuple(path)

    def open_chain(self, a: int, b: int) -> tuple[int, ...]:
        """ch0(a, b): the chain with both endpoints removed."""
        return self.chain(a, b)[1:-1]

    def induced(self, keep: Iterable[int]) -> "DualGraph":
        """Subgraph on `keep`, weights retained from this graph."""
        keep_set = set(keep)
        vertices = tuple(v for v in self.vertices if v in keep_set)
        edges = tuple((u, v) for u, v in self.edges if u in keep_set and v in keep_set)
        weights = tuple(self.weights[self.vertices.index(v)] for v in vertices)
        return DualGraph(vertices, edges, weights)


def dual_graph(skeleton: ClusterSkeleton) -> DualGraph:
    """Dual graph of the exceptional divisor obtained by blowing up the cluster.

    For q later than p, the components of p and q meet exactly when q is
    proximate to p and no point of the cluster is proximate to both (such a
    point is their intersection, and blowing it up separates them).
    """
    skeleton.require_valid()
    occupied = skeleton.satellite_pairs
    edges = []
    for q in skeleton.points:
        for p in skeleton.proximities[q]:
            if frozenset((p, q)) not in occupied:
                edges.append((p, q))
    edges.sort()
    weights = tuple(skeleton.proximate_count(p) + 1 for p in skeleton.points)
    return DualGraph(tuple(skeleton.points), tuple(edges), weights)


# -- Maximal proximity ----------------------------------------------------------


def is_mK_proximate(skeleton: ClusterSkeleton, p: int, q: int) -> bool:
    """True if p is maximal (for the infinitely-near order) among points proximate to q."""
    if q not in skeleton.proximities[p]:
        return False
    return not any(
        r != p and p in skeleton.ancestor_sets[r] for r in skeleton.proximate_to[q]
    )


def mK_targets(skeleton: ClusterSkeleton, p: int) -> frozenset[int]:
    return frozenset(q for q in skeleton.proximities[p] if is_mK_proximate(skeleton, p, q))


def is_mK_free(skeleton: ClusterSkeleton, p: int) -> bool:
    return len(mK_targets(skeleton, p)) == 1


def is_mK_satellite(skeleton: ClusterSkeleton, p: int) -> bool:
    return len(mK_targets(skeleton, p)) == 2
