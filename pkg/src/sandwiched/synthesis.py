"""Minimal singularities from their resolution graphs.

A minimal surface singularity is determined (as a resolution graph) by a
tree with vertex weights at least 2 and at least the vertex degree.  This
module builds, for any such graph, a weighted cluster and a boundary point
whose analysis reproduces the graph exactly and attains the extremal count:
the number of exceptional components through the singularity equals its
embedding dimension, i.e. multiplicity + 1 branches get contracted.

The construction: origin O, a free point u over it, and the chosen root
vertex as the satellite of the two, which makes the minimal contracted point
maximally proximate to two points.  Tree edges become free points under
their parent vertex; each vertex also receives enough extra free leaves
(weight - 1 - children many) to push its proximate count to weight - 1.
Multiplicities make every graph vertex excess-zero and every leaf, u and O
excess-one.  Nothing is trusted: the result self-certifies through the
analyzer before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from .analyzer import FreeOn, analyze
from .cluster import SkeletonBuilder
from .errors import ClusterError, InternalCheckError, ParseError
from .weighted import WeightedCluster, multiplicities_from_excesses


@dataclass(frozen=True)
class MinimalGraphSpec:
    """Tree with vertex weights: omega(q) >= 2 and omega(q) >= deg(q)."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    weights: tuple[int, ...]

    def weight(self, name: str) -> int:
        return self.weights[self.vertices.index(name)]

    def degree(self, name: str) -> int:
        return sum(1 for u, v in self.edges if name in (u, v))

    def require_valid(self) -> "MinimalGraphSpec":
        if not self.vertices:
            raise ClusterError("graph needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ClusterError("duplicate vertex names")
        if len(self.weights) != len(self.vertices):
            raise ClusterError("one weight per vertex required")
        known = set(self.vertices)
        for u, v in self.edges:
            if u not in known or v not in known:
                raise ClusterError(f"edge {u}-{v} uses an unknown vertex")
            if u == v:
                raise ClusterError(f"loop edge at {u}")
        if len(self.edges) != len(self.vertices) - 1:
            raise ClusterError("not a tree: wrong edge count")
        if not _connected(self.vertices, self.edges):
            raise ClusterError("not a tree: graph is disconnected")
        for name, omega in zip(self.vertices, self.weights):
            if omega < 2:
                raise ClusterError(f"weight of {name} must be at least 2")
            if omega < self.degree(name):
                raise ClusterError(
                    f"weight of {name} is below its degree: fundamental cycle "
                    "would not be reduced"
                )
        return self


def _connected(vertices, edges) -> bool:
    if not vertices:
        return False
    adjacency = {v: [] for v in vertices}
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        for nxt in adjacency[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(vertices)


def count_contracted_branches(spec: MinimalGraphSpec) -> int:
    """Branches contracted by the synthesized projection: sum of
    (weight - degree) over the graph, plus one."""
    spec.require_valid()
    return sum(spec.weight(v) - spec.degree(v) for v in spec.vertices) + 1


def synthesize(spec: MinimalGraphSpec) -> tuple[WeightedCluster, FreeOn]:
    """Cluster and boundary point realizing the graph with the extremal
    contracted-branch count; analyzer-verified before returning."""
    spec.require_valid()
    root = next(v for v in spec.vertices if spec.weight(v) > spec.degree(v))

    children: dict = {v: [] for v in spec.vertices}
    parent_vertex: dict = {root: None}
    order = [root]
    queue = [root]
    adjacency = {v: [] for v in spec.vertices}
    for u, v in spec.edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    vertex_rank = {v: i for i, v in enumerate(spec.vertices)}
    while queue:
        v = queue.pop(0)
        for nxt in sorted(adjacency[v], key=vertex_rank.__getitem__):
            if nxt not in parent_vertex:
                parent_vertex[nxt] = v
                children[v].append(nxt)
                order.append(nxt)
                queue.append(nxt)

    builder = SkeletonBuilder()
    used = set(spec.vertices)
    origin = builder.origin(_fresh("O", used))
    helper = builder.free(origin, _fresh("u", used))
    index: dict = {}
    extras: dict = {v: [] for v in spec.vertices}
    for v in order:
        if v == root:
            index[v] = builder.satellite(helper, origin, v)
        else:
            index[v] = builder.free(index[parent_vertex[v]], v)
        for i in range(spec.weight(v) - 1 - len(children[v])):
            extras[v].append(builder.free(index[v], _fresh(f"{v}_e{i}", used)))
    skeleton = builder.build()

    rho = [0] * len(skeleton)
    rho[origin] = 1
    rho[helper] = 1
    for leaves in extras.values():
        for leaf in leaves:
            rho[leaf] = 1
    cluster = multiplicities_from_excesses(skeleton, rho)
    boundary = FreeOn(index[root])

    report = analyze(cluster, boundary)
    _certify(spec, cluster, report, index)
    return cluster, boundary


def _fresh(name: str, used: set) -> str:
    candidate = name
    while candidate in used:
        candidate += "_"
    used.add(candidate)
    return candidate


def _certify(spec, cluster, report, index):
    expected = count_contracted_branches(spec)
    checks = [
        (not report.smooth, "synthesized point is smooth"),
        (set(report.T_Q) == set(index.values()), "contracted set is not the graph"),
        (report.minimal is True, "synthesized singularity is not minimal"),
        (len(report.Kplus_Q) == report.mult + 1, "component count is not mult + 1"),
        (len(report.Kplus_Q) == report.emdim, "component count is not the embedding dimension"),
        (report.embed_equality == (True, True, True), "equality conditions not all met"),
        (expected == report.mult + 1, "branch-count formula disagrees with the report"),
    ]
    for ok, message in checks:
        if not ok:
            raise InternalCheckError(f"synthesis self-check failed: {message}")
    got = report.resolution_graph
    tags = cluster.skeleton.tags
    got_weights = {tags[v]: got.weight(v) for v in got.vertices}
    got_edges = tuple((tags[u], tags[v]) for u, v in got.edges)
    want_weights = dict(zip(spec.vertices, spec.weights))
    if not weighted_trees_isomorphic(
        tuple(got_weights), got_edges, got_weights,
        spec.vertices, spec.edges, want_weights,
    ):
        raise InternalCheckError(
            "synthesis self-check failed: resolution graph is not the input graph"
        )


# -- Weighted tree isomorphism ----------------------------------------------------


def weighted_trees_isomorphic(
    vertices_a, edges_a, weights_a, vertices_b, edges_b, weights_b
) -> bool:
    """Isomorphism of vertex-weighted trees via canonical centre rooting."""
    if len(vertices_a) != len(vertices_b) or len(edges_a) != len(edges_b):
        return False
    if sorted(weights_a.values()) != sorted(weights_b.values()):
        return False
    codes_a = {_rooted_code(c, vertices_a, edges_a, weights_a) for c in _centres(vertices_a, edges_a)}
    codes_b = {_rooted_code(c, vertices_b, edges_b, weights_b) for c in _centres(vertices_b, edges_b)}
    return bool(codes_a & codes_b)


def _centres(vertices, edges):
    if len(vertices) <= 2:
        return list(vertices)
    adjacency = {v: set() for v in vertices}
    for u, v in edges:
        adjacency[u].add(v)
        adjacency[v].add(u)
    remaining = set(vertices)
    leaves = [v for v in remaining if len(adjacency[v]) <= 1]
    while len(remaining) > 2:
        next_leaves = []
        for leaf in leaves:
            remaining.discard(leaf)
            for nb in adjacency[leaf]:
                adjacency[nb].discard(leaf)
                if len(adjacency[nb]) == 1 and nb in remaining:
                    next_leaves.append(nb)
            adjacency[leaf].clear()
        leaves = next_leaves
    return sorted(remaining)


def _rooted_code(root, vertices, edges, weights) -> str:
    adjacency = {v: [] for v in vertices}
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)

    def code(v, parent) -> str:
        subcodes = sorted(code(c, v) for c in adjacency[v] if c != parent)
        return f"{weights[v]}({''.join(subcodes)})"

    return code(root, None)


# -- Graph file format -------------------------------------------------------------


def parse_graph_spec(text: str) -> MinimalGraphSpec:
    """Parse the edge-list format: `weight NAME=n` lines declare vertices,
    `A B` lines declare edges, `#` starts a comment."""
    vertices: list[str] = []
    weights: dict = {}
    edges: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("weight"):
            rest = line[len("weight"):].strip()
            if "=" not in rest:
                raise ParseError("expected `weight NAME=n`", lineno, 1)
            name, _, value = rest.partition("=")
            name = name.strip()
            try:
                omega = int(value.strip())
            except ValueError:
                raise ParseError(f"weight of {name!r} is not an integer", lineno, 1) from None
            if name in weights:
                raise ParseError(f"weight of {name!r} declared twice", lineno, 1)
            vertices.append(name)
            weights[name] = omega
        else:
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("expected an edge line `A B`", lineno, 1)
            edges.append((parts[0], parts[1]))
    spec = MinimalGraphSpec(
        tuple(vertices), tuple(edges), tuple(weights[v] for v in vertices)
    )
    try:
        return spec.require_valid()
    except ClusterError as exc:
        raise ParseError(str(exc), len(text.splitlines()) or 1, 1) from None


def serialize_graph_spec(spec: MinimalGraphSpec) -> str:
    lines = [f"weight {v}={w}" for v, w in zip(spec.vertices, spec.weights)]
    lines += [f"{u} {v}" for u, v in spec.edges]
    return "\n".join(lines) + "\n"
