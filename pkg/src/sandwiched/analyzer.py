"""Singularities of the blow-up of a complete ideal, from cluster data alone.

Attaching one extra point w of the exceptional divisor to a consistent
cluster, with virtual multiplicity one, produces the codimension-one cluster
K_w.  The corresponding point Q of the blown-up surface is singular exactly
when K_w is not consistent, and in that case every invariant of Q is read off
the unloading of K_w: the contracted components T_Q, the multiplicity-drop
set B_Q, the dicritical components through Q, the fundamental cycle, the
multiplicity, embedding dimension, branch count and minimality tests.

Each invariant that admits two independent formulas is computed both ways and
compared; a mismatch raises InternalCheckError (a bug, never bad input).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .cluster import DualGraph, dual_graph, extend_point
from .errors import ClusterError, InternalCheckError
from .weighted import (
    WeightedCluster,
    drop_zero_points,
    excesses,
    is_consistent,
    unload,
    values,
)


@dataclass(frozen=True)
class FreeOn:
    """A generic free point on the component of `point`, proximate only to it."""

    point: int


@dataclass(frozen=True)
class Satellite:
    """The intersection point of the components of p and q (adjacent in the
    dual graph), proximate to both."""

    p: int
    q: int


BoundaryPoint = Union[FreeOn, Satellite]


@dataclass(frozen=True)
class SingularityReport:
    """Everything the calculus attaches to a point Q of the blown-up surface.

    `epsilon` and `z` are full vectors over the points of the base cluster;
    z is nonzero exactly on T_Q (the fundamental cycle).  All sets are sorted
    tuples of point indices of the base cluster.
    """

    w: BoundaryPoint
    smooth: bool
    T_Q: tuple[int, ...] = ()
    o_Q: Optional[int] = None
    epsilon: tuple[int, ...] = ()
    B_Q: tuple[int, ...] = ()
    B1_Q: tuple[int, ...] = ()
    B2_Q: tuple[int, ...] = ()
    Kplus_Q: tuple[int, ...] = ()
    z: tuple[int, ...] = ()
    mult: Optional[int] = None
    emdim: Optional[int] = None
    br: Optional[int] = None
    minimal: Optional[bool] = None
    branches_equality: Optional[tuple[bool, bool, bool]] = None
    embed_equality: Optional[tuple[bool, bool, bool]] = None
    resolution_graph: Optional[DualGraph] = None


def _check(condition: bool, message: str):
    if not condition:
        raise InternalCheckError(message)


def _require_base_cluster(cluster: WeightedCluster):
    cluster.skeleton.require_valid()
    if any(m <= 0 for m in cluster.nu):
        raise ClusterError(
            "analysis needs a base-point cluster: all multiplicities positive"
        )
    if not is_consistent(cluster):
        raise ClusterError("analysis needs a consistent cluster")


def extend(
    cluster: WeightedCluster, w: BoundaryPoint, tag: Optional[str] = None
) -> WeightedCluster:
    """The codimension-one cluster K_w: K plus the point w with multiplicity 1."""
    _require_base_cluster(cluster)
    sk = cluster.skeleton
    if isinstance(w, FreeOn):
        targets = (w.point,)
    elif isinstance(w, Satellite):
        graph = dual_graph(sk)
        if not graph.are_adjacent(w.p, w.q):
            raise ClusterError(
                f"{sk.tags[w.p]} and {sk.tags[w.q]} are not adjacent: their "
                "components do not meet"
            )
        targets = (w.p, w.q)
    else:
        raise ClusterError(f"not a boundary point spec: {w!r}")
    extended = extend_point(sk, targets, tag)
    return WeightedCluster(extended, cluster.nu + (1,))


def analyze(cluster: WeightedCluster, w: BoundaryPoint) -> SingularityReport:
    """Full report for the point of the blow-up determined by w."""
    k_w = extend(cluster, w)
    if is_consistent(k_w):
        return SingularityReport(w=w, smooth=True)

    sk = cluster.skeleton
    n = len(sk)
    result = unload(k_w)
    unloaded = result.cluster

    v_before = values(cluster)
    v_after = values(unloaded)
    nu_after = unloaded.nu
    _check(nu_after[n] == 0, "attached point kept nonzero multiplicity after unloading")

    t_q = tuple(p for p in sk.points if v_after[p] > v_before[p])
    _check(bool(t_q), "inconsistent extension produced no unloaded points")
    touched_in_k = frozenset(s.point for s in result.steps if s.point < n)
    _check(frozenset(t_q) == touched_in_k, "value-increase set differs from unloading trace")

    minimal_points = [p for p in t_q if not any(q in t_q for q in sk.ancestor_sets[p])]
    _check(len(minimal_points) == 1, "contracted set has no unique minimal point")
    o_q = minimal_points[0]

    eps = tuple(nu_after[p] - cluster.nu[p] for p in sk.points)
    _check(eps[o_q] == 1, "multiplicity at the minimal contracted point did not grow by 1")
    _check(
        all(eps[p] in (-1, 0) for p in sk.points if p != o_q),
        "a multiplicity moved by more than one",
    )

    rho_before = excesses(cluster)
    k_plus = frozenset(p for p in sk.points if rho_before[p] > 0)
    _check(not (k_plus & set(t_q)), "a dicritical point was unloaded")

    b_q = tuple(p for p in sk.points if eps[p] == -1)
    t_set = frozenset(t_q)
    b1_q, b2_q = [], []
    for p in b_q:
        hits = len(sk.proximities[p] & t_set)
        _check(hits >= 1, "a dropped-multiplicity point is not proximate to the contracted set")
        (b1_q if hits == 1 else b2_q).append(p)
    _check(set(b2_q) <= t_set, "a contracted-satellite point lies outside the contracted set")

    graph = dual_graph(sk)
    kplus_q = tuple(
        sorted(p for p in k_plus if any(t in graph.adjacency[p] for t in t_q))
    )

    z = tuple(v_after[p] - v_before[p] for p in sk.points)
    _check(all(z[p] >= 1 for p in t_q), "fundamental cycle not >= 1 on the contracted set")
    for p in sk.points:
        recursion = eps[p] + sum(z[q] for q in sk.proximities[p])
        _check(z[p] == recursion, "fundamental cycle fails its proximity recursion")

    mult = 1 + len(b_q)
    mult_by_self_intersection = sum(m * m for m in nu_after) - sum(
        m * m for m in cluster.nu
    )
    _check(mult == mult_by_self_intersection, "multiplicity formulas disagree")
    emdim = mult + 1

    dropped = drop_zero_points(unloaded)
    _check(not dropped.blocked, "unloaded cluster kept a structurally blocked zero point")

    rho_after = excesses(WeightedCluster(sk, tuple(nu_after[:n])))
    b1_in_t = [p for p in b1_q if p in t_set]
    br = mult - len(b1_in_t)
    br_by_excess = sum(rho_after[p] for p in t_q)
    _check(br == br_by_excess, "branch-count formulas disagree")

    minimal = all(z[p] == 1 for p in t_q)
    _check(minimal == (br == mult), "reduced fundamental cycle vs branch count disagree")
    _check(minimal == (not b1_in_t), "reduced fundamental cycle vs contracted free drops disagree")

    # Equality conditions.  A dropped point off the contracted set, and a
    # proximity target of the minimal contracted point, count toward the
    # extremal equalities exactly when the exceptional component of the point
    # passes through Q, i.e. when the point lies in Kplus_Q.  (Maximal
    # proximity to T_Q is sufficient for that but not necessary: a satellite
    # inside T_Q can break maximality while the components still meet.)
    kplus_q_set = frozenset(kplus_q)
    flags_branches = (
        not b2_q,
        all(p in kplus_q_set for p in b_q if p not in t_set),
        len(sk.proximities[o_q] & kplus_q_set) == 2,
    )
    _check(
        (br == len(kplus_q) - 1) == all(flags_branches),
        "branch-count equality does not match its three conditions",
    )

    flags_embed = (
        not (set(b_q) & t_set),
        flags_branches[1],
        flags_branches[2],
    )
    _check(
        (len(kplus_q) == emdim) == all(flags_embed),
        "component-count equality does not match its three conditions",
    )
    if all(flags_embed):
        _check(minimal, "component-count equality holding on a non-minimal singularity")

    resolution = graph.induced(t_q)
    if minimal:
        total = sum(
            resolution.weight(p) - resolution.degree(p) for p in resolution.vertices
        )
        _check(total == mult, "resolution-graph weight sum does not give the multiplicity")

    return SingularityReport(
        w=w,
        smooth=False,
        T_Q=t_q,
        o_Q=o_q,
        epsilon=eps,
        B_Q=tuple(b_q),
        B1_Q=tuple(b1_q),
        B2_Q=tuple(b2_q),
        Kplus_Q=kplus_q,
        z=z,
        mult=mult,
        emdim=emdim,
        br=br,
        minimal=minimal,
        branches_equality=flags_branches,
        embed_equality=flags_embed,
        resolution_graph=resolution,
    )


def zero_excess_components(cluster: WeightedCluster) -> list[tuple[int, ...]]:
    """Connected components of the zero-excess points in the dual graph,
    ordered by their smallest point."""
    rho = excesses(cluster)
    graph = dual_graph(cluster.skeleton)
    zero = {p for p in cluster.skeleton.points if rho[p] == 0}
    components = []
    seen: set[int] = set()
    for start in sorted(zero):
        if start in seen:
            continue
        stack, comp = [start], []
        seen.add(start)
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in graph.adjacency[u]:
                if v in zero and v not in seen:
                    seen.add(v)
                    stack.append(v)
        components.append(tuple(sorted(comp)))
    return components


def enumerate_singularities(cluster: WeightedCluster) -> list[SingularityReport]:
    """One report per singular point of the blow-up.

    The singular points correspond to the connected components of the
    zero-excess set; each is analyzed through a free point on its
    lowest-index member, and the contracted set must come back equal to the
    component.
    """
    _require_base_cluster(cluster)
    reports = []
    for component in zero_excess_components(cluster):
        report = analyze(cluster, FreeOn(component[0]))
        _check(not report.smooth, "zero-excess component analyzed as smooth")
        _check(
            report.T_Q == component,
            "contracted set differs from its zero-excess component",
        )
        reports.append(report)
    return reports


def nu_prime(cluster: WeightedCluster, report: SingularityReport) -> tuple[int, ...]:
    """Multiplicities of the codimension-one ideal's cluster, on the base points."""
    return tuple(m + e for m, e in zip(cluster.nu, report.epsilon))


def verify_difexcess(cluster: WeightedCluster, report: SingularityReport) -> bool:
    """Check how excesses move under the codimension-one extension:
    rho'_p = rho_p + eps_p - sum of eps over points proximate to p, and the
    excess grows on T_Q, drops by one exactly on the dicriticals adjacent to
    T_Q, and is unchanged elsewhere."""
    if report.smooth:
        return True
    sk = cluster.skeleton
    rho = excesses(cluster)
    rho_p = excesses(WeightedCluster(sk, nu_prime(cluster, report)))
    eps = report.epsilon
    for p in sk.points:
        if rho_p[p] != rho[p] + eps[p] - sum(eps[q] for q in sk.proximate_to[p]):
            return False
    t_set, kplus_q = set(report.T_Q), set(report.Kplus_Q)
    for p in sk.points:
        if p in t_set:
            if rho_p[p] < rho[p]:
                return False
        elif p in kplus_q:
            if rho_p[p] != rho[p] - 1:
                return False
        elif rho_p[p] != rho[p]:
            return False
    return True


def verify_coef_fund(cluster: WeightedCluster, report: SingularityReport) -> bool:
    """Check the fundamental-cycle facts: the coefficient is 1 at the minimal
    contracted point, at contracted points with a dicritical point proximate
    to them, and at contracted points proximate to something outside T_Q;
    and B_Q is exactly the set of non-contracted points proximate to T_Q."""
    if report.smooth:
        return True
    sk = cluster.skeleton
    t_set = set(report.T_Q)
    rho = excesses(cluster)
    z = report.z
    for p in report.T_Q:
        if p == report.o_Q and z[p] != 1:
            return False
        if any(rho[q] > 0 for q in sk.proximate_to[p]) and z[p] != 1:
            return False
        if any(q not in t_set for q in sk.proximities[p]) and z[p] != 1:
            return False
    expected_b = {
        u
        for u in sk.points
        if u not in t_set and any(q in t_set for q in sk.proximities[u])
    }
    return expected_b == set(report.B_Q) - t_set


def resolution_graph(cluster: WeightedCluster, report: SingularityReport) -> DualGraph:
    """Dual graph of the contracted components, weights counted in the base cluster."""
    if report.smooth:
        raise ClusterError("smooth points have no resolution graph")
    return dual_graph(cluster.skeleton).induced(report.T_Q)


def contracted_neighbor(
    graph: DualGraph, report: SingularityReport, p: int
) -> int:
    """The unique contracted component adjacent to the dicritical p."""
    t_set = set(report.T_Q)
    hits = [t for t in graph.adjacency[p] if t in t_set]
    _check(len(hits) == 1, "dicritical point adjacent to several contracted components")
    return hits[0]
