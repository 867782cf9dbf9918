"""Weighted clusters: values, excesses, unloading, and cluster arithmetic.

A weighted cluster attaches an integer virtual multiplicity to every point of
a skeleton.  Three mutually determined integer vectors describe it: the
multiplicities nu, the values v (v_p = nu_p plus the values of the points p
is proximate to) and the excesses rho (rho_p = nu_p minus the sum of nu over
the points proximate to p).  A cluster is consistent when no excess is
negative; unloading turns any cluster into the unique consistent one defining
the same ideal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .cluster import ClusterSkeleton, restrict
from .errors import CapExceededError, ClusterError


@dataclass(frozen=True)
class WeightedCluster:
    skeleton: ClusterSkeleton
    nu: tuple[int, ...]

    def __post_init__(self):
        if len(self.nu) != len(self.skeleton):
            raise ClusterError(
                f"{len(self.nu)} multiplicities for {len(self.skeleton)} points"
            )

    def multiplicity(self, tag: str) -> int:
        return self.nu[self.skeleton.index_of(tag)]

    def by_tag(self) -> dict:
        return {tag: m for tag, m in zip(self.skeleton.tags, self.nu)}


def values(cluster: WeightedCluster) -> tuple[int, ...]:
    """v_p = nu_p + sum of v_q over the points q that p is proximate to."""
    sk = cluster.skeleton
    v: list[int] = []
    for p in sk.points:
        v.append(cluster.nu[p] + sum(v[q] for q in sk.proximities[p]))
    return tuple(v)


def multiplicities_from_values(
    skeleton: ClusterSkeleton, v: Sequence[int]
) -> WeightedCluster:
    """Inverse of `values`: nu_p = v_p - sum of v_q over proximity targets."""
    if len(v) != len(skeleton):
        raise ClusterError(f"{len(v)} values for {len(skeleton)} points")
    nu = tuple(v[p] - sum(v[q] for q in skeleton.proximities[p]) for p in skeleton.points)
    return WeightedCluster(skeleton, nu)


def multiplicities_from_excesses(
    skeleton: ClusterSkeleton, rho: Sequence[int]
) -> WeightedCluster:
    """Solve rho_p = nu_p - sum of nu over points proximate to p, from the top down."""
    if len(rho) != len(skeleton):
        raise ClusterError(f"{len(rho)} excesses for {len(skeleton)} points")
    nu = [0] * len(skeleton)
    for p in reversed(skeleton.points):
        nu[p] = rho[p] + sum(nu[q] for q in skeleton.proximate_to[p])
    return WeightedCluster(skeleton, tuple(nu))


def excesses(cluster: WeightedCluster) -> tuple[int, ...]:
    sk = cluster.skeleton
    return tuple(
        cluster.nu[p] - sum(cluster.nu[q] for q in sk.proximate_to[p]) for p in sk.points
    )


def is_consistent(cluster: WeightedCluster) -> bool:
    return all(r >= 0 for r in excesses(cluster))


def dicritical_set(cluster: WeightedCluster) -> frozenset[int]:
    """Points with positive excess; one exceptional component of the blow-up each."""
    return frozenset(p for p, r in enumerate(excesses(cluster)) if r > 0)


def exceptional_intersections(cluster: WeightedCluster) -> tuple[int, ...]:
    """Intersection of the strict transform of a curve through the cluster
    with each exceptional component: e_p - sum of e_q over q proximate to p,
    which for the virtual system is exactly the excess vector."""
    if not is_consistent(cluster):
        raise ClusterError("exceptional intersections require a consistent cluster")
    return excesses(cluster)


def self_intersection(cluster: WeightedCluster) -> int:
    return sum(m * m for m in cluster.nu)


# -- Unloading -------------------------------------------------------------------


@dataclass(frozen=True)
class UnloadStep:
    """One unloading at `point`: its value grew by `increment`.

    A step is tame when the increment is 1 and the excess before the step was
    exactly -1; tame steps raise one value and leave every other value alone.
    """

    point: int
    increment: int
    tame: bool


@dataclass(frozen=True)
class UnloadResult:
    cluster: WeightedCluster
    steps: tuple[UnloadStep, ...]

    @property
    def touched(self) -> frozenset[int]:
        return frozenset(s.point for s in self.steps)


def unload(
    cluster: WeightedCluster,
    *,
    pick: Optional[Callable[[list[int]], int]] = None,
    cap: Optional[int] = None,
) -> UnloadResult:
    """Unload until no excess is negative.

    Works in value form: a step at p raises v_p by n = ceil(-rho_p/(r_p + 1)),
    leaving all other values unchanged, and the multiplicities are recomputed
    (equivalently nu_p grows by n and nu drops by n at each point proximate
    to p).  The default strategy unloads the lowest-index negative point; the
    result is independent of that choice.  The cap is a bug trap only:
    termination is guaranteed.
    """
    sk = cluster.skeleton
    sk.require_valid()
    n_points = len(sk)
    nu = list(cluster.nu)
    prox_to = sk.proximate_to
    if cap is None:
        cap = 10 * max(1, sum(abs(m) for m in cluster.nu)) * n_points * n_points
    steps: list[UnloadStep] = []
    while True:
        negative = [
            p for p in sk.points if nu[p] - sum(nu[q] for q in prox_to[p]) < 0
        ]
        if not negative:
            break
        p = negative[0] if pick is None else pick(negative)
        rho_p = nu[p] - sum(nu[q] for q in prox_to[p])
        r_p = len(prox_to[p])
        inc = (-rho_p + r_p) // (r_p + 1)
        nu[p] += inc
        for u in prox_to[p]:
            nu[u] -= inc
        steps.append(UnloadStep(p, inc, inc == 1 and rho_p == -1))
        if len(steps) > cap:
            raise CapExceededError(
                f"unloading exceeded the {cap}-step safety cap", trace=tuple(steps)
            )
    return UnloadResult(WeightedCluster(sk, tuple(nu)), tuple(steps))


# -- Dropping zero points ----------------------------------------------------------


@dataclass(frozen=True)
class DropResult:
    cluster: WeightedCluster
    kept: tuple[int, ...]
    dropped: tuple[int, ...]
    blocked: tuple[int, ...]


def drop_zero_points(cluster: WeightedCluster) -> DropResult:
    """Remove zero-multiplicity points that nothing remaining is proximate to.

    Removal iterates until it stalls.  Zero points that stay structurally
    required (some remaining point is proximate to them) are reported as
    blocked, never silently dropped; on consistent clusters none are.
    """
    sk = cluster.skeleton
    alive = set(sk.points)
    while True:
        removable = [
            p
            for p in alive
            if cluster.nu[p] == 0
            and not any(q in alive for q in sk.proximate_to[p])
        ]
        if not removable:
            break
        alive.difference_update(removable)
    blocked = tuple(sorted(p for p in alive if cluster.nu[p] == 0))
    if not alive:
        # the origin alone carries weight 0: keep it so the cluster stays a cluster
        alive = {0}
    sub, kept = restrict(sk, alive)
    dropped = tuple(p for p in sk.points if p not in alive)
    return DropResult(
        WeightedCluster(sub, tuple(cluster.nu[p] for p in kept)), kept, dropped, blocked
    )


# -- Simple clusters and linear combinations -----------------------------------------


def simple_multiplicities(skeleton: ClusterSkeleton, p: int) -> tuple[int, ...]:
    """Multiplicities of the simple cluster of p, as a full-length vector
    (zero outside the predecessors of p)."""
    rho = [0] * len(skeleton)
    rho[p] = 1
    nu = [0] * len(skeleton)
    support = skeleton.predecessors(p)
    for q in reversed(skeleton.points):
        if q in support:
            nu[q] = rho[q] + sum(nu[t] for t in skeleton.proximate_to[q])
    return tuple(nu)


def simple_cluster(skeleton: ClusterSkeleton, p: int) -> WeightedCluster:
    """The weighted cluster of the simple ideal of p: support is the
    predecessors of p, excess 1 at p and 0 below."""
    if not 0 <= p < len(skeleton):
        raise ClusterError(f"point {p} is not in the cluster")
    full = simple_multiplicities(skeleton, p)
    sub, kept = restrict(skeleton, skeleton.predecessors(p))
    return WeightedCluster(sub, tuple(full[old] for old in kept))


def embed_indices(sub: ClusterSkeleton, ambient: ClusterSkeleton) -> tuple[int, ...]:
    """Index map sub -> ambient, matching points by tag and checking structure."""
    mapping = []
    for p in sub.points:
        tag = sub.tags[p]
        if tag not in ambient.tag_index:
            raise ClusterError(f"incompatible skeletons: no point tagged {tag!r} in the ambient")
        mapping.append(ambient.tag_index[tag])
    for p in sub.points:
        img_prox = frozenset(mapping[q] for q in sub.proximities[p])
        if img_prox != ambient.proximities[mapping[p]]:
            raise ClusterError(
                f"incompatible skeletons: proximities of {sub.tags[p]!r} disagree"
            )
    return tuple(mapping)


def linear_combination(
    terms: Iterable[tuple[WeightedCluster, int]],
    ambient: Optional[ClusterSkeleton] = None,
) -> WeightedCluster:
    """Pointwise sum of weighted clusters with positive integer coefficients.

    All skeletons must embed (by tag) into a common ambient skeleton; by
    default the term with the most points is taken as the ambient.  The sum
    of consistent clusters is consistent and excesses add linearly.
    """
    terms = list(terms)
    if not terms:
        raise ClusterError("linear combination needs at least one term")
    for _, c in terms:
        if c <= 0:
            raise ClusterError("coefficients must be positive integers")
    if ambient is None:
        ambient = max((k.skeleton for k, _ in terms), key=len)
    nu = [0] * len(ambient)
    for k, c in terms:
        mapping = embed_indices(k.skeleton, ambient)
        for p in k.skeleton.points:
            nu[mapping[p]] += c * k.nu[p]
    return WeightedCluster(ambient, tuple(nu))
