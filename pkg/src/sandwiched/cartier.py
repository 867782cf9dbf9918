"""Construction of clusters whose generic curve is Cartier at one singularity.

Given a singular point Q of the blow-up and a prescribed positive
intersection multiplicity for every exceptional component through Q, this
module builds a consistent cluster T whose generic curve has a strict
transform that is a Cartier divisor, meets the exceptional locus only at Q,
and realizes exactly the prescribed intersections.

The construction starts from the weighted sum of the simple clusters of the
components through Q, attaches a free point over the minimal contracted
point, and then grows satellite chains on each dicritical component toward
its contracted neighbour until all the relevant excesses are used up,
unloading and discarding zero points along the way.  Point identity across
the evolving cluster is carried by tags.

A result is never trusted on construction: `verify` re-checks it from
scratch (value identities, localization of the dicritical points, vanishing
excesses off the contracted set, and an exact linear readout of the
intersection multiplicities).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .analyzer import SingularityReport, contracted_neighbor
from .cluster import ClusterSkeleton, dual_graph
from .errors import CapExceededError, ClusterError, InternalCheckError
from .weighted import (
    WeightedCluster,
    dicritical_set,
    drop_zero_points,
    embed_indices,
    excesses,
    is_consistent,
    simple_multiplicities,
    unload,
    values,
)


@dataclass(frozen=True)
class CartierRequest:
    """A singular point plus one positive multiplicity per component through it."""

    base: WeightedCluster
    report: SingularityReport
    alpha: dict

    def validated(self) -> "CartierRequest":
        if self.report.smooth:
            raise ClusterError("the chosen point is smooth: nothing to prescribe")
        if set(self.alpha) != set(self.report.Kplus_Q):
            raise ClusterError(
                "multiplicities must be prescribed exactly on the components through Q"
            )
        if any(a <= 0 for a in self.alpha.values()):
            raise ClusterError("prescribed multiplicities must be positive")
        return self


@dataclass(frozen=True)
class AddedPoint:
    """A point appended by the builder; targets are tags, parent first."""

    tag: str
    targets: tuple[str, ...]


@dataclass(frozen=True)
class CartierCertificate:
    consistent: bool
    value_condition: bool
    localization: bool
    off_excess_zero: bool
    readout: tuple[tuple[str, int], ...]
    readout_matches: bool
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class CartierResult:
    cluster: WeightedCluster
    added: tuple[AddedPoint, ...]
    trace: tuple[WeightedCluster, ...]
    certificate: CartierCertificate


class _Evolving:
    """Mutable cluster state for the builder, keyed by tags.

    The skeleton is rebuilt after each mutation: surviving base points first
    (original order), then surviving added points in creation order, so the
    order stays admissible throughout.
    """

    def __init__(self, base_skeleton: ClusterSkeleton):
        self.base = base_skeleton
        self.present_base: list[int] = []
        self.added: list[AddedPoint] = []
        self.nu: dict = {}
        self.used_tags: set = set(base_skeleton.tags)

    def tags(self) -> list[str]:
        return [self.base.tags[p] for p in self.present_base] + [a.tag for a in self.added]

    def skeleton(self) -> ClusterSkeleton:
        order = self.tags()
        index = {tag: i for i, tag in enumerate(order)}
        parents: list[Optional[int]] = []
        prox: list[frozenset[int]] = []
        for p in self.present_base:
            par = self.base.parents[p]
            parents.append(None if par is None else index[self.base.tags[par]])
            prox.append(frozenset(index[self.base.tags[q]] for q in self.base.proximities[p]))
        for a in self.added:
            parents.append(index[a.targets[0]])
            prox.append(frozenset(index[t] for t in a.targets))
        skeleton = ClusterSkeleton(tuple(parents), tuple(prox), tuple(order))
        return skeleton.require_valid()

    def cluster(self) -> WeightedCluster:
        return WeightedCluster(self.skeleton(), tuple(self.nu[t] for t in self.tags()))

    def has(self, tag: str) -> bool:
        return tag in self.nu

    def ensure_base_present(self, point: int):
        """Re-attach a base point (with its predecessors) at multiplicity 0."""
        for q in sorted(self.base.predecessors(point)):
            tag = self.base.tags[q]
            if tag not in self.nu:
                self.present_base.append(q)
                self.nu[tag] = 0
        self.present_base.sort()

    def add_point(self, targets: tuple[str, ...], tag: str):
        # the parent (kept first) is the later target; current order is historical
        order = {t: i for i, t in enumerate(self.tags())}
        self.added.append(
            AddedPoint(tag, tuple(sorted(targets, key=order.__getitem__, reverse=True)))
        )
        self.nu[tag] = 1

    def set_from(self, cluster: WeightedCluster):
        """Absorb multiplicities (and drops) from a cluster on current tags."""
        survivors = set(cluster.skeleton.tags)
        self.present_base = [
            p for p in self.present_base if self.base.tags[p] in survivors
        ]
        self.added = [a for a in self.added if a.tag in survivors]
        self.nu = {tag: m for tag, m in zip(cluster.skeleton.tags, cluster.nu)}

    def excess_at(self, tag: str) -> int:
        if tag not in self.nu:
            return 0
        cluster = self.cluster()
        return excesses(cluster)[cluster.skeleton.index_of(tag)]


def build(request: CartierRequest, seed_point: Optional[int] = None) -> CartierResult:
    """Run the construction; the returned certificate is verified independently.

    `seed_point` overrides where the first free point is attached (default:
    the minimal contracted point); any contracted point is acceptable and
    the certificate, not the choice, guarantees correctness.
    """
    request = request.validated()
    base = request.base
    report = request.report
    sk = base.skeleton
    alpha = {p: int(a) for p, a in request.alpha.items()}
    graph = dual_graph(sk)
    dicriticals = sorted(report.Kplus_Q)
    neighbor = {p: contracted_neighbor(graph, report, p) for p in dicriticals}
    kplus_tags = {sk.tags[p] for p in dicritical_set(base)}

    if seed_point is None:
        seed_point = report.o_Q
    if seed_point not in report.T_Q:
        raise ClusterError("the seed point must be one of the contracted components")

    cap = 4 * sum(alpha.values()) * len(sk) * len(sk)
    micro = 0

    state = _Evolving(sk)
    combined = [0] * len(sk)
    for p in dicriticals:
        for q, m in enumerate(simple_multiplicities(sk, p)):
            combined[q] += alpha[p] * m
    for q in sk.points:
        if combined[q] > 0:
            state.present_base.append(q)
            state.nu[sk.tags[q]] = combined[q]
    trace = [state.cluster()]

    def settle(label: str):
        """Unload if needed, forbid unloading at original dicriticals, drop zeros."""
        nonlocal micro
        cluster = state.cluster()
        if not is_consistent(cluster):
            result = unload(cluster)
            micro += len(result.steps)
            for step in result.steps:
                if cluster.skeleton.tags[step.point] in kplus_tags:
                    raise InternalCheckError(
                        f"{label}: unloading touched a dicritical point of the base cluster"
                    )
            cluster = result.cluster
        cluster = drop_zero_points(cluster).cluster
        state.set_from(cluster)
        if micro > cap:
            raise CapExceededError(
                f"builder exceeded the {cap}-step safety cap", trace=tuple(trace)
            )

    def check_interior_excess(label: str):
        """Between any two prescribed dicriticals some interior chain point
        keeps positive excess; this is what makes the growth loop sound."""
        cluster = state.cluster()
        cur = cluster.skeleton
        rho = excesses(cluster)
        cur_graph = dual_graph(cur)
        present = [p for p in dicriticals if state.has(sk.tags[p])]
        for i, pi in enumerate(present):
            for pj in present[i + 1 :]:
                a = cur.index_of(sk.tags[pi])
                b = cur.index_of(sk.tags[pj])
                interior = cur_graph.open_chain(a, b)
                if not any(rho[u] > 0 for u in interior):
                    raise InternalCheckError(
                        f"{label}: no positive excess between "
                        f"{sk.tags[pi]} and {sk.tags[pj]}"
                    )

    # first stage: one free point over the seed, unload, discard zeros
    state.ensure_base_present(seed_point)
    w0 = _fresh_tag(state)
    state.add_point((sk.tags[seed_point],), w0)
    micro += 1
    settle("first stage")
    trace.append(state.cluster())
    for p in dicriticals:
        got = state.excess_at(sk.tags[p])
        if got != alpha[p] - 1:
            raise InternalCheckError(
                f"first stage: excess {got} at {sk.tags[p]}, expected {alpha[p] - 1}"
            )
    check_interior_excess("first stage")

    # growth loop: satellite chains on each dicritical toward its neighbour
    while True:
        pending = [p for p in dicriticals if state.excess_at(sk.tags[p]) > 0]
        if not pending:
            break
        total_before = sum(state.excess_at(sk.tags[p]) for p in dicriticals)
        p_r = pending[0]
        p_tag = sk.tags[p_r]
        state.ensure_base_present(neighbor[p_r])
        partner = sk.tags[neighbor[p_r]]
        cur = state.skeleton()
        pair_map = {
            frozenset(cur.tags[t] for t in pair): cur.tags[s]
            for pair, s in cur.satellite_pairs.items()
        }
        while frozenset((p_tag, partner)) in pair_map:
            partner = pair_map[frozenset((p_tag, partner))]
        state.add_point((partner, p_tag), _fresh_tag(state))
        micro += 1
        settle("growth loop")
        trace.append(state.cluster())
        total_after = sum(state.excess_at(sk.tags[p]) for p in dicriticals)
        if total_after >= total_before:
            raise InternalCheckError("growth loop: total prescribed excess did not drop")
        check_interior_excess("growth loop")

    # finalize: every base point comes back, at multiplicity zero if absent
    for p in sk.points:
        state.ensure_base_present(p)
    final = state.cluster()
    trace.append(final)
    certificate = verify(base, report, alpha, final)
    return CartierResult(final, tuple(state.added), tuple(trace), certificate)


def _fresh_tag(state: _Evolving) -> str:
    i = 0
    while f"w{i}" in state.used_tags:
        i += 1
    state.used_tags.add(f"w{i}")
    return f"w{i}"


def verify(
    base: WeightedCluster,
    report: SingularityReport,
    alpha: dict,
    candidate: WeightedCluster,
) -> CartierCertificate:
    """Check a candidate cluster against the request, independently of build().

    Four checks: (1) at every dicritical of the base, the value equals the
    prescribed combination of simple-cluster values; (2) every dicritical
    point of the candidate is contracted to Q or added over Q; (3) the
    candidate has excess zero at every base point off the contracted set;
    (4) solving the value identities for the multiplicities returns exactly
    the prescription.
    """
    failures = []
    sk = base.skeleton
    try:
        mapping = embed_indices(sk, candidate.skeleton)
    except ClusterError:
        return CartierCertificate(
            False, False, False, False, (), False, ("embedding",)
        )

    consistent = is_consistent(candidate)
    if not consistent:
        failures.append("consistency")

    dicriticals = sorted(dicritical_set(base))
    simple_values = {
        q: values(WeightedCluster(sk, simple_multiplicities(sk, q)))
        for q in dicriticals
    }
    v_candidate = values(candidate)
    value_condition = all(
        v_candidate[mapping[p]]
        == sum(alpha.get(q, 0) * simple_values[q][p] for q in dicriticals)
        for p in dicriticals
    )
    if not value_condition:
        failures.append("value-condition")

    t_tags = {sk.tags[p] for p in report.T_Q}
    base_tags = set(sk.tags)
    over_q: dict = {}
    csk = candidate.skeleton
    for p in csk.points:
        tag = csk.tags[p]
        if tag in base_tags:
            continue
        over_q[tag] = any(
            csk.tags[t] in t_tags or over_q.get(csk.tags[t], False)
            for t in csk.proximities[p]
        )
    localization = True
    for d in dicritical_set(candidate):
        tag = csk.tags[d]
        if tag in base_tags:
            if tag not in t_tags:
                localization = False
        elif not over_q.get(tag, False):
            localization = False
    if not localization:
        failures.append("localization")

    rho_candidate = excesses(candidate)
    off_excess_zero = all(
        rho_candidate[mapping[p]] == 0
        for p in sk.points
        if p not in set(report.T_Q)
    )
    if not off_excess_zero:
        failures.append("off-excess-zero")

    readout, readout_matches = _read_multiplicities(
        dicriticals, simple_values, v_candidate, mapping, alpha, sk
    )
    if not readout_matches:
        failures.append("readout")

    return CartierCertificate(
        consistent,
        value_condition,
        localization,
        off_excess_zero,
        readout,
        readout_matches,
        tuple(failures),
    )


def _read_multiplicities(dicriticals, simple_values, v_candidate, mapping, alpha, sk):
    """Solve sum_q x_q * v_p(simple(q)) = v_p(candidate) over the dicriticals.

    Exact rational elimination; the simple-cluster value matrix is
    invertible, so the multiplicities are determined by the values alone.
    """
    m = len(dicriticals)
    rows = [
        [Fraction(simple_values[q][p]) for q in dicriticals]
        + [Fraction(v_candidate[mapping[p]])]
        for p in dicriticals
    ]
    for col in range(m):
        pivot = next((r for r in range(col, m) if rows[r][col] != 0), None)
        if pivot is None:
            return (), False
        rows[col], rows[pivot] = rows[pivot], rows[col]
        for r in range(m):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col] / rows[col][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    solution = {}
    for i, q in enumerate(dicriticals):
        x = rows[i][m] / rows[i][i]
        if x.denominator != 1:
            return (), False
        solution[q] = int(x)
    readout = tuple((sk.tags[q], solution[q]) for q in dicriticals)
    matches = all(solution[q] == alpha.get(q, 0) for q in dicriticals)
    return readout, matches
