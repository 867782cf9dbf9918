"""Skeleton validation, proximity matrices, dual graphs, chains, maximal proximity.

Core claims:
    - validate() accepts the legal structures and names each broken rule
    - proximity matrices transcribe the structure and invert integrally
    - the dual graph is a tree obeying the intersection edge rule
    - chains are unique tree paths; the open variant drops endpoints
    - maximal proximity follows the infinitely-near order
    - every chain between comparable points ascends then descends, and the
      descending part stays proximate to the ascending part
"""

import random

import pytest

from sandwiched import (
    ClusterSkeleton,
    ClusterError,
    SkeletonBuilder,
    canonical,
    chain_skeleton,
    dual_graph,
    is_mK_free,
    is_mK_proximate,
    is_mK_satellite,
    proximity_matrix,
    validate,
)
from sandwiched.cluster import extend_point, restrict
from sandwiched.oracle import random_skeleton


def satellite_triangle() -> ClusterSkeleton:
    b = SkeletonBuilder()
    o = b.origin()
    p1 = b.free(o, "p1")
    b.satellite(p1, o, "w")
    return b.build()


# -- validate -----------------------------------------------------------------


def test_validate_free_chain_is_clean():
    assert validate(chain_skeleton(3)) == []


def test_validate_satellite_is_clean():
    assert validate(satellite_triangle()) == []


def test_validate_reports_missing_target():
    broken = ClusterSkeleton(
        parents=(None, 0, 1),
        proximities=(frozenset(), frozenset({0}), frozenset({1, 7})),
        tags=("O", "p1", "w"),
    )
    rules = {d.rule for d in validate(broken)}
    assert "target-missing" in rules


def test_validate_reports_second_origin():
    broken = ClusterSkeleton(
        parents=(None, None),
        proximities=(frozenset(), frozenset()),
        tags=("O", "O2"),
    )
    assert any(d.rule == "single-origin" and d.point == 1 for d in validate(broken))


def test_validate_reports_inheritance_violation():
    broken = ClusterSkeleton(
        parents=(None, 0, 1, 2),
        proximities=(frozenset(), frozenset({0}), frozenset({1}), frozenset({2, 0})),
        tags=("O", "p1", "p2", "w"),
    )
    assert any(d.rule == "satellite-inheritance" for d in validate(broken))


def test_validate_reports_occupied_satellite_position():
    broken = ClusterSkeleton(
        parents=(None, 0, 1, 1),
        proximities=(frozenset(), frozenset({0}), frozenset({0, 1}), frozenset({0, 1})),
        tags=("O", "p1", "a", "b"),
    )
    assert any(d.rule == "satellite-occupied" for d in validate(broken))


def test_validate_reports_duplicate_tags():
    broken = ClusterSkeleton(
        parents=(None, 0),
        proximities=(frozenset(), frozenset({0})),
        tags=("O", "O"),
    )
    assert any(d.rule == "tag-duplicate" for d in validate(broken))


# -- proximity matrix ----------------------------------------------------------


def test_matrix_single_point():
    assert proximity_matrix(chain_skeleton(1)).rows == ((1,),)


def test_matrix_free_chain():
    assert proximity_matrix(chain_skeleton(3)).rows == (
        (1, 0, 0),
        (-1, 1, 0),
        (0, -1, 1),
    )


def test_matrix_satellite():
    assert proximity_matrix(satellite_triangle()).rows == (
        (1, 0, 0),
        (-1, 1, 0),
        (-1, -1, 1),
    )


def test_matrix_inverse_is_integral_round_trip():
    rng = random.Random(5)
    for _ in range(60):
        sk = random_skeleton(rng, 9, 0.45)
        p = proximity_matrix(sk)
        inv = p.inverse()
        n = len(p)
        identity = tuple(
            tuple(1 if i == j else 0 for j in range(n)) for i in range(n)
        )
        product = tuple(
            tuple(
                sum(p.rows[i][k] * inv.rows[k][j] for k in range(n))
                for j in range(n)
            )
            for i in range(n)
        )
        assert product == identity


# -- dual graph ------------------------------------------------------------------


def test_dual_graph_free_chain():
    g = dual_graph(chain_skeleton(3))
    assert g.edges == ((0, 1), (1, 2))
    assert g.weights == (2, 2, 1)


def test_dual_graph_single_point():
    g = dual_graph(chain_skeleton(1))
    assert g.edges == ()
    assert g.weights == (1,)


def test_dual_graph_satellite_breaks_parent_edge():
    g = dual_graph(satellite_triangle())
    assert g.edges == ((0, 2), (1, 2))  # w-O and w-p1; O-p1 separated by w


def test_dual_graph_is_tree_on_random_skeletons():
    rng = random.Random(11)
    for _ in range(120):
        sk = random_skeleton(rng, 10, 0.5)
        g = dual_graph(sk)
        assert len(g.edges) == len(sk) - 1
        # connectivity: a chain exists from the origin to every vertex
        for v in sk.points:
            assert g.chain(0, v)[-1] == v


# -- chains -----------------------------------------------------------------------


def test_chain_whole_path():
    g = dual_graph(chain_skeleton(3))
    assert g.chain(0, 2) == (0, 1, 2)


def test_chain_identity():
    g = dual_graph(chain_skeleton(3))
    assert g.chain(2, 2) == (2,)


def test_open_chain_drops_endpoints():
    g = dual_graph(chain_skeleton(3))
    assert g.open_chain(0, 2) == (1,)


def test_chain_ascends_then_descends_on_random_skeletons():
    # Between comparable points, inside the subcluster of predecessors of the
    # later one, the chain climbs to a single peak and then falls, and every
    # vertex from the peak on is proximate to a vertex of the climbing part.
    # (In the full graph this can fail: points later than p can separate
    # components along the chain and create interior dips.)
    rng = random.Random(23)
    for _ in range(150):
        sk = random_skeleton(rng, 10, 0.5)
        for p in sk.points:
            sub, kept = restrict(sk, sk.predecessors(p))
            g = dual_graph(sub)
            new_p = kept.index(p)
            for q in sub.ancestor_sets[new_p]:
                path = g.chain(q, new_p)
                n = len(path) - 2
                i0 = 0
                while i0 <= n and path[i0] in sub.proximities[path[i0 + 1]]:
                    i0 += 1
                assert i0 >= 1, (path, i0)
                for k in range(i0, n + 1):
                    assert path[k + 1] in sub.proximities[path[k]], (path, i0)
                for j in range(i0, n + 2):
                    assert any(
                        path[s] in sub.proximities[path[j]] for s in range(i0)
                    ), (path, i0, j)


# -- maximal proximity ----------------------------------------------------------------


def test_mk_proximate_on_free_chain():
    sk = chain_skeleton(3)
    assert is_mK_proximate(sk, 1, 0)


def test_mk_proximate_fails_under_satellite():
    sk = satellite_triangle()
    assert not is_mK_proximate(sk, 1, 0)  # w is infinitely near p1 and proximate to O


def test_mk_satellite():
    sk = satellite_triangle()
    assert is_mK_satellite(sk, 2)
    assert is_mK_free(sk, 1) is False  # p1 is maximal nowhere


# -- canonical form and structure helpers ---------------------------------------------


def test_canonical_is_relabeling_invariant():
    b = SkeletonBuilder()
    o = b.origin()
    a = b.free(o, "a")
    b.free(o, "b")
    b.free(a, "c")
    first = b.build()

    b2 = SkeletonBuilder()
    o = b2.origin()
    b2.free(o, "b")
    a = b2.free(o, "a")
    b2.free(a, "c")
    second = b2.build()

    assert first != second
    assert canonical(first) == canonical(second)


def test_restrict_requires_closure():
    sk = chain_skeleton(3)
    with pytest.raises(ClusterError):
        restrict(sk, {0, 2})


def test_extend_point_rejects_occupied_position():
    sk = satellite_triangle()
    with pytest.raises(ClusterError):
        extend_point(sk, (0, 1))


def test_extend_point_rejects_inheritance_violation():
    sk = chain_skeleton(3)
    with pytest.raises(ClusterError):
        extend_point(sk, (0, 2))  # q1 is not proximate to O
