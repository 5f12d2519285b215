from __future__ import annotations

from fractions import Fraction

import pytest
from oracles import center_cross

from transversal.core import ParameterError, SizeError, Tournament
from transversal.harness import triangle_identity
from transversal.hpartition import (
    BoundaryFractions,
    GoodHPartition,
    HPartition,
    PartitionFailure,
    balanced_vertex,
    cyclic_triangles,
    good_h_partition,
    balanced_bounds,
    robust_h_partition,
    validate_h_partition,
)
from transversal.rng import all_tournaments, generate_collection

G = Fraction(1, 25)


def test_balanced_vertex_small_input():
    with pytest.raises(SizeError):
        balanced_vertex(Tournament.from_arcs(3, [(0, 1), (1, 2), (2, 0)]))


def test_balanced_vertex_transitive_five():
    bv = balanced_vertex(Tournament.transitive(5))
    assert bv.vertex == 2 and bv.cross == 4
    assert bv.in_neighbors == (0, 1) and bv.out_neighbors == (3, 4)


def test_balanced_vertex_qr7():
    t = Tournament.quadratic_residue(7)
    bv = balanced_vertex(t)
    counts = [center_cross(t, v) for v in range(7)]
    assert bv.cross == max(counts) == 3
    assert bv.vertex == counts.index(max(counts))
    cross_bound, deg_bound = balanced_bounds(7)
    assert (cross_bound, deg_bound) == (2, 1)
    assert bv.cross >= cross_bound


def test_balanced_vertex_matches_brute_force_n5():
    for t in list(all_tournaments(5))[::37]:
        counts = [center_cross(t, v) for v in range(5)]
        bv = balanced_vertex(t)
        assert bv.cross == max(counts) and bv.vertex == counts.index(max(counts))


def test_balanced_bounds_are_ceilings():
    assert balanced_bounds(5) == (1, 1)
    assert balanced_bounds(25) == (25, 1)
    assert balanced_bounds(60) == (144, 3)
    assert balanced_bounds(26) == (28, 2)


def test_cyclic_triangles_counts():
    assert cyclic_triangles(Tournament.transitive(6)) == 0
    assert cyclic_triangles(Tournament.from_arcs(3, [(0, 1), (1, 2), (2, 0)])) == 1
    assert cyclic_triangles(Tournament.quadratic_residue(7)) == 14
    assert triangle_identity(Tournament.quadratic_residue(7))


def test_single_block_when_ell_is_n():
    t = generate_collection(30, 1, 1).members[0]
    part = robust_h_partition(t, 30, G)
    assert part.blocks == (tuple(range(30)),) and part.separators == ()
    assert validate_h_partition(t, part).ok


def test_transitive_ten():
    t = Tournament.transitive(10)
    part = robust_h_partition(t, 5, G)
    assert validate_h_partition(t, part).ok
    assert all(len(b) <= 5 for b in part.blocks)


def test_random_partitions_validate():
    for seed in range(20):
        t = generate_collection(20 + 9 * seed, 1, seed).members[0]
        ell = 4 + seed % (t.n - 3)
        part = robust_h_partition(t, ell, G)
        assert validate_h_partition(t, part, robust=True).ok


def test_robust_parameter_errors():
    t = Tournament.transitive(10)
    with pytest.raises(ParameterError):
        robust_h_partition(t, 3, G)
    with pytest.raises(ParameterError):
        robust_h_partition(t, 5, Fraction(1, 10))


def test_swapped_separator_arc_is_reported():
    t = Tournament.transitive(10)
    part = robust_h_partition(t, 5, G)
    w = part.separators[0]
    x = part.blocks[0][0]
    rows = list(t.out_rows)
    rows[x] &= ~(1 << w)
    rows[w] |= 1 << x
    bad = Tournament(rows)
    rep = validate_h_partition(bad, part)
    assert rep.reasons() == ["A3"]
    assert f"w_i={w}" in rep.first.detail and f"vertex={x}" in rep.first.detail


def test_validator_reports_a1_and_a2():
    t = Tournament.transitive(10)
    part = robust_h_partition(t, 5, G)
    missing = HPartition(part.blocks[:-1] + (part.blocks[-1][1:],), part.separators, 5, G)
    assert "A1" in validate_h_partition(t, missing).reasons()
    too_small = HPartition(part.blocks, part.separators, 4, G)
    assert "A2" in validate_h_partition(t, too_small).reasons()


def test_validator_reports_a4():
    # two blocks joined by a separator, with no arcs from the first block to the
    # second; blocks of 60 make the density bound 144 - 121 positive
    n = 121
    first, w, second = range(60), 60, range(61, 121)
    rows = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            back = u in first and v in second
            if back:
                rows[v] |= 1 << u
            else:
                rows[u] |= 1 << v
    t = Tournament(rows)
    part = HPartition((tuple(first), tuple(second)), (w,), 60, G)
    assert validate_h_partition(t, part, robust=False).ok
    assert validate_h_partition(t, part, robust=True).reasons() == ["A4"]


def test_good_partition_strict_fractions_fail_small():
    t = generate_collection(20, 1, 2).members[0]
    res = good_h_partition(t, 8, G, BoundaryFractions.strict())
    assert isinstance(res, PartitionFailure) and res.step == "V_1"
    assert "V_1 empty" in res.reason


def test_good_partition_relaxed_random():
    t = generate_collection(400, 1, 3).members[0]
    res = good_h_partition(t, 100, G, BoundaryFractions.relaxed())
    assert isinstance(res, GoodHPartition)
    assert validate_h_partition(t, res, good=True).ok


def test_good_partition_transitive():
    t = Tournament.transitive(200)
    res = good_h_partition(t, 50, G, BoundaryFractions.relaxed())
    assert isinstance(res, GoodHPartition)
    assert validate_h_partition(t, res, good=True).ok
