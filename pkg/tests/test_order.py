from __future__ import annotations

import pytest
from oracles import all_median_orders, interval_ok, largest_transitive_size, max_forward

from transversal.core import OrientationPattern, ParameterError, SizeError, Tournament
from transversal.order import (
    InvalidOrderError,
    check_interval_properties,
    embed_in_transitive,
    forward_arcs,
    is_relocation_optimal,
    is_transitive_sequence,
    largest_transitive,
    low_degree_count,
    median_order,
    median_order_exact,
    median_order_local,
    median_orders,
    near_directed_pair,
    path_pattern,
    skip_vertex_path,
    validate_near_pair,
)
from transversal.rng import all_tournaments, generate_collection

CYCLE3 = Tournament.from_arcs(3, [(0, 1), (1, 2), (2, 0)])
QR5 = Tournament.circulant(5, {1, 2})


def test_exact_transitive():
    mo = median_order_exact(Tournament.transitive(4))
    assert mo.order == (0, 1, 2, 3) and mo.forward_arcs == 6 and mo.exact


def test_exact_three_cycle():
    mo = median_order_exact(CYCLE3)
    assert mo.forward_arcs == 2
    assert mo.order == (0, 1, 2)  # smallest of the three maximizing rotations


def test_exact_qr5_frozen():
    mo = median_order_exact(QR5)
    assert mo.forward_arcs == 7 == max_forward(QR5)
    assert forward_arcs(QR5, mo.order) == 7
    assert mo.order == (0, 1, 2, 3, 4)


def test_exact_cap():
    t = generate_collection(14, 1, 0).members[0]
    with pytest.raises(SizeError):
        median_order_exact(t, cap=13)


def test_median_orders_match_brute_force():
    for code, t in enumerate(all_tournaments(4)):
        assert list(median_orders(t)) == all_median_orders(t), code
    assert list(median_orders(QR5)) == all_median_orders(QR5)


def test_local_transitive_and_cycle():
    t = Tournament.transitive(30)
    mo = median_order_local(t)
    assert mo.order == tuple(range(30)) and mo.forward_arcs == 435 and not mo.exact
    assert median_order_local(CYCLE3).forward_arcs == 2


def test_local_random_fifty():
    t = generate_collection(50, 1, 7).members[0]
    mo = median_order_local(t)
    assert mo.forward_arcs >= forward_arcs(t, range(50))
    assert is_relocation_optimal(t, mo.order)
    assert check_interval_properties(t, mo.order).ok


def test_median_order_dispatch():
    t = generate_collection(10, 1, 3).members[0]
    assert median_order(t).exact
    assert not median_order(t, cap=8).exact


def test_interval_properties_examples():
    t = Tournament.transitive(6)
    assert check_interval_properties(t, range(6)).ok
    rep = check_interval_properties(t, tuple(reversed(range(6))))
    assert not rep.ok and rep.interval == (1, 6) and rep.prop == "B2" and rep.vertex == 5
    assert check_interval_properties(CYCLE3, median_order_exact(CYCLE3).order).ok
    assert check_interval_properties(t, (0, 1)).reasons() == ["not-a-permutation"]


def test_interval_checker_matches_direct_scan():
    import itertools

    for t in (QR5, Tournament.transitive(5), generate_collection(5, 1, 9).members[0]):
        for order in itertools.permutations(range(5)):
            assert check_interval_properties(t, order).ok == interval_ok(t, order), order


@pytest.mark.parametrize("signs,n,ranks", [("++", 3, (1, 2, 3)), ("+-", 3, (1, 3, 2)),
                                           ("--+", 4, (4, 3, 1, 2))])
def test_embed_in_transitive(signs, n, ranks):
    p = OrientationPattern(signs)
    assert embed_in_transitive(p, n) == ranks
    t = Tournament.transitive(n)
    assert path_pattern(t, [r - 1 for r in ranks]) == p


def test_embed_in_transitive_length_check():
    with pytest.raises(ParameterError):
        embed_in_transitive(OrientationPattern("++"), 4)


def test_skip_vertex_path_transitive():
    assert skip_vertex_path(Tournament.transitive(5), range(5)) == (0, 1, 3, 4)


def test_skip_vertex_path_backward_case():
    for t in all_tournaments(5):
        for order in median_orders(t):
            x1, x2, x3, x4, x5 = order
            if t.has_arc(x4, x2):
                assert skip_vertex_path(t, order) == (x1, x4, x2, x5)
                return
    pytest.fail("no median order with x4 -> x2 found")


def test_skip_vertex_path_rejects_bad_order():
    with pytest.raises(InvalidOrderError):
        skip_vertex_path(Tournament.transitive(5), (4, 3, 2, 1, 0))
    with pytest.raises(ParameterError):
        skip_vertex_path(Tournament.transitive(5), (0, 1, 2, 3))


def test_near_directed_pair_examples():
    for t in (Tournament.transitive(5), QR5, generate_collection(9, 1, 4).members[0]):
        pair = near_directed_pair(t)
        assert validate_near_pair(t, pair).ok
        assert pair.path[0] == pair.near_path[0]
        assert pair.near_pattern.signs.count("-") == 1
    assert near_directed_pair(Tournament.transitive(5)).path == (0, 1, 2, 3, 4)
    with pytest.raises(SizeError):
        near_directed_pair(Tournament.transitive(4))


def test_largest_transitive_examples():
    assert largest_transitive(Tournament.transitive(6)) == tuple(range(6))
    assert len(largest_transitive(CYCLE3)) == 2
    q7 = Tournament.quadratic_residue(7)
    assert len(largest_transitive(q7)) == largest_transitive_size(q7) == 3


def test_largest_transitive_greedy_large():
    t = generate_collection(1024, 1, 5).members[0]
    seq = largest_transitive(t, "greedy")
    assert len(seq) >= 11 and is_transitive_sequence(t, seq)
    with pytest.raises(SizeError):
        largest_transitive(t, "exact")
    with pytest.raises(ParameterError):
        largest_transitive(CYCLE3, "fancy")


def test_low_degree_count():
    t = Tournament.transitive(5)
    assert low_degree_count(t, 0, "-") == 1
    assert low_degree_count(t, 1, "+") == 2
    assert low_degree_count(QR5, 1) == 0
