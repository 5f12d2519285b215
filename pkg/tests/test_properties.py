"""Property-based checks of the package invariants."""
from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import has_rainbow_copy, largest_transitive_size, max_forward

from transversal.broom import directed_broom, rainbow_short_path, validate_broom
from transversal.core import OrientationPattern, TournamentCollection, validate_directed_path, validate_embedding
from transversal.harness import triangle_identity
from transversal.hpartition import balanced_vertex, balanced_bounds, robust_h_partition, validate_h_partition
from transversal.instances import InstanceFile
from transversal.order import (
    check_interval_properties,
    is_relocation_optimal,
    largest_transitive,
    median_order_exact,
    median_order_local,
    near_directed_pair,
    skip_vertex_path,
    validate_near_pair,
)
from transversal.pattern import blocks, do_decompose, shift, validate_do
from transversal.rng import SplitMix64, derive_seed, generate_collection
from transversal.solver import SearchOptions, absorb_instance, find_transversal, h_absorb_vertices

SEEDS = st.integers(min_value=0, max_value=2**64 - 1)
SIGNS = st.text(alphabet="+-", max_size=30)
FAST = settings(max_examples=60, deadline=None)
SLOW = settings(max_examples=15, deadline=None)


def tournament(n, seed):
    return generate_collection(n, 1, seed).members[0]


# ---------------------------------------------------------------------------
# generator and files


@FAST
@given(SEEDS, st.integers(0, 40))
def test_derived_seed_is_stream_output(seed, i):
    r = SplitMix64(seed)
    for _ in range(i):
        r.next_u64()
    assert derive_seed(seed, i) == r.next_u64()


@FAST
@given(st.integers(1, 9), st.integers(1, 5), SEEDS)
def test_instance_round_trip(n, m, seed):
    coll = generate_collection(n, m, seed)
    text = InstanceFile.from_collection(coll).dumps()
    back = InstanceFile.loads(text)
    assert back.dumps() == text and back.to_collection() == coll


@FAST
@given(st.integers(1, 9), st.integers(1, 4), SEEDS)
def test_generation_is_deterministic(n, m, seed):
    assert generate_collection(n, m, seed) == generate_collection(n, m, seed)


# ---------------------------------------------------------------------------
# patterns


@FAST
@given(SIGNS)
def test_pattern_algebra(signs):
    p = OrientationPattern(signs)
    assert p.rev().rev() == p and p.flip().flip() == p
    assert sum(length for _, length in blocks(p)) == len(signs)
    if signs:
        q = shift(p)
        assert q.length == p.length and q.signs[1:] == signs[:-1]


@FAST
@given(SIGNS)
def test_do_decomposition_total(signs):
    p = OrientationPattern(signs)
    dec = do_decompose(p)
    assert validate_do(p, dec).ok
    assert "".join(dec.piece(i).signs for i in range(len(dec.ranges))) == signs


# ---------------------------------------------------------------------------
# median orders


@FAST
@given(st.integers(2, 6), SEEDS)
def test_exact_order_is_maximum(n, seed):
    t = tournament(n, seed)
    mo = median_order_exact(t)
    assert mo.forward_arcs == max_forward(t)
    assert check_interval_properties(t, mo.order).ok
    assert validate_directed_path(t, mo.order, t.vertex_mask).ok


@FAST
@given(st.integers(2, 45), SEEDS)
def test_local_order_is_relocation_optimal(n, seed):
    t = tournament(n, seed)
    mo = median_order_local(t)
    assert is_relocation_optimal(t, mo.order)
    assert check_interval_properties(t, mo.order).ok


@FAST
@given(st.integers(5, 14), SEEDS)
def test_median_paths_and_rewiring(n, seed):
    t = tournament(n, seed)
    order = median_order_exact(t).order
    assert validate_near_pair(t, near_directed_pair(t, order)).ok
    for s in range(n - 4):
        path = skip_vertex_path(t, order[s: s + 5])
        assert len(path) == 4 and path[0] == order[s] and path[-1] == order[s + 4]


@FAST
@given(st.integers(1, 7), SEEDS)
def test_largest_transitive_exact(n, seed):
    t = tournament(n, seed)
    assert len(largest_transitive(t)) == largest_transitive_size(t)


@FAST
@given(st.integers(2, 300), SEEDS)
def test_greedy_transitive_halving(n, seed):
    t = tournament(n, seed)
    assert 2 ** len(largest_transitive(t, "greedy")) > n


# ---------------------------------------------------------------------------
# balanced vertices and partitions


@FAST
@given(st.integers(5, 80), SEEDS)
def test_balanced_vertex_bounds(n, seed):
    t = tournament(n, seed)
    bv = balanced_vertex(t)
    cross, deg = balanced_bounds(n)
    assert bv.cross >= cross
    assert bin(bv.in_mask).count("1") >= deg and bin(bv.out_mask).count("1") >= deg


@SLOW
@given(st.integers(10, 250), st.data())
def test_robust_partition_valid(n, data):
    seed = data.draw(SEEDS)
    ell = data.draw(st.integers(4, n))
    t = tournament(n, seed)
    part = robust_h_partition(t, ell)
    assert validate_h_partition(t, part, robust=True).ok
    assert triangle_identity(t)
    assert sum(len(b) for b in part.blocks) + len(part.separators) == n


@FAST
@given(st.integers(3, 40), SEEDS)
def test_triangle_identity(n, seed):
    t = tournament(n, seed)
    assert triangle_identity(t)
    assert triangle_identity(t.reverse())


# ---------------------------------------------------------------------------
# brooms


@FAST
@given(st.integers(5, 12), st.sampled_from(["+", "-", "++", "+-", "-+", "--"]), SEEDS)
def test_short_path_always_found(n, signs, seed):
    p = OrientationPattern(signs)
    coll = generate_collection(n, len(signs), seed)
    assert validate_embedding(coll, p, rainbow_short_path(coll, p)).ok


@SLOW
@given(st.integers(2, 6), st.integers(1, 2), st.integers(1, 2), SEEDS)
def test_directed_broom_valid(ell, s1, s2, seed):
    n = ell + 2 ** (s1 + s2)
    t = tournament(n, seed)
    b = directed_broom(t, ell, s1, s2)
    assert validate_broom(b, t).ok
    for y in b.start_tips:
        for z in b.end_tips:
            assert validate_directed_path(t, (y,) + b.internal + (z,)).ok


# ---------------------------------------------------------------------------
# solver


def small_instance(data):
    cyclic = data.draw(st.booleans())
    n = data.draw(st.integers(3 if cyclic else 2, 5))
    ell = n if cyclic else n - 1
    coll = generate_collection(n, data.draw(st.integers(ell, ell + 1)), data.draw(SEEDS))
    p = OrientationPattern(data.draw(st.text(alphabet="+-", min_size=ell, max_size=ell)), cyclic)
    return coll, p


@FAST
@given(st.data())
def test_soundness_and_completeness(data):
    coll, p = small_instance(data)
    res = find_transversal(coll, p)
    assert res.found == has_rainbow_copy(coll, p)
    if res.found:
        assert validate_embedding(coll, p, res.embedding).ok


@FAST
@given(st.data())
def test_pruning_safety(data):
    coll, p = small_instance(data)
    a = find_transversal(coll, p, SearchOptions(pruning="hall-matching"))
    b = find_transversal(coll, p, SearchOptions(pruning="none"))
    assert a.status == b.status


@FAST
@given(st.data())
def test_reversal_symmetry(data):
    coll, p = small_instance(data)
    a = find_transversal(coll, p)
    b = find_transversal(coll, p.rev())
    assert a.status == b.status
    if a.found:
        back = a.embedding.reversed()
        assert validate_embedding(coll, p.rev(), back).ok


@FAST
@given(st.data())
def test_search_is_deterministic(data):
    coll, p = small_instance(data)
    assert find_transversal(coll, p) == find_transversal(coll, p)
    same = TournamentCollection(list(coll.members), coll.colors)
    assert find_transversal(same, p) == find_transversal(coll, p)


@settings(max_examples=6, deadline=None)
@given(SEEDS, st.sampled_from([(), ("random",), ("U2",), ("U3",), ("U2", "U3")]))
def test_absorption_output_is_hamilton_path(seed, kinds):
    t, U, part, w0, wr = absorb_instance(150, len(kinds), seed, kinds=kinds)
    res = h_absorb_vertices(t, U, part, w0, wr)
    if res.ok:
        whole = (1 << w0) | (1 << wr) | sum(1 << u for u in U)
        whole |= sum(1 << v for b in part.blocks for v in b) | sum(1 << v for v in part.separators)
        assert validate_directed_path(t, res.path, whole, w0, wr).ok
