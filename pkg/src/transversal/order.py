"""Median orders and the constructions that read paths off them.

A median order of a tournament is a vertex ordering with the largest number
of forward arcs.  Besides the exact subset DP and a local-search stand-in,
this module holds the interval degree checker and the small path
constructions built on top of median orders.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import soundness
from .core import (
    OrientationPattern,
    ParameterError,
    Report,
    SizeError,
    Tournament,
    bits,
    mask_of,
    validate_directed_path,
)

EXACT_CAP = 22
TRANSITIVE_EXACT_CAP = 24


class InvalidOrderError(ParameterError):
    """An order handed to a construction lacks the required interval properties."""


@dataclass(frozen=True)
class MedianOrder:
    order: tuple[int, ...]
    forward_arcs: int
    exact: bool

    def to_dict(self) -> dict:
        return {"order": list(self.order), "forward_arcs": self.forward_arcs, "exact": self.exact}


def forward_arcs(t: Tournament, order: Sequence[int]) -> int:
    """Number of arcs ``order[i] -> order[j]`` with ``i < j``."""
    seen = 0
    total = 0
    for v in order:
        total += (t.in_mask(v) & seen).bit_count()
        seen |= 1 << v
    return total


def _local_rows(t: Tournament, verts: Sequence[int]) -> list[int]:
    """Out-rows of ``t[verts]`` relabelled to ``0..k-1`` in the given order."""
    index = {v: i for i, v in enumerate(verts)}
    rows = []
    for v in verts:
        r = 0
        for w in bits(t.out_mask(v)):
            i = index.get(w)
            if i is not None:
                r |= 1 << i
        rows.append(r)
    return rows


def _subset_values(rows: list[int]) -> np.ndarray:
    """``f[S]`` = most forward arcs of any ordering of the local vertex set ``S``.

    Recurrence on the first vertex: ``f[S] = max_v |N^+(v) & S| + f[S - v]``.
    Sets are processed by increasing size so every ``f[S - v]`` is final.
    """
    k = len(rows)
    size = 1 << k
    f = np.zeros(size, dtype=np.int32)
    if k == 0:
        return f
    idx_all = np.arange(size, dtype=np.int64)
    pc = np.bitwise_count(idx_all)
    order = np.argsort(pc, kind="stable")
    bounds = np.searchsorted(pc[order], np.arange(k + 2))
    rows_np = [np.int64(r) for r in rows]
    for layer in range(1, k + 1):
        idx = order[bounds[layer]:bounds[layer + 1]]
        best = np.full(idx.shape, -1, dtype=np.int32)
        for v in range(k):
            has = ((idx >> v) & 1).astype(bool)
            sub = idx[has]
            cand = np.bitwise_count(sub & rows_np[v]).astype(np.int32) + f[sub ^ (1 << v)]
            cur = best[has]
            best[has] = np.maximum(cur, cand)
        f[idx] = best
    return f


def median_order_exact(t: Tournament, cap: int = EXACT_CAP) -> MedianOrder:
    """Exact median order; the lexicographically smallest among maximizers."""
    verts = t.vertices
    k = len(verts)
    if k > cap:
        raise SizeError(f"n={k} exceeds the exact cap {cap}; use median_order_local")
    rows = _local_rows(t, verts)
    f = _subset_values(rows)
    s = (1 << k) - 1
    out = []
    while s:
        target = f[s]
        for v in range(k):
            bit = 1 << v
            if s & bit and (rows[v] & s).bit_count() + f[s ^ bit] == target:
                out.append(verts[v])
                s ^= bit
                break
    return MedianOrder(tuple(out), int(f[(1 << k) - 1]), True)


def median_orders(t: Tournament, cap: int = 12) -> Iterator[tuple[int, ...]]:
    """Every median order of ``t``, in lexicographic order."""
    verts = t.vertices
    k = len(verts)
    if k > cap:
        raise SizeError(f"n={k} exceeds the enumeration cap {cap}")
    rows = _local_rows(t, verts)
    f = _subset_values(rows)

    def rec(s: int, prefix: list[int]):
        if not s:
            yield tuple(verts[v] for v in prefix)
            return
        target = f[s]
        for v in range(k):
            bit = 1 << v
            if s & bit and (rows[v] & s).bit_count() + f[s ^ bit] == target:
                prefix.append(v)
                yield from rec(s ^ bit, prefix)
                prefix.pop()

    yield from rec((1 << k) - 1, [])


def _improving_move(a: np.ndarray, order: list[int], p: int) -> int | None:
    """Smallest target position whose relocation of ``order[p]`` gains arcs."""
    v = order[p]
    s = 2 * a[v, order].astype(np.int64) - 1  # +1 when v -> w, -1 when w -> v
    # moving v to q < p puts it in front of order[q..p-1]
    left = np.cumsum(s[:p][::-1])[::-1]
    hit = np.flatnonzero(left > 0)
    if hit.size:
        return int(hit[0])
    # moving v to q > p puts it after order[p+1..q]
    right = -np.cumsum(s[p + 1:])
    hit = np.flatnonzero(right > 0)
    if hit.size:
        return p + 1 + int(hit[0])
    return None


def median_order_local(t: Tournament) -> MedianOrder:
    """Relocation-optimal order found by deterministic first-improvement search.

    Starts from the identity order.  A pass visits the vertices by increasing
    label; a visited vertex is relocated to the first position that gains
    forward arcs, repeatedly, until no single move of it helps.  Passes are
    repeated until one of them moves nothing.
    """
    verts = list(t.vertices)
    k = len(verts)
    a = np.zeros((k, k), dtype=np.int8)
    for i, r in enumerate(_local_rows(t, verts)):
        for j in bits(r):
            a[i, j] = 1
    order = list(range(k))
    moved = True
    while moved:
        moved = False
        for v in range(k):
            while True:
                p = order.index(v)
                q = _improving_move(a, order, p)
                if q is None:
                    break
                order.pop(p)
                order.insert(q, v)
                moved = True
    result = tuple(verts[i] for i in order)
    return MedianOrder(result, forward_arcs(t, result), False)


def is_relocation_optimal(t: Tournament, order: Sequence[int]) -> bool:
    """True iff no single-vertex relocation increases the forward-arc count."""
    verts = list(order)
    index = {v: i for i, v in enumerate(verts)}
    k = len(verts)
    a = np.zeros((k, k), dtype=np.int8)
    for i, v in enumerate(verts):
        for w in bits(t.out_mask(v)):
            if w in index:
                a[i, index[w]] = 1
    local = list(range(k))
    return all(_improving_move(a, local, p) is None for p in range(k))


def median_order(t: Tournament, cap: int = EXACT_CAP) -> MedianOrder:
    """Exact median order when ``n <= cap``, otherwise the local-search order."""
    return median_order_exact(t, cap) if t.n <= cap else median_order_local(t)


# ---------------------------------------------------------------------------
# interval properties


@dataclass
class IntervalReport(Report):
    interval: tuple[int, int] | None = None
    prop: str | None = None
    vertex: int | None = None


def check_interval_properties(t: Tournament, order: Sequence[int]) -> IntervalReport:
    """Check the two interval degree conditions of median orders.

    For every interval ``I = [i, j]`` of positions (1-based) the first vertex
    needs ``d^+(v_i, I) >= (|I|-1)/2`` (property B2) and the last vertex needs
    ``d^-(v_j, I) >= (|I|-1)/2`` (property B3).  Intervals are scanned with
    ``i`` increasing and, for each ``i``, ``j`` decreasing; B2 is reported
    before B3 on the same interval.
    """
    rep = IntervalReport()
    order = list(order)
    if sorted(order) != list(t.vertices):
        rep.add("not-a-permutation", None, "order must list every vertex once")
        return rep
    k = len(order)
    if k < 2:
        return rep
    m = t.matrix()[np.ix_(order, order)].astype(np.int32)
    rowc = np.cumsum(m, axis=1)
    colc = np.cumsum(m, axis=0)
    i_idx, j_idx = np.triu_indices(k, 1)
    dplus = rowc[i_idx, j_idx] - rowc[i_idx, i_idx]
    above = np.where(i_idx > 0, colc[np.maximum(i_idx - 1, 0), j_idx], 0)
    dminus = colc[j_idx, j_idx] - above
    length = j_idx - i_idx
    bad2 = 2 * dplus < length
    bad3 = 2 * dminus < length
    bad = bad2 | bad3
    if not bad.any():
        return rep
    # scan order: smallest i, then largest j
    hits = np.flatnonzero(bad)
    key = i_idx[hits] * k - j_idx[hits]
    h = hits[np.argmin(key)]
    i, j = int(i_idx[h]), int(j_idx[h])
    prop = "B2" if bad2[h] else "B3"
    vertex = order[i] if prop == "B2" else order[j]
    rep.interval = (i + 1, j + 1)
    rep.prop = prop
    rep.vertex = vertex
    rep.add(prop, i + 1, f"interval [{i + 1},{j + 1}] fails at vertex {vertex}")
    return rep


# ---------------------------------------------------------------------------
# constructions


def embed_in_transitive(pattern: OrientationPattern, n: int) -> tuple[int, ...]:
    """Ranks (1-based) of a copy of ``pattern`` in the transitive tournament on ``n`` vertices.

    Two pointers ``lo`` and ``hi`` sweep inwards: a forward arc leaves from
    the smallest unused rank, a backward arc from the largest one, so the
    next vertex is always on the correct side.
    """
    if pattern.cyclic or pattern.length != n - 1:
        raise ParameterError("pattern must be a path with n-1 arcs")
    lo, hi = 1, n
    ranks = []
    for s in pattern.signs:
        if s == "+":
            ranks.append(lo)
            lo += 1
        else:
            ranks.append(hi)
            hi -= 1
    ranks.append(lo)
    assert lo == hi
    return tuple(ranks)


def skip_vertex_path(t: Tournament, order: Sequence[int]) -> tuple[int, ...]:
    """Directed path from ``x1`` to ``x5`` through ``{x1,x2,x4,x5}``.

    ``order = (x1, ..., x5)`` must satisfy the interval properties in
    ``t[{x1..x5}]``.  If ``x2 -> x4`` the path is ``x1 x2 x4 x5``; otherwise
    B2/B3 force ``x1 -> x4 -> x2 -> x5``.
    """
    order = tuple(order)
    if len(order) != 5 or len(set(order)) != 5:
        raise ParameterError("order must list five distinct vertices")
    sub = t.induced(mask_of(order))
    rep = check_interval_properties(sub, order)
    if not rep.ok:
        raise InvalidOrderError(f"order fails the interval properties: {rep.first.detail}")
    x1, x2, x3, x4, x5 = order
    path = (x1, x2, x4, x5) if t.has_arc(x2, x4) else (x1, x4, x2, x5)
    soundness.gate("skip_vertex_path",
                   validate_directed_path(t, path, mask_of(order) ^ (1 << x3), x1, x5))
    return path


@dataclass(frozen=True)
class NearDirectedPair:
    path: tuple[int, ...]
    near_path: tuple[int, ...]
    near_pattern: OrientationPattern

    def to_dict(self) -> dict:
        return {"path": list(self.path), "near_path": list(self.near_path),
                "near_pattern": str(self.near_pattern)}


def path_pattern(t: Tournament, path: Sequence[int]) -> OrientationPattern:
    """Orientation pattern traced by a vertex sequence in ``t``."""
    return OrientationPattern("".join("+" if t.has_arc(a, b) else "-"
                                      for a, b in zip(path, path[1:])))


def validate_near_pair(t: Tournament, pair: NearDirectedPair) -> Report:
    rep = Report()
    full = t.vertex_mask
    rep.violations += validate_directed_path(t, pair.path, full).violations
    q = pair.near_path
    if mask_of(q) != full or len(q) != t.n:
        rep.add("vertex-set", None, "second path is not Hamilton")
        return rep
    if not pair.path or q[0] != pair.path[0]:
        rep.add("endpoint", 0, "paths must share the first vertex")
    pat = path_pattern(t, q)
    if pat != pair.near_pattern:
        rep.add("wrong-orientation", None, f"traced {pat} but reported {pair.near_pattern}")
    if pat.signs.count("-") != 1:
        rep.add("near-directed", None, f"pattern {pat} must have exactly one backward arc")
    return rep


def near_directed_pair(t: Tournament, order: Sequence[int] | None = None) -> NearDirectedPair:
    """A directed Hamilton path and a Hamilton path with a single backward arc.

    Both start at the first vertex of the median order used (computed when
    ``order`` is omitted).
    """
    n = t.n
    if n < 5:
        raise SizeError("near_directed_pair needs at least five vertices")
    if order is None:
        order = median_order(t).order
    order = tuple(order)
    rep = check_interval_properties(t, order)
    if not rep.ok:
        raise InvalidOrderError(f"order fails the interval properties: {rep.first.detail}")
    v = (None,) + order  # 1-based view
    i = next(i for i in (n - 3, n - 2) if t.has_arc(v[i], v[n]))
    j = next(j for j in range(i + 1, n + 1) if t.has_arc(v[i - 1], v[j]))
    near = order[: i - 1] + order[j - 1:] + order[i - 1: j - 1]
    pair = NearDirectedPair(order, near, path_pattern(t, near))
    soundness.gate("near_directed_pair", validate_near_pair(t, pair))
    return pair


def is_transitive_sequence(t: Tournament, seq: Sequence[int]) -> bool:
    return all(t.has_arc(seq[a], seq[b]) for a in range(len(seq)) for b in range(a + 1, len(seq)))


def largest_transitive(t: Tournament, mode: str = "exact",
                       cap: int = TRANSITIVE_EXACT_CAP) -> tuple[int, ...]:
    """Vertex set of a transitive subtournament, listed source first.

    ``exact`` finds a maximum one: the best set inside ``S`` is a source ``v``
    followed by the best set inside ``S ∩ N^+(v)``; candidates are tried by
    decreasing ``|S ∩ N^+(v)|`` and cut as soon as that bound cannot beat the
    incumbent.  ``greedy`` repeatedly keeps a max-out-degree vertex and moves
    into its out-neighbourhood, which retains at least half of the remaining
    vertices at every step.
    """
    out = t.out_rows
    if mode == "greedy":
        s = t.vertex_mask
        seq = []
        while s:
            v = max(bits(s), key=lambda u: ((out[u] & s).bit_count(), -u))
            seq.append(v)
            s &= out[v]
        result = tuple(seq)
    elif mode == "exact":
        if t.n > cap:
            raise SizeError(f"n={t.n} exceeds the exact cap {cap}")
        memo: dict[int, tuple[int, ...]] = {0: ()}

        def best(s: int) -> tuple[int, ...]:
            hit = memo.get(s)
            if hit is not None:
                return hit
            cands = sorted(bits(s), key=lambda u: (-(out[u] & s).bit_count(), u))
            top: tuple[int, ...] = ()
            for u in cands:
                sub = out[u] & s
                if 1 + sub.bit_count() <= len(top):
                    break
                r = (u,) + best(sub)
                if len(r) > len(top):
                    top = r
            memo[s] = top
            return top

        result = best(t.vertex_mask)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    rep = Report()
    if not is_transitive_sequence(t, result):
        rep.add("not-transitive", None, f"{result} does not induce a transitive order")
    soundness.gate("largest_transitive", rep)
    return result


def low_degree_count(t: Tournament, d: int, sign: str = "-", within: int | None = None) -> int:
    """Number of vertices ``v`` of ``t[within]`` with ``d^sign(v) <= d``."""
    s = t.vertex_mask if within is None else within
    return sum(1 for v in bits(s) if t.neighbors(v, sign, s).bit_count() <= d)
