"""Ordered vertex partitions glued by dominating separator vertices.

An ``H(ell, gamma)``-partition of a tournament is a sequence of blocks
``W_1 .. W_r`` and separators ``w_1 .. w_{r-1}`` such that

* A1: blocks and separators together cover the vertex set,
* A2: ``gamma * ell <= |W_i| <= ell``,
* A3: ``W_i => w_i => W_{i+1}`` (every arc goes the stated way),
* A4 (robust partitions): for each ``i < r`` some ``i' <= i < j'`` has
  ``|E[W_i', W_j']| >= gamma |W_i'| |W_j'| - n``.

``E[A, B]`` counts arcs from ``A`` to ``B``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb
from typing import Sequence

import numpy as np

from . import soundness
from .core import ParameterError, Report, SizeError, Tournament, as_fraction, bits, mask_of


def _tuple(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


# ---------------------------------------------------------------------------
# triangle counts and balanced vertices


def transitive_triangles(t: Tournament) -> int:
    """``sum_u C(d^+(u), 2)``: every transitive triangle has one source."""
    return sum(comb(t.out_degree(u), 2) for u in t.vertices)


def cyclic_triangles(t: Tournament) -> int:
    """Number of directed triangles, counted as ``trace(A^3) / 3``."""
    idx = list(t.vertices)
    a = t.matrix()[np.ix_(idx, idx)].astype(np.int64)
    return int(np.trace(a @ a @ a)) // 3


def center_counts(t: Tournament) -> dict[int, int]:
    """``|E[N^-(v), N^+(v)]|`` for every vertex ``v``.

    This is the number of transitive triangles in which ``v`` is the middle
    vertex.
    """
    verts = t.vertices
    if len(verts) <= 64:
        out = {}
        for v in verts:
            ins, outs = t.in_mask(v), t.out_mask(v)
            out[v] = sum((t.out_mask(u) & outs).bit_count() for u in bits(ins))
        return out
    a = t.matrix()[np.ix_(verts, verts)].astype(np.float64)
    common = a @ a.T  # common[u, v] = |N^+(u) & N^+(v)|
    cross = (a * common).sum(axis=0)  # sum over u -> v of |N^+(u) & N^+(v)|
    return {v: int(round(c)) for v, c in zip(verts, cross)}


@dataclass(frozen=True)
class BalancedVertex:
    vertex: int
    in_mask: int
    out_mask: int
    cross: int

    @property
    def in_neighbors(self) -> tuple[int, ...]:
        return _tuple(self.in_mask)

    @property
    def out_neighbors(self) -> tuple[int, ...]:
        return _tuple(self.out_mask)

    def to_dict(self) -> dict:
        return {"vertex": self.vertex, "in": list(self.in_neighbors),
                "out": list(self.out_neighbors), "cross": self.cross}


def balanced_vertex(t: Tournament) -> BalancedVertex:
    """Vertex with the most arcs from its in- to its out-neighbourhood.

    Ties go to the lowest label.  On ``n >= 5`` vertices the winner has at
    least ``ceil(n^2/25)`` such arcs and in- and out-degree at least
    ``ceil(n/25)``.
    """
    if t.n < 5:
        raise SizeError("balanced_vertex needs at least five vertices")
    counts = center_counts(t)
    v = max(counts, key=lambda u: (counts[u], -u))
    bv = BalancedVertex(v, t.in_mask(v), t.out_mask(v), counts[v])
    rep = Report()
    if t.cross_arcs(bv.in_mask, bv.out_mask) != bv.cross:
        rep.add("cross-count", v, "reported cross count does not recompute")
    soundness.gate("balanced_vertex", rep)
    return bv


def balanced_bounds(n: int) -> tuple[int, int]:
    """Integer forms ``(ceil(n^2/25), ceil(n/25))`` of the balanced-vertex bounds."""
    return ceil(Fraction(n * n, 25)), ceil(Fraction(n, 25))


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class HPartition:
    blocks: tuple[tuple[int, ...], ...]
    separators: tuple[int, ...]
    ell: int
    gamma: Fraction

    @property
    def r(self) -> int:
        return len(self.blocks)

    def block_masks(self) -> list[int]:
        return [mask_of(b) for b in self.blocks]

    def to_dict(self) -> dict:
        return {"blocks": [list(b) for b in self.blocks], "separators": list(self.separators),
                "ell": self.ell, "gamma": str(self.gamma)}


@dataclass(frozen=True)
class GoodHPartition:
    """Blocks ``U_0 .. U_{r+1}`` with separators ``u_0 .. u_r``."""

    blocks: tuple[tuple[int, ...], ...]
    separators: tuple[int, ...]
    ell: int
    gamma: Fraction
    ok: bool = field(default=True, init=False)

    def whole(self) -> HPartition:
        return HPartition(self.blocks, self.separators, self.ell, self.gamma)

    def inner(self) -> HPartition:
        return HPartition(self.blocks[1:-1], self.separators[1:-1], self.ell, self.gamma)

    def inner_vertex_mask(self, t: Tournament) -> int:
        drop = mask_of(self.blocks[0]) | mask_of(self.blocks[-1])
        drop |= (1 << self.separators[0]) | (1 << self.separators[-1])
        return t.vertex_mask & ~drop

    def to_dict(self) -> dict:
        return {"blocks": [list(b) for b in self.blocks], "separators": list(self.separators),
                "ell": self.ell, "gamma": str(self.gamma)}


@dataclass(frozen=True)
class PartitionFailure:
    step: str
    reason: str
    ok: bool = field(default=False, init=False)

    def to_dict(self) -> dict:
        return {"failure": self.step, "reason": self.reason}


def _block_arc_matrix(t: Tournament, masks: Sequence[int]) -> np.ndarray:
    """``E[i, j] = |E[W_i, W_j]|`` for the given blocks."""
    universe = t.universe
    ind = np.zeros((len(masks), universe), dtype=np.float64)
    for i, m in enumerate(masks):
        ind[i, list(bits(m))] = 1.0
    a = t.matrix().astype(np.float64)
    return np.rint(ind @ a @ ind.T).astype(np.int64)


def _robust_pairs(e: np.ndarray, sizes: np.ndarray, gamma: Fraction, n: int) -> np.ndarray:
    """Boolean matrix of pairs meeting ``q E >= p |W_i||W_j| - q n`` (``gamma = p/q``)."""
    p, q = gamma.numerator, gamma.denominator
    need = p * np.outer(sizes, sizes) - q * n
    return q * e >= need


def _check_h(t: Tournament, ground: int, masks: list[int], seps: Sequence[int], ell: int,
             gamma: Fraction, robust: bool, rep: Report, label: str = "") -> None:
    r = len(masks)
    if len(seps) != r - 1:
        rep.add(f"{label}A1", None, f"{r} blocks need {r - 1} separators")
        return
    seen = 0
    for i, m in enumerate(masks):
        if m & seen:
            rep.add(f"{label}A1", i + 1, f"block W_{i + 1} overlaps earlier parts")
        seen |= m
    for i, w in enumerate(seps):
        if (seen >> w) & 1:
            rep.add(f"{label}A1", i + 1, f"separator w_{i + 1}={w} repeats a vertex")
        seen |= 1 << w
    if seen != ground:
        missing = _tuple(ground & ~seen)
        extra = _tuple(seen & ~ground)
        rep.add(f"{label}A1", None, f"cover mismatch: missing {missing}, outside {extra}")
    if rep.violations:
        return
    p, q = gamma.numerator, gamma.denominator
    for i, m in enumerate(masks):
        s = m.bit_count()
        if not (q * s >= p * ell and s <= ell):
            rep.add(f"{label}A2", i + 1, f"|W_{i + 1}|={s} outside [{gamma}*{ell}, {ell}]")
    for i, w in enumerate(seps):
        before, after = masks[i], masks[i + 1]
        bad_in = before & ~t.in_mask(w)
        if bad_in:
            rep.add(f"{label}A3", i + 1,
                    f"witness (i={i + 1}, w_i={w}, vertex={next(bits(bad_in))}): arc into W_i")
        bad_out = after & ~t.out_mask(w)
        if bad_out:
            rep.add(f"{label}A3", i + 1,
                    f"witness (i={i + 1}, w_i={w}, vertex={next(bits(bad_out))}): arc from W_(i+1)")
    if not robust or r < 2 or rep.violations:
        return
    n = ground.bit_count()
    sizes = np.array([m.bit_count() for m in masks], dtype=np.int64)
    good = _robust_pairs(_block_arc_matrix(t, masks), sizes, gamma, n)
    good = np.triu(good, 1)
    cols = np.arange(r)
    last = np.where(good.any(axis=1), (good * cols).max(axis=1), -1)
    reach = np.maximum.accumulate(last)
    for i in range(r - 1):
        if reach[i] <= i:
            rep.add(f"{label}A4", i + 1, f"no pair i' <= {i + 1} < j' is dense enough")
            break


def validate_h_partition(t: Tournament, part, robust: bool = True, good: bool = False) -> Report:
    """Check A1-A3 (and A4 when ``robust``) exactly.

    With ``good`` the argument is a :class:`GoodHPartition`: the whole tuple
    must be an H-partition of ``t`` and the inner tuple a robust one of the
    tournament left after deleting the two outer blocks and separators.
    """
    rep = Report()
    gamma = as_fraction(part.gamma)
    masks = [mask_of(b) for b in part.blocks]
    if good:
        if len(masks) < 3:
            rep.add("A1", None, "a good partition needs at least three blocks")
            return rep
        _check_h(t, t.vertex_mask, masks, part.separators, part.ell, gamma, False, rep)
        if not rep.ok:
            return rep
        inner_ground = part.inner_vertex_mask(t)
        sub = t.induced(inner_ground)
        _check_h(sub, inner_ground, masks[1:-1], part.separators[1:-1], part.ell, gamma,
                 True, rep, "inner-")
        return rep
    _check_h(t, t.vertex_mask, masks, part.separators, part.ell, gamma, robust, rep)
    return rep


def robust_h_partition(t: Tournament, ell: int, gamma=Fraction(1, 25)) -> HPartition:
    """Split oversize blocks at balanced vertices until every block fits.

    Starting from the single block ``V(T)``, the lowest-index block with more
    than ``ell`` vertices is replaced by ``N^-(v), {v}, N^+(v)`` inside the
    block, where ``v`` is its balanced vertex and becomes a separator.  Each
    split keeps A2-A4: the new pieces have at least ``s/25 > gamma * ell``
    vertices, and an A4 witness pair through the split block passes to one
    of the two pieces.
    """
    g = as_fraction(gamma)
    n = t.n
    if not (4 <= ell <= n):
        raise ParameterError("need 4 <= ell <= n")
    if not (0 < g <= Fraction(1, 25)):
        raise ParameterError("gamma must lie in (0, 1/25]")
    blocks = [t.vertex_mask]
    seps: list[int] = []
    i = 0
    while i < len(blocks):
        if blocks[i].bit_count() <= ell:
            i += 1
            continue
        bv = balanced_vertex(t.induced(blocks[i]))
        blocks[i: i + 1] = [bv.in_mask, bv.out_mask]
        seps.insert(i, bv.vertex)
    part = HPartition(tuple(_tuple(b) for b in blocks), tuple(seps), ell, g)
    soundness.gate("robust_h_partition", validate_h_partition(t, part, robust=True))
    return part


# ---------------------------------------------------------------------------
# good partitions


@dataclass(frozen=True)
class BoundaryFractions:
    """Fractions used when carving protected end blocks out of ``W_1`` and ``W_r``.

    ``first_size``/``first_degree``: ``V_1`` must contain at least
    ``floor(first_size * |W_1|)`` vertices of ``W_1``, each with at least
    ``first_degree * |W_p|`` out-neighbours in ``W_p``.  ``last_size`` and
    ``last_degree`` play the same role for ``V_r`` inside ``W_r`` with
    in-neighbours in ``U_q``.
    """

    first_size: Fraction
    first_degree: Fraction
    last_size: Fraction
    last_degree: Fraction

    @classmethod
    def strict(cls) -> "BoundaryFractions":
        return cls(Fraction(1, 50), Fraction(1, 50), Fraction(1, 50**3), Fraction(1, 50**3))

    @classmethod
    def relaxed(cls, size=Fraction(1, 4), degree=Fraction(1, 4)) -> "BoundaryFractions":
        s, d = as_fraction(size), as_fraction(degree)
        return cls(s, d, s, d)


DEFAULT_FRACTIONS = BoundaryFractions.relaxed()


def _select(t: Tournament, pool: int, target: int, sign: str, size_frac: Fraction,
            deg_frac: Fraction, name: str):
    """Vertices of ``pool`` with ``d^sign(v, target) >= deg_frac * |target|``."""
    need_size = int(size_frac * pool.bit_count())
    if need_size == 0:
        return None, PartitionFailure(name, f"{name} empty: {size_frac} * {pool.bit_count()} < 1")
    tsize = target.bit_count()
    chosen = 0
    for v in bits(pool):
        if t.neighbors(v, sign, target).bit_count() >= deg_frac * tsize:
            chosen |= 1 << v
    if chosen.bit_count() < need_size:
        return None, PartitionFailure(
            name, f"{name} short: {chosen.bit_count()} vertices with degree >= "
                  f"{deg_frac}*{tsize}, need {need_size}")
    if chosen.bit_count() < 5:
        return None, PartitionFailure(name, f"{name} has {chosen.bit_count()} < 5 vertices")
    return chosen, None


def good_h_partition(t: Tournament, ell: int, gamma, fractions: BoundaryFractions = DEFAULT_FRACTIONS):
    """Good partition obtained by splitting the first and last robust blocks.

    Returns a validated :class:`GoodHPartition` or a :class:`PartitionFailure`
    naming the step that could not be carried out.
    """
    g = as_fraction(gamma)
    if not (0 < g <= Fraction(1, 25)):
        raise ParameterError("gamma must lie in (0, 1/25]")
    base = robust_h_partition(t, ell, Fraction(1, 25))
    masks = base.block_masks()
    r = len(masks)
    n = t.n
    if r < 2:
        return PartitionFailure("robust", "the robust partition has a single block")
    e = _block_arc_matrix(t, masks)
    sizes = np.array([m.bit_count() for m in masks], dtype=np.int64)
    dense = _robust_pairs(e, sizes, Fraction(1, 25), n)
    p = max((j for j in range(1, r) if dense[0, j]), default=None)
    q = min((i for i in range(0, r - 1) if dense[i, r - 1]), default=None)
    if p is None or q is None:
        return PartitionFailure("robust", "no dense pair with the first or last block")
    w1, wr = masks[0], masks[-1]
    v1, fail = _select(t, w1, masks[p], "+", fractions.first_size, fractions.first_degree, "V_1")
    if fail:
        return fail
    u0 = balanced_vertex(t.induced(v1)).vertex
    u0_in, u0_out = t.in_mask(u0) & w1, t.out_mask(u0) & w1
    uq = u0_out if q == 0 else masks[q]
    vr, fail = _select(t, wr, uq, "-", fractions.last_size, fractions.last_degree, "V_r")
    if fail:
        return fail
    ur = balanced_vertex(t.induced(vr)).vertex
    ur_in, ur_out = t.in_mask(ur) & wr, t.out_mask(ur) & wr
    for name, part in (("U_0", u0_in), ("U_1", u0_out), ("U_r", ur_in), ("U_r+1", ur_out)):
        if g * ell > part.bit_count():
            return PartitionFailure(name, f"|{name}|={part.bit_count()} < {g}*{ell}")
    blocks = [u0_in, u0_out] + masks[1:-1] + [ur_in, ur_out]
    seps = [u0] + list(base.separators) + [ur]
    good = GoodHPartition(tuple(_tuple(b) for b in blocks), tuple(seps), ell, g)
    rep = validate_h_partition(t, good, good=True)
    if not rep.ok:
        first = rep.first
        return PartitionFailure(first.reason, first.detail)
    soundness.gate("good_h_partition", rep)
    return good
