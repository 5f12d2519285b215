"""Brooms and near-rainbow colorings.

A ``(P, s1, s2)``-broom is the oriented path ``P = x_1 .. x_{L+1}`` whose first
vertex is replaced by ``s1`` start-tips and whose last vertex is replaced by
``s2`` end-tips.  Each start-tip ``y`` is joined to ``x_2`` by
``(y x_2)^{sigma_1}`` and each end-tip ``z`` hangs off ``x_L`` by
``(x_L z)^{sigma_L}``.  When ``L = 1`` every start-tip is joined directly to
every end-tip, and when ``L = 0`` the broom is just ``s2`` isolated vertices.

A coloring of the arcs is near-rainbow when all start-tip arcs share a color,
all end-tip arcs share a color, and every tip-to-tip path is rainbow.

Arcs are keyed by the pair ``(a, b)`` listing the endpoints in path order;
the sign of the pattern position decides which way the arc points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from . import soundness
from .core import (
    OrientationPattern,
    ParameterError,
    RainbowEmbedding,
    Report,
    SizeError,
    Tournament,
    TournamentCollection,
    bits,
    mask_of,
    validate_embedding,
)
from .order import check_interval_properties, largest_transitive, median_order, median_order_exact
from .pattern import classify_oscillating, Oscillation


def has_signed(t: Tournament, a: int, b: int, sign: str) -> bool:
    """True iff ``(a b)^sign`` is an arc of ``t``."""
    return t.has_arc(a, b) if sign == "+" else t.has_arc(b, a)


def _first(mask: int, k: int) -> tuple[int, ...]:
    out = []
    for v in bits(mask):
        if len(out) == k:
            break
        out.append(v)
    return tuple(out)


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class Broom:
    pattern: OrientationPattern
    start_tips: tuple[int, ...]
    internal: tuple[int, ...]
    end_tips: tuple[int, ...]

    @property
    def length(self) -> int:
        return self.pattern.length

    def vertices(self) -> tuple[int, ...]:
        return self.start_tips + self.internal + self.end_tips

    def arcs(self) -> list[tuple[str, int, int, str]]:
        """``(class, a, b, sign)`` for every arc; class is start, internal, end or tip."""
        s = self.pattern.signs
        L = len(s)
        if L == 0:
            return []
        if L == 1:
            return [("tip", y, z, s[0]) for y in self.start_tips for z in self.end_tips]
        out = [("start", y, self.internal[0], s[0]) for y in self.start_tips]
        for i in range(len(self.internal) - 1):
            out.append(("internal", self.internal[i], self.internal[i + 1], s[i + 1]))
        out += [("end", self.internal[-1], z, s[-1]) for z in self.end_tips]
        return out

    def to_dict(self) -> dict:
        return {"pattern": str(self.pattern), "start_tips": list(self.start_tips),
                "internal": list(self.internal), "end_tips": list(self.end_tips)}


@dataclass(frozen=True)
class NearRainbowColoring:
    colors: Mapping[tuple[int, int], int]

    @classmethod
    def from_classes(cls, broom: Broom, start: int | None, internal: Sequence[int],
                     end: int | None) -> "NearRainbowColoring":
        """Color all start arcs ``start``, the internal arcs in order, all end arcs ``end``."""
        cmap: dict[tuple[int, int], int] = {}
        internal = list(internal)
        k = 0
        for kind, a, b, _ in broom.arcs():
            if kind == "start":
                cmap[(a, b)] = start
            elif kind == "end":
                cmap[(a, b)] = end
            elif kind == "tip":
                cmap[(a, b)] = start if start is not None else end
            else:
                cmap[(a, b)] = internal[k]
                k += 1
        return cls(cmap)

    def used(self) -> set[int]:
        return set(self.colors.values())

    def to_dict(self) -> dict:
        return {"arcs": [[a, b, c] for (a, b), c in sorted(self.colors.items())]}


@dataclass(frozen=True)
class NearRainbowBroom:
    broom: Broom
    coloring: NearRainbowColoring
    case: str
    ok: bool = field(default=True, init=False)

    def to_dict(self) -> dict:
        return {"case": self.case, "broom": self.broom.to_dict(),
                "coloring": self.coloring.to_dict()}


@dataclass(frozen=True)
class BroomFailure:
    step: str
    reason: str
    ok: bool = field(default=False, init=False)

    def to_dict(self) -> dict:
        return {"failure": self.step, "reason": self.reason}


# ---------------------------------------------------------------------------
# validators


def _structure(broom: Broom, rep: Report) -> None:
    verts = broom.vertices()
    if len(set(verts)) != len(verts):
        rep.add("structure", None, "broom vertices are not distinct")
    L = broom.length
    if L == 0:
        if broom.start_tips or broom.internal:
            rep.add("structure", None, "an empty broom has only end-tips")
    elif L == 1:
        if broom.internal:
            rep.add("structure", None, "a length-one broom has no internal vertices")
    elif len(broom.internal) != L - 1:
        rep.add("structure", None, f"need {L - 1} internal vertices, got {len(broom.internal)}")
    if L >= 1 and (not broom.start_tips or not broom.end_tips):
        rep.add("structure", None, "tips are missing")


def validate_broom(broom: Broom, t: Tournament) -> Report:
    """Structural invariants plus presence of every arc in ``t``."""
    rep = Report()
    _structure(broom, rep)
    if not rep.ok:
        return rep
    for v in broom.vertices():
        if not t.has_vertex(v):
            rep.add("unknown-vertex", None, f"vertex {v}")
            return rep
    for i, (kind, a, b, sign) in enumerate(broom.arcs()):
        if not has_signed(t, a, b, sign):
            rep.add("wrong-orientation", i, f"{kind} arc ({a},{b}) needs '{sign}'")
    return rep


def validate_near_rainbow(broom: Broom, coloring: NearRainbowColoring, coll: TournamentCollection,
                          C: Iterable[int] | None = None, C_prime: Iterable[int] | None = None) -> Report:
    """Check a broom together with its coloring.

    Rainbow tip-to-tip paths are certified by the class condition: the start
    and end tip-arc colors differ from each other and from every internal
    color, and the internal colors are pairwise distinct.
    """
    rep = Report()
    _structure(broom, rep)
    if not rep.ok:
        return rep
    for v in broom.vertices():
        if not coll.members[0].has_vertex(v):
            rep.add("unknown-vertex", None, f"vertex {v}")
            return rep
    arcs = broom.arcs()
    keys = {(a, b) for _, a, b, _ in arcs}
    for key in coloring.colors:
        if key not in keys:
            rep.add("extra-arc", None, f"colored pair {key} is not a broom arc")
    classes: dict[str, list[int]] = {"start": [], "internal": [], "end": [], "tip": []}
    for i, (kind, a, b, sign) in enumerate(arcs):
        c = coloring.colors.get((a, b))
        if c is None:
            rep.add("uncolored-arc", i, f"arc ({a},{b}) has no color")
            continue
        classes[kind].append(c)
        if not coll.has_color(c):
            rep.add("arc-absent-in-color", i, f"unknown color {c}")
        elif not has_signed(coll.member(c), a, b, sign):
            rep.add("wrong-orientation", i, f"{kind} arc ({a},{b}) needs '{sign}' in color {c}")
    for kind in ("start", "end", "tip"):
        if len(set(classes[kind])) > 1:
            rep.add("tip-class", None, f"{kind} tip arcs use several colors")
    internal = classes["internal"]
    if len(set(internal)) != len(internal):
        rep.add("rainbow-path", None, "internal colors repeat")
    if broom.length >= 2 and classes["start"] and classes["end"]:
        s, e = classes["start"][0], classes["end"][0]
        if s == e:
            rep.add("rainbow-path", None, "start and end tip arcs share a color")
        if s in internal or e in internal:
            rep.add("rainbow-path", None, "a tip arc reuses an internal color")
    used = coloring.used()
    if C is not None:
        extra = used - set(C)
        if extra:
            rep.add("color-outside", None, f"colors {sorted(extra)} are outside the allowed set")
    if C_prime is not None:
        missing = set(C_prime) - used
        if missing:
            rep.add("coverage", None, f"colors {sorted(missing)} are required but unused")
    return rep


def tip_paths(broom: Broom, coloring: NearRainbowColoring) -> Iterator[RainbowEmbedding]:
    """Every start-tip to end-tip path as an embedding of the broom's pattern."""
    L = broom.length
    if L == 0:
        return
    for y in broom.start_tips:
        for z in broom.end_tips:
            verts = (y,) + broom.internal + (z,)
            cols = tuple(coloring.colors[(a, b)] for a, b in zip(verts, verts[1:]))
            yield RainbowEmbedding(verts, cols, broom.pattern)


# ---------------------------------------------------------------------------
# directed brooms


def directed_broom(t: Tournament, ell: int, s1: int, s2: int) -> Broom:
    """A broom on the directed path with ``ell`` arcs.

    ``ell = 1`` splits a transitive subtournament (first ``s1`` vertices of its
    order against the last ``s2``).  ``ell >= 2`` reads everything off a
    median order ``w_1 .. w_n``: the internal path is ``w_{2 s1} .. w_{ell+2 s1-2}``,
    start-tips are in-neighbours of ``w_{2 s1}`` among the earlier vertices and
    end-tips are out-neighbours of ``w_{ell+2 s1-2}`` among the later ones.
    """
    if ell < 0 or s1 < 1 or s2 < 1:
        raise ParameterError("need ell >= 0 and s1, s2 >= 1")
    n = t.n
    pattern = OrientationPattern.directed(ell)
    if ell == 0:
        if n < s2:
            raise SizeError("not enough vertices for the end-tips")
        broom = Broom(pattern, (), (), t.vertices[:s2])
    elif ell == 1:
        mode = "exact" if n <= 24 else "greedy"
        seq = largest_transitive(t, mode)
        if len(seq) < s1 + s2:
            raise SizeError(f"largest transitive subtournament found has {len(seq)} < {s1 + s2} vertices")
        broom = Broom(pattern, tuple(seq[:s1]), (), tuple(seq[len(seq) - s2:]))
    else:
        if n < ell + (1 << (s1 + s2)):
            raise SizeError(f"need n >= ell + 2^(s1+s2) = {ell + (1 << (s1 + s2))}")
        w = (None,) + median_order(t).order
        first, last = 2 * s1, ell + 2 * s1 - 2
        internal = tuple(w[first: last + 1])
        starts = tuple(x for x in w[1:first] if t.has_arc(x, w[first]))[:s1]
        ends = tuple(x for x in w[last + 1:] if t.has_arc(w[last], x))[:s2]
        if len(starts) < s1 or len(ends) < s2:
            raise SizeError("median order does not supply enough tips")
        broom = Broom(pattern, starts, internal, ends)
    soundness.gate("directed_broom", validate_broom(broom, t))
    return broom


# ---------------------------------------------------------------------------
# short rainbow paths


def rainbow_short_path(coll: TournamentCollection, pattern: OrientationPattern,
                       vertices: Iterable[int] | int | None = None,
                       colors: Sequence[int] | None = None) -> RainbowEmbedding:
    """Rainbow copy of a path with one or two arcs on at least five vertices.

    ``colors`` lists the color for each arc (default: the collection's
    colors, whose number must equal the length).  ``vertices`` restricts the
    copy to a vertex pool.  A path starting with a backward arc is found as a
    forward one in the reversed tournaments; the vertex sequence is unchanged.
    """
    ell = pattern.length
    if pattern.cyclic or ell not in (1, 2):
        raise ParameterError("pattern must be a path of length one or two")
    cols = tuple(coll.colors if colors is None else colors)
    if len(cols) != ell or len(set(cols)) != ell:
        raise ParameterError("need exactly one distinct color per arc")
    pool = coll.vertex_mask if vertices is None else mask_of(vertices)
    if pool & ~coll.vertex_mask:
        raise ParameterError("vertex pool outside the collection")
    if pool.bit_count() < 5:
        raise SizeError("need at least five vertices")
    work = pattern
    members = [coll.member(c) for c in cols]
    if pattern.signs[0] == "-":
        work = pattern.flip()
        members = [_reversed(m) for m in members]
    seq = _short_forward(members, work, pool)
    emb = RainbowEmbedding(seq, cols, pattern)
    soundness.gate("rainbow_short_path", validate_embedding(coll, pattern, emb))
    return emb


_REV_CACHE: dict[Tournament, Tournament] = {}
_ORDER_CACHE: dict[tuple[Tournament, int], tuple[int, ...]] = {}


def _reversed(t: Tournament) -> Tournament:
    r = _REV_CACHE.get(t)
    if r is None:
        if len(_REV_CACHE) > 8192:
            _REV_CACHE.clear()
        r = _REV_CACHE[t] = t.reverse()
    return r


def _pool_order(t: Tournament, pool: int) -> tuple[int, ...]:
    key = (t, pool)
    hit = _ORDER_CACHE.get(key)
    if hit is None:
        if len(_ORDER_CACHE) > 8192:
            _ORDER_CACHE.clear()
        sub = t if pool == t.vertex_mask else t.induced(pool)
        hit = _ORDER_CACHE[key] = median_order(sub).order
    return hit


def _short_forward(members: list[Tournament], pattern: OrientationPattern, pool: int) -> tuple[int, ...]:
    order = _pool_order(members[0], pool)
    if pattern.length == 1:
        return (order[0], order[1])
    sigma = pattern.signs[1]
    t2 = members[1]
    # at most three vertices of t2[pool] have d^sigma <= 1, so one of v_2..v_5 qualifies
    for i in range(1, len(order)):
        nb = t2.neighbors(order[i], sigma, pool)
        if nb.bit_count() >= 2:
            rest = nb & ~(1 << order[i - 1])
            w = (rest & -rest).bit_length() - 1
            return (order[i - 1], order[i], w)
    raise AssertionError("degree bound violated")  # impossible for tournaments


# ---------------------------------------------------------------------------
# oscillating brooms


@dataclass(frozen=True)
class StepConstants:
    """Sizes used when growing a length-three oscillating broom.

    Defaults follow the constructive argument: ``V_1`` needs 50 vertices,
    ``V_2`` needs 300, two start-tips and fifty end-tips are produced, and the
    degree thresholds are 5 and 51.
    """

    start_pool: int = 50
    end_pool: int = 300
    start_tips: int = 2
    end_tips: int = 50
    start_degree: int = 5
    end_degree: int = 51


STEP = StepConstants()


def _check_colors(coll: TournamentCollection, colors: Sequence[int], size: int) -> tuple[int, ...]:
    cols = tuple(colors)
    if len(cols) != size or len(set(cols)) != size:
        raise ParameterError(f"need {size} distinct colors")
    for c in cols:
        if not coll.has_color(c):
            raise ParameterError(f"unknown color {c}")
    return cols


def oscillating_broom_step(coll: TournamentCollection, V1, V2, pattern: OrientationPattern,
                           B: Sequence[int], constants: StepConstants = STEP):
    """Near-rainbow ``(P, 2, 50)``-broom from ``V1`` to ``V2`` for an oscillating ``P`` of length three.

    Colors ``B = (b1, b2, b3)`` play the roles of ``T_1, T_2, T_3``.  Two
    vertices ``u1, u2`` of ``V1`` with many ``-sigma_1`` neighbours in ``T_1``
    and a set ``W`` of vertices of ``V2`` with many ``sigma_3`` neighbours in
    ``T_3`` are fixed; then either some ``(u_i w)^{sigma_2}`` lies in ``T_2``,
    or the broom is rebuilt inside ``W`` (when ``sigma_1 != sigma_2``) or on
    the arc ``u1 u2`` (when ``sigma_2 != sigma_3``).
    """
    v1, v2 = mask_of(V1), mask_of(V2)
    if v1 & v2:
        raise ParameterError("V1 and V2 must be disjoint")
    if (v1 | v2) & ~coll.vertex_mask:
        raise ParameterError("vertex pools outside the collection")
    if pattern.cyclic or pattern.length != 3 or classify_oscillating(pattern) == Oscillation.NOT:
        raise ParameterError("pattern must be an oscillating path of length three")
    if v1.bit_count() < constants.start_pool:
        raise SizeError(f"|V1| must be at least {constants.start_pool}")
    if v2.bit_count() < constants.end_pool:
        raise SizeError(f"|V2| must be at least {constants.end_pool}")
    b1, b2, b3 = _check_colors(coll, B, 3)
    t1, t2, t3 = coll.member(b1), coll.member(b2), coll.member(b3)
    s1, s2, s3 = pattern.signs
    ns1 = "-" if s1 == "+" else "+"
    ntips, etips = constants.start_tips, constants.end_tips

    us = [u for u in bits(v1) if t1.neighbors(u, ns1, v1).bit_count() >= constants.start_degree][:2]
    if len(us) < 2:
        return BroomFailure("step", "fewer than two start candidates in V1")
    W = [w for w in bits(v2) if t3.neighbors(w, s3, v2).bit_count() >= constants.end_degree]
    W = W[:etips]
    if len(W) < etips:
        return BroomFailure("step", "fewer than the required end candidates in V2")
    u1, u2 = us
    if not has_signed(t3, u1, u2, s2):
        u1, u2 = u2, u1

    result = None
    for u in (u1, u2):
        for w in W:
            if has_signed(t2, u, w, s2):
                starts = _first(t1.neighbors(u, ns1, v1), ntips)
                ends = _first(t3.neighbors(w, s3, v2), etips)
                broom = Broom(pattern, starts, (u, w), ends)
                result = (broom, (b1, (b2,), b3), "direct")
                break
        if result:
            break
    if result is None and s1 != s2:
        w, w2 = W[0], W[1]
        if not has_signed(t1, w, w2, s2):
            w, w2 = w2, w
        ends = _first(t3.neighbors(w2, s3, v2) & ~(1 << w), etips)
        broom = Broom(pattern, (u1, u2)[:ntips], (w, w2), ends)
        result = (broom, (b2, (b1,), b3), "inside-W")
    if result is None and s2 != s3:
        starts = _first(t1.neighbors(u1, ns1, v1) & ~(1 << u2), ntips)
        broom = Broom(pattern, starts, (u1, u2), tuple(W[:etips]))
        result = (broom, (b1, (b3,), b2), "on-u1u2")
    if result is None:  # unreachable for an oscillating pattern
        return BroomFailure("step", "no case of the analysis applies")
    broom, (cs, ci, ce), case = result
    if len(broom.start_tips) < ntips or len(broom.end_tips) < etips:
        return BroomFailure("step", f"case {case} ran out of tips")
    coloring = NearRainbowColoring.from_classes(broom, cs, ci, ce)
    soundness.gate("oscillating_broom_step",
                   validate_near_rainbow(broom, coloring, coll, (b1, b2, b3), (b1, b2, b3)))
    return NearRainbowBroom(broom, coloring, case)


@dataclass(frozen=True)
class EndConstants:
    """Sizes for the closing broom: ``|V1| >= 50`` split at 25, five-vertex pools
    with degree 5, two start-tips."""

    start_pool: int = 50
    half_pool: int = 25
    pool_size: int = 5
    pool_degree: int = 5
    start_tips: int = 2


END = EndConstants()


def oscillating_broom_end(coll: TournamentCollection, V1, v: int, pattern: OrientationPattern,
                          B: Sequence[int], b: int, constants: EndConstants = END):
    """Near-rainbow broom from ``V1`` to the single vertex ``v``.

    Returns the full ``(P, 2, 1)``-broom colored from ``B`` (case
    ``"full"``) or the ``(P', 2, 1)``-broom for ``P`` without its last vertex,
    colored from ``B - {b}`` (case ``"truncated"``).  Patterns ending in
    ``-+`` are handled by flipping every tournament and the pattern.
    """
    v1 = mask_of(V1)
    ell = pattern.length
    if pattern.cyclic or not (2 <= ell <= 4) or classify_oscillating(pattern) != Oscillation.GOOD:
        raise ParameterError("pattern must be a good oscillating path of length 2..4")
    if (v1 >> v) & 1:
        raise ParameterError("v must lie outside V1")
    if (v1 | (1 << v)) & ~coll.vertex_mask:
        raise ParameterError("vertices outside the collection")
    if v1.bit_count() < constants.start_pool:
        raise SizeError(f"|V1| must be at least {constants.start_pool}")
    cols = _check_colors(coll, B, ell)
    if b not in cols:
        raise ParameterError("b must belong to B")
    work_coll, work_pat = coll, pattern
    if pattern.signs[-2:] == "-+":
        work_coll, work_pat = coll.reverse(), pattern.flip()
    out = _end_core(work_coll, v1, v, work_pat, cols, b, constants)
    if isinstance(out, BroomFailure):
        return out
    case, starts, internal, ends, (cs, ci, ce) = out
    used_pattern = pattern if case == "full" else pattern.sub(0, ell - 1)
    broom = Broom(used_pattern, starts, internal, ends)
    coloring = NearRainbowColoring.from_classes(broom, cs, ci, ce)
    allowed = set(cols) if case == "full" else set(cols) - {b}
    soundness.gate("oscillating_broom_end",
                   validate_near_rainbow(broom, coloring, coll, allowed, allowed))
    return NearRainbowBroom(broom, coloring, case)


def _end_core(coll, v1, v, pattern, cols, b, k: EndConstants):
    """Case analysis for patterns ending in ``+-``; colors are relabelled so
    that ``c[l-1] = b`` and the others fill ``c[1..l-2], c[l]`` in order."""
    ell = pattern.length
    others = [c for c in sorted(cols) if c != b]
    c = [None] * (ell + 1)
    c[ell - 1] = b
    slots = list(range(1, ell - 1)) + [ell]
    for pos, col in zip(slots, others):
        c[pos] = col
    sigma = pattern.signs[0]
    nsig = "-" if sigma == "+" else "+"
    t1, tl = coll.member(c[1]), coll.member(c[ell])
    U = tl.out_mask(v) & v1
    U2 = tl.in_mask(v) & v1

    def pool_of(base: int) -> tuple[int, ...]:
        return tuple(w for w in bits(base)
                     if t1.neighbors(w, nsig, base).bit_count() >= k.pool_degree)[: k.pool_size]

    if U.bit_count() >= k.half_pool:
        W = pool_of(U)
        if len(W) < k.pool_size:
            return BroomFailure("end", "pool inside U too small")
        mid = pattern.sub(1, ell - 1)
        if mid.length == 0:
            inner = (W[0],)
        else:
            inner = rainbow_short_path(coll, mid, W, tuple(c[2: ell])).vertices
        starts = _first(t1.neighbors(inner[0], nsig, U) & ~mask_of(inner), k.start_tips)
        if len(starts) < k.start_tips:
            return BroomFailure("end", "not enough start-tips in U")
        return "full", starts, inner, (v,), (c[1], tuple(c[2: ell]), c[ell])
    if U2.bit_count() < k.half_pool:
        return BroomFailure("end", "neither side of v is large enough")
    if ell == 2:
        starts = _first(U2, k.start_tips)
        return "truncated", starts, (), (v,), (c[2], (), c[2])
    W = pool_of(U2)
    if len(W) < k.pool_size:
        return BroomFailure("end", "pool inside U' too small")
    mid = pattern.sub(1, ell - 2)
    if mid.length == 0:
        inner = (W[0],)
    else:
        inner = rainbow_short_path(coll, mid, W, tuple(c[2: ell - 1])).vertices
    starts = _first(t1.neighbors(inner[0], nsig, U2) & ~mask_of(inner), k.start_tips)
    if len(starts) < k.start_tips:
        return BroomFailure("end", "not enough start-tips in U'")
    return "truncated", starts, inner, (v,), (c[1], tuple(c[2: ell - 1]), c[ell])


# ---------------------------------------------------------------------------
# chaining


def chunk_lengths(ell: int, mode: str) -> list[int]:
    """Split a length into threes, with a tail of 2..4 in ``to-vertex-set`` mode."""
    if mode == "wide-end":
        return [3] * (ell // 3)
    if ell <= 4:
        return [ell]
    rem = ell % 3
    if rem == 0:
        return [3] * (ell // 3)
    if rem == 1:
        return [3] * ((ell - 4) // 3) + [4]
    return [3] * ((ell - 2) // 3) + [2]


def chain_brooms(coll: TournamentCollection, V1, V2, pattern: OrientationPattern, mode: str,
                 B: Sequence[int], step: StepConstants = STEP, end: EndConstants = END,
                 min_vertices: int = 1000):
    """Near-rainbow broom for a long oscillating pattern by concatenating short ones.

    ``wide-end`` ends in fifty end-tips inside ``V2`` (length divisible by
    three); ``to-vertex-set`` ends in one vertex of ``V2`` (good oscillating
    pattern).  Each intermediate broom starts from end-tips of the previous one
    and is built away from ``V2`` and from everything already used; one of its
    start-tips becomes the joint vertex and the other tips are discarded.
    """
    ell = pattern.length
    v1, v2 = mask_of(V1), mask_of(V2)
    if mode not in ("wide-end", "to-vertex-set"):
        raise ParameterError(f"unknown mode {mode!r}")
    if pattern.cyclic or ell == 0 or classify_oscillating(pattern) == Oscillation.NOT:
        raise ParameterError("pattern must be a nonempty oscillating path")
    if v1 & v2:
        raise ParameterError("V1 and V2 must be disjoint")
    if coll.n < ell + min_vertices:
        raise SizeError(f"need at least {ell + min_vertices} vertices")
    if v1.bit_count() < step.start_pool:
        raise SizeError(f"|V1| must be at least {step.start_pool}")
    cols = _check_colors(coll, B, ell)
    if mode == "wide-end":
        if ell % 3:
            raise ParameterError("wide-end mode needs a length divisible by three")
        if v2.bit_count() < step.end_pool:
            raise SizeError(f"|V2| must be at least {step.end_pool}")
        v2 = mask_of(_first(v2, step.end_pool))
    else:
        if classify_oscillating(pattern) != Oscillation.GOOD or ell < 2:
            raise ParameterError("to-vertex-set mode needs a good oscillating pattern")
        if v2.bit_count() < 2:
            raise SizeError("|V2| must be at least 2")
    v1 = mask_of(_first(v1, step.start_pool))
    lengths = chunk_lengths(ell, mode)
    sorted_cols = sorted(cols)
    starts: tuple[int, ...] = ()
    internal: list[int] = []
    icolors: list[int] = []
    start_color = end_color = None
    tips = v1
    pos = 0
    for idx, L in enumerate(lengths):
        piece = pattern.sub(pos, pos + L)
        piece_cols = sorted_cols[pos: pos + L]
        last = idx == len(lengths) - 1
        extra_end = None
        if not last or mode == "wide-end":
            if last:
                target = v2
            else:
                used = mask_of(starts) | mask_of(internal)
                target = coll.vertex_mask & ~v2 & ~used & ~tips
            res = oscillating_broom_step(coll, tips, target, piece, piece_cols, step)
        else:
            b = piece_cols[-1]
            a0, a1 = _first(v2, 2)
            sign = piece.signs[-1]
            vv, vv2 = (a0, a1) if has_signed(coll.member(b), a0, a1, sign) else (a1, a0)
            res = oscillating_broom_end(coll, tips, vv, piece, piece_cols, b, end)
            if isinstance(res, NearRainbowBroom) and res.case == "truncated":
                extra_end = (vv2, b)
        if isinstance(res, BroomFailure):
            return BroomFailure(f"chunk {idx + 1}", res.reason)
        f = res.broom
        fc = res.coloring
        f_arcs = f.arcs()
        f_start = next((fc.colors[(a, bb)] for kind, a, bb, _ in f_arcs if kind in ("start", "tip")), None)
        f_end = next((fc.colors[(a, bb)] for kind, a, bb, _ in f_arcs if kind in ("end", "tip")), None)
        f_int = [fc.colors[(a, bb)] for kind, a, bb, _ in f_arcs if kind == "internal"]
        if idx == 0:
            starts = f.start_tips
            internal = list(f.internal)
            icolors = f_int
            start_color = f_start
        else:
            joint = f.start_tips[0]
            internal = internal + [joint] + list(f.internal)
            icolors = icolors + [end_color, f_start] + f_int
        end_color = f_end
        tips = mask_of(f.end_tips)
        if extra_end is not None:
            vv2, b = extra_end
            (vv,) = f.end_tips
            if idx == 0 and f.length == 1:
                # the single-arc broom's tip class becomes the first arc of the result
                start_color = f_start
            else:
                icolors = icolors + [end_color]
            internal = internal + [vv]
            tips = 1 << vv2
            end_color = b
        pos += L
    broom = Broom(pattern, starts, tuple(internal), tuple(bits(tips)))
    coloring = NearRainbowColoring.from_classes(broom, start_color, icolors, end_color)
    soundness.gate("chain_brooms", validate_near_rainbow(broom, coloring, coll, cols, cols))
    return NearRainbowBroom(broom, coloring, mode)
