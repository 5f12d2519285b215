"""Tournaments, collections of tournaments, orientation patterns and embeddings.

Vertex sets are handled as Python integers used as bitsets: bit ``v`` of a
mask is set iff vertex ``v`` belongs to the set.  A digraph stores one
out-neighbour mask per vertex of its universe ``0..N-1`` together with the
mask of vertices that are actually present, so induced subgraphs keep their
original labels.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np


class ParameterError(ValueError):
    """An argument is outside the domain of an operation."""


class SizeError(ValueError):
    """An instance is too small or too large for an operation."""


# ---------------------------------------------------------------------------
# bitset helpers


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int] | int) -> int:
    """Return the bitset of an iterable of vertices (masks pass through)."""
    if isinstance(vertices, (int, np.integer)):
        return int(vertices)
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def popcount(mask: int) -> int:
    return mask.bit_count()


def as_fraction(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Strings such as ``"1/25"`` and decimal literals are parsed exactly; floats
    go through their shortest decimal representation so that ``0.6`` means
    ``3/5`` rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


# ---------------------------------------------------------------------------
# digraphs and tournaments


class Digraph:
    """A loopless digraph on a subset of the universe ``0..N-1``.

    Instances are immutable.  ``out_rows[u]`` is the bitset of out-neighbours
    of ``u``; rows of absent vertices are zero.
    """

    __slots__ = ("_out", "_in", "_vmask", "__dict__")

    def __init__(self, out_rows: Sequence[int], vertices: Iterable[int] | int | None = None):
        out = tuple(int(r) for r in out_rows)
        universe = len(out)
        full = (1 << universe) - 1
        vmask = full if vertices is None else mask_of(vertices)
        if vmask & ~full:
            raise ParameterError("vertex set exceeds the universe")
        for u in range(universe):
            row = out[u]
            if not row:
                continue
            if not (vmask >> u) & 1:
                raise ParameterError(f"absent vertex {u} has out-arcs")
            if row & ~vmask:
                raise ParameterError(f"vertex {u} has arcs leaving the vertex set")
            if (row >> u) & 1:
                raise ParameterError(f"loop at vertex {u}")
        self._out = out
        self._vmask = vmask
        self._in = _transpose_rows(out, vmask)

    # -- basic accessors -------------------------------------------------
    @property
    def universe(self) -> int:
        return len(self._out)

    @property
    def vertex_mask(self) -> int:
        return self._vmask

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(bits(self._vmask))

    @property
    def n(self) -> int:
        return self._vmask.bit_count()

    @property
    def out_rows(self) -> tuple[int, ...]:
        return self._out

    @property
    def in_rows(self) -> tuple[int, ...]:
        return self._in

    def has_vertex(self, v: int) -> bool:
        return 0 <= v < len(self._out) and bool((self._vmask >> v) & 1)

    def has_arc(self, u: int, v: int) -> bool:
        return bool((self._out[u] >> v) & 1)

    def out_mask(self, u: int) -> int:
        return self._out[u]

    def in_mask(self, u: int) -> int:
        return self._in[u]

    def out_degree(self, u: int, within: int | None = None) -> int:
        row = self._out[u]
        return (row if within is None else row & within).bit_count()

    def in_degree(self, u: int, within: int | None = None) -> int:
        row = self._in[u]
        return (row if within is None else row & within).bit_count()

    def neighbors(self, u: int, sign: str, within: int | None = None) -> int:
        """Mask of ``N^sign(u)``, optionally intersected with ``within``."""
        row = self._out[u] if sign == "+" else self._in[u]
        return row if within is None else row & within

    def arc_count(self) -> int:
        return sum(r.bit_count() for r in self._out)

    def arcs(self) -> Iterator[tuple[int, int]]:
        for u in bits(self._vmask):
            for v in bits(self._out[u]):
                yield (u, v)

    def cross_arcs(self, a: int, b: int) -> int:
        """Number of arcs from the vertex set ``a`` to the vertex set ``b``."""
        total = 0
        for u in bits(a & self._vmask):
            total += (self._out[u] & b).bit_count()
        return total

    # -- derived views ---------------------------------------------------
    def _restricted_rows(self, mask: int) -> list[int]:
        return [(row & mask) if (mask >> u) & 1 else 0 for u, row in enumerate(self._out)]

    def induced(self, vertices: Iterable[int] | int):
        mask = mask_of(vertices)
        if mask & ~self._vmask:
            raise ParameterError("induced vertex set is not a subset of the vertex set")
        return type(self)(self._restricted_rows(mask), mask)

    def reverse(self):
        return type(self)(self._in, self._vmask)

    def matrix(self) -> np.ndarray:
        """Dense boolean adjacency matrix over the whole universe."""
        return rows_to_matrix(self._out, len(self._out))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Digraph)
            and self._vmask == other._vmask
            and self._out == other._out
        )

    def __hash__(self) -> int:
        return hash((self._vmask, self._out))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, universe={self.universe})"


class Tournament(Digraph):
    """A tournament: every pair of present vertices carries exactly one arc."""

    __slots__ = ()

    def __init__(self, out_rows: Sequence[int], vertices: Iterable[int] | int | None = None):
        super().__init__(out_rows, vertices)
        vmask = self._vmask
        for u in bits(vmask):
            o, i = self._out[u], self._in[u]
            if o & i or (o | i) != vmask ^ (1 << u):
                raise ParameterError(f"not a tournament at vertex {u}")

    # -- constructors ----------------------------------------------------
    @classmethod
    def from_matrix(cls, matrix) -> "Tournament":
        a = np.asarray(matrix, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError("adjacency matrix must be square")
        return cls(matrix_to_rows(a))

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "Tournament":
        n = len(rows)
        out = []
        for u, s in enumerate(rows):
            if len(s) != n or set(s) - {"0", "1"}:
                raise ParameterError(f"row {u} must have {n} characters over '0'/'1'")
            out.append(sum(1 << v for v, ch in enumerate(s) if ch == "1"))
        return cls(out)

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "Tournament":
        out = [0] * n
        for u, v in arcs:
            out[u] |= 1 << v
        return cls(out)

    @classmethod
    def from_predicate(cls, n: int, pred) -> "Tournament":
        """Tournament with ``u -> v`` iff ``pred(u, v)`` (must be antisymmetric)."""
        out = [0] * n
        for u in range(n):
            for v in range(n):
                if u != v and pred(u, v):
                    out[u] |= 1 << v
        return cls(out)

    @classmethod
    def transitive(cls, n: int) -> "Tournament":
        """The transitive tournament with ``i -> j`` iff ``i < j``."""
        full = (1 << n) - 1
        return cls([full & ~((1 << (u + 1)) - 1) for u in range(n)])

    @classmethod
    def circulant(cls, n: int, connection: Iterable[int]) -> "Tournament":
        """Tournament with ``i -> j`` iff ``(j - i) mod n`` lies in ``connection``."""
        conn = {c % n for c in connection}
        return cls.from_predicate(n, lambda u, v: (v - u) % n in conn)

    @classmethod
    def quadratic_residue(cls, n: int) -> "Tournament":
        """Paley tournament: ``i -> j`` iff ``j - i`` is a nonzero square mod ``n``.

        Only a tournament when ``n`` is a prime congruent to 3 modulo 4.
        """
        if n < 3 or n % 4 != 3 or any(n % p == 0 for p in range(2, int(n**0.5) + 1)):
            raise ParameterError("quadratic-residue tournaments need a prime n = 3 mod 4")
        return cls.circulant(n, {(x * x) % n for x in range(1, n)})

    def to_strings(self) -> list[str]:
        n = self.universe
        return ["".join("1" if (row >> v) & 1 else "0" for v in range(n)) for row in self._out]

    def is_transitive(self) -> bool:
        # a tournament is transitive iff its out-degrees are pairwise distinct
        degs = {self.out_degree(u) for u in self.vertices}
        return len(degs) == self.n


def _transpose_rows(out: Sequence[int], vmask: int) -> tuple[int, ...]:
    universe = len(out)
    if universe > 96:
        m = rows_to_matrix(out, universe)
        return tuple(matrix_to_rows(m.T))
    inn = [0] * universe
    for u, row in enumerate(out):
        bit = 1 << u
        while row:
            low = row & -row
            inn[low.bit_length() - 1] |= bit
            row ^= low
    return tuple(inn)


def rows_to_matrix(rows: Sequence[int], n: int) -> np.ndarray:
    """Unpack bitset rows into an ``n x n`` boolean matrix."""
    nbytes = (n + 7) // 8
    buf = b"".join(int(r).to_bytes(nbytes, "little") for r in rows)
    packed = np.frombuffer(buf, dtype=np.uint8).reshape(len(rows), nbytes)
    return np.unpackbits(packed, axis=1, count=n, bitorder="little").astype(bool)


def matrix_to_rows(matrix: np.ndarray) -> list[int]:
    """Pack the rows of a boolean matrix into bitset integers."""
    packed = np.packbits(np.asarray(matrix, dtype=bool), axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


# ---------------------------------------------------------------------------
# collections


class TournamentCollection:
    """Tournaments on a shared vertex set, indexed by color labels."""

    __slots__ = ("members", "colors", "_index", "__dict__")

    def __init__(self, members: Sequence[Tournament], colors: Sequence[int] | None = None):
        members = tuple(members)
        if not members:
            raise ParameterError("a collection needs at least one tournament")
        colors = tuple(range(len(members))) if colors is None else tuple(int(c) for c in colors)
        if len(colors) != len(members):
            raise ParameterError("one color label per member is required")
        if len(set(colors)) != len(colors):
            raise ParameterError("color labels must be distinct")
        first = members[0]
        for t in members:
            if not isinstance(t, Tournament):
                raise ParameterError("members must be tournaments")
            if t.universe != first.universe or t.vertex_mask != first.vertex_mask:
                raise ParameterError("all members must share the vertex set")
        self.members = members
        self.colors = colors
        self._index = {c: k for k, c in enumerate(colors)}

    @property
    def m(self) -> int:
        return len(self.members)

    @property
    def n(self) -> int:
        return self.members[0].n

    @property
    def universe(self) -> int:
        return self.members[0].universe

    @property
    def vertex_mask(self) -> int:
        return self.members[0].vertex_mask

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.members[0].vertices

    def has_color(self, c: int) -> bool:
        return c in self._index

    def index_of(self, c: int) -> int:
        return self._index[c]

    def member(self, c: int) -> Tournament:
        return self.members[self._index[c]]

    @cached_property
    def support(self) -> tuple[tuple[int, ...], ...]:
        """``support[u][v]`` is the mask of color *indices* whose member has ``u -> v``."""
        universe = self.universe
        table = [[0] * universe for _ in range(universe)]
        for k, t in enumerate(self.members):
            bit = 1 << k
            for u in bits(t.vertex_mask):
                row = table[u]
                for v in bits(t.out_mask(u)):
                    row[v] |= bit
        return tuple(tuple(r) for r in table)

    def induce(self, vertices=None, colors=None) -> "TournamentCollection":
        return induce(self, vertices, colors)

    def reverse(self) -> "TournamentCollection":
        return TournamentCollection([t.reverse() for t in self.members], self.colors)

    @classmethod
    def replicate(cls, t: Tournament, m: int) -> "TournamentCollection":
        return cls([t] * m)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TournamentCollection)
            and self.colors == other.colors
            and self.members == other.members
        )

    def __hash__(self) -> int:
        return hash((self.colors, self.members))

    def __repr__(self) -> str:
        return f"TournamentCollection(n={self.n}, m={self.m})"


def induce(coll: TournamentCollection, vertices=None, colors=None) -> TournamentCollection:
    """Restrict ``coll`` to a vertex subset and a color subset, keeping labels.

    ``None`` selects everything.  Empty subsets are rejected.
    """
    vmask = coll.vertex_mask if vertices is None else mask_of(vertices)
    if vmask == 0:
        raise ParameterError("vertex subset must be nonempty")
    if vmask & ~coll.vertex_mask:
        raise ParameterError("vertex subset contains unknown vertices")
    cols = coll.colors if colors is None else tuple(sorted(set(colors)))
    if not cols:
        raise ParameterError("color subset must be nonempty")
    for c in cols:
        if not coll.has_color(c):
            raise ParameterError(f"unknown color {c}")
    members = [coll.member(c).induced(vmask) for c in cols]
    return TournamentCollection(members, cols)


def majority_digraph(coll: TournamentCollection, gamma) -> Digraph:
    """Arcs present in at least a ``gamma`` fraction of the members.

    The comparison ``count >= gamma * m`` is carried out over the integers.
    """
    g = as_fraction(gamma)
    if not (0 < g <= 1):
        raise ParameterError("gamma must lie in (0, 1]")
    num, den, m = g.numerator, g.denominator, coll.m
    sup = coll.support
    rows = [0] * coll.universe
    for u in bits(coll.vertex_mask):
        row = 0
        for v in bits(coll.vertex_mask):
            if u != v and sup[u][v].bit_count() * den >= num * m:
                row |= 1 << v
        rows[u] = row
    return Digraph(rows, coll.vertex_mask)


# ---------------------------------------------------------------------------
# patterns and embeddings

_SIGN_ALIASES = {"+": "+", "-": "-", "−": "-"}


@dataclass(frozen=True)
class OrientationPattern:
    """Orientations of the arcs of an oriented path (or cycle).

    ``signs[i]`` is ``"+"`` when arc ``i`` points from the ``i``-th vertex to
    the next one and ``"-"`` otherwise.  For a cycle the last arc joins the
    last vertex back to the first.
    """

    signs: str
    cyclic: bool = False

    def __post_init__(self):
        if set(self.signs) - {"+", "-"}:
            raise ParameterError(f"bad pattern characters in {self.signs!r}")
        if self.cyclic and len(self.signs) < 3:
            raise ParameterError("cyclic patterns need at least three arcs")

    @classmethod
    def parse(cls, text: str) -> "OrientationPattern":
        text = text.strip()
        cyclic = text.endswith("@")
        if cyclic:
            text = text[:-1]
        try:
            signs = "".join(_SIGN_ALIASES[ch] for ch in text)
        except KeyError as exc:
            raise ParameterError(f"bad pattern character {exc.args[0]!r}") from None
        return cls(signs, cyclic)

    @classmethod
    def directed(cls, length: int, cyclic: bool = False) -> "OrientationPattern":
        return cls("+" * length, cyclic)

    @property
    def length(self) -> int:
        return len(self.signs)

    def __len__(self) -> int:
        return len(self.signs)

    def __str__(self) -> str:
        return self.signs + ("@" if self.cyclic else "")

    @property
    def vertex_count(self) -> int:
        return len(self.signs) if self.cyclic else len(self.signs) + 1

    def is_directed(self) -> bool:
        return len(set(self.signs)) <= 1

    def flip(self) -> "OrientationPattern":
        """Negate every orientation (the pattern seen in the reversed tournament)."""
        return OrientationPattern(self.signs.translate(_FLIP), self.cyclic)

    def rev(self) -> "OrientationPattern":
        """The same oriented path traversed from its last vertex to its first."""
        return OrientationPattern(self.signs[::-1].translate(_FLIP), self.cyclic)

    def sub(self, start: int, stop: int) -> "OrientationPattern":
        return OrientationPattern(self.signs[start:stop])


_FLIP = str.maketrans("+-", "-+")


def negate(sign: str) -> str:
    return "-" if sign == "+" else "+"


@dataclass(frozen=True)
class RainbowEmbedding:
    """A vertex sequence with one color per arc realizing ``pattern``."""

    vertices: tuple[int, ...]
    colors: tuple[int, ...]
    pattern: OrientationPattern

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))

    def reversed(self) -> "RainbowEmbedding":
        """The embedding of ``rev(pattern)`` obtained by walking backwards."""
        if self.pattern.cyclic:
            k = len(self.vertices)
            verts = tuple(self.vertices[(-i) % k] for i in range(k))
            cols = tuple(self.colors[(-i - 1) % k] for i in range(k))
        else:
            verts = self.vertices[::-1]
            cols = self.colors[::-1]
        return RainbowEmbedding(verts, cols, self.pattern.rev())

    def to_dict(self) -> dict:
        return {
            "pattern": str(self.pattern),
            "vertices": list(self.vertices),
            "colors": list(self.colors),
        }


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class Violation:
    reason: str
    index: int | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"reason": self.reason, "index": self.index, "detail": self.detail}


@dataclass
class Report:
    """Outcome of a validator: ``ok`` iff no violation was recorded."""

    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    @property
    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def add(self, reason: str, index: int | None = None, detail: str = "") -> None:
        self.violations.append(Violation(reason, index, detail))

    def reasons(self) -> list[str]:
        return [v.reason for v in self.violations]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


def validate_embedding(coll: TournamentCollection, pattern: OrientationPattern,
                       emb: RainbowEmbedding) -> Report:
    """Check that ``emb`` is a rainbow copy of ``pattern`` in ``coll``."""
    rep = Report()
    if emb.pattern != pattern:
        rep.add("pattern-mismatch", None, f"{emb.pattern} != {pattern}")
    ell = pattern.length
    verts, cols = emb.vertices, emb.colors
    if len(verts) != pattern.vertex_count or len(cols) != ell:
        rep.add("length-mismatch", None,
                f"{len(verts)} vertices / {len(cols)} colors for pattern {pattern}")
        return rep
    seen: set[int] = set()
    for i, v in enumerate(verts):
        if not coll.members[0].has_vertex(v):
            rep.add("unknown-vertex", i, f"vertex {v}")
        if v in seen:
            rep.add("repeat-vertex", i, f"vertex {v}")
        seen.add(v)
    seen_c: set[int] = set()
    for i, c in enumerate(cols):
        if c in seen_c:
            rep.add("repeat-color", i, f"color {c}")
        seen_c.add(c)
    k = len(verts)
    for i in range(ell):
        a, b = verts[i], verts[(i + 1) % k]
        c = cols[i]
        if not coll.has_color(c):
            rep.add("arc-absent-in-color", i, f"unknown color {c}")
            continue
        t = coll.member(c)
        if not (t.has_vertex(a) and t.has_vertex(b)) or a == b:
            rep.add("arc-absent-in-color", i, f"pair ({a},{b}) not in color {c}")
            continue
        ok = t.has_arc(a, b) if pattern.signs[i] == "+" else t.has_arc(b, a)
        if not ok:
            rep.add("wrong-orientation", i,
                    f"arc ({a},{b}) needs '{pattern.signs[i]}' in color {c}")
    return rep


def validate_directed_path(t: Digraph, path: Sequence[int], vertices: int | None = None,
                           start: int | None = None, end: int | None = None) -> Report:
    """Check that ``path`` is a directed path of ``t``.

    Optional constraints: the vertex set must equal ``vertices`` (a mask) and
    the path must start at ``start`` / end at ``end``.
    """
    rep = Report()
    seen = 0
    for i, v in enumerate(path):
        if not t.has_vertex(v):
            rep.add("unknown-vertex", i, f"vertex {v}")
            return rep
        if (seen >> v) & 1:
            rep.add("repeat-vertex", i, f"vertex {v}")
        seen |= 1 << v
    for i in range(len(path) - 1):
        if not t.has_arc(path[i], path[i + 1]):
            rep.add("wrong-orientation", i, f"missing arc {path[i]}->{path[i + 1]}")
    if vertices is not None and seen != vertices:
        rep.add("vertex-set", None, "path does not cover exactly the required vertices")
    if start is not None and (not path or path[0] != start):
        rep.add("endpoint", 0, f"path must start at {start}")
    if end is not None and (not path or path[-1] != end):
        rep.add("endpoint", len(path) - 1 if path else None, f"path must end at {end}")
    return rep
