"""Pattern algebra: blocks, shift, oscillation and DO-decompositions.

A DO-decomposition of a path pattern ``P`` is a split
``P = D_1 O_1 D_2 O_2 ... D_k O_k`` into directed pieces ``D_i`` and
oscillating pieces ``O_i`` satisfying

* E1: every piece is nonempty except possibly ``D_1`` and ``O_k``;
* E2: each ``D_i`` is directed; a nonempty ``O_i`` is oscillating, not
  directed, and has at least two arcs;
* E3: ``O_i`` and ``rev(O_i)`` are good oscillating for ``i < k``, and for
  ``i = k`` too when the last two arcs of ``P`` differ;
* E4: for pieces number ``2 .. 2k-2`` (1-based, in the order above) the last
  arc of a piece and the first arc of the next have the same orientation.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import soundness
from .core import OrientationPattern, ParameterError, Report, negate


def blocks(pattern: OrientationPattern) -> list[tuple[str, int]]:
    """Maximal runs of equal orientation as ``(sign, length)`` pairs."""
    out: list[tuple[str, int]] = []
    for s in pattern.signs:
        if out and out[-1][0] == s:
            out[-1] = (s, out[-1][1] + 1)
        else:
            out.append((s, 1))
    return out


def shift(pattern: OrientationPattern) -> OrientationPattern:
    """Move the last arc, reversed, to the front: ``(-s_l, s_1, ..., s_{l-1})``."""
    if pattern.cyclic or pattern.length == 0:
        raise ParameterError("shift needs a nonempty path pattern")
    s = pattern.signs
    return OrientationPattern(negate(s[-1]) + s[:-1])


def rev(pattern: OrientationPattern) -> OrientationPattern:
    return pattern.rev()


class Oscillation(str, Enum):
    NOT = "not-oscillating"
    OSCILLATING = "oscillating"
    GOOD = "good-oscillating"


def classify_oscillating(pattern: OrientationPattern) -> Oscillation:
    """Oscillating iff all blocks have length at most two; good iff also the
    pattern has two or more arcs and its last two arcs differ."""
    if any(length > 2 for _, length in blocks(pattern)):
        return Oscillation.NOT
    s = pattern.signs
    if len(s) >= 2 and s[-1] != s[-2]:
        return Oscillation.GOOD
    return Oscillation.OSCILLATING


def is_oscillating(pattern: OrientationPattern) -> bool:
    return classify_oscillating(pattern) != Oscillation.NOT


def is_good_oscillating(pattern: OrientationPattern) -> bool:
    return classify_oscillating(pattern) == Oscillation.GOOD


@dataclass(frozen=True)
class DODecomposition:
    """Index ranges ``[start, stop)`` of ``D_1, O_1, ..., D_k, O_k``."""

    pattern: OrientationPattern
    ranges: tuple[tuple[int, int], ...]

    @property
    def k(self) -> int:
        return len(self.ranges) // 2

    def piece(self, index: int) -> OrientationPattern:
        a, b = self.ranges[index]
        return self.pattern.sub(a, b)

    @property
    def directed(self) -> list[OrientationPattern]:
        return [self.piece(i) for i in range(0, len(self.ranges), 2)]

    @property
    def oscillating(self) -> list[OrientationPattern]:
        return [self.piece(i) for i in range(1, len(self.ranges), 2)]

    def to_dict(self) -> dict:
        return {
            "pattern": str(self.pattern),
            "k": self.k,
            "pieces": [{"kind": "directed" if i % 2 == 0 else "oscillating",
                        "range": list(r), "signs": self.piece(i).signs}
                       for i, r in enumerate(self.ranges)],
        }


def do_decompose(pattern: OrientationPattern) -> DODecomposition:
    """Canonical DO-decomposition following the constructive argument.

    Long blocks (three or more arcs) give the directed pieces after their two
    boundary arcs are handed to the neighbouring oscillating pieces; at the
    very start and end of the pattern there is no neighbour, so the boundary
    arc stays in the directed piece.  The oscillating pieces are the gaps.
    When the pattern does not open with a long block, ``D_1`` is its first
    arc if the first two arcs agree and empty otherwise.
    """
    if pattern.cyclic:
        raise ParameterError("DO-decompositions are defined for paths")
    s = pattern.signs
    ell = len(s)
    if ell <= 2:
        if len(set(s)) <= 1:
            ranges = ((0, ell), (ell, ell))
        else:
            ranges = ((0, 0), (0, ell))
        dec = DODecomposition(pattern, ranges)
        soundness.gate("do_decompose", validate_do(pattern, dec))
        return dec
    long_blocks = []
    pos = 0
    for sign, length in blocks(pattern):
        if length >= 3:
            long_blocks.append((pos, pos + length))
        pos += length
    directed: list[tuple[int, int]] = []
    if not long_blocks or long_blocks[0][0] > 0:
        directed.append((0, 1) if s[0] == s[1] else (0, 0))
    for a, b in long_blocks:
        start = a if a == 0 else a + 1
        stop = b if b == ell else b - 1
        directed.append((start, stop))
    ranges: list[tuple[int, int]] = []
    for i, (a, b) in enumerate(directed):
        ranges.append((a, b))
        nxt = directed[i + 1][0] if i + 1 < len(directed) else ell
        ranges.append((b, nxt))
    dec = DODecomposition(pattern, tuple(ranges))
    soundness.gate("do_decompose", validate_do(pattern, dec))
    return dec


def validate_do(pattern: OrientationPattern, dec: DODecomposition) -> Report:
    """Check reconstruction and E1-E4; violations are named by clause."""
    rep = Report()
    ranges = dec.ranges
    ell = pattern.length
    if dec.pattern != pattern:
        rep.add("reconstruction", None, "decomposition belongs to another pattern")
        return rep
    if not ranges or len(ranges) % 2:
        rep.add("reconstruction", None, "need an even, nonzero number of pieces")
        return rep
    cursor = 0
    for i, (a, b) in enumerate(ranges):
        if a != cursor or b < a:
            rep.add("reconstruction", i + 1, f"piece {i + 1} starts at {a}, expected {cursor}")
            return rep
        cursor = b
    if cursor != ell:
        rep.add("reconstruction", None, f"pieces cover {cursor} of {ell} arcs")
        return rep
    k = len(ranges) // 2
    pieces = [dec.piece(i) for i in range(len(ranges))]
    last = len(pieces) - 1
    for i, pc in enumerate(pieces):
        if pc.length == 0 and i not in (0, last):
            rep.add("E1", i + 1, f"piece {i + 1} is empty")
    for i, pc in enumerate(pieces):
        if i % 2 == 0:
            if not pc.is_directed():
                rep.add("E2", i + 1, f"directed piece {pc.signs} is not directed")
        elif pc.length:
            if not is_oscillating(pc) or pc.is_directed() or pc.length < 2:
                rep.add("E2", i + 1, f"oscillating piece {pc.signs} is not a non-directed "
                                     "oscillating path with two or more arcs")
    s = pattern.signs
    last_two_differ = ell >= 2 and s[-1] != s[-2]
    for j in range(k):
        pc = pieces[2 * j + 1]
        if j < k - 1 or last_two_differ:
            if not (is_good_oscillating(pc) and is_good_oscillating(pc.rev())):
                rep.add("E3", 2 * j + 2, f"oscillating piece {pc.signs!r} or its reverse is not good")
    for i in range(1, 2 * k - 2):  # 0-based piece i and i+1, i.e. pieces 2..2k-2 (1-based)
        left, right = pieces[i], pieces[i + 1]
        if left.length and right.length and left.signs[-1] != right.signs[0]:
            rep.add("E4", i + 1, f"pieces {i + 1} and {i + 2} meet with different orientations")
    return rep
