"""Exact search for transversal paths and cycles, an independent oracle,
orientation sweeps and the vertex-absorption rewiring.

The search extends a vertex sequence depth first.  Every placed arc must be
matched to a distinct color whose tournament contains it with the required
orientation; the matching is kept maximum incrementally (one augmenting path
per new arc), so a failed augmentation is a Hall violation and the branch is
cut.  Backtracking only unmatches the last arc: earlier arcs stay matched
because augmenting paths never unmatch an arc.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import soundness
from .core import (
    OrientationPattern,
    ParameterError,
    RainbowEmbedding,
    SizeError,
    Tournament,
    TournamentCollection,
    as_fraction,
    bits,
    mask_of,
    validate_directed_path,
    validate_embedding,
)
from .hpartition import HPartition, validate_h_partition
from .order import median_order, skip_vertex_path

ORACLE_CAP = 8


class InfeasibleParameters(ParameterError):
    """The query cannot have a transversal (too few colors or vertices)."""


@dataclass(frozen=True)
class SearchOptions:
    vertex_cap: int = 12
    time_budget: float | None = None
    pruning: str = "hall-matching"
    anchor: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.vertex_cap < 2:
            raise ParameterError("vertex_cap must be at least 2")
        if self.pruning not in ("none", "hall-matching"):
            raise ParameterError(f"unknown pruning mode {self.pruning!r}")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ParameterError("time_budget must be positive")
        if self.workers < 1:
            raise ParameterError("workers must be positive")


DEFAULT_OPTIONS = SearchOptions()


@dataclass(frozen=True)
class SearchResult:
    status: str  # "found", "none" or "timeout"
    embedding: RainbowEmbedding | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "embedding": self.embedding.to_dict() if self.embedding else None,
            "nodes": self.nodes,
        }


# ---------------------------------------------------------------------------
# search core


class _Timeout(Exception):
    pass


class _Search:
    """One branch of the search: fixed first vertex and fixed pattern alignment."""

    def __init__(self, sup, signs: str, cyclic: bool, pool: int, hall: bool, deadline: float | None):
        self.sup = sup
        self.signs = signs
        self.cyclic = cyclic
        self.k = len(signs) if cyclic else len(signs) + 1
        self.pool = pool
        self.hall = hall
        self.deadline = deadline
        self.nodes = 0
        self.seq: list[int] = []
        self.allowed: list[int] = [0] * len(signs)
        self.arc_color: list[int] = [-1] * len(signs)
        self.owner: dict[int, int] = {}

    def _allowed(self, i: int, a: int, b: int) -> int:
        return self.sup[a][b] if self.signs[i] == "+" else self.sup[b][a]

    def _augment(self, arc: int, seen: list[int]) -> bool:
        free = self.allowed[arc] & ~seen[0]
        while free:
            low = free & -free
            free ^= low
            seen[0] |= low
            c = low.bit_length() - 1
            other = self.owner.get(c)
            if other is None or self._augment(other, seen):
                self.owner[c] = arc
                self.arc_color[arc] = c
                return True
        return False

    def _add_arc(self, arc: int, mask: int) -> bool:
        self.allowed[arc] = mask
        if not self.hall:
            return True
        if mask == 0:
            return False
        return self._augment(arc, [0])

    def _drop_arc(self, arc: int) -> None:
        if self.hall:
            c = self.arc_color[arc]
            del self.owner[c]
            self.arc_color[arc] = -1

    def _leaf_match(self) -> bool:
        self.owner = {}
        self.arc_color = [-1] * len(self.signs)
        return all(self._augment(i, [0]) for i in range(len(self.signs)))

    def run(self, first: int) -> list[int] | None:
        self.seq = [first]
        self.nodes += 1
        if self._extend(1 << first):
            return self.seq
        return None

    def _extend(self, used: int) -> bool:
        depth = len(self.seq)
        if depth == self.k:
            return self.hall or self._leaf_match()
        last = self.seq[-1]
        arc = depth - 1
        closing = self.cyclic and depth == self.k - 1
        cand = self.pool & ~used
        while cand:
            low = cand & -cand
            cand ^= low
            v = low.bit_length() - 1
            self.nodes += 1
            if self.deadline is not None and not self.nodes & 255 and time.monotonic() > self.deadline:
                raise _Timeout
            if not self._add_arc(arc, self._allowed(arc, last, v)):
                continue
            if closing:
                back = len(self.signs) - 1
                if not self._add_arc(back, self._allowed(back, v, self.seq[0])):
                    self._drop_arc(arc)
                    continue
            self.seq.append(v)
            if self._extend(used | low):
                return True
            self.seq.pop()
            if closing:
                self._drop_arc(len(self.signs) - 1)
            self._drop_arc(arc)
        return False


def _branch(task) -> tuple[str, list[int] | None, list[int] | None, int]:
    sup, signs, cyclic, first, pool, hall, deadline = task
    s = _Search(sup, signs, cyclic, pool, hall, deadline)
    try:
        seq = s.run(first)
    except _Timeout:
        return "timeout", None, None, s.nodes
    if seq is None:
        return "none", None, None, s.nodes
    return "found", list(seq), list(s.arc_color), s.nodes


def _check_query(coll: TournamentCollection, pattern: OrientationPattern, opts: SearchOptions) -> None:
    ell = pattern.length
    if ell > coll.m:
        raise InfeasibleParameters(f"pattern length {ell} exceeds the {coll.m} available colors")
    if pattern.vertex_count > coll.n:
        raise InfeasibleParameters(f"pattern needs {pattern.vertex_count} vertices, only {coll.n} exist")
    if coll.n > opts.vertex_cap and opts.time_budget is None:
        raise SizeError(f"n={coll.n} exceeds vertex_cap={opts.vertex_cap}; set a time budget to search anyway")


def _run(coll: TournamentCollection, tasks: list[tuple], opts: SearchOptions):
    """Run branch tasks in order; the lowest-index non-"none" branch decides."""
    sup = coll.support
    deadline = None if opts.time_budget is None else time.monotonic() + opts.time_budget
    full = [(sup, signs, cyc, first, pool, opts.pruning == "hall-matching", deadline)
            for signs, cyc, first, pool in (t[:4] for t in tasks)]
    if opts.workers > 1 and len(full) > 1:
        with ProcessPoolExecutor(max_workers=opts.workers) as ex:
            outs = list(ex.map(_branch, full))
    else:
        outs = []
        for task in full:
            out = _branch(task)
            outs.append(out)
            if out[0] != "none":
                break
    nodes = 0
    for idx, (status, seq, arc_color, n_nodes) in enumerate(outs):
        nodes += n_nodes
        if status != "none":
            return status, idx, seq, arc_color, nodes
    return "none", None, None, None, nodes


def find_transversal_path(coll: TournamentCollection, pattern: OrientationPattern,
                          opts: SearchOptions = DEFAULT_OPTIONS) -> SearchResult:
    """Rainbow copy of the path ``pattern`` (any length up to ``n - 1``)."""
    if pattern.cyclic:
        raise ParameterError("use find_transversal_cycle for cyclic patterns")
    _check_query(coll, pattern, opts)
    vm = coll.vertex_mask
    if opts.anchor is not None:
        if not (vm >> opts.anchor) & 1:
            raise ParameterError(f"anchor {opts.anchor} is not a vertex")
        firsts = [opts.anchor]
    else:
        firsts = list(bits(vm))
    if pattern.length == 0:
        emb = RainbowEmbedding((firsts[0],), (), pattern)
        soundness.gate("find_transversal_path", validate_embedding(coll, pattern, emb))
        return SearchResult("found", emb, 1)
    tasks = [(pattern.signs, False, f, vm) for f in firsts]
    status, _, seq, arc_color, nodes = _run(coll, tasks, opts)
    if status != "found":
        return SearchResult(status, None, nodes)
    emb = RainbowEmbedding(tuple(seq), tuple(coll.colors[c] for c in arc_color), pattern)
    soundness.gate("find_transversal_path", validate_embedding(coll, pattern, emb))
    return SearchResult("found", emb, nodes)


def find_transversal_cycle(coll: TournamentCollection, pattern: OrientationPattern,
                           opts: SearchOptions = DEFAULT_OPTIONS) -> SearchResult:
    """Rainbow copy of the cycle ``pattern``.

    For a Hamilton cycle the first vertex is fixed to the anchor (default: the
    lowest vertex) and every rotation of the pattern is tried.  For shorter
    cycles the first vertex is the cycle's lowest vertex, tried in turn.
    """
    if not pattern.cyclic:
        raise ParameterError("use find_transversal_path for path patterns")
    _check_query(coll, pattern, opts)
    ell = pattern.length
    vm = coll.vertex_mask
    s = pattern.signs
    rotations = [s[r:] + s[:r] for r in range(ell)]
    tasks = []
    if ell == coll.n:
        anchor = opts.anchor if opts.anchor is not None else min(bits(vm))
        if not (vm >> anchor) & 1:
            raise ParameterError(f"anchor {anchor} is not a vertex")
        for r, rot in enumerate(rotations):
            tasks.append((rot, True, anchor, vm, r))
    else:
        if opts.anchor is not None:
            raise ParameterError("an anchor is only meaningful for Hamilton cycles")
        for first in bits(vm):
            above = vm & ~((2 << first) - 1)
            for r, rot in enumerate(rotations):
                tasks.append((rot, True, first, above | (1 << first), r))
    status, idx, seq, arc_color, nodes = _run(coll, tasks, opts)
    if status != "found":
        return SearchResult(status, None, nodes)
    r = tasks[idx][4]
    verts = [0] * ell
    cols = [0] * ell
    for i in range(ell):
        verts[(i + r) % ell] = seq[i]
        cols[(i + r) % ell] = coll.colors[arc_color[i]]
    emb = RainbowEmbedding(tuple(verts), tuple(cols), pattern)
    soundness.gate("find_transversal_cycle", validate_embedding(coll, pattern, emb))
    return SearchResult("found", emb, nodes)


def find_transversal(coll: TournamentCollection, pattern: OrientationPattern,
                     opts: SearchOptions = DEFAULT_OPTIONS) -> SearchResult:
    if pattern.cyclic:
        return find_transversal_cycle(coll, pattern, opts)
    return find_transversal_path(coll, pattern, opts)


# ---------------------------------------------------------------------------
# independent oracle


class Oracle:
    """Exhaustive decision over every vertex arrangement of one collection.

    All arrangements are tabulated once with numpy; for each arc position the
    color masks for both orientations are stored.  A pattern is colorable on an
    arrangement iff its arc-to-color bipartite graph has a matching saturating
    the arcs, which is tested through Hall's condition over all arc subsets.
    """

    def __init__(self, coll: TournamentCollection, kind: str, length: int | None = None):
        if kind not in ("path", "cycle"):
            raise ParameterError(f"unknown kind {kind!r}")
        if coll.n > ORACLE_CAP:
            raise SizeError(f"oracle handles n <= {ORACLE_CAP}")
        if coll.m > 64:
            raise SizeError("oracle handles at most 64 colors")
        self.coll = coll
        self.kind = kind
        n = coll.n
        ell = length if length is not None else (n if kind == "cycle" else n - 1)
        self.ell = ell
        k = ell if kind == "cycle" else ell + 1
        if ell < (3 if kind == "cycle" else 0) or k > n:
            raise InfeasibleParameters("pattern does not fit the vertex set")
        self.labels = np.array(coll.vertices)
        self.arr = np.array(list(itertools.permutations(range(n), k)), dtype=np.int64).reshape(-1, k)
        adj = np.stack([np.array(t.induced(t.vertex_mask).matrix()[np.ix_(coll.vertices, coll.vertices)],
                                 dtype=np.uint64) for t in coll.members])
        weights = (np.uint64(1) << np.arange(coll.m, dtype=np.uint64))
        packed = np.tensordot(weights, adj, axes=(0, 0)).astype(np.uint64)  # packed[a, b] = colors with a->b
        self.fwd = []
        self.bwd = []
        for i in range(ell):
            a = self.arr[:, i]
            b = self.arr[:, (i + 1) % k]
            self.fwd.append(packed[a, b])
            self.bwd.append(packed[b, a])

    def feasible(self, pattern: OrientationPattern) -> np.ndarray:
        masks = [self.fwd[i] if s == "+" else self.bwd[i] for i, s in enumerate(pattern.signs)]
        ell = len(masks)
        ok = np.ones(self.arr.shape[0], dtype=bool)
        unions = [np.zeros(self.arr.shape[0], dtype=np.uint64)]
        for S in range(1, 1 << ell):
            low = (S & -S).bit_length() - 1
            u = unions[S & (S - 1)] | masks[low]
            unions.append(u)
            ok &= np.bitwise_count(u) >= S.bit_count()
        return ok

    def decide(self, pattern: OrientationPattern) -> SearchResult:
        if pattern.cyclic != (self.kind == "cycle") or pattern.length != self.ell:
            raise ParameterError("pattern does not match this oracle")
        if self.ell > self.coll.m:
            raise InfeasibleParameters("more arcs than colors")
        if self.ell == 0:
            emb = RainbowEmbedding((int(self.labels[0]),), (), pattern)
            return SearchResult("found", emb, 1)
        ok = self.feasible(pattern)
        hits = np.flatnonzero(ok)
        if hits.size == 0:
            return SearchResult("none", None, int(ok.size))
        idx = int(hits[0])
        row = self.arr[idx]
        masks = [int((self.fwd[i] if s == "+" else self.bwd[i])[idx]) for i, s in enumerate(pattern.signs)]
        colors = _assign_by_permutation(masks, self.coll.m)
        verts = tuple(int(self.labels[v]) for v in row)
        emb = RainbowEmbedding(verts, tuple(self.coll.colors[c] for c in colors), pattern)
        soundness.gate("brute_force_oracle", validate_embedding(self.coll, pattern, emb))
        return SearchResult("found", emb, idx + 1)


def _assign_by_permutation(masks: Sequence[int], m: int) -> tuple[int, ...]:
    """First injective color choice (lexicographic) compatible with every mask."""
    for combo in itertools.permutations(range(m), len(masks)):
        if all((mk >> c) & 1 for mk, c in zip(masks, combo)):
            return combo
    raise AssertionError("Hall's condition held but no assignment exists")


def brute_force_oracle(coll: TournamentCollection, pattern: OrientationPattern,
                       kind: str | None = None) -> SearchResult:
    """Decide by enumerating every arrangement (``n <= 8``); see :class:`Oracle`."""
    kind = kind or ("cycle" if pattern.cyclic else "path")
    if (kind == "cycle") != pattern.cyclic:
        raise ParameterError("kind does not match the pattern")
    if pattern.length > coll.m:
        raise InfeasibleParameters("more arcs than colors")
    return Oracle(coll, kind, pattern.length).decide(pattern)


# ---------------------------------------------------------------------------
# sweeps


def all_patterns(length: int, cyclic: bool = False) -> list[OrientationPattern]:
    """Every orientation of the given length, in lexicographic order of signs."""
    return [OrientationPattern("".join(p), cyclic) for p in itertools.product("+-", repeat=length)]


@dataclass
class SweepResult:
    kind: str
    verdicts: dict[str, SearchResult] = field(default_factory=dict)

    @property
    def summary(self) -> dict[str, int]:
        out = {"total": len(self.verdicts), "found": 0, "none": 0, "timeout": 0}
        for res in self.verdicts.values():
            out[res.status] += 1
        return out

    def exceptions(self) -> list[str]:
        return [p for p, r in self.verdicts.items() if r.status == "none"]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "summary": self.summary,
                "verdicts": {p: r.to_dict() for p, r in self.verdicts.items()}}


def sweep_orientations(coll: TournamentCollection, kind: str = "path", dedupe: str | None = "reversal",
                       opts: SearchOptions = DEFAULT_OPTIONS, length: int | None = None) -> SweepResult:
    """Verdict for every orientation of the Hamilton path or cycle.

    With ``dedupe="reversal"`` a pattern whose reverse was already decided
    reuses that verdict, with the embedding walked backwards.
    """
    if kind not in ("path", "cycle"):
        raise ParameterError(f"unknown kind {kind!r}")
    if dedupe not in (None, "none", "reversal"):
        raise ParameterError(f"unknown dedupe mode {dedupe!r}")
    cyclic = kind == "cycle"
    ell = length if length is not None else (coll.n if cyclic else coll.n - 1)
    out = SweepResult(kind)
    for p in all_patterns(ell, cyclic):
        key = str(p)
        twin = str(p.rev())
        if dedupe == "reversal" and twin in out.verdicts:
            prev = out.verdicts[twin]
            emb = prev.embedding.reversed() if prev.embedding else None
            if emb is not None:
                soundness.gate("sweep_orientations", validate_embedding(coll, p, emb))
            out.verdicts[key] = SearchResult(prev.status, emb, 0)
            continue
        out.verdicts[key] = find_transversal(coll, p, opts)
    return out


# ---------------------------------------------------------------------------
# vertex absorption


@dataclass(frozen=True)
class AbsorbConfig:
    """``margin``: fraction cut from each end of a block when forming the middle
    part (default ``gamma/100``); ``spacing``: minimum index gap along the
    subpaths used for the third class; ``exact_cap``: largest block ordered by
    the exact median-order search (larger blocks use local search)."""

    margin: Fraction | None = None
    spacing: int = 5
    exact_cap: int = 12


ABSORB = AbsorbConfig()


@dataclass(frozen=True)
class AbsorbResult:
    path: tuple[int, ...]
    classes: tuple[tuple[int, str, int], ...]  # (u, class, iota)
    ok: bool = field(default=True, init=False)

    def to_dict(self) -> dict:
        return {"path": list(self.path),
                "classes": [{"u": u, "class": c, "iota": i} for u, c, i in self.classes]}


@dataclass(frozen=True)
class AbsorbFailure:
    step: str
    reason: str
    ok: bool = field(default=False, init=False)

    def to_dict(self) -> dict:
        return {"failure": self.step, "reason": self.reason}


def _near(positions: Iterable[int], radius: int) -> set[int]:
    out: set[int] = set()
    for p in positions:
        out.update(range(p - radius, p + radius + 1))
    return out


def base_path(t: Tournament, partition: HPartition, w0: int, wr: int, exact_cap: int = 12):
    """``w0 P_1 w_1 ... P_r wr`` through median orders of the blocks.

    Returns the path as a list with a dummy entry at index 0 (so positions are
    1-based) and a map position -> (block index, local index, block size).
    """
    blocks = [tuple(b) for b in partition.blocks]
    seps = tuple(partition.separators)
    P: list = [None, w0]
    where: dict[int, tuple[int, int, int]] = {}
    for i, blk in enumerate(blocks):
        order = median_order(t.induced(mask_of(blk)), exact_cap).order
        for k, v in enumerate(order):
            P.append(v)
            where[len(P) - 1] = (i, k + 1, len(order))
        if i < len(blocks) - 1:
            P.append(seps[i])
    P.append(wr)
    return P, where


def h_absorb_vertices(t: Tournament, U, partition: HPartition, w0: int, wr: int,
                      witnesses: Mapping[int, tuple[Iterable[int], Iterable[int]]] | None = None,
                      config: AbsorbConfig = ABSORB):
    """Directed Hamilton path of ``W + U`` from ``w0`` to ``wr`` in ``t``.

    ``W`` is the vertex set of ``partition`` plus ``w0`` and ``wr``.  The base
    path runs through the median orders of the blocks.  Each ``u`` is then
    inserted into an arc of the path (first class), spliced in behind a vertex
    moved along a far arc (second class), or attached at the end of a spaced
    subpath that crosses the middle of its block (third class).  Moved vertices
    leave a gap that is closed inside a five-vertex window.  Returns
    :class:`AbsorbResult` or :class:`AbsorbFailure`.
    """
    umask = mask_of(U)
    blocks = [tuple(b) for b in partition.blocks]
    seps = tuple(partition.separators)
    inner = 0
    for b in blocks:
        inner |= mask_of(b)
    inner |= mask_of(seps)
    wmask = inner | (1 << w0) | (1 << wr)
    if w0 == wr or (inner >> w0) & 1 or (inner >> wr) & 1:
        raise ParameterError("w0 and wr must be distinct and outside the partition")
    if umask & wmask:
        raise ParameterError("U must be disjoint from W")
    if (umask | wmask) & ~t.vertex_mask:
        raise ParameterError("vertices outside the host tournament")
    if config.spacing < 4:
        raise ParameterError("spacing must be at least 4 so that repair windows stay disjoint")
    rep = validate_h_partition(t.induced(inner), partition, robust=True)
    if not rep.ok:
        raise ParameterError(f"partition is not a robust H-partition: {rep.first.reason} {rep.first.detail}")
    if any(not t.has_arc(w0, v) for v in blocks[0]) or any(not t.has_arc(v, wr) for v in blocks[-1]):
        raise ParameterError("need w0 => W_1 and W_r => wr")
    for u in bits(umask):
        if witnesses is not None and u in witnesses:
            ins, outs = (mask_of(x) for x in witnesses[u])
        else:
            ins, outs = t.in_mask(u) & wmask, t.out_mask(u) & wmask
        if (ins & ~t.in_mask(u)) or (outs & ~t.out_mask(u)) or ((ins | outs) & ~wmask):
            raise ParameterError(f"witnesses of {u} are not neighbours in W")
        if not ins or not outs:
            raise ParameterError(f"{u} needs an in- and an out-neighbour in W")

    margin = as_fraction(config.margin) if config.margin is not None else as_fraction(partition.gamma) / 100
    P, where = base_path(t, partition, w0, wr, config.exact_cap)
    n = len(P) - 1

    def in_middle(p: int) -> bool:
        if p not in where:
            return False
        _, k, size = where[p]
        lo = max(3, -((-margin.numerator * size) // margin.denominator))
        hi = min(size - 3, math.floor((1 - margin) * size))
        return lo <= k <= hi

    # step 1: classification
    iota: dict[int, int] = {}
    cls: dict[int, str] = {}
    for u in bits(umask):
        out = t.out_mask(u)
        j1 = next((i for i in range(1, n) if not (out >> P[i]) & 1 and (out >> P[i + 1]) & 1), None)
        if j1 is not None:
            iota[u], cls[u] = j1, "U1"
            continue
        lead = 0
        while lead < n and (out >> P[lead + 1]) & 1:
            lead += 1
        iota[u] = lead
        cls[u] = "U3" if in_middle(lead) else "U2"
    classes = tuple((u, cls[u], iota[u]) for u in bits(umask))

    inserts: dict[int, tuple[int, ...]] = {}
    removed: list[int] = []

    # step 2-1: insert first-class vertices directly into arcs
    groups: dict[int, list[int]] = {}
    for u in bits(umask):
        if cls[u] == "U1":
            groups.setdefault(iota[u], []).append(u)
    J1 = sorted(groups)
    for j in J1:
        inserts[j] = median_order(t.induced(mask_of(groups[j])), config.exact_cap).order

    # step 2-2: second class via jumps v_j -> v_j' with j < iota < j'
    banned = _near(J1, 4)
    chosen: list[int] = []
    middle = [p for p in range(1, n + 1) if in_middle(p)]
    for u in bits(umask):
        if cls[u] != "U2":
            continue
        i0 = iota[u]
        pick = None
        for j in middle:
            if j >= i0:
                break
            if j in banned or any(abs(j - c) <= 4 for c in chosen):
                continue
            for jp in middle:
                if jp <= i0 or jp in banned or abs(jp - j) <= 4 or any(abs(jp - c) <= 4 for c in chosen):
                    continue
                if t.has_arc(P[j], P[jp]):
                    pick = (j, jp)
                    break
            if pick:
                break
        if pick is None:
            return AbsorbFailure("absorb-U2", f"no separated jump arc around position {i0} for vertex {u}")
        j, jp = pick
        chosen += [j, jp]
        inserts[j] = (P[jp], u)
        removed.append(jp)

    # step 2-3: third class via spaced subpaths inside blocks
    S = _near(J1 + chosen, 4)
    per_block: dict[int, list[int]] = {}
    for u in bits(umask):
        if cls[u] == "U3":
            per_block.setdefault(where[iota[u]][0], []).append(u)
    for bi in sorted(per_block):
        Y = per_block[bi]
        positions = [p for p in range(1, n + 1) if p in where and where[p][0] == bi]
        base = positions[0] - 1  # global = base + local
        size = len(positions)
        lo = min(iota[u] for u in Y) - base
        hi = max(iota[u] for u in Y) - base
        sp = config.spacing

        def removable(k: int) -> bool:
            return 3 <= k <= size - 2 and (base + k) not in S

        reach = [False] * (size + 2)
        good_from = 0  # vertices at local positions >= k + sp that can finish a subpath
        for k in range(size, 0, -1):
            if k + sp <= size and reach[k + sp]:
                good_from |= 1 << P[base + k + sp]
            if not removable(k):
                continue
            reach[k] = k > hi or bool(t.out_mask(P[base + k]) & good_from)
        start = None
        for k in range(1, lo):
            if (base + k) in S:
                continue
            if any(reach[q] and t.has_arc(P[base + k], P[base + q]) for q in range(k + sp, size + 1)):
                start = k
                break
        if start is None:
            return AbsorbFailure("absorb-U3", f"no spaced subpath through block {bi + 1}")
        route = [start]
        while route[-1] == start or route[-1] <= hi:
            cur = route[-1]
            nxt = next(q for q in range(cur + sp, size + 1)
                       if reach[q] and t.has_arc(P[base + cur], P[base + q]))
            route.append(nxt)
        tail = median_order(t.induced(mask_of(Y)), config.exact_cap).order
        inserts[base + start] = tuple(P[base + q] for q in route[1:]) + tuple(tail)
        removed += [base + q for q in route[1:]]

    # assemble: close every gap inside its window, then splice inserts
    repl: dict[int, tuple[int, int]] = {}
    for j in removed:
        window = tuple(P[j - 2: j + 3])
        _, y, y2, _ = skip_vertex_path(t, window)
        repl[j] = (y, y2)
    path: list[int] = []
    p = 1
    while p <= n:
        if (p + 1) in repl:
            path += repl[p + 1]
            p += 3
            continue
        path.append(P[p])
        path += inserts.get(p, ())
        p += 1
    rep = validate_directed_path(t, path, wmask | umask, w0, wr)
    soundness.gate("h_absorb_vertices", rep)
    return AbsorbResult(tuple(path), classes)


def absorb_instance(n: int, p: int, seed: int, ell: int | None = None, gamma=Fraction(1, 25),
                    kinds: Sequence[str] | None = None, exact_cap: int = 12):
    """Seeded input for :func:`h_absorb_vertices`.

    Vertices ``0..n-3`` carry a robust H-partition of a uniform random
    tournament, ``n-2`` and ``n-1`` are ``w0`` and ``wr`` with the required
    domination rewired in, and ``n..n+p-1`` form ``U``.  Returns
    ``(t, U, partition, w0, wr)``.

    ``kinds`` optionally rewires each vertex of ``U`` against the base path:
    ``"U2"`` makes it an out-neighbour of everything up to the middle
    separator and an in-neighbour of the rest, ``"U3"`` does the same with the
    cut in the middle of the middle block, ``"random"`` keeps the drawn arcs.
    """
    from .hpartition import robust_h_partition
    from .rng import SplitMix64, random_tournament

    if n < 8 or p < 0:
        raise ParameterError("need n >= 8 and p >= 0")
    total = n + p
    base = random_tournament(SplitMix64(seed), total)
    inner = (1 << (n - 2)) - 1
    part = robust_h_partition(base.induced(inner), ell if ell is not None else max(4, n // 5), gamma)
    w0, wr = n - 2, n - 1
    a = base.matrix().copy()
    for v in part.blocks[0]:
        a[w0, v], a[v, w0] = True, False
    for v in part.blocks[-1]:
        a[v, wr], a[wr, v] = True, False
    t = Tournament.from_matrix(a)
    U = tuple(range(n, total))
    if kinds is not None:
        if len(kinds) != p:
            raise ParameterError("one kind per vertex of U")
        P, where = base_path(t, part, w0, wr, exact_cap)
        r = len(part.blocks)
        mid = r // 2
        for u, kind in zip(U, kinds):
            if kind == "random":
                continue
            if kind == "U2":
                if r < 3:
                    raise ParameterError("U2 wiring needs at least three blocks")
                cut = P.index(part.separators[mid - 1])
            elif kind == "U3":
                cut = next(q for q, (b, k, size) in where.items() if b == mid and k == size // 2)
            else:
                raise ParameterError(f"unknown kind {kind!r}")
            for q in range(1, len(P)):
                v = P[q]
                a[u, v] = q <= cut
                a[v, u] = q > cut
        t = Tournament.from_matrix(a)
    return t, U, part, w0, wr
