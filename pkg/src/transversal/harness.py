"""Verification suites and experiment drivers shared by the CLI and the tests.

Every suite returns a :class:`SuiteReport`: per-check counts, a list of
violations (empty on success) and optional data.  Reports contain no timing
and are deterministic functions of their arguments.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Iterable

from .broom import (
    NearRainbowBroom,
    chain_brooms,
    directed_broom,
    oscillating_broom_end,
    oscillating_broom_step,
    rainbow_short_path,
    tip_paths,
    validate_broom,
    validate_near_rainbow,
)
from .core import (
    OrientationPattern,
    ParameterError,
    SizeError,
    Tournament,
    TournamentCollection,
    validate_directed_path,
    validate_embedding,
)
from .hpartition import (
    balanced_vertex,
    cyclic_triangles,
    balanced_bounds,
    robust_h_partition,
    validate_h_partition,
)
from .order import (
    check_interval_properties,
    low_degree_count,
    median_orders,
    near_directed_pair,
    skip_vertex_path,
    validate_near_pair,
)
from .pattern import do_decompose, is_good_oscillating, is_oscillating, validate_do
from .rng import SplitMix64, all_tournaments, derive_seed, generate_collection, random_tournament
from .solver import (
    Oracle,
    SearchOptions,
    absorb_instance,
    all_patterns,
    find_transversal,
    h_absorb_vertices,
)


@dataclass
class SuiteReport:
    suite: str
    scope: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def count(self, name: str, k: int = 1) -> None:
        self.checks[name] = self.checks.get(name, 0) + k

    def fail(self, check: str, **detail) -> None:
        self.violations.append({"check": check, **detail})

    def expect(self, check: str, cond: bool, **detail) -> None:
        self.count(check)
        if not cond:
            self.fail(check, **detail)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "scope": self.scope, "ok": self.ok,
                "checks": dict(sorted(self.checks.items())), "violations": self.violations,
                "data": self.data}


def _guard(rep: SuiteReport, check: str, fn: Callable, **detail):
    """Run ``fn``; any exception becomes a violation of ``check``."""
    try:
        return fn()
    except Exception as exc:  # noqa: BLE001 - reported, not swallowed
        rep.count(check)
        rep.fail(check, error=f"{type(exc).__name__}: {exc}", **detail)
        return None


def triangle_identity(t: Tournament) -> bool:
    """Transitive triangles plus cyclic ones account for every triple."""
    n = t.n
    transitive = sum(comb(t.out_degree(v), 2) for v in t.vertices)
    return transitive + cyclic_triangles(t) == comb(n, 3)


# ---------------------------------------------------------------------------
# median orders


def suite_props(n: int = 5) -> SuiteReport:
    """Exhaustive median-order checks over every labeled tournament on ``n`` vertices."""
    if not 5 <= n <= 6:
        raise ParameterError("the props suite runs exhaustively for n in {5, 6}")
    rep = SuiteReport("props", {"n": n})
    for code, t in enumerate(all_tournaments(n)):
        for d in range(n):
            for sign in "-+":
                rep.expect("low-degree-bound", low_degree_count(t, d, sign) <= 2 * d + 1,
                           code=code, d=d, sign=sign)
        for order in median_orders(t):
            rep.expect("median-hamilton-path", validate_directed_path(t, order).ok, code=code, order=order)
            rep.expect("interval-properties", check_interval_properties(t, order).ok, code=code, order=order)
            for s in range(n - 4):
                window = order[s: s + 5]
                path = _guard(rep, "skip-vertex-path", lambda: skip_vertex_path(t, window),
                              code=code, order=order)
                if path is not None:
                    rep.expect("skip-vertex-path", len(path) == 4, code=code, order=order)
            pair = _guard(rep, "near-directed-pair", lambda: near_directed_pair(t, order), code=code)
            if pair is not None:
                rep.expect("near-directed-pair", validate_near_pair(t, pair).ok, code=code, order=order)
    return rep


# ---------------------------------------------------------------------------
# balanced vertices and H-partitions


def suite_balanced(trials: int = 1000, seed: int = 0, sizes: Iterable[int] = (10, 25, 60),
                   exhaustive_n: int | None = 5) -> SuiteReport:
    sizes = tuple(sizes)
    rep = SuiteReport("balanced", {"trials": trials, "seed": seed, "sizes": list(sizes),
                                   "exhaustive_n": exhaustive_n})

    def check(t: Tournament, **where) -> None:
        bv = balanced_vertex(t)
        cross_bound, deg_bound = balanced_bounds(t.n)
        rep.expect("cross-arcs", bv.cross >= cross_bound, cross=bv.cross, bound=cross_bound, **where)
        rep.expect("min-degree", min(bv.in_mask.bit_count(), bv.out_mask.bit_count()) >= deg_bound,
                   **where)
        rep.expect("recount", t.cross_arcs(bv.in_mask, bv.out_mask) == bv.cross, **where)

    if exhaustive_n is not None:
        for code, t in enumerate(all_tournaments(exhaustive_n)):
            check(t, n=exhaustive_n, code=code)
    for n in sizes:
        for i in range(trials):
            check(random_tournament(SplitMix64(derive_seed(seed + n, i)), n), n=n, index=i)
    return rep


def hpartition_instance(seed: int, i: int, n_min: int = 10, n_max: int = 500) -> tuple[Tournament, int]:
    rng = SplitMix64(derive_seed(seed, i))
    n = n_min + rng.below(n_max - n_min + 1)
    ell = 4 + rng.below(n - 3)
    return random_tournament(rng, n), ell


def suite_hpartition(trials: int = 1000, seed: int = 0, n_max: int = 500) -> SuiteReport:
    rep = SuiteReport("hpartition", {"trials": trials, "seed": seed, "n_max": n_max})
    gamma = Fraction(1, 25)
    blocks = 0
    for i in range(trials):
        t, ell = hpartition_instance(seed, i, n_max=n_max)
        part = _guard(rep, "robust-h-partition", lambda: robust_h_partition(t, ell, gamma), index=i)
        if part is not None:
            v = validate_h_partition(t, part, robust=True)
            rep.expect("robust-h-partition", v.ok, index=i, n=t.n, ell=ell,
                       reasons=v.reasons() if not v.ok else [])
            blocks += len(part.blocks)
        rep.expect("triangle-identity", triangle_identity(t), index=i, n=t.n)
    rep.data["blocks"] = blocks
    return rep


# ---------------------------------------------------------------------------
# patterns


def suite_patterns(max_length: int = 14) -> SuiteReport:
    rep = SuiteReport("patterns", {"max_length": max_length})
    for ell in range(max_length + 1):
        for p in all_patterns(ell):
            dec = _guard(rep, "do-decompose", lambda: do_decompose(p), pattern=p.signs)
            if dec is None:
                continue
            v = validate_do(p, dec)
            rep.expect("do-valid", v.ok, pattern=p.signs, reasons=v.reasons())
            glued = "".join(dec.piece(i).signs for i in range(len(dec.ranges)))
            rep.expect("reconstruction", glued == p.signs, pattern=p.signs)
    return rep


# ---------------------------------------------------------------------------
# brooms


def _check_colored(rep: SuiteReport, check: str, coll, res, allowed, **where) -> None:
    if not isinstance(res, NearRainbowBroom):
        rep.expect(check, False, failure=res.to_dict(), **where)
        return
    v = validate_near_rainbow(res.broom, res.coloring, coll, allowed, None)
    rep.expect(check, v.ok, reasons=v.reasons(), **where)
    for emb in tip_paths(res.broom, res.coloring):
        rep.expect("tip-path", validate_embedding(coll, res.broom.pattern, emb).ok, **where)


def suite_brooms(seed: int = 0, trials: int = 3) -> SuiteReport:
    rep = SuiteReport("brooms", {"seed": seed, "trials": trials})
    k = 0

    def next_seed() -> int:
        nonlocal k
        k += 1
        return derive_seed(seed, k)

    # directed brooms
    for ell, s1, s2 in [(1, 2, 2), (2, 1, 1), (3, 2, 3), (5, 2, 2), (8, 1, 3)]:
        for _ in range(trials):
            n = ell + (1 << (s1 + s2)) + 3
            t = generate_collection(n, 1, next_seed()).members[0]
            b = _guard(rep, "directed-broom", lambda: directed_broom(t, ell, s1, s2), ell=ell)
            if b is not None:
                rep.expect("directed-broom", validate_broom(b, t).ok, ell=ell, s1=s1, s2=s2)
                rep.expect("internal-count", len(b.internal) == max(ell - 1, 0), ell=ell)
    # short rainbow paths on random pools
    for p in all_patterns(1) + all_patterns(2):
        for _ in range(trials * 10):
            s = next_seed()
            coll = generate_collection(5 + s % 6, p.length, s)
            emb = _guard(rep, "short-path", lambda: rainbow_short_path(coll, p), pattern=p.signs)
            if emb is not None:
                rep.expect("short-path", validate_embedding(coll, p, emb).ok, pattern=p.signs)
    # length-three steps
    for p in all_patterns(3):
        if not is_oscillating(p):
            continue
        for _ in range(trials):
            coll = generate_collection(400, 3, next_seed())
            res = _guard(rep, "broom-step", lambda: oscillating_broom_step(
                coll, range(50), range(50, 400), p, (0, 1, 2)), pattern=p.signs)
            if res is not None:
                _check_colored(rep, "broom-step", coll, res, (0, 1, 2), pattern=p.signs)
    # closing brooms
    for ell in (2, 3, 4):
        for p in all_patterns(ell):
            if not is_good_oscillating(p):
                continue
            for _ in range(trials):
                coll = generate_collection(80, ell, next_seed())
                cols = tuple(range(ell))
                for b in cols:
                    res = _guard(rep, "broom-end", lambda: oscillating_broom_end(
                        coll, range(50), 70, p, cols, b), pattern=p.signs)
                    if res is not None:
                        allowed = cols if getattr(res, "case", "") == "full" else tuple(c for c in cols if c != b)
                        _check_colored(rep, "broom-end", coll, res, allowed, pattern=p.signs, b=b)
                        rep.count(f"broom-end-{getattr(res, 'case', 'failure')}")
    # chains
    for signs, mode in [("+-+-+-", "wide-end"), ("-++-+-", "wide-end"), ("+-+-", "to-vertex-set"),
                        ("+-+-+-+", "to-vertex-set"), ("--+-++-+-", "to-vertex-set")]:
        p = OrientationPattern(signs)
        ell = p.length
        coll = generate_collection(ell + 1000, ell, next_seed())
        V2 = range(60, 360) if mode == "wide-end" else (998, 999)
        res = _guard(rep, "chain", lambda: chain_brooms(coll, range(50), V2, p, mode, range(ell)),
                     pattern=signs, mode=mode)
        if res is not None:
            _check_colored(rep, "chain", coll, res, tuple(range(ell)), pattern=signs, mode=mode)
    return rep


def suite_short_paths(n: int = 5, patterns: Iterable[str] = ("++", "+-", "-+", "--")) -> SuiteReport:
    """Every ordered pair of labeled ``n``-vertex tournaments against each
    two-arc pattern, plus every single tournament against both one-arc patterns."""
    if n != 5:
        raise ParameterError("the short-path suite runs exhaustively for n = 5")
    patterns = tuple(patterns)
    rep = SuiteReport("short-paths", {"n": n, "patterns": list(patterns)})
    ts = list(all_tournaments(n))
    for p in (OrientationPattern("+"), OrientationPattern("-")):
        for code, t in enumerate(ts):
            coll = TournamentCollection([t])
            emb = _guard(rep, "short-path", lambda: rainbow_short_path(coll, p), pattern=p.signs, code=code)
            if emb is not None:
                rep.expect("short-path", validate_embedding(coll, p, emb).ok, pattern=p.signs, code=code)
    for signs in patterns:
        p = OrientationPattern(signs)
        for c1, t1 in enumerate(ts):
            for c2, t2 in enumerate(ts):
                coll = TournamentCollection([t1, t2])
                emb = _guard(rep, "short-path", lambda: rainbow_short_path(coll, p),
                             pattern=signs, codes=[c1, c2])
                if emb is not None:
                    rep.expect("short-path", validate_embedding(coll, p, emb).ok,
                               pattern=signs, codes=[c1, c2])
    return rep


# ---------------------------------------------------------------------------
# solver against oracle


def oracle_instance(seed: int, i: int) -> tuple[str, TournamentCollection]:
    """Instance ``i`` of the solver/oracle sweep: even indices are paths on
    ``n = 2..6`` with ``m = n-1``, odd indices cycles on ``n = 3..6`` with ``m = n``."""
    s = derive_seed(seed, i)
    if i % 2 == 0:
        n = 2 + (i // 2) % 5
        return "path", generate_collection(n, n - 1, s)
    n = 3 + (i // 2) % 4
    return "cycle", generate_collection(n, n, s)


def suite_solver_oracle(trials: int = 10_000, seed: int = 0) -> SuiteReport:
    rep = SuiteReport("solver-oracle", {"trials": trials, "seed": seed})
    hall = SearchOptions(pruning="hall-matching")
    plain = SearchOptions(pruning="none")
    for i in range(trials):
        kind, coll = oracle_instance(seed, i)
        oracle = Oracle(coll, kind)
        ell = coll.n if kind == "cycle" else coll.n - 1
        for p in all_patterns(ell, kind == "cycle"):
            a = find_transversal(coll, p, hall)
            b = find_transversal(coll, p, plain)
            o = oracle.decide(p)
            rep.expect("solver-vs-oracle", a.status == o.status, index=i, pattern=str(p),
                       solver=a.status, oracle=o.status)
            rep.expect("pruning-on-vs-off", a.status == b.status, index=i, pattern=str(p))
            rep.count(f"{kind}-{a.status}")
    return rep


# ---------------------------------------------------------------------------
# directed-cycle probe and single-tournament exceptions


def suite_cycle_probe(trials: int = 1000, seed: int = 0, sizes: Iterable[int] = (3, 4, 5, 6)) -> SuiteReport:
    sizes = tuple(sizes)
    rep = SuiteReport("cycle-probe", {"trials": trials, "seed": seed, "sizes": list(sizes)})
    fractions = {}
    hits = []
    for n in sizes:
        coll = TournamentCollection.replicate(Tournament.transitive(n), n)
        for signs in ("+" * n, "-" * n):
            p = OrientationPattern(signs, True)
            res = find_transversal(coll, p)
            rep.expect("directed-cycle-none", res.status == "none", n=n, pattern=str(p))
            rep.expect("oracle-confirms", Oracle(coll, "cycle").decide(p).status == "none", n=n)
        none_count = total = 0
        for i in range(trials):
            coll = generate_collection(n, n, derive_seed(seed + n, i))
            oracle = None
            for p in all_patterns(n, True):
                if p.is_directed():
                    continue
                total += 1
                res = find_transversal(coll, p)
                if res.status == "none":
                    none_count += 1
                    oracle = oracle or Oracle(coll, "cycle")
                    rep.expect("oracle-confirms", oracle.decide(p).status == "none", n=n, index=i,
                               pattern=str(p))
                    hits.append({"n": n, "index": i, "pattern": str(p)})
        fractions[str(n)] = {"none": none_count, "total": total,
                             "fraction": str(Fraction(none_count, total)) if total else "0"}
    rep.data["non_directed_none"] = fractions
    rep.data["hits"] = hits
    return rep


def suite_exceptions(exhaustive: Iterable[int] = (3, 4, 5), sampled_n: int | None = 6,
                     samples: int = 200, seed: int = 0) -> SuiteReport:
    """Path orientations missing from single tournaments (``m = n-1`` copies)."""
    exhaustive = tuple(exhaustive)
    rep = SuiteReport("exceptions", {"exhaustive": list(exhaustive), "sampled_n": sampled_n,
                                     "samples": samples, "seed": seed})
    found = []

    def sweep(t: Tournament, **where) -> None:
        coll = TournamentCollection.replicate(t, t.n - 1)
        for p in all_patterns(t.n - 1):
            res = find_transversal(coll, p)
            rep.count("patterns")
            if res.status == "none":
                found.append({**where, "rows": t.to_strings(), "pattern": p.signs})
                rep.expect("not-transitive", not t.is_transitive(), pattern=p.signs, **where)
                rep.expect("oracle-confirms", Oracle(coll, "path").decide(p).status == "none", **where)

    for n in exhaustive:
        for code, t in enumerate(all_tournaments(n)):
            sweep(t, n=n, code=code)
    if sampled_n is not None:
        for i in range(samples):
            sweep(random_tournament(SplitMix64(derive_seed(seed, i)), sampled_n), n=sampled_n, index=i)
    rep.data["exceptions"] = found
    rep.data["count_by_n"] = {str(n): sum(1 for e in found if e["n"] == n)
                              for n in exhaustive + ((sampled_n,) if sampled_n else ())}
    return rep


# ---------------------------------------------------------------------------
# absorption


def suite_absorb(trials: int = 5, seed: int = 0, n: int = 300) -> SuiteReport:
    rep = SuiteReport("absorb", {"trials": trials, "seed": seed, "n": n})
    plans = [(), ("random",), ("U2",), ("U3",), ("U2", "U3", "random")]
    for kinds in plans:
        for i in range(trials):
            t, U, part, w0, wr = absorb_instance(n, len(kinds), derive_seed(seed, i), kinds=kinds)
            res = _guard(rep, "absorb", lambda: h_absorb_vertices(t, U, part, w0, wr), kinds=kinds)
            if res is None:
                continue
            rep.count("absorb-success" if res.ok else "absorb-failure")
            if res.ok:
                whole = (1 << w0) | (1 << wr) | sum(1 << v for b in part.blocks for v in b) \
                    | sum(1 << v for v in part.separators) | sum(1 << u for u in U)
                rep.expect("absorb-path", validate_directed_path(t, res.path, whole, w0, wr).ok,
                           kinds=list(kinds), index=i)
    return rep


SUITES = {
    "props": suite_props,
    "balanced": suite_balanced,
    "hpartition": suite_hpartition,
    "patterns": suite_patterns,
    "brooms": suite_brooms,
    "short-paths": suite_short_paths,
    "solver-oracle": suite_solver_oracle,
    "cycle-probe": suite_cycle_probe,
    "exceptions": suite_exceptions,
    "absorb": suite_absorb,
}


# ---------------------------------------------------------------------------
# hunting for small counterexamples


def hunt(n_min: int, n_max: int, trials: int, seed: int = 0, kind: str = "cycle",
         exclude_directed: bool = True) -> SuiteReport:
    """Random collections with certified-none patterns, each re-checked by the oracle."""
    if not (2 <= n_min <= n_max <= 8):
        raise SizeError("hunt needs 2 <= n_min <= n_max <= 8")
    if kind not in ("path", "cycle"):
        raise ParameterError(f"unknown kind {kind!r}")
    if kind == "cycle" and n_min < 3:
        raise ParameterError("cycles need n >= 3")
    from .instances import InstanceFile

    rep = SuiteReport("hunt", {"n_min": n_min, "n_max": n_max, "trials": trials, "seed": seed,
                               "kind": kind, "exclude_directed": exclude_directed})
    hits = []
    for i in range(trials):
        s = derive_seed(seed, i)
        n = n_min + i % (n_max - n_min + 1)
        m = n if kind == "cycle" else n - 1
        coll = generate_collection(n, m, s)
        ell = n if kind == "cycle" else n - 1
        oracle = None
        for p in all_patterns(ell, kind == "cycle"):
            if exclude_directed and kind == "cycle" and p.is_directed():
                continue
            rep.count("queries")
            res = find_transversal(coll, p)
            if res.status != "none":
                continue
            oracle = oracle or Oracle(coll, kind)
            confirmed = oracle.decide(p).status == "none"
            rep.expect("oracle-confirms", confirmed, index=i, pattern=str(p))
            hits.append({"index": i, "n": n, "seed": s, "pattern": str(p),
                         "instance": InstanceFile.from_collection(coll).dumps()})
    rep.data["hits"] = hits
    return rep
