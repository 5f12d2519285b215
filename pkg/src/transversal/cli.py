"""Command-line interface.

Every verb except ``gen`` prints one JSON run report.  The report's
``digest`` is a SHA-256 over everything except the ``timing`` field, so two
runs with the same arguments have the same digest.

Exit codes: 0 success, 1 invariant violation, 2 usage or parameter error,
3 size cap or timeout.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import soundness
from .broom import (
    chain_brooms,
    directed_broom,
    oscillating_broom_end,
    oscillating_broom_step,
    rainbow_short_path,
)
from .core import OrientationPattern, ParameterError, SizeError, TournamentCollection, as_fraction
from .harness import SUITES, hunt
from .hpartition import good_h_partition, robust_h_partition
from .instances import InstanceFile
from .order import check_interval_properties, median_order
from .pattern import classify_oscillating, do_decompose
from .rng import MODELS, generate_collection
from .solver import Oracle, SearchOptions, find_transversal, sweep_orientations

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class _Violation(Exception):
    pass


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def make_report(command: str, args: dict, result, elapsed: float, status: str = "ok") -> dict:
    body = {"command": command, "arguments": args, "status": status, "result": result,
            "soundness": {k: v for k, v in soundness.stats().items() if k.startswith("total")}}
    digest = hashlib.sha256(canonical(body).encode()).hexdigest()
    return {**body, "digest": digest, "timing": {"wall_seconds": round(elapsed, 6)}}


def strip_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}


# ---------------------------------------------------------------------------
# argument helpers


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", help="instance file (otherwise one is generated)")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--m", type=int, default=None, help="number of colors (default depends on the verb)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model", choices=MODELS, default="uniform")
    p.add_argument("--bias", default="3/4", help="arc probability for the custom-bias model")


def _load(args, default_m: int) -> TournamentCollection:
    if args.instance:
        return InstanceFile.read(args.instance).to_collection()
    m = args.m if args.m is not None else default_m
    return generate_collection(args.n, m, args.seed, args.model, as_fraction(args.bias))


def _options(args) -> SearchOptions:
    return SearchOptions(vertex_cap=args.cap, time_budget=args.time_budget,
                         pruning=args.pruning, anchor=args.anchor, workers=args.workers)


def _add_search_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=("path", "cycle"), default=None)
    p.add_argument("--cap", type=int, default=12, help="largest n searched exactly")
    p.add_argument("--time-budget", type=float, default=None)
    p.add_argument("--pruning", choices=("none", "hall-matching"), default="hall-matching")
    p.add_argument("--anchor", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)


def _kind_m(args) -> int:
    return args.n if args.kind == "cycle" else max(args.n - 1, 1)


def _check_negative(coll: TournamentCollection, pattern: OrientationPattern, res) -> bool | None:
    """Oracle re-check of a certified none when the instance is small enough."""
    if res.status != "none" or coll.n > 8:
        return None
    return Oracle(coll, "cycle" if pattern.cyclic else "path", pattern.length).decide(pattern).status == "none"


# ---------------------------------------------------------------------------
# verbs


def cmd_gen(args) -> int:
    m = args.m if args.m is not None else args.n
    coll = generate_collection(args.n, m, args.seed, args.model, as_fraction(args.bias))
    text = InstanceFile.from_collection(coll).dumps()
    if args.out:
        Path(args.out).write_text(text, encoding="ascii", newline="\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_solve(args):
    pattern = OrientationPattern.parse(args.pattern)
    if args.kind is None:
        args.kind = "cycle" if pattern.cyclic else "path"
    if (args.kind == "cycle") != pattern.cyclic:
        raise ParameterError("use the '@' suffix for cycle patterns")
    coll = _load(args, pattern.length)
    res = find_transversal(coll, pattern, _options(args))
    confirmed = _check_negative(coll, pattern, res)
    if confirmed is False:
        raise _Violation("oracle disagrees with a certified none")
    out = {"pattern": str(pattern), "n": coll.n, "m": coll.m, **res.to_dict(), "oracle_confirmed": confirmed}
    return out, ("timeout" if res.status == "timeout" else "ok")


def cmd_sweep(args):
    kind = args.kind or "path"
    args.kind = kind
    coll = _load(args, _kind_m(args))
    res = sweep_orientations(coll, kind, None if args.no_dedupe else "reversal", _options(args))
    disagreements = []
    if coll.n <= 8 and not args.no_oracle:
        oracle = Oracle(coll, kind)
        for p, r in res.verdicts.items():
            o = oracle.decide(OrientationPattern.parse(p)).status
            if r.status != "timeout" and o != r.status:
                disagreements.append({"pattern": p, "solver": r.status, "oracle": o})
    table = {p: r.status for p, r in res.verdicts.items()}
    embeddings = {p: r.embedding.to_dict() for p, r in res.verdicts.items() if r.embedding}
    out = {"kind": kind, "n": coll.n, "m": coll.m, "summary": res.summary, "verdicts": table,
           "embeddings": embeddings, "oracle_disagreements": disagreements,
           "oracle_checked": coll.n <= 8 and not args.no_oracle}
    if disagreements:
        raise _Violation(canonical(disagreements))
    return out, ("timeout" if res.summary["timeout"] else "ok")


_VERIFY_KNOBS = {
    "props": lambda a: {"n": a.n or 5},
    "balanced": lambda a: {"trials": a.trials or 1000, "seed": a.seed},
    "hpartition": lambda a: {"trials": a.trials or 1000, "seed": a.seed, "n_max": a.n or 500},
    "patterns": lambda a: {"max_length": a.max_length or 12},
    "brooms": lambda a: {"seed": a.seed, "trials": a.trials or 3},
    "short-paths": lambda a: {"n": a.n or 5},
    "solver-oracle": lambda a: {"trials": a.trials or 10_000, "seed": a.seed},
    "cycle-probe": lambda a: {"trials": a.trials or 1000, "seed": a.seed},
    "exceptions": lambda a: {"samples": a.trials or 200, "seed": a.seed},
    "absorb": lambda a: {"trials": a.trials or 5, "seed": a.seed, "n": a.n or 300},
}


def cmd_verify(args):
    suite = SUITES[args.suite]
    rep = suite(**_VERIFY_KNOBS[args.suite](args))
    out = rep.to_dict()
    if not rep.ok:
        raise _Violation(canonical(out))
    return out, "ok"


def cmd_hunt(args):
    rep = hunt(args.n_min, args.n_max, args.trials, args.seed, args.kind or "cycle",
               not args.include_directed)
    if args.out_hits:
        outdir = Path(args.out_hits)
        outdir.mkdir(parents=True, exist_ok=True)
        for k, hit in enumerate(rep.data["hits"]):
            (outdir / f"hit-{k:04d}.txt").write_text(hit["instance"], encoding="ascii", newline="\n")
    out = rep.to_dict()
    if not rep.ok:
        raise _Violation(canonical(out))
    return out, "ok"


def cmd_decompose(args):
    pattern = OrientationPattern.parse(args.pattern)
    dec = do_decompose(pattern)
    return {**dec.to_dict(), "oscillation": classify_oscillating(pattern).value}, "ok"


def cmd_median(args):
    coll = _load(args, 1)
    t = coll.member(args.color if args.color is not None else coll.colors[0])
    mo = median_order(t, args.exact_cap)
    rep = check_interval_properties(t, mo.order)
    return {"n": t.n, "order": list(mo.order), "forward_arcs": mo.forward_arcs, "exact": mo.exact,
            "interval_properties": rep.to_dict()}, "ok"


def cmd_hpartition(args):
    coll = _load(args, 1)
    t = coll.members[0]
    gamma = as_fraction(args.gamma)
    if args.good:
        part = good_h_partition(t, args.ell, gamma)
    else:
        part = robust_h_partition(t, args.ell, gamma)
    return {"n": t.n, "ell": args.ell, "gamma": str(gamma), "ok": part.ok if hasattr(part, "ok") else True,
            "partition": part.to_dict()}, "ok"


def cmd_broom(args):
    pattern = OrientationPattern.parse(args.pattern) if args.pattern else None
    op = args.op
    if op == "directed":
        coll = _load(args, 1)
        b = directed_broom(coll.members[0], args.ell, args.s1, args.s2)
        return {"op": op, "broom": b.to_dict()}, "ok"
    if pattern is None:
        raise ParameterError("--pattern is required for this operation")
    ell = pattern.length
    coll = _load(args, ell)
    cols = coll.colors[:ell]
    n = coll.n
    if op == "short":
        emb = rainbow_short_path(coll, pattern, colors=cols)
        return {"op": op, "embedding": emb.to_dict()}, "ok"
    if op == "step":
        res = oscillating_broom_step(coll, range(50), range(50, n), pattern, cols)
    elif op == "end":
        res = oscillating_broom_end(coll, range(50), n - 1, pattern, cols, cols[-1])
    elif op == "chain":
        if args.mode == "wide-end":
            res = chain_brooms(coll, range(50), range(n - 300, n), pattern, args.mode, cols)
        else:
            res = chain_brooms(coll, range(50), (n - 2, n - 1), pattern, args.mode, cols)
    else:
        raise ParameterError(f"unknown broom operation {op!r}")
    return {"op": op, "ok": res.ok, "result": res.to_dict()}, "ok"


# ---------------------------------------------------------------------------
# parser and entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transversal", description=__doc__.split("\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report (for gen: the instance) to this file")
    common.add_argument("--pretty", action="store_true", help="indent the JSON report")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name: str, **kw) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], **kw)

    p = add("gen", help="generate an instance file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model", choices=MODELS, default="uniform")
    p.add_argument("--bias", default="3/4")
    p.set_defaults(func=cmd_gen)

    p = add("solve", help="search one pattern")
    _add_instance_args(p)
    _add_search_args(p)
    p.add_argument("--pattern", required=True)
    p.set_defaults(func=cmd_solve)

    p = add("sweep", help="search every orientation")
    _add_instance_args(p)
    _add_search_args(p)
    p.add_argument("--no-dedupe", action="store_true")
    p.add_argument("--no-oracle", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = add("verify", help="run an invariant suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--max-length", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = add("hunt", help="look for certified-none instances")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=("path", "cycle"), default="cycle")
    p.add_argument("--include-directed", action="store_true")
    p.add_argument("--hits-dir", dest="out_hits", default=None, help="write hit instances here")
    p.set_defaults(func=cmd_hunt)

    p = add("decompose", help="DO-decomposition of a pattern")
    p.add_argument("--pattern", required=True)
    p.set_defaults(func=cmd_decompose)

    p = add("median", help="median order of one member")
    _add_instance_args(p)
    p.add_argument("--color", type=int, default=None)
    p.add_argument("--exact-cap", type=int, default=22)
    p.set_defaults(func=cmd_median)

    p = add("hpartition", help="robust or good H-partition of one member")
    _add_instance_args(p)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--gamma", default="1/25")
    p.add_argument("--good", action="store_true")
    p.set_defaults(func=cmd_hpartition)

    p = add("broom", help="broom constructions on a seeded instance")
    _add_instance_args(p)
    p.add_argument("--op", choices=("directed", "short", "step", "end", "chain"), required=True)
    p.add_argument("--pattern", default=None)
    p.add_argument("--ell", type=int, default=3)
    p.add_argument("--s1", type=int, default=2)
    p.add_argument("--s2", type=int, default=2)
    p.add_argument("--mode", choices=("wide-end", "to-vertex-set"), default="to-vertex-set")
    p.set_defaults(func=cmd_broom)
    return parser


def _scrub(ns: argparse.Namespace) -> dict:
    skip = {"func", "out", "pretty", "out_hits"}
    return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in sorted(vars(ns).items()) if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    if args.verb == "gen":
        try:
            return cmd_gen(args)
        except ParameterError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    report_path = args.out
    echo = _scrub(args)
    soundness.reset()
    start = time.perf_counter()
    code = EXIT_OK
    try:
        result, status = args.func(args)
        if status == "timeout":
            code = EXIT_CAP
    except _Violation as exc:
        result, status, code = {"violation": json.loads(str(exc)) if str(exc).startswith(("{", "[")) else str(exc)}, \
            "violation", EXIT_VIOLATION
    except soundness.SoundnessError as exc:
        result, status, code = {"violation": str(exc)}, "violation", EXIT_VIOLATION
    except SizeError as exc:
        result, status, code = {"error": str(exc)}, "cap", EXIT_CAP
    except ParameterError as exc:
        result, status, code = {"error": str(exc)}, "usage", EXIT_USAGE
    report = make_report(args.verb, echo, result, time.perf_counter() - start, status)
    text = json.dumps(report, sort_keys=True, indent=2 if args.pretty else None) + "\n"
    if report_path:
        Path(report_path).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
