"""Command-line entry point: ``dpglue <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 resource limit (bound only),
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

from . import checks
from .cover import Cover, validate
from .counting import DEFAULT_BUDGET, canonical_dp_color_function, count_report, dp_color_function
from .errors import InvalidArgument, ResourceLimit, VerificationFailure
from .graph import Graph, chromatic_polynomial

EXIT_OK, EXIT_INPUT, EXIT_LIMIT, EXIT_VERIFY = 0, 2, 3, 4


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InvalidArgument(f"{path}: no such file") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidArgument(f"{path}: {exc}") from None


def _load_graph(path: str) -> Graph:
    return Graph.from_json(_load_json(path))


def _emit(args, payload: dict, table: list[tuple[str, str]]) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        width = max((len(k) for k, _ in table), default=0)
        for k, v in table:
            print(f"{k:<{width}}  {v}")


def cmd_chromatic(args) -> int:
    g = _load_graph(args.graph)
    poly = chromatic_polynomial(g)
    val = poly(args.m)
    _emit(args, {"value": str(val), "m": args.m, "polynomial": [str(c) for c in poly.coeffs]},
          [("P(G,m)", str(val)), ("m", str(args.m)), ("polynomial", str(poly))])
    return EXIT_OK


def _parse_prescribe(text: str | None, g: Graph) -> dict[int, int]:
    out: dict[int, int] = {}
    if not text:
        return out
    for item in text.split(","):
        try:
            name, label = item.rsplit(":", 1)
            j = int(label) - 1
        except ValueError:
            raise InvalidArgument(f"bad --prescribe item {item!r}; expected vertex:label") from None
        v = g.index(name)
        if v in out and out[v] != j:
            # two labels on one vertex: the count is 0, keep both visible to the counter
            raise _Dependent()
        out[v] = j
    return out


class _Dependent(Exception):
    pass


def cmd_count(args) -> int:
    g = _load_graph(args.graph)
    c = Cover.from_json(_load_json(args.cover))
    if c.host != g:
        raise InvalidArgument("cover's graph does not match the graph file")
    bad = validate(c)
    if bad:
        for v in bad:
            print(f"invalid cover: {v}", file=sys.stderr)
        return EXIT_INPUT
    try:
        pres = _parse_prescribe(args.prescribe, g)
    except _Dependent:
        _emit(args, {"count": "0", "prescribed": args.prescribe}, [("count", "0")])
        return EXIT_OK
    rep = count_report(c, pres)
    out = rep.to_json()
    _emit(args, out, [("count", out["count"]), ("prescribed", args.prescribe or "-"),
                      ("nodes_expanded", str(rep.nodes_expanded))])
    return EXIT_OK


def cmd_dpmin(args) -> int:
    g = _load_graph(args.graph)
    try:
        if args.clique:
            k = [g.index(s.strip()) for s in args.clique.split(",")]
            res = canonical_dp_color_function(g, k, args.m, args.budget, args.shards)
        else:
            res = dp_color_function(g, args.m, args.budget, args.shards)
    except ResourceLimit as exc:
        best = None if exc.best is None else str(exc.best)
        payload = {"value": None, "upper_bound": best, "exact": False, "covers_examined": exc.work,
                   "message": str(exc)}
        if args.argmin_out and exc.argmin is not None:
            Path(args.argmin_out).write_text(exc.argmin.dumps(), encoding="utf-8")
        _emit(args, payload, [("upper bound", best or "-"), ("exact", "no"), ("covers", str(exc.work))])
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    if args.argmin_out:
        Path(args.argmin_out).write_text(res.cover.dumps(), encoding="utf-8")
    out = res.to_json()
    _emit(args, out, [
        ("P_DP" if not args.clique else "P'_DP", out["value"]),
        ("m", str(args.m)),
        ("free edges", str(out["free_edges"])),
        ("covers", str(out["covers_examined"])),
        ("nodes", str(out["nodes_expanded"])),
        ("argmin", " ".join("".join(map(str, p)) for p in out["argmin"]["perms"]) or "-"),
    ])
    return EXIT_OK


def cmd_verify(args) -> int:
    suite: Callable = checks.SUITES[args.suite]
    results = suite(budget=args.budget, shards=args.shards, seed=args.seed)
    ok = all(r.passed for r in results)
    if args.format == "json":
        print(json.dumps({"suite": args.suite, "passed": ok, "checks": [r.to_json() for r in results]},
                         sort_keys=True))
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dpglue", description="Exact DP-coloring computations.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, search=False):
        p.add_argument("--format", choices=("table", "json"), default="table")
        if search:
            p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET,
                           help="maximum number of covers to examine")
            p.add_argument("--shards", type=_positive, default=1, help="parallel sweep width")

    p = sub.add_parser("chromatic", help="chromatic polynomial and P(G,m)")
    p.add_argument("graph")
    p.add_argument("--m", type=_positive, required=True)
    common(p)
    p.set_defaults(func=cmd_chromatic)

    p = sub.add_parser("count", help="count H-colorings of a cover")
    p.add_argument("graph")
    p.add_argument("cover")
    p.add_argument("--prescribe", help="comma-separated vertex:label pairs, labels 1-based")
    common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("dpmin", help="exact DP color function by exhaustive search")
    p.add_argument("graph")
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--clique", help="comma-separated clique vertex names (conducive minimum)")
    p.add_argument("--argmin-out", help="write the minimising cover here")
    common(p, search=True)
    p.set_defaults(func=cmd_dpmin)

    p = sub.add_parser("verify", help="run a reproduction suite")
    p.add_argument("suite", choices=sorted(checks.SUITES))
    p.add_argument("--seed", type=int, default=20240601)
    common(p, search=True)
    p.set_defaults(func=cmd_verify)
    return ap


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
