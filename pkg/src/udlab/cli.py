"""Command-line interface: ``udlab <subcommand> ...``.

Exit codes: 0 success, 1 catalog validation failure, 2 invalid input,
3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import harness
from .diameter import catalog_members, validate_entry, MAX_CATALOG_VERTICES
from .embed import read_points
from .errors import BudgetExceeded, InvalidInput, UdlabError
from .graph import read_graph
from .hexcolor import build_unit_distance_graph, extract_low_chromatic_subgraph
from .realize import decide
from .rng import GnpParams, sample_gnp

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
_NOT_CONFIG = {"func", "config", "out", "workers", "command", "catalog_command"}


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_CONFIG}


def cmd_sample(args) -> int:
    g = sample_gnp(GnpParams(args.n, args.p, args.seed), args.trial)
    _emit(g.to_text(), args.out)
    return EXIT_OK


def cmd_decide(args) -> int:
    g = read_graph(args.graph)
    v = decide(g, args.dimension, budget=args.budget, seed=args.seed)
    _emit(v.to_json(indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_threshold(args) -> int:
    decider = args.decider or ("1d_exact" if args.dimension == 1 else "pipeline")
    est = harness.find_threshold(args.n, decider, trials=args.trials, tol=args.tol, seed=args.seed,
                                 d=args.dimension, workers=args.workers)
    cfg = _config(args)
    cfg["decider"] = decider
    _emit(harness.to_json(est, cfg), args.out)
    return EXIT_OK


def _p_values(args) -> list:
    if args.p_grid:
        lo, hi, num = args.p_grid
        num = int(num)
        if not 0.0 < lo <= hi <= 1.0 or num < 1:
            raise InvalidInput("p-grid needs 0 < start <= stop <= 1 and a positive count")
        return [float(x) for x in np.geomspace(lo, hi, num)]
    if not args.p:
        raise InvalidInput("give --p or --p-grid")
    return list(args.p)


def cmd_ucurve(args) -> int:
    reports = [
        harness.u_regime_experiment(args.n, p, args.dimension, args.trials, seed=args.seed, workers=args.workers,
                                    connected=args.connected, exact_limit=args.exact_limit)
        for p in _p_values(args)
    ]
    _emit(harness.u_histogram_csv(reports, _config(args)), args.out)
    return EXIT_OK


def cmd_chromo(args) -> int:
    pts = read_points(args.points)
    res = extract_low_chromatic_subgraph(pts, args.k, trials=args.trials, seed=args.seed)
    body = res.to_dict()
    body["size"] = res.size
    body["guarantee"] = math.ceil(args.k * res.n / 7)
    body["unit_edges"] = build_unit_distance_graph(pts, args.tol).m
    _emit(harness.to_json(body, _config(args)), args.out)
    return EXIT_OK


def cmd_catalog_validate(args) -> int:
    rows = []
    for d in args.dims:
        for e in catalog_members(d, args.max_vertices):
            ok = validate_entry(e, args.rel_tol)
            row = e.to_dict()
            row["validated"] = ok
            rows.append(row)
    _emit(harness.to_json({"entries": rows, "all_valid": all(r["validated"] for r in rows)}, _config(args)), args.out)
    return EXIT_OK if all(r["validated"] for r in rows) else EXIT_FAIL


def cmd_constants(args) -> int:
    _emit(harness.to_json(harness.reference_table()), args.out)
    return EXIT_OK


def build_parser() -> tuple:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--config", help="JSON file of option defaults")
    common.add_argument("--out", help="output path (default stdout)")

    parser = argparse.ArgumentParser(prog="udlab", description="Unit-distance realizability experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("sample", parents=[common], help="emit a G(n,p) graph file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trial", type=int, default=None, help="trial index within the seed")
    p.set_defaults(func=cmd_sample)
    subs["sample"] = p

    p = sub.add_parser("decide", parents=[common], help="decide realizability of a graph file")
    p.add_argument("graph")
    p.add_argument("--dimension", "-d", type=int, default=2)
    p.add_argument("--budget", type=int, default=200, help="embedder restarts")
    p.set_defaults(func=cmd_decide)
    subs["decide"] = p

    p = sub.add_parser("threshold", parents=[common], help="bisect for the realizability threshold")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dimension", "-d", type=int, default=1)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--decider", choices=harness.DECIDERS, default=None)
    p.set_defaults(func=cmd_threshold)
    subs["threshold"] = p

    p = sub.add_parser("ucurve", parents=[common], help="histograms of the u_d estimator")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, nargs="+")
    p.add_argument("--p-grid", type=float, nargs=3, metavar=("START", "STOP", "NUM"))
    p.add_argument("--dimension", "-d", type=int, default=2)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--exact-limit", type=int, default=40)
    p.add_argument("--connected", action="store_true")
    p.set_defaults(func=cmd_ucurve)
    subs["ucurve"] = p

    p = sub.add_parser("chromo", parents=[common], help="large induced k-colorable subgraph of a point set")
    p.add_argument("points")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_chromo)
    subs["chromo"] = p

    p = sub.add_parser("catalog", help="diameter-graph catalog tools")
    csub = p.add_subparsers(dest="catalog_command", required=True)
    v = csub.add_parser("validate", parents=[common], help="validate every catalog family")
    v.add_argument("--dims", type=int, nargs="+", default=list(range(1, 9)))
    v.add_argument("--max-vertices", type=int, default=MAX_CATALOG_VERTICES)
    v.add_argument("--rel-tol", type=float, default=1e-9)
    v.set_defaults(func=cmd_catalog_validate)
    subs["catalog validate"] = v

    p = sub.add_parser("constants", parents=[common], help="print reference constants")
    p.set_defaults(func=cmd_constants)
    subs["constants"] = p
    return parser, subs


def _apply_config(parser, subs, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise InvalidInput("config file must hold a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    # only the chosen subcommand matters; pick it by the first positional words
    words = [a for a in argv if not a.startswith("-")]
    key = " ".join(words[:2]) if words[:1] == ["catalog"] else (words[0] if words else "")
    target = subs.get(key)
    if target is None:
        return
    dests = {a.dest for a in target._actions}
    unknown = set(cfg) - dests
    if unknown:
        raise InvalidInput(f"unknown config keys: {sorted(unknown)}")
    for a in target._actions:
        if a.dest in cfg:
            a.required = False
    target.set_defaults(**cfg)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        _apply_config(parser, subs, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"udlab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidInput, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"udlab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UdlabError as exc:
        print(f"udlab: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
