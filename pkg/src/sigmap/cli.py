"""Command-line front end.

Exit codes: 0 ok, 1 a theorem-backed check failed, 2 usage or input error,
3 a search hit its resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constructions import (
    RandomGraphSpec,
    alpha_schedule,
    alpha_schedule_s2,
    greedy_bs_set,
    hankel_set,
    projective_plane_incidence,
    quadrilaterals,
    random_bipartite,
    row_set,
)
from .errors import ResourceLimitError, SigmaError, TheoremViolation
from .experiment import ExperimentConfig, report_schema_version, run
from .graph import COL, DEFAULT_EXPANSION_LIMIT, format_edge_list, read_edge_list, rudin_sup
from .schatten import (
    BlockMatrix,
    read_matrix,
    schatten_norm,
    schatten_norm_even_trace,
    triple_norm,
    triple_norm_operator_valued,
)
from .sigma import (
    circuit_check,
    density_bound,
    density_check,
    erdos_check,
    pisier_check,
    ratio_constant_estimate,
    sign_unconditionality_estimate,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)


def _emit(obj, out: str | None = None):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    return repr(o)


def _record(check, parameters, value, bound, holds, witness=None):
    return {
        "schema": report_schema_version(),
        "check": check,
        "parameters": parameters,
        "value": value,
        "bound": bound,
        "holds": holds,
        "witness": witness,
    }


def _status(*holds) -> int:
    return EXIT_VIOLATION if any(h is False for h in holds) else EXIT_OK


# ---------------------------------------------------------------------------
# Subcommands


def cmd_rudin(args) -> int:
    G = read_edge_list(args.graph)
    rep = rudin_sup(G, args.s, args.start, limit=args.limit)
    counts = [[repr(a), repr(b), k] for (a, b), k in sorted(rep.counts.items())]
    witness = None if rep.witness is None else [repr(v) for v in rep.witness]
    _emit(
        _record(
            "rudin",
            {"s": args.s, "start_class": args.start, "edges": len(G)},
            rep.sup,
            None,
            None,
            witness,
        )
        | {"counts": counts},
        args.out,
    )
    return EXIT_OK


def cmd_norm(args) -> int:
    x = read_matrix(args.matrix)
    p = args.p
    out = {"p": p}
    out["schatten"] = schatten_norm(x, p)
    if p == int(p) and int(p) % 2 == 0:
        out["schatten_trace"] = schatten_norm_even_trace(x, int(p) // 2)
    if p >= 2:
        if isinstance(x, BlockMatrix):
            out["triple"] = triple_norm_operator_valued(x, p)
        else:
            out["triple"] = triple_norm(x, p)
        holds = out["triple"] <= out["schatten"] * (1 + 1e-9)
        rec = _record("convexity", {"p": p}, out["triple"], out["schatten"], holds)
    else:
        holds = None
        rec = _record("norm", {"p": p}, out["schatten"], None, None)
    rec["norms"] = out
    _emit(rec, args.out)
    return _status(holds)


def cmd_sigma_est(args) -> int:
    G = read_edge_list(args.graph)
    common = dict(restarts=args.restarts, iterations=args.iterations, seed=args.seed, step=args.step)
    if args.mode == "ratio":
        est = ratio_constant_estimate(G, args.p, block_dim=args.block_dim, **common)
    else:
        est = sign_unconditionality_estimate(
            G, args.p, mode=args.mode.split("-")[1], block_dim=args.block_dim,
            max_patterns=args.max_patterns, **common,
        )
    pis = pisier_check(G, args.p, est)
    cir = circuit_check(G, args.p, est)
    rec = _record(
        f"sigma-est:{est.kind}",
        {"p": args.p, "seed": args.seed, "restarts": args.restarts, "iterations": args.iterations,
         "block_dim": args.block_dim, "edges": len(G)},
        est.value,
        min(b for b in (pis.bound, cir.bound) if b is not None),
        all(h is not False for h in (pis.holds, cir.holds)),
    )
    rec["checks"] = [pis.to_json(), cir.to_json()]
    _emit(rec, args.out)
    return _status(pis.holds, cir.holds)


def cmd_density(args) -> int:
    G = read_edge_list(args.graph)
    subsets = [(G.rows, G.cols)] if args.whole else None
    rep = density_check(G, args.p, args.D, subsets=subsets, samples=args.samples, seed=args.seed)
    exact, relaxed = density_bound(max(G.n_cols, 1), max(G.n_rows, 1), args.p, args.D)
    rec = _record(
        "density",
        {"p": args.p, "D": args.D, "checked": len(rep.checked), "whole_graph_bound": exact,
         "whole_graph_relaxed": relaxed},
        len(rep.violations),
        0,
        rep.holds,
        rep.violations[:10],
    )
    _emit(rec, args.out)
    return _status(rep.holds)


def cmd_erdos(args) -> int:
    G = read_edge_list(args.graph)
    res = erdos_check(G, args.p)
    _emit(res.to_json() | {"schema": report_schema_version()}, args.out)
    return _status(res.holds)


def cmd_construct(args) -> int:
    fam = args.family
    if fam in ("random", "random-s2"):
        big, small = max(args.m, args.n), min(args.m, args.n)
        if fam == "random-s2":
            alpha = alpha_schedule_s2(big, small, args.l)
        elif args.alpha is not None:
            alpha = args.alpha
        else:
            alpha = alpha_schedule(args.s, big, small, args.epsilon, square=args.square)
        G = random_bipartite(RandomGraphSpec(args.m, args.n, alpha, args.seed, args.s, args.epsilon))
    elif fam == "hankel":
        F = greedy_bs_set(args.s, args.k, args.q)
        G = hankel_set(F, args.m, args.n, args.k)
    elif fam == "projective":
        G = projective_plane_incidence(args.q)
    elif fam == "quadrilaterals":
        G = quadrilaterals(args.count)
    else:
        rows = []
        for spec in args.row:
            r, _, cols = spec.partition(":")
            rows.append((int(r), [int(c) for c in cols.split(",") if c]))
        G = row_set(rows)
    text = format_edge_list(G)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    report = run(cfg, workers=args.workers)
    if args.out_json:
        Path(args.out_json).write_text(report.dumps() + "\n")
    else:
        sys.stdout.write(report.dumps() + "\n")
    if args.out_csv:
        Path(args.out_csv).write_text(report.to_csv())
    for rec in report.failures:
        print(f"violation: {json.dumps(rec, sort_keys=True)}", file=sys.stderr)
    return EXIT_VIOLATION if report.failures else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sigmap", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rudin", help="trail counts c_s / r_s and their supremum")
    p.add_argument("--graph", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--start", choices=["c", "r"], default=COL)
    p.add_argument("--limit", type=int, default=DEFAULT_EXPANSION_LIMIT)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rudin)

    p = sub.add_parser("norm", help="Schatten and mixed norms of a matrix file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("sigma-est", help="numerical lower bound on the sigma(p) constant")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mode", choices=["ratio", "sign-real", "sign-complex"], default="ratio")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--block-dim", type=int, default=1)
    p.add_argument("--max-patterns", type=int, default=256)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sigma_est)

    p = sub.add_parser("density", help="check induced-subgraph sizes against the density bound")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--D", type=float, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--whole", action="store_true", help="check only the whole graph")
    p.add_argument("--out")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("erdos", help="edge bound for graphs without circuits of length p")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_erdos)

    p = sub.add_parser("construct", help="write a generated coordinate set as an edge list")
    p.add_argument(
        "family", choices=["random", "random-s2", "hankel", "projective", "quadrilaterals", "rowset"]
    )
    p.add_argument("--m", type=int, help="number of columns")
    p.add_argument("--n", type=int, help="number of rows")
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--square", action="store_true", help="use m^2 instead of mn in the epsilon factor")
    p.add_argument("--l", type=int, default=3)
    p.add_argument("--k", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--row", action="append", default=[], help="row spec 'r:c1,c2,...'")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("experiment", help="run a multi-trial experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-json")
    p.add_argument("--out-csv")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_experiment)
    return ap


def _validate_construct(ap, args):
    fam = args.family
    need = {
        "random": ("m", "n", "seed"),
        "random-s2": ("m", "n", "seed"),
        "hankel": ("m", "n", "k"),
        "projective": ("q",),
    }.get(fam, ())
    missing = [f"--{k}" for k in need if getattr(args, k) is None]
    if missing:
        ap.error(f"construct {fam} requires {' '.join(missing)}")
    if fam == "rowset" and not args.row:
        ap.error("construct rowset requires at least one --row")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "construct":
        _validate_construct(ap, args)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"sigmap: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except TheoremViolation as exc:
        print(f"sigmap: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (SigmaError, OSError, ValueError) as exc:
        print(f"sigmap: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
