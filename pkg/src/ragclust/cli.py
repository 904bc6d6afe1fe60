"""Command-line entry point.

Exit codes: 0 success, 1 runtime or I/O failure, 2 invalid flags.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import __version__
from ._backend import BACKEND
from ._io import dumps_json, fmt_float
from .counting import count_graph
from .exceptions import InvalidParams, RagError, RegimeViolation
from .harness import (
    DEFAULT_GRID,
    DEFAULT_MC_SAMPLES,
    ExperimentSpec,
    TooManyExclusions,
    default_threads,
    run_clt_experiment,
    run_convergence_experiment,
    run_sigma_scaling,
    write_summary,
)
from .model import (
    AnnulusParams,
    RngSeed,
    read_positions_csv,
    sample_positions,
    write_edge_list,
    write_positions_csv,
)
from .stats import (
    KernelParams,
    clustering_coefficient,
    sigma2_cubature,
    sigma2_monte_carlo,
)

REGIME_HELP = """\
limit-theorem regime: 2*r2 < r1 = O(r2), r1 = o(1) and n*r1 = omega(1).
At desk scale the clt and sweep commands require 2*r2 < r1, r1 <= 0.1 and
n*r1 >= 20.  Model constraint for every command: 0 <= r2 < r1 <= 0.5.
"""


class UsageError(Exception):
    pass


def _add_model_flags(p: argparse.ArgumentParser, need_n: bool = True) -> None:
    if need_n:
        p.add_argument("--n", type=int, help="number of nodes")
    p.add_argument("--r1", type=float, help="outer radius")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--r2", type=float, help="inner radius")
    g.add_argument("--lambda", dest="lam", type=float, help="ratio r1/r2 (alternative to --r2)")
    p.add_argument("--seed", type=int, default=1, help="master seed (default 1)")


def _add_sigma_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sigma-method", choices=["cubature", "monte_carlo"], default="cubature")
    p.add_argument(
        "--sigma-budget",
        type=int,
        help=f"cubature grid (default {DEFAULT_GRID}) or MC samples (default {DEFAULT_MC_SAMPLES:.0e})",
    )


def _radii(args) -> tuple[float, float]:
    if args.r1 is None:
        raise UsageError("--r1 is required")
    if args.lam is not None:
        if not args.lam > 1.0:
            raise UsageError(f"--lambda must exceed 1 so that r1 > r2, got {args.lam}")
        return args.r1, args.r1 / args.lam
    if args.r2 is None:
        raise UsageError("one of --r2 or --lambda is required")
    return args.r1, args.r2


def _params(args) -> AnnulusParams:
    if args.n is None:
        raise UsageError("--n is required")
    r1, r2 = _radii(args)
    return AnnulusParams(args.n, r1, r2)


def _threads(args) -> int:
    return args.threads if args.threads else default_threads()


def cmd_generate(args) -> int:
    params = _params(args)
    ps = sample_positions(params, RngSeed(args.seed))
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    edges_path = prefix.with_name(prefix.name + ".edges.txt")
    pos_path = prefix.with_name(prefix.name + ".positions.csv")
    with open(edges_path, "w") as fh:
        m = write_edge_list(fh, ps, params, args.seed)
    with open(pos_path, "w") as fh:
        write_positions_csv(fh, ps)
    print(f"wrote {m} edges to {edges_path} and {params.n} positions to {pos_path}")
    return 0


def cmd_cc(args) -> int:
    if args.positions:
        r1, r2 = _radii(args)
        with open(args.positions) as fh:
            ps = read_positions_csv(fh)
        params = AnnulusParams(ps.n, r1, r2)
    else:
        params = _params(args)
        ps = sample_positions(params, RngSeed(args.seed))
    counts = count_graph(ps, params)
    cn = clustering_coefficient(counts)
    if args.format == "json":
        payload = counts.to_json(params)
        payload["cn"] = cn
        sys.stdout.write(dumps_json(payload))
        return 0
    print(f"ordered_triangles={counts.ordered_triangles} ordered_paths={counts.ordered_paths}")
    print("C_n = undefined (no 2-paths)" if cn is None else f"C_n = {cn!r}")
    return 0


def cmd_limit(args) -> int:
    if args.lam is not None:
        lam = args.lam
        if not lam > 1.0:
            raise UsageError(f"--lambda must exceed 1 so that r1 > r2, got {lam}")
    elif args.r1 is not None and args.r2 is not None:
        lam = math.inf if args.r2 == 0 else args.r1 / args.r2
        AnnulusParams(1, args.r1, args.r2)
    else:
        raise UsageError("give --lambda, or --r1 and --r2")
    if math.isinf(lam):
        value = 0.75
    elif lam <= 2.0:
        print(
            f"warning: lambda={lam:g} <= 2 is outside the regime 2*r2 < r1; "
            "triangles cannot form, so the limit is 0",
            file=sys.stderr,
        )
        value = 0.0
    else:
        value = 0.75 * (lam - 2.0) ** 2 / (lam - 1.0) ** 2
    print(repr(value))
    return 0


def cmd_sigma(args) -> int:
    r1, r2 = _radii(args)
    kp = KernelParams(r1, r2)
    if args.sigma_method == "cubature":
        est = sigma2_cubature(kp, args.sigma_budget or DEFAULT_GRID)
    else:
        est = sigma2_monte_carlo(kp, args.sigma_budget or DEFAULT_MC_SAMPLES, RngSeed(args.seed))
    payload = est.to_json()
    payload["ratio_r1_cubed"] = est.value / r1**3
    sys.stdout.write(dumps_json(payload))
    return 0


def cmd_clt(args) -> int:
    params = _params(args)
    out = Path(args.out)
    spec = ExperimentSpec(
        params,
        args.replicates,
        args.seed,
        args.sigma_method,
        args.sigma_budget,
        str(out),
        args.timing,
    )
    spec.check_clt_regime()
    out.parent.mkdir(parents=True, exist_ok=True)
    summary, _, sigma = run_clt_experiment(spec, threads=_threads(args))
    summary_path = Path(args.summary) if args.summary else out.with_suffix(".summary.json")
    write_summary(summary_path, summary, spec, sigma)
    sys.stdout.write(summary_path.read_text())
    for name, ok in summary.verdict().items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 0


def cmd_sweep(args) -> int:
    lines = []
    if args.kind == "sigma":
        if args.lam is None or not args.r1_values:
            raise UsageError("sigma sweep needs --lambda and --r1-values")
        methods = ["cubature", "monte_carlo"] if args.sigma_method == "both" else [args.sigma_method]
        lines.append("r1,r2,method,sigma2,std_error,ratio,ratio_se")
        for method in methods:
            budget = args.sigma_budget or (DEFAULT_GRID if method == "cubature" else DEFAULT_MC_SAMPLES)
            for row in run_sigma_scaling(args.lam, args.r1_values, budget, method, RngSeed(args.seed)):
                lines.append(
                    ",".join([fmt_float(row.r1), fmt_float(row.r2), row.method,
                              fmt_float(row.sigma2), fmt_float(row.std_error),
                              fmt_float(row.ratio), fmt_float(row.ratio_se)])
                )
    else:
        if not args.n_values:
            raise UsageError("convergence sweep needs --n-values")
        r1, r2 = _radii(args)
        base = ExperimentSpec(AnnulusParams(max(args.n_values), r1, r2), args.replicates, args.seed)
        lines.append("n,limit,replicates,excluded,mean_cn,mean_abs_dev,sd_abs_dev,sd_cn")
        for row in run_convergence_experiment(base, args.n_values, threads=_threads(args)):
            lines.append(
                ",".join([str(row.n), fmt_float(row.limit), str(row.replicates), str(row.excluded),
                          fmt_float(row.mean_cn), fmt_float(row.mean_abs_dev),
                          fmt_float(row.sd_abs_dev), fmt_float(row.sd_cn)])
            )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ragclust",
        description="Random annulus graphs: clustering coefficient, limits and CLT checks.",
        epilog=REGIME_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, help=help_, description=help_, epilog=REGIME_HELP,
                              formatter_class=argparse.RawDescriptionHelpFormatter)

    p = add("generate", "sample one graph and write its edge list and positions")
    _add_model_flags(p)
    p.add_argument("--out", default="rag", help="output prefix (writes PREFIX.edges.txt, PREFIX.positions.csv)")
    p.set_defaults(func=cmd_generate)

    p = add("cc", "global clustering coefficient of one graph")
    _add_model_flags(p)
    p.add_argument("--positions", help="positions CSV (index,position) instead of sampling")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_cc)

    p = add("limit", "asymptotic clustering coefficient (3/4)(lambda-2)^2/(lambda-1)^2")
    _add_model_flags(p, need_n=False)
    p.set_defaults(func=cmd_limit)

    p = add("sigma", "estimate sigma^2 = E[h(X1,X2,X3) h(X1,X2,X4)]")
    _add_model_flags(p, need_n=False)
    _add_sigma_flags(p)
    p.set_defaults(func=cmd_sigma)

    p = add("clt", "replicate the standardized coefficient and compare with N(0,1)")
    _add_model_flags(p)
    _add_sigma_flags(p)
    p.add_argument("--replicates", type=int, default=300)
    p.add_argument("--out", default="clt_records.csv", help="records CSV path")
    p.add_argument("--summary", help="summary JSON path (default: OUT with .summary.json)")
    p.add_argument("--timing", action="store_true", help="fill the duration_ms column")
    p.add_argument("--threads", type=int, help="worker threads (default $RAG_THREADS or CPU count)")
    p.set_defaults(func=cmd_clt)

    p = add("sweep", "sigma^2/r1^3 scaling or convergence of C_n to its limit")
    p.add_argument("--kind", choices=["sigma", "convergence"], default="sigma")
    _add_model_flags(p, need_n=False)
    p.add_argument("--sigma-method", choices=["cubature", "monte_carlo", "both"], default="cubature")
    p.add_argument("--sigma-budget", type=int)
    p.add_argument("--r1-values", type=float, nargs="+")
    p.add_argument("--n-values", type=int, nargs="+")
    p.add_argument("--replicates", type=int, default=50)
    p.add_argument("--out", help="also write the CSV table here")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    for flag in ("n", "replicates", "threads", "sigma_budget"):
        value = getattr(args, flag, None)
        if value is not None and value < 1:
            parser.error(f"--{flag.replace('_', '-')} must be positive, got {value}")
    try:
        return args.func(args)
    except (UsageError, InvalidParams, RegimeViolation) as exc:
        parser.error(str(exc))
    except ValueError as exc:
        parser.error(str(exc))
    except (OSError, TooManyExclusions, RagError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
