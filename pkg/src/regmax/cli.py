"""Command-line front end.

Exit codes: 0 when every configured tolerance passed, 1 when a tolerance
failed or an estimate was undefined, 2 for usage errors (argparse's own
convention).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .enumeration import (
    COUNT_CAP,
    ENUMERATE_CAP,
    count_graphs,
    exact_common_neighbour_dist,
    mckay_log_count,
)
from .experiments import (
    ExperimentConfig,
    coefficients_summary,
    load_config,
    run_experiment,
)
from .graphs import RegularityParams, pair_count_matrix
from .sampling import ChainConfig, SwitchChain
from .theory import (
    binom_approx_params,
    deviation_threshold,
    scaling_constants,
    tail_prob_asymptotic,
)


def _add_size_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="number of vertices")
    p.add_argument("--d", type=int, default=None, help="degree (or use --lambda)")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="density d/(n-1)")


def _params(args: argparse.Namespace, parser: argparse.ArgumentParser) -> RegularityParams:
    try:
        if args.d is not None:
            return RegularityParams.from_degree(args.n, args.d)
        if args.lam is not None:
            return RegularityParams.from_density(args.n, args.lam)
    except ValueError as exc:
        parser.error(str(exc))
    parser.error("one of --d or --lambda is required")
    raise AssertionError("unreachable")


def _emit(doc: dict) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _cmd_theory(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    params = _params(args, parser)
    c = scaling_constants(params)
    approx = binom_approx_params(params)
    _emit(
        {
            "n": params.n,
            "d": params.d,
            "lambda": params.lam,
            "a": c.a,
            "b": c.b,
            "binom_N": approx.N,
            "binom_p": approx.p,
            "deviation_threshold": deviation_threshold(params.n),
            "upper_tail_at_x": tail_prob_asymptotic(params, args.x, "upper"),
            "lower_tail_at_xprime": tail_prob_asymptotic(params, args.x_prime, "lower"),
        }
    )
    return 0


def _cmd_enumerate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    params = _params(args, parser)
    if params.n > COUNT_CAP:
        parser.error(f"exact counting is capped at n <= {COUNT_CAP}")
    total = count_graphs([params.d] * params.n)
    dist = exact_common_neighbour_dist(params.n, params.d, args.condition)
    _emit(
        {
            "n": params.n,
            "d": params.d,
            "graph_count": total,
            "mckay_log_count": mckay_log_count([params.d] * params.n),
            "condition": args.condition,
            "support": list(dist.support),
            "probabilities": [c / dist.total for c in dist.counts],
        }
    )
    return 0


def _cmd_sample(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    import numpy as np

    params = _params(args, parser)
    cfg = ChainConfig(
        seed=args.seed, burn_in=args.burn_in, thinning=args.thinning, engine=args.engine
    )
    chain = SwitchChain(params, cfg)
    rows, cols = np.triu_indices(params.n, k=1)
    lines = ["sample,x_max,x_min,x_12"]
    for k, g in enumerate(chain.samples(args.samples)):
        vals = pair_count_matrix(g)[rows, cols]
        lines.append(f"{k},{vals.max()},{vals.min()},{vals[0]}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _report_exit(cfg: ExperimentConfig, out: str | None) -> int:
    report = run_experiment(cfg)
    if out:
        report.write(out)
    _emit({"summary": report.summary, "passed": report.passed})
    return 0 if report.passed else 1


def _cmd_validate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    cfg = ExperimentConfig(
        kind="oracle-validation",
        n=8,
        samples=args.samples,
        seed=args.seed,
        engine=args.engine,
    )
    return _report_exit(cfg, args.out)


def _cmd_couple(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    params = _params(args, parser)
    h_start = args.h_start
    if h_start is None:
        h_start = round(params.lam * params.lam * params.n)
    offset = 10 if args.h_target is None else args.h_target - h_start
    if abs(offset) > 10:
        parser.error(f"|h_target - h_start| must be <= 10, got {offset}")
    try:
        cfg = ExperimentConfig(
            kind="coupling",
            n=params.n,
            lam=params.lam,
            samples=args.runs,
            seed=args.seed,
            burn_in=args.burn_in,
            thinning=args.thinning,
            workers=args.workers,
            engine=args.engine,
            h_start=h_start,
            h_offset=offset,
            i=args.i,
            j=args.j,
        )
    except ValueError as exc:
        parser.error(str(exc))
    return _report_exit(cfg, args.out)


def _cmd_coefficients(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    params = _params(args, parser)
    try:
        doc = coefficients_summary(
            params.n,
            params.d,
            args.x,
            args.x_prime,
            args.samples,
            seed=args.seed,
            engine=args.engine,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(doc)
    return 0


def _cmd_experiment(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.d is not None and args.lam is not None:
        parser.error("--d and --lambda are mutually exclusive")
    overrides: dict = {"kind": args.experiment_kind}
    for key in ("n", "d", "lam", "samples", "seed", "burn_in", "thinning", "workers", "engine"):
        overrides[key] = getattr(args, key)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    try:
        cfg = load_config(args.config, overrides)
    except (ValueError, OSError) as exc:
        parser.error(str(exc))
    return _report_exit(cfg, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regmax",
        description="Extremes of common-neighbour counts in dense random regular graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", help="scaling constants and limit quantities")
    _add_size_flags(p)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--xprime", dest="x_prime", type=float, default=0.0)
    p.set_defaults(fn=_cmd_theory)

    p = sub.add_parser("enumerate", help="exact counts and pair distributions")
    _add_size_flags(p)
    p.add_argument(
        "--condition", choices=("edge", "nonedge", "unconditional"), default="unconditional"
    )
    p.set_defaults(fn=_cmd_enumerate)

    p = sub.add_parser("validate", help="exact-oracle cross checks")
    p.add_argument("--samples", type=int, default=12000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engine", default="auto")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("sample", help="sample graphs, emit pair statistics CSV")
    _add_size_flags(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=None)
    p.add_argument("--thinning", type=int, default=None)
    p.add_argument("--engine", default="auto")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_sample)

    p = sub.add_parser("couple", help="chained level-coupling runs")
    _add_size_flags(p)
    p.add_argument("--i", type=int, default=0, help="first anchor vertex")
    p.add_argument("--j", type=int, default=1, help="second anchor vertex")
    p.add_argument("--h-start", dest="h_start", type=int, default=None)
    p.add_argument("--h-target", dest="h_target", type=int, default=None)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=None)
    p.add_argument("--thinning", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--engine", default="auto")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_couple)

    p = sub.add_parser("coefficients", help="phi/delta estimates and the extremal bound")
    _add_size_flags(p)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--xprime", dest="x_prime", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engine", default="auto")
    p.set_defaults(fn=_cmd_coefficients)

    p = sub.add_parser("experiment", help="run a configured batch experiment")
    p.add_argument(
        "experiment_kind", choices=("gumbel", "local-limit", "coupling"), metavar="kind"
    )
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=None)
    p.add_argument("--thinning", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--engine", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.fn(args, parser)


if __name__ == "__main__":
    raise SystemExit(main())
