"""Command line entry point; every subcommand writes CSV."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .datagen import MixtureParams, MixtureRegression, candidate, sample_dataset
from .harness import GridSpec, calibrate_type1, consistency_curve, grid_experiment, to_csv
from .kernels import KernelSpec
from .resampling import TestConfig, child_seed, run_test


def _pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from None
    return lo, hi


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--n", type=int, default=50, help="sample size")
    parser.add_argument("--m", type=int, default=40, help="number of datasets incl. the original")
    parser.add_argument("--q", type=int, default=None, help="upper acceptance bound (default m-2)")
    parser.add_argument("--p-lo", type=int, default=1, help="lower acceptance bound")
    parser.add_argument("--estimator", choices=["vvkt", "pet"], default="vvkt")
    parser.add_argument("--sigma", type=float, default=0.5, help="Gaussian kernel bandwidth")
    parser.add_argument("--lambda", dest="lam", type=float, default=None,
                        help="ridge parameter (default n^-1/4)")
    parser.add_argument("--k", type=int, default=None, help="kNN neighbors (default floor(sqrt(n)))")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="write CSV here instead of stdout")
    parser.add_argument("--workers", type=int, default=1)


def _candidate_args(parser: argparse.ArgumentParser, required: bool):
    parser.add_argument("--cand-p", type=float, default=None if required else 0.5)
    parser.add_argument("--cand-lambda", type=float, default=None if required else 1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmetest",
        description="Distribution-free kernel mean embedding tests for binary classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run one test on a synthetic sample")
    _common(p)
    _candidate_args(p, required=False)

    p = sub.add_parser("calibrate", help="Monte Carlo type I error under the null")
    _common(p)
    p.add_argument("--trials", type=int, default=1000)

    p = sub.add_parser("grid", help="ranks over a (p, lambda) candidate grid")
    _common(p)
    p.add_argument("--grid-p", type=_pair, default=(0.2, 0.8))
    p.add_argument("--grid-lambda", type=_pair, default=(0.5, 1.5))
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--shared-data", action=argparse.BooleanOptionalAction, default=True,
                   help="test one dataset against every candidate (default) or draw one per cell")

    p = sub.add_parser("consistency", help="mean rank of a false candidate against sample size")
    _common(p)
    _candidate_args(p, required=False)
    p.set_defaults(cand_p=0.3, cand_lambda=1.3)
    p.add_argument("--sizes", type=_int_list, default=[50, 100, 200, 400])
    p.add_argument("--repeats", type=int, default=50)
    return parser


def _config(args) -> TestConfig:
    return TestConfig(
        m=args.m,
        p_lo=args.p_lo,
        q_hi=args.q,
        estimator=args.estimator,
        kernel=KernelSpec(args.sigma),
        lam=args.lam,
        k_neighbors=args.k,
        seed=args.seed,
    )


def _run(args) -> str:
    config = _config(args)
    params = MixtureParams()
    if args.command == "test":
        sample = sample_dataset(params, args.n, np.random.default_rng(child_seed(args.seed, 0)))
        f = candidate(args.cand_p, args.cand_lambda)
        out = run_test(sample, f, config, seed=child_seed(args.seed, 1))
        header = ["rank", "m", "normalized_rank", "accepted"] + [f"z_{j}" for j in range(config.m)]
        row = [out.rank, config.m, out.normalized_rank, out.accepted, *out.z_values]
        return to_csv(header, [row])
    if args.command == "calibrate":
        rep = calibrate_type1(config, params, args.n, args.trials, workers=args.workers)
        header = ["trials", "m", "p_lo", "q_hi", "accepted", "acceptance_rate",
                  "expected_acceptance", "chi_square_stat", "chi_square_pvalue"]
        header += [f"count_rank_{r}" for r in range(1, config.m + 1)]
        row = [rep.trials, rep.m, rep.p_lo, rep.q_hi, rep.accepted, rep.acceptance_rate,
               rep.expected_acceptance, rep.chi_square_stat, rep.chi_square_pvalue,
               *rep.rank_histogram.tolist()]
        return to_csv(header, [row])
    if args.command == "grid":
        spec = GridSpec(args.grid_p, args.grid_lambda, args.step)
        rows = grid_experiment(spec, config, params, args.n, shared_data=args.shared_data,
                               workers=args.workers)
        return to_csv(["p", "lambda", "rank", "normalized_rank"], rows)
    rows = consistency_curve((args.cand_p, args.cand_lambda), config, params, args.sizes,
                             args.repeats, workers=args.workers)
    return to_csv(["n", "mean_rank", "mean_normalized_rank"], rows)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = _run(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"cmetest: error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
