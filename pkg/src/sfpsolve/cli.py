"""Command-line interface.

Subcommands::

    solve         run one solver on a problem given by files and set specs
    bench-random  random consistent-system benchmark from a config file
    bench-sparse  sparse-recovery benchmark from a config file
    prox-check    compare the closed-form l1-l2 prox against a grid oracle

Exit codes: 0 on success, 1 when a solver stops at its iteration limit
without converging, 2 on configuration or parse errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .baselines import CqOptions, McqOptions, solve_cq, solve_mcq
from .dca import DcaOptions, solve_dca
from .fbsplit import FbOptions, solve_fb
from .harness import (
    ALGORITHMS,
    parse_bench_config,
    run_benchmark,
    write_atomic,
)
from .inner import InnerOptions
from .linops import read_matrix, read_vector
from .minefuku import MfOptions, solve_mf
from .oracles import prox_check
from .problem import ConfigurationError, ProblemSpec, Status
from .sets import FullSpace, parse_set

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_CONFIG = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfpsolve",
        description="Solvers and benchmarks for l1-l2 regularized split feasibility problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve a single problem instance")
    ps.add_argument("--algo", required=True, choices=ALGORITHMS)
    ps.add_argument("--A", required=True, help="matrix file (first line 'rows cols')")
    ps.add_argument("--Q", required=True, help="target set spec, e.g. singleton:b.vec")
    ps.add_argument("--C", default=None, help="domain set spec (default fullspace:n)")
    ps.add_argument("--gamma", type=float, default=None, help="regularization weight")
    ps.add_argument("--x0", default=None, help="start vector file (default zeros)")
    ps.add_argument("--trace", default=None, help="write per-iteration CSV here")
    ps.add_argument("--max-iter", type=int, default=1000)
    ps.add_argument("--step-tol", type=float, default=1e-5)
    ps.add_argument("--step", type=float, default=None, help="fb/cq step size")
    ps.add_argument("--inner-solver", default="dr-in-fb", choices=["fb-in-dr", "dr-in-fb"])
    ps.add_argument("--kappa", type=float, default=None, help="inner solver scale")
    ps.add_argument("--inner-tol", type=float, default=1e-6)
    ps.add_argument("--inner-max", type=int, default=2000)
    ps.add_argument("--inner-tau", type=float, default=1.0, help="inner DR relaxation in (0,2)")
    ps.add_argument("--inner-lambda", type=float, default=1.0, help="inner FB relaxation in (0,1]")
    ps.add_argument("--inner-step-fraction", type=float, default=0.9)
    ps.add_argument("--inner-budget-base", type=int, default=5)
    ps.add_argument("--inner-budget-cap", type=int, default=50)
    ps.add_argument("--zero-tol", type=float, default=None, help="dca zero-iterate threshold")
    ps.add_argument("--mu", type=float, default=None, help="mf quadratic shift")
    ps.add_argument("--lambda-max", type=float, default=2.0, help="mf line-search bracket")
    ps.add_argument("--gs-evals", type=int, default=40, help="mf golden-section budget")
    ps.add_argument("--stationarity-tol", type=float, default=1e-5)
    ps.add_argument("--t", type=float, default=None, help="mcq l1 level")
    ps.add_argument("--sigma", type=float, default=1.0, help="mcq initial step scale")
    ps.add_argument("--l", type=float, default=0.5, help="mcq backtracking ratio")
    ps.add_argument("--mu-armijo", type=float, default=0.5, help="mcq acceptance constant")

    for kind in ("bench-random", "bench-sparse"):
        pb = sub.add_parser(kind, help=f"run the {kind.split('-')[1]} benchmark")
        pb.add_argument("--config", required=True, help="flat key=value config file")
        if kind == "bench-sparse":
            pb.add_argument(
                "--paper-scale",
                action="store_true",
                help="override dimensions to m=120, n=512, k=50",
            )

    pc = sub.add_parser("prox-check", help="grid-oracle check of the l1-l2 prox")
    pc.add_argument("--samples", type=int, default=500)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--grid-step", type=float, default=1e-3)
    pc.add_argument("--tol", type=float, default=5e-3)
    return parser


def _trace_csv_lines(result) -> str:
    lines = ["iter,objective,residual,step_norm,elapsed_ms"]
    for rec in result.trace:
        lines.append(
            f"{rec.k},{rec.objective:.10g},{rec.sfp_residual:.10g},"
            f"{rec.step_norm:.10g},{rec.elapsed_ms:.3f}"
        )
    return "\n".join(lines) + "\n"


def _run_solve(args) -> int:
    A = read_matrix(args.A)
    m, n = A.shape
    Q = parse_set(args.Q)
    C = parse_set(args.C) if args.C else FullSpace(n)
    needs_gamma = args.algo in ("dca", "fb", "mf")
    if needs_gamma and args.gamma is None:
        raise ConfigurationError(f"--gamma is required for --algo {args.algo}")
    gamma = args.gamma if args.gamma is not None else 1.0
    problem = ProblemSpec(A=A, C=C, Q=Q, gamma=gamma)
    x0 = read_vector(args.x0) if args.x0 else np.zeros(n)

    if args.algo == "dca":
        opts = DcaOptions(
            inner_solver=args.inner_solver,
            inner=InnerOptions(
                kappa=args.kappa,
                tau=args.inner_tau,
                lambda_relax=args.inner_lambda,
                step_fraction=args.inner_step_fraction,
                budget_base=args.inner_budget_base,
                budget_cap=args.inner_budget_cap,
                tol=args.inner_tol,
                outer_max=args.inner_max,
            ),
            max_outer=args.max_iter,
            step_tol=args.step_tol,
            zero_tol=args.zero_tol,
        )
        result = solve_dca(problem, x0, opts)
    elif args.algo == "fb":
        result = solve_fb(
            problem,
            x0,
            FbOptions(step=args.step, max_iter=args.max_iter, step_tol=args.step_tol),
        )
    elif args.algo == "mf":
        result = solve_mf(
            problem,
            x0,
            MfOptions(
                mu_shift=args.mu,
                lambda_max=args.lambda_max,
                golden_evals=args.gs_evals,
                max_iter=args.max_iter,
                step_tol=args.step_tol,
                stationarity_tol=args.stationarity_tol,
            ),
        )
    elif args.algo == "cq":
        result = solve_cq(
            problem,
            x0,
            CqOptions(step=args.step, max_iter=args.max_iter, step_tol=args.step_tol),
        )
    else:  # mcq
        if args.t is None:
            raise ConfigurationError("--t is required for --algo mcq")
        result = solve_mcq(
            problem,
            x0,
            McqOptions(
                t=args.t,
                l=args.l,
                mu=args.mu_armijo,
                sigma=args.sigma,
                max_iter=args.max_iter,
                step_tol=args.step_tol,
            ),
        )

    if args.trace:
        write_atomic(args.trace, _trace_csv_lines(result))
    last = result.trace[-1]
    print(f"status={result.status.value} iters={result.iterations} objective={last.objective:.10g}")
    return EXIT_OK if result.status != Status.MAX_ITERATIONS else EXIT_NOT_CONVERGED


def _run_bench(args, kind: str) -> int:
    cfg = parse_bench_config(args.config, kind)
    if kind == "sparse" and getattr(args, "paper_scale", False):
        cfg.m, cfg.n, cfg.sparsity = 120, 512, 50
    rows = run_benchmark(cfg)
    failures = sum(1 for r in rows if r["status"] == "error")
    dims = f"m={cfg.m} n={cfg.n}" + (f" k={cfg.sparsity}" if kind == "sparse" else "")
    print(
        f"wrote {len(rows)} rows to {cfg.out_dir}/summary.csv "
        f"({dims}, {failures} failures)"
    )
    return EXIT_OK


def _run_prox_check(args) -> int:
    gap = prox_check(count=args.samples, seed=args.seed, step=args.grid_step)
    print(f"max_gap={gap:.6g}")
    return EXIT_OK if gap <= args.tol else EXIT_NOT_CONVERGED


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return _run_solve(args)
        if args.command == "bench-random":
            return _run_bench(args, "random")
        if args.command == "bench-sparse":
            return _run_bench(args, "sparse")
        if args.command == "prox-check":
            return _run_prox_check(args)
    except (ConfigurationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
