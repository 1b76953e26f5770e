"""Problem generators, recovery metrics and the benchmark runner.

Two experiment families are reproduced at configurable scale:

* random consistent systems ``Ax = b`` with Gaussian data, solved with the
  orthant as domain constraint and a singleton target, and
* sparse-signal recovery from noisy Gaussian measurements.

All randomness is drawn from a counter-based generator keyed by
``(seed, trial)``: the same key always produces bit-identical data, trials
never share generator state, and reruns of a benchmark reproduce every
non-timing output byte for byte.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

import numpy as np

from .baselines import CqOptions, McqOptions, solve_cq, solve_mcq
from .dca import DcaOptions, solve_dca
from .fbsplit import FbOptions, solve_fb
from .minefuku import MfOptions, solve_mf
from .problem import ProblemSpec, SolveResult
from .sets import FullSpace, NonnegativeOrthant, Singleton

__all__ = [
    "RandomSpec",
    "SparseSpec",
    "Instance",
    "RecoveryMetrics",
    "gen_random_problem",
    "gen_sparse_recovery",
    "recovery_metrics",
    "BenchConfig",
    "parse_bench_config",
    "run_benchmark",
    "ALGORITHMS",
    "write_atomic",
]

ALGORITHMS = ("dca", "fb", "mf", "cq", "mcq")

SUPPORT_THRESHOLD_FACTOR = 1e-4


@dataclass(frozen=True)
class RandomSpec:
    seed: int
    m: int
    n: int
    trials: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("dimensions must be positive")
        if self.trials < 1:
            raise ValueError("trials must be positive")


@dataclass(frozen=True)
class SparseSpec:
    seed: int
    m: int
    n: int
    sparsity: int
    noise_variance: float
    gamma: float

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("dimensions must be positive")
        if not 0 <= self.sparsity <= self.n:
            raise ValueError("sparsity must lie in [0, n]")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be nonnegative")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class Instance:
    """A generated problem with its ground truth and suggested l1 level."""

    problem: ProblemSpec
    x_true: np.ndarray
    x0: np.ndarray
    t_level: float


@dataclass(frozen=True)
class RecoveryMetrics:
    rel_l2_error: float
    support_precision: float
    support_recall: float
    iterations: int
    wall_ms: float


def _rng(seed: int, trial: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(trial)])
    return np.random.Generator(np.random.Philox(key=key))


def gen_random_problem(spec: RandomSpec, trial: int, gamma: float = 0.6) -> Instance:
    """Consistent Gaussian system: ``b = A @ x_true`` with ``x_true >= 0``.

    The domain constraint is the nonnegative orthant and the target the
    singleton ``{b}``, so the feasibility residual of a projection method can
    reach zero.  ``x0`` is the origin.
    """
    if not 0 <= trial < spec.trials:
        raise ValueError(f"trial {trial} out of range [0, {spec.trials})")
    rng = _rng(spec.seed, trial)
    A = rng.standard_normal((spec.m, spec.n))
    x_true = np.abs(rng.standard_normal(spec.n))
    b = A @ x_true
    problem = ProblemSpec(
        A=A, C=NonnegativeOrthant(spec.n), Q=Singleton(b), gamma=gamma
    )
    return Instance(
        problem=problem,
        x_true=x_true,
        x0=np.zeros(spec.n),
        t_level=float(np.sum(np.abs(x_true))),
    )


def gen_sparse_recovery(spec: SparseSpec, trial: int = 0) -> Instance:
    """Sparse spike signal measured by a Gaussian matrix with additive noise.

    The signal has ``sparsity`` entries of magnitude one with random signs at
    uniformly drawn positions; measurements are ``b = A @ x_true + noise``
    with i.i.d. Gaussian noise of the requested variance.  The domain
    constraint is the full space and ``t_level`` carries the l1 norm of the
    truth for the level-set baseline.
    """
    rng = _rng(spec.seed, trial)
    A = rng.standard_normal((spec.m, spec.n))
    x_true = np.zeros(spec.n)
    if spec.sparsity > 0:
        support = rng.choice(spec.n, size=spec.sparsity, replace=False)
        x_true[support] = rng.choice([-1.0, 1.0], size=spec.sparsity)
    noise = (
        np.sqrt(spec.noise_variance) * rng.standard_normal(spec.m)
        if spec.noise_variance > 0
        else np.zeros(spec.m)
    )
    b = A @ x_true + noise
    problem = ProblemSpec(
        A=A, C=FullSpace(spec.n), Q=Singleton(b), gamma=spec.gamma
    )
    t_level = float(np.sum(np.abs(x_true)))
    if t_level == 0.0:
        t_level = 1.0
    return Instance(
        problem=problem, x_true=x_true, x0=np.zeros(spec.n), t_level=t_level
    )


def recovery_metrics(x_hat, x_true, iterations: int, wall_ms: float) -> RecoveryMetrics:
    """Relative l2 error and support precision/recall against the truth.

    Support membership uses the threshold ``1e-4 * max|x_true|`` on both
    vectors.  With no predicted (resp. true) support the precision (resp.
    recall) defaults to 1.
    """
    x_hat = np.asarray(x_hat, dtype=float)
    x_true = np.asarray(x_true, dtype=float)
    norm_true = float(np.linalg.norm(x_true))
    if norm_true > 0:
        rel = float(np.linalg.norm(x_hat - x_true)) / norm_true
    else:
        rel = 0.0 if float(np.linalg.norm(x_hat)) == 0.0 else float("inf")
    thresh = SUPPORT_THRESHOLD_FACTOR * (float(np.max(np.abs(x_true))) if x_true.size else 0.0)
    pred = np.abs(x_hat) > thresh
    true = np.abs(x_true) > thresh
    tp = int(np.sum(pred & true))
    precision = tp / int(np.sum(pred)) if np.any(pred) else 1.0
    recall = tp / int(np.sum(true)) if np.any(true) else 1.0
    return RecoveryMetrics(
        rel_l2_error=rel,
        support_precision=float(precision),
        support_recall=float(recall),
        iterations=iterations,
        wall_ms=wall_ms,
    )


# ---------------------------------------------------------------------------
# Benchmark runner
# ---------------------------------------------------------------------------


@dataclass
class BenchConfig:
    """Flat benchmark configuration (mirrors the key=value config file)."""

    kind: str  # "random" | "sparse"
    seed: int = 0
    m: int = 40
    n: int = 100
    trials: int = 10
    gamma: float = 0.6
    sparsity: int = 10
    noise_variance: float = 1e-4
    algos: tuple[str, ...] = ("dca", "fb", "mf", "cq", "mcq")
    out_dir: str = "bench_out"
    max_iter: int = 1000
    step_tol: float = 1e-5
    traces: bool = False
    quantiles: bool = True

    def __post_init__(self):
        if self.kind not in ("random", "sparse"):
            raise ValueError("kind must be 'random' or 'sparse'")
        unknown = [a for a in self.algos if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; choose from {ALGORITHMS}")


_CONFIG_TYPES = {
    "seed": int,
    "m": int,
    "n": int,
    "trials": int,
    "gamma": float,
    "k": int,
    "noise_variance": float,
    "algos": str,
    "out_dir": str,
    "max_iter": int,
    "step_tol": float,
    "traces": str,
    "quantiles": str,
}


def parse_bench_config(path, kind: str) -> BenchConfig:
    """Read a flat ``key=value`` config file (``#`` starts a comment)."""
    values = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _CONFIG_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _CONFIG_TYPES[key](val)
    kwargs = {"kind": kind}
    for key, val in values.items():
        if key == "k":
            kwargs["sparsity"] = val
        elif key == "algos":
            kwargs["algos"] = tuple(a.strip() for a in val.split(",") if a.strip())
        elif key in ("traces", "quantiles"):
            kwargs[key] = val.lower() in ("1", "true", "yes", "on")
        else:
            kwargs[key] = val
    return BenchConfig(**kwargs)


def _solve_one(algo: str, inst: Instance, cfg: BenchConfig) -> SolveResult:
    P = inst.problem
    if algo == "dca":
        return solve_dca(
            P, inst.x0, DcaOptions(max_outer=cfg.max_iter, step_tol=cfg.step_tol)
        )
    if algo == "fb":
        # The scheme requires an unconstrained domain; benchmark instances
        # with a different C run it on the unconstrained variant.
        if not isinstance(P.C, FullSpace):
            P = ProblemSpec(A=P.A, C=FullSpace(P.n), Q=P.Q, gamma=P.gamma)
        return solve_fb(
            P, inst.x0, FbOptions(max_iter=cfg.max_iter, step_tol=cfg.step_tol)
        )
    if algo == "mf":
        return solve_mf(
            P, inst.x0, MfOptions(max_iter=cfg.max_iter, step_tol=cfg.step_tol)
        )
    if algo == "cq":
        return solve_cq(
            P, inst.x0, CqOptions(max_iter=cfg.max_iter, step_tol=cfg.step_tol)
        )
    if algo == "mcq":
        return solve_mcq(
            P,
            inst.x0,
            McqOptions(t=inst.t_level, max_iter=cfg.max_iter, step_tol=cfg.step_tol),
        )
    raise ValueError(f"unknown algorithm {algo!r}")


def _instance(cfg: BenchConfig, trial: int) -> Instance:
    if cfg.kind == "random":
        spec = RandomSpec(seed=cfg.seed, m=cfg.m, n=cfg.n, trials=cfg.trials)
        return gen_random_problem(spec, trial, gamma=cfg.gamma)
    spec = SparseSpec(
        seed=cfg.seed,
        m=cfg.m,
        n=cfg.n,
        sparsity=cfg.sparsity,
        noise_variance=cfg.noise_variance,
        gamma=cfg.gamma,
    )
    return gen_sparse_recovery(spec, trial)


def write_atomic(path, content: str) -> None:
    """Write via a temporary file and rename, so readers never see a prefix."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(content)
    os.replace(tmp, path)


_SUMMARY_HEADER = (
    "trial,algo,status,iterations,objective,sfp_residual,"
    "rel_l2_error,support_precision,support_recall,l1_norm,wall_ms"
)


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def _trace_csv(result: SolveResult) -> str:
    lines = ["iter,objective,residual,step_norm,elapsed_ms"]
    for rec in result.trace:
        lines.append(
            f"{rec.k},{_fmt(rec.objective)},{_fmt(rec.sfp_residual)},"
            f"{_fmt(rec.step_norm)},{rec.elapsed_ms:.3f}"
        )
    return "\n".join(lines) + "\n"


QUANTILE_LEVELS = (0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0)


def _quantile_csv(traces: list[SolveResult]) -> str:
    """Per-iteration quantiles across trials of residual and objective.

    Shorter traces are extended with their final value so every iteration row
    aggregates all trials.
    """
    max_len = max(len(r.trace) for r in traces)
    res = np.empty((len(traces), max_len))
    obj = np.empty((len(traces), max_len))
    for i, r in enumerate(traces):
        rv = np.array([rec.sfp_residual for rec in r.trace])
        ov = np.array([rec.objective for rec in r.trace])
        res[i, : rv.size] = rv
        res[i, rv.size :] = rv[-1]
        obj[i, : ov.size] = ov
        obj[i, ov.size :] = ov[-1]
    header = ["iter"]
    header += [f"residual_q{int(q * 100)}" for q in QUANTILE_LEVELS]
    header += [f"objective_q{int(q * 100)}" for q in QUANTILE_LEVELS]
    lines = [",".join(header)]
    res_q = np.quantile(res, QUANTILE_LEVELS, axis=0)
    obj_q = np.quantile(obj, QUANTILE_LEVELS, axis=0)
    for j in range(max_len):
        row = [str(j)]
        row += [_fmt(v) for v in res_q[:, j]]
        row += [_fmt(v) for v in obj_q[:, j]]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def run_benchmark(cfg: BenchConfig) -> list[dict]:
    """Run every (trial, algorithm) pair and write the report files.

    Produces ``summary.csv`` (one row per pair, sorted by trial then
    algorithm), optional per-run ``trace_<algo>_<trial>.csv`` files, and
    per-algorithm quantile files.  A solver raising an exception yields a row
    with status ``error``; the run continues.
    """
    os.makedirs(cfg.out_dir, exist_ok=True)
    rows: list[dict] = []
    traces_by_algo: dict[str, list[SolveResult]] = {a: [] for a in cfg.algos}
    for trial in range(cfg.trials):
        inst = _instance(cfg, trial)
        for algo in sorted(cfg.algos):
            t_start = time.perf_counter()
            try:
                result = _solve_one(algo, inst, cfg)
            except Exception as exc:  # solver failure: report and continue
                rows.append(
                    {
                        "trial": trial,
                        "algo": algo,
                        "status": "error",
                        "iterations": 0,
                        "objective": float("nan"),
                        "sfp_residual": float("nan"),
                        "rel_l2_error": float("nan"),
                        "support_precision": float("nan"),
                        "support_recall": float("nan"),
                        "l1_norm": float("nan"),
                        "wall_ms": (time.perf_counter() - t_start) * 1e3,
                        "message": str(exc),
                    }
                )
                continue
            wall_ms = (time.perf_counter() - t_start) * 1e3
            metrics = recovery_metrics(
                result.x, inst.x_true, result.iterations, wall_ms
            )
            last = result.trace[-1]
            rows.append(
                {
                    "trial": trial,
                    "algo": algo,
                    "status": result.status.value,
                    "iterations": result.iterations,
                    "objective": last.objective,
                    "sfp_residual": last.sfp_residual,
                    "rel_l2_error": metrics.rel_l2_error,
                    "support_precision": metrics.support_precision,
                    "support_recall": metrics.support_recall,
                    "l1_norm": float(np.sum(np.abs(result.x))),
                    "wall_ms": wall_ms,
                    "message": result.message,
                }
            )
            traces_by_algo[algo].append(result)
            if cfg.traces:
                write_atomic(
                    os.path.join(cfg.out_dir, f"trace_{algo}_{trial}.csv"),
                    _trace_csv(result),
                )
    rows.sort(key=lambda r: (r["trial"], r["algo"]))
    lines = [_SUMMARY_HEADER]
    for r in rows:
        lines.append(
            f"{r['trial']},{r['algo']},{r['status']},{r['iterations']},"
            f"{_fmt(r['objective'])},{_fmt(r['sfp_residual'])},"
            f"{_fmt(r['rel_l2_error'])},{_fmt(r['support_precision'])},"
            f"{_fmt(r['support_recall'])},{_fmt(r['l1_norm'])},{r['wall_ms']:.3f}"
        )
    write_atomic(os.path.join(cfg.out_dir, "summary.csv"), "\n".join(lines) + "\n")
    if cfg.quantiles:
        for algo, results in traces_by_algo.items():
            if results:
                write_atomic(
                    os.path.join(cfg.out_dir, f"quantiles_{algo}.csv"),
                    _quantile_csv(results),
                )
    return rows
