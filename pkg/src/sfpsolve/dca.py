"""Difference-of-convex outer loop for the l1-l2 regularized problem.

The objective splits as (convex fidelity + gamma*||.||_1 + indicator of C)
minus the concave part gamma*||.||_2.  Each step linearizes the concave part
at the current iterate (subgradient ``x/||x||_2``, zero at the origin) and
minimizes the resulting convex majorizer with one of the subproblem solvers
from :mod:`sfpsolve.inner`.  The objective sequence is monotonically
non-increasing.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .inner import INNER_SOLVERS, InnerOptions, SubproblemSpec
from .linops import as_vector
from .problem import (
    IterateRecord,
    ProblemSpec,
    SolveResult,
    Status,
    gamma_objective,
    has_exact_residual,
    sfp_residual_value,
    stationarity_residual,
)

__all__ = ["DcaOptions", "dca_step", "solve_dca"]


@dataclass
class DcaOptions:
    """Outer-loop controls.

    ``zero_tol`` decides when an iterate counts as the zero vector for the
    concave-part subgradient; ``None`` resolves to ``1e-12 * (1 + ||x0||)``.
    The inner tolerance is tightened to ``min(inner.tol, step_tol / 10)`` so
    the descent property survives inexact subproblem solves.
    """

    inner_solver: str = "dr-in-fb"
    inner: InnerOptions = field(default_factory=InnerOptions)
    max_outer: int = 1000
    step_tol: float = 1e-5
    zero_tol: float | None = None

    def __post_init__(self):
        if self.inner_solver not in INNER_SOLVERS:
            raise ValueError(
                f"unknown inner solver {self.inner_solver!r}; "
                f"choose from {sorted(INNER_SOLVERS)}"
            )
        if self.max_outer < 1:
            raise ValueError("max_outer must be at least 1")
        if self.step_tol <= 0:
            raise ValueError("step_tol must be positive")
        if self.zero_tol is not None and self.zero_tol < 0:
            raise ValueError("zero_tol must be nonnegative")


def _resolved_inner(opts: DcaOptions) -> InnerOptions:
    tol = min(opts.inner.tol, opts.step_tol / 10.0)
    return replace(opts.inner, tol=tol, record_trace=False)


def dca_step(
    P: ProblemSpec, x_k, opts: DcaOptions | None = None, zero_tol: float | None = None
) -> SolveResult:
    """One majorize-minimize step from ``x_k``.

    Builds the subproblem with linear term ``v = -gamma * x_k / ||x_k||_2``
    (``v = 0`` when ``||x_k|| <= zero_tol``) and solves it warm-started at
    ``x_k``.  If the inexact inner solve fails to improve the majorizer, the
    step returns ``x_k`` unchanged, which keeps the outer objective sequence
    non-increasing unconditionally.
    """
    if opts is None:
        opts = DcaOptions()
    x_k = as_vector(x_k, "x_k")
    if zero_tol is None:
        zero_tol = (
            opts.zero_tol
            if opts.zero_tol is not None
            else 1e-12 * (1.0 + float(np.linalg.norm(x_k)))
        )
    norm_x = float(np.linalg.norm(x_k))
    if norm_x <= zero_tol:
        v = np.zeros_like(x_k)
    else:
        v = -P.gamma * (x_k / norm_x)
    spec = SubproblemSpec(base=P, v=v)
    inner = INNER_SOLVERS[opts.inner_solver](spec, x_k, _resolved_inner(opts))
    # Majorizer safeguard: the subproblem objective dominates the true
    # objective and touches it at x_k, so refusing a non-improving inner
    # result preserves monotone descent.
    if spec.objective(inner.x) > spec.objective(x_k):
        inner.x = x_k.copy()
        inner.message = (inner.message + "; " if inner.message else "") + (
            "inner result discarded: no majorizer improvement"
        )
    return inner


def solve_dca(P: ProblemSpec, x0, opts: DcaOptions | None = None) -> SolveResult:
    """Run the outer loop from ``x0`` (projected onto ``C`` if needed).

    Stops when the step norm drops to ``step_tol`` (``CONVERGED``), when two
    consecutive iterates are both zero (``ZERO_STATIONARY``: the origin is
    already a fixed point of the scheme), or at ``max_outer`` iterations.
    """
    if opts is None:
        opts = DcaOptions()
    x = as_vector(x0, "x0")
    message = ""
    if not P.C.contains(x, 1e-9):
        x = P.C.project(x)
        message = "x0 projected onto C before start"
    zero_tol = (
        opts.zero_tol
        if opts.zero_tol is not None
        else 1e-12 * (1.0 + float(np.linalg.norm(x)))
    )

    t0 = time.perf_counter()
    trace = [
        IterateRecord(
            k=0,
            objective=gamma_objective(P, x),
            step_norm=0.0,
            grad_residual=stationarity_residual(P, x),
            elapsed_ms=0.0,
            sfp_residual=sfp_residual_value(P, x),
            l1_norm=float(np.sum(np.abs(x))),
        )
    ]
    status = Status.MAX_ITERATIONS
    for k in range(1, opts.max_outer + 1):
        prev_zero = float(np.linalg.norm(x)) <= zero_tol
        inner = dca_step(P, x, opts, zero_tol=zero_tol)
        x_next = inner.x
        step = float(np.linalg.norm(x_next - x))
        now_zero = float(np.linalg.norm(x_next)) <= zero_tol
        x = x_next
        trace.append(
            IterateRecord(
                k=k,
                objective=gamma_objective(P, x),
                step_norm=step,
                grad_residual=stationarity_residual(P, x),
                elapsed_ms=(time.perf_counter() - t0) * 1e3,
                sfp_residual=sfp_residual_value(P, x),
                l1_norm=float(np.sum(np.abs(x))),
            )
        )
        if prev_zero and now_zero:
            status = Status.ZERO_STATIONARY
            x = np.zeros_like(x)
            break
        if step <= opts.step_tol:
            status = Status.CONVERGED
            break
    return SolveResult(
        x=x,
        status=status,
        trace=trace,
        residual_is_proxy=not has_exact_residual(P.C),
        message=message,
    )
