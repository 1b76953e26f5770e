"""Direction-plus-line-search method for the l1-l2 regularized problem.

Splits the objective into a differentiable part

    f(x) = 0.5*||Ax - P_Q(Ax)||^2 - gamma*||x||_2 - mu*||x||^2/2

and a convex part ``g(x) = gamma*||x||_1 + i_C(x) + mu*||x||^2/2``, where the
quadratic shift ``mu > 0`` makes the direction subproblem strongly convex on
every supported constraint set.  Each iteration minimizes the linearization

    min_{x in C}  <x, w_k> + gamma*||x||_1 + mu*||x||^2/2,
    w_k = A'(Ax_k - P_Q(Ax_k)) - gamma*x_k/||x_k||_2 - mu*x_k,

then line-searches the segment from ``x_k`` towards the minimizer.  The
search compares the candidate against the endpoints explicitly, so the
objective never increases.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .linops import as_vector, inflated_op_norm, sfp_gradient
from .problem import (
    ConfigurationError,
    IterateRecord,
    ProblemSpec,
    SolveResult,
    Status,
    gamma_objective,
    has_exact_residual,
    sfp_residual_value,
    stationarity_residual,
)
from .prox import soft_threshold
from .sets import Ball, Box, L1Ball, Singleton, interval_bounds

__all__ = [
    "MfOptions",
    "direction_minimizer",
    "mf_direction",
    "mf_line_search",
    "solve_mf",
]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class MfOptions:
    """Controls for the direction subproblem and the line search.

    ``mu_shift=None`` resolves to ``0.1 * ||A||^2``, which makes the direction
    point a well-scaled shrinkage step (much smaller shifts produce distant
    direction points, vanishing line-search steps and no termination within
    realistic budgets).  ``mu_shift=0`` is only valid for bounded constraint
    sets (ball, box, l1 ball), where the un-shifted direction subproblem
    still has minimizers.

    ``stationarity_tol=None`` resolves to ``step_tol * max(1, mu)``: the
    residual left by a step-norm stop scales with ``mu``, so the certificate
    threshold follows the same scale.
    """

    mu_shift: float | None = None
    lambda_max: float = 2.0
    golden_evals: int = 40
    max_iter: int = 1000
    step_tol: float = 1e-5
    stationarity_tol: float | None = None

    def __post_init__(self):
        if self.mu_shift is not None and self.mu_shift < 0:
            raise ValueError("mu_shift must be nonnegative")
        if self.lambda_max <= 0:
            raise ValueError("lambda_max must be positive")
        if self.golden_evals < 4:
            raise ValueError("golden_evals must be at least 4")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.step_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.stationarity_tol is not None and self.stationarity_tol <= 0:
            raise ValueError("tolerances must be positive")

    def resolve_mu(self, P: ProblemSpec) -> float:
        if self.mu_shift is not None:
            return self.mu_shift
        return 0.1 * inflated_op_norm(P.A) ** 2

    def resolve_stationarity_tol(self, P: ProblemSpec) -> float:
        if self.stationarity_tol is not None:
            return self.stationarity_tol
        return self.step_tol * max(1.0, self.resolve_mu(P))


def _direction_coefficient(P: ProblemSpec, x_k: np.ndarray, mu: float) -> np.ndarray:
    """Linear coefficient ``w_k`` of the direction subproblem at ``x_k``."""
    w = sfp_gradient(P.A, P.Q, x_k)
    norm_x = float(np.linalg.norm(x_k))
    if norm_x > 0.0:
        w = w - P.gamma * (x_k / norm_x)
    # At the origin the zero subgradient of ||.||_2 is used.
    return w - mu * x_k


def _direction_dr(w, gamma, mu, C, tol=1e-10, max_iter=5000):
    """Solve ``min_{x in C} <w, x> + gamma*||x||_1 + mu*||x||^2/2`` exactly.

    Douglas-Rachford between the constraint (projection) and the remaining
    strongly convex term, whose prox is a closed-form shrink:
    ``prox(z) = soft_threshold(z - s*w, s*gamma) / (1 + s*mu)``.
    """
    scale = 1.0
    y = np.zeros_like(w)
    x = C.project(y)
    for _ in range(max_iter):
        x = C.project(y)
        u = soft_threshold(2.0 * x - y - scale * w, scale * gamma) / (1.0 + scale * mu)
        y_next = y + u - x
        if float(np.linalg.norm(y_next - y)) <= tol * (1.0 + float(np.linalg.norm(y))):
            y = y_next
            break
        y = y_next
    return C.project(y)


def direction_minimizer(w, gamma: float, mu: float, C) -> np.ndarray:
    """Minimize ``<w, x> + gamma*||x||_1 + mu*||x||^2/2`` over ``C``.

    Separable sets with ``mu > 0`` use the closed form
    ``clamp(soft_threshold(-w/mu, gamma/mu))`` (the scalar objective is
    strongly convex, so clamping the free minimizer into the bounds is
    exact); singletons are trivial; balls and l1 balls fall back to the
    splitting iteration.  ``mu = 0`` requires a bounded set, since otherwise
    the subproblem is unbounded below whenever ``||w||_inf > gamma``.
    """
    w = as_vector(w, "w")
    if isinstance(C, Singleton):
        return C.point.copy()
    bounds = interval_bounds(C)
    if mu > 0.0 and bounds is not None:
        lower, upper = bounds
        return np.clip(soft_threshold(-w / mu, gamma / mu), lower, upper)
    if mu == 0.0:
        if not isinstance(C, (Ball, Box, L1Ball)):
            raise ConfigurationError(
                "mu_shift = 0 requires a bounded constraint set; the direction "
                "subproblem is unbounded below on unbounded sets"
            )
        if bounds is not None:
            # Piecewise-linear per coordinate: the minimum sits at a bound or 0.
            lower, upper = bounds
            candidates = np.stack(
                [lower, upper, np.clip(np.zeros_like(w), lower, upper)]
            )
            values = w * candidates + gamma * np.abs(candidates)
            choice = np.argmin(values, axis=0)
            return candidates[choice, np.arange(w.shape[0])]
    return _direction_dr(w, gamma, mu, C)


def mf_direction(P: ProblemSpec, x_k, opts: MfOptions | None = None) -> np.ndarray:
    """Minimizer of the shifted direction subproblem at ``x_k``."""
    if opts is None:
        opts = MfOptions()
    x_k = as_vector(x_k, "x_k")
    mu = opts.resolve_mu(P)
    w = _direction_coefficient(P, x_k, mu)
    return direction_minimizer(w, P.gamma, mu, P.C)


def _golden_section(phi, a: float, b: float, evals: int):
    """Golden-section search on [a, b]; returns the best sampled point."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = phi(c), phi(d)
    best_x, best_f = (c, fc) if fc <= fd else (d, fd)
    for _ in range(max(evals - 2, 0)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = phi(c)
            if fc < best_f:
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = phi(d)
            if fd < best_f:
                best_x, best_f = d, fd
    return best_x, best_f


def mf_line_search(
    P: ProblemSpec, x_k, x_tilde, opts: MfOptions | None = None
) -> float:
    """Step length approximately minimizing the objective along the segment.

    Minimizes ``phi(lam) = objective((1-lam)*x_k + lam*x_tilde)`` over
    ``[0, lambda_max]`` by golden-section search, then compares against the
    candidates ``lam in {0, 1, lambda_max}`` so the returned step never does
    worse than staying put or taking the full step.
    """
    if opts is None:
        opts = MfOptions()
    x_k = as_vector(x_k, "x_k")
    x_tilde = as_vector(x_tilde, "x_tilde")
    if float(np.linalg.norm(x_tilde - x_k)) == 0.0:
        return 0.0

    def phi(lam: float) -> float:
        return gamma_objective(P, (1.0 - lam) * x_k + lam * x_tilde)

    gs_x, gs_f = _golden_section(phi, 0.0, opts.lambda_max, opts.golden_evals)
    candidates = [(0.0, phi(0.0)), (1.0, phi(1.0)), (opts.lambda_max, phi(opts.lambda_max)), (gs_x, gs_f)]
    best_lam, _ = min(candidates, key=lambda item: item[1])
    return float(best_lam)


def solve_mf(P: ProblemSpec, x0, opts: MfOptions | None = None) -> SolveResult:
    """Run the direction/line-search iteration from ``x0``.

    Stops when the stationarity residual drops to ``stationarity_tol``, when
    the step norm drops to ``step_tol``, or at ``max_iter``.  Iterates stay
    in ``C`` (convex combinations of feasible points).  An iterate landing
    exactly at the origin is handled with the zero subgradient of the l2 norm
    and the iteration continues.
    """
    if opts is None:
        opts = MfOptions()
    x = as_vector(x0, "x0")
    message = ""
    if not P.C.contains(x, 1e-9):
        x = P.C.project(x)
        message = "x0 projected onto C before start"
    mu = opts.resolve_mu(P)
    stat_tol = opts.resolve_stationarity_tol(P)
    resolved = MfOptions(
        mu_shift=mu,
        lambda_max=opts.lambda_max,
        golden_evals=opts.golden_evals,
        max_iter=opts.max_iter,
        step_tol=opts.step_tol,
        stationarity_tol=stat_tol,
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
        )
    ]
    status = Status.MAX_ITERATIONS
    for k in range(1, opts.max_iter + 1):
        if trace[-1].grad_residual <= stat_tol:
            status = Status.CONVERGED
            break
        x_tilde = mf_direction(P, x, resolved)
        lam = mf_line_search(P, x, x_tilde, resolved)
        x_next = (1.0 - lam) * x + lam * x_tilde
        step = float(np.linalg.norm(x_next - x))
        x = x_next
        trace.append(
            IterateRecord(
                k=k,
                objective=gamma_objective(P, x),
                step_norm=step,
                grad_residual=stationarity_residual(P, x),
                elapsed_ms=(time.perf_counter() - t0) * 1e3,
                sfp_residual=sfp_residual_value(P, x),
            )
        )
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
