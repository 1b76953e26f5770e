"""Forward-backward splitting with the l1-l2 prox, for unconstrained domains.

Dividing the objective by gamma gives

    min_x  l(x) + r(x),   l(x) = (1/(2*gamma))*||Ax - P_Q(Ax)||^2,
                          r(x) = ||x||_1 - ||x||_2,

and the iteration alternates a gradient step on ``l`` with the closed-form
prox of ``r``:

    x_{k+1} = prox_{step*r}(x_k - step * grad l(x_k)).

The gradient of ``l`` is ``(||A||^2/gamma)``-Lipschitz, so the objective
values decrease whenever ``step < gamma/||A||^2``; the options enforce that
bound unless explicitly disabled for experiments.
"""

from __future__ import annotations

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
    sfp_residual_value,
    stationarity_residual,
)
from .prox import l1_l2, prox_l1_minus_l2
from .sets import FullSpace

__all__ = ["FbOptions", "solve_fb"]


@dataclass
class FbOptions:
    """Step size and stopping controls.

    ``step=None`` resolves to ``0.9 * gamma / ||A||^2`` per problem.  An
    explicit step is validated against the strict bound ``gamma/||A||^2``;
    set ``allow_unsafe_step=True`` to bypass the check (used as a negative
    control: oversized steps break monotone descent).
    """

    step: float | None = None
    max_iter: int = 1000
    step_tol: float = 1e-5
    allow_unsafe_step: bool = False

    def __post_init__(self):
        if self.step is not None and self.step <= 0:
            raise ValueError("step must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.step_tol <= 0:
            raise ValueError("step_tol must be positive")

    def resolve_step(self, P: ProblemSpec) -> float:
        bound = P.gamma / inflated_op_norm(P.A) ** 2
        if self.step is None:
            return 0.9 * bound
        if self.step >= bound and not self.allow_unsafe_step:
            raise ValueError(
                f"step {self.step:g} violates the descent bound gamma/||A||^2 "
                f"= {bound:g}; use allow_unsafe_step=True to experiment anyway"
            )
        return self.step


def solve_fb(P: ProblemSpec, x0, opts: FbOptions | None = None) -> SolveResult:
    """Iterate the prox-gradient map from ``x0``.

    Requires ``C`` to be the full space: the scheme has no projection step,
    and the prox of the regularizer plus a constraint indicator has no closed
    form here (a Douglas-Rachford composition would be needed; see
    :func:`sfpsolve.inner.solve_dr_in_fb` for that pattern).  Records the
    scaled objective ``l + r`` (the full objective divided by gamma).
    """
    if opts is None:
        opts = FbOptions()
    if not isinstance(P.C, FullSpace):
        raise ConfigurationError(
            "forward-backward splitting is implemented for C = R^n only; "
            f"got C = {P.C!r}.  For constrained problems compose the prox with "
            "Douglas-Rachford iterations (see sfpsolve.inner) or use solve_dca."
        )
    step = opts.resolve_step(P)
    x = as_vector(x0, "x0")
    if x.shape[0] != P.n:
        raise ValueError("x0 must match the column dimension of A")

    def scaled_objective(v: np.ndarray) -> float:
        return sfp_residual_value(P, v) / P.gamma + l1_l2(v)

    t0 = time.perf_counter()
    trace = [
        IterateRecord(
            k=0,
            objective=scaled_objective(x),
            step_norm=0.0,
            grad_residual=stationarity_residual(P, x),
            elapsed_ms=0.0,
            sfp_residual=sfp_residual_value(P, x),
        )
    ]
    status = Status.MAX_ITERATIONS
    for k in range(1, opts.max_iter + 1):
        grad = sfp_gradient(P.A, P.Q, x) / P.gamma
        x_next = prox_l1_minus_l2(x - step * grad, step)
        move = float(np.linalg.norm(x_next - x))
        x = x_next
        trace.append(
            IterateRecord(
                k=k,
                objective=scaled_objective(x),
                step_norm=move,
                grad_residual=stationarity_residual(P, x),
                elapsed_ms=(time.perf_counter() - t0) * 1e3,
                sfp_residual=sfp_residual_value(P, x),
            )
        )
        if move <= opts.step_tol:
            status = Status.CONVERGED
            break
    return SolveResult(x=x, status=status, trace=trace, residual_is_proxy=False)
