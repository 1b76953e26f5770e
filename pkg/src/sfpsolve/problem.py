"""Problem specification, the regularized objective and stationarity residuals.

A problem instance bundles the measurement matrix ``A``, the constraint set
``C`` in the domain, the target set ``Q`` in the range and the regularization
weight ``gamma``.  The objective shared by all solvers is

    0.5*||Ax - P_Q(Ax)||^2 + gamma*(||x||_1 - ||x||_2)   for x in C,

and +inf outside ``C``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .linops import as_matrix, as_vector, sfp_gradient
from .prox import l1_l2, soft_threshold
from .sets import ConvexSet, interval_bounds

__all__ = [
    "ConfigurationError",
    "ProblemSpec",
    "Status",
    "IterateRecord",
    "SolveResult",
    "gamma_objective",
    "sfp_residual_value",
    "stationarity_residual",
    "has_exact_residual",
]


class ConfigurationError(Exception):
    """A solver was configured with options or sets it does not support."""


class Status(enum.Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    ZERO_STATIONARY = "zero_stationary"


@dataclass(frozen=True)
class ProblemSpec:
    """One split-feasibility instance with l1-l2 regularization."""

    A: np.ndarray
    C: ConvexSet
    Q: ConvexSet
    gamma: float

    def __post_init__(self):
        A = as_matrix(self.A).copy()
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        if self.C.dim != A.shape[1]:
            raise ValueError(
                f"C lives in R^{self.C.dim} but A has {A.shape[1]} columns"
            )
        if self.Q.dim != A.shape[0]:
            raise ValueError(
                f"Q lives in R^{self.Q.dim} but A has {A.shape[0]} rows"
            )
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass
class IterateRecord:
    """Per-iteration trace entry.

    ``objective`` is the solver's own objective (the regularized objective for
    the l1-l2 methods, the plain feasibility residual for the projection
    baselines); ``sfp_residual`` is always ``0.5*||Ax - P_Q(Ax)||^2`` so traces
    are comparable across solvers.
    """

    k: int
    objective: float
    step_norm: float
    grad_residual: float
    elapsed_ms: float
    sfp_residual: float = float("nan")
    l1_norm: float | None = None


@dataclass
class SolveResult:
    x: np.ndarray
    status: Status
    trace: list[IterateRecord] = field(default_factory=list)
    residual_is_proxy: bool = False
    message: str = ""

    @property
    def iterations(self) -> int:
        return self.trace[-1].k if self.trace else 0

    @property
    def converged(self) -> bool:
        return self.status in (Status.CONVERGED, Status.ZERO_STATIONARY)

    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.trace])

    def step_norms(self) -> np.ndarray:
        return np.array([r.step_norm for r in self.trace])


def sfp_residual_value(P: ProblemSpec, x) -> float:
    """The unregularized feasibility residual ``0.5*||Ax - P_Q(Ax)||^2``."""
    Ax = P.A @ as_vector(x)
    return 0.5 * float(np.sum((Ax - P.Q.project(Ax)) ** 2))


def gamma_objective(P: ProblemSpec, x, member_tol: float = 1e-9) -> float:
    """Regularized objective; +inf when ``x`` is not in ``C`` within tolerance."""
    x = as_vector(x)
    if not P.C.contains(x, member_tol):
        return float("inf")
    return sfp_residual_value(P, x) + P.gamma * l1_l2(x)


def has_exact_residual(C: ConvexSet) -> bool:
    """Whether :func:`stationarity_residual` is exact (separable ``C``)."""
    return interval_bounds(C) is not None


def _smooth_gradient(P: ProblemSpec, x: np.ndarray) -> np.ndarray:
    """Gradient of the smooth part, with the zero subgradient chosen at 0."""
    g = sfp_gradient(P.A, P.Q, x)
    norm_x = float(np.linalg.norm(x))
    if norm_x > 0.0:
        g = g - P.gamma * (x / norm_x)
    return g


def stationarity_residual(
    P: ProblemSpec,
    x,
    coord_zero_tol: float | None = None,
    active_tol: float = 1e-9,
) -> float:
    """Distance of the first-order optimality inclusion from being satisfied.

    A point is stationary when ``-g(x)`` lies in ``gamma*d||x||_1 + N_C(x)``
    with ``g(x) = A'(Ax - P_Q(Ax)) - gamma*x/||x||_2`` (zero subgradient of
    the l2 norm at the origin).  For separable ``C`` (full space, orthant,
    box) the Minkowski sum is an interval per coordinate and the Euclidean
    distance is computed exactly.  For the remaining sets the value is the
    fixed-point proxy ``||x - P_C(soft_threshold(x - g(x), gamma))||``, a
    monitoring quantity rather than a certificate
    (see :func:`has_exact_residual`).

    ``coord_zero_tol`` controls which coordinates count as zero when picking
    the l1 subdifferential (default ``1e-8 * (1 + max|x_i|)``); ``active_tol``
    does the same for bound activity in ``N_C``.
    """
    x = as_vector(x)
    if x.shape[0] != P.n:
        raise ValueError("dimension mismatch between x and problem")
    g = _smooth_gradient(P, x)
    target = -g
    bounds = interval_bounds(P.C)
    if bounds is None:
        step = P.C.project(soft_threshold(x - g, P.gamma))
        return float(np.linalg.norm(x - step))

    lower, upper = bounds
    if coord_zero_tol is None:
        coord_zero_tol = 1e-8 * (1.0 + float(np.max(np.abs(x))))
    gamma = P.gamma
    nonzero = np.abs(x) > coord_zero_tol
    sub_lo = np.where(nonzero, gamma * np.sign(x), -gamma)
    sub_hi = np.where(nonzero, gamma * np.sign(x), gamma)

    at_lower = x <= lower + active_tol
    at_upper = x >= upper - active_tol
    cone_lo = np.where(at_lower, -np.inf, 0.0)
    cone_hi = np.where(at_upper, np.inf, 0.0)

    lo = sub_lo + cone_lo
    hi = sub_hi + cone_hi
    dist = np.maximum(lo - target, 0.0) + np.maximum(target - hi, 0.0)
    return float(np.linalg.norm(dist))
