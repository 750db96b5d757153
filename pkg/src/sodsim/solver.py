"""The sparse orthogonal-descent single-index solver.

Each iteration: isotonic regression of Y onto the current scores X u, an
orthogonal gradient-like step, hard thresholding, and renormalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .core import (
    DegenerateInitializationError,
    LengthMismatchError,
    ZeroVectorError,
    as_matrix,
    as_vector,
    unit_normalize,
)
from .isotonic import StepLink, fit_link, iso_project
from .operators import hard_threshold, project_orthogonal


@dataclass(frozen=True)
class SodSimConfig:
    s: int
    eta: float = 0.1
    max_iter: int = 1000
    param_tol: float = 5e-4
    record_trajectory: bool = False

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("sparsity level s must be >= 1")
        if self.eta < 0:
            raise ValueError("step size eta must be >= 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.param_tol <= 0:
            raise ValueError("param_tol must be positive")


@dataclass(frozen=True)
class SodSimFit:
    u_hat: np.ndarray
    link: StepLink
    iterations: int
    converged: bool
    trajectory: Optional[tuple] = field(default=None)


class StepDetail(NamedTuple):
    u_next: np.ndarray
    u_tilde: np.ndarray  # pre-threshold iterate
    iso_fitted: np.ndarray
    gradient: np.ndarray


def initialize(X, Y, s: int) -> np.ndarray:
    """Unit s-sparse starting point from the thresholded covariance between
    columns of X and the centered response."""
    X = as_matrix(X)
    Y = as_vector(Y)
    if X.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    v = X.T @ (Y - Y.mean())
    v = hard_threshold(v, s)
    if not np.any(v):
        raise DegenerateInitializationError("X^T (Y - mean(Y)) is zero; cannot initialize")
    return unit_normalize(v)


def step_detailed(X, Y, u_prev, cfg: SodSimConfig) -> StepDetail:
    """One solver iteration, exposing the pre-threshold iterate and the
    isotonic fit for diagnostics."""
    X = as_matrix(X)
    Y = as_vector(Y)
    u_prev = as_vector(u_prev)
    n = X.shape[0]
    res = iso_project(X @ u_prev, Y)
    g = X.T @ (Y - res.fitted) / n
    u_tilde = u_prev + cfg.eta * project_orthogonal(u_prev, g)
    thresholded = hard_threshold(u_tilde, cfg.s)
    if not np.any(thresholded):
        # excluded in theory: ||Psi_s(u_tilde)||_2 >= ||u_prev||_2 = 1
        raise ZeroVectorError("hard threshold annihilated the iterate")
    return StepDetail(
        u_next=unit_normalize(thresholded),
        u_tilde=u_tilde,
        iso_fitted=res.fitted,
        gradient=g,
    )


def step(X, Y, u_prev, cfg: SodSimConfig) -> np.ndarray:
    return step_detailed(X, Y, u_prev, cfg).u_next


def fit(X, Y, cfg: SodSimConfig) -> SodSimFit:
    """Run the solver from its data-driven initialization until the iterate
    change drops below param_tol or max_iter is reached, then fit the link
    on the final scores."""
    X = as_matrix(X)
    Y = as_vector(Y)
    n = X.shape[0]
    u = initialize(X, Y, cfg.s)
    trajectory = [] if cfg.record_trajectory else None
    converged = False
    iterations = 0
    for t in range(1, cfg.max_iter + 1):
        detail = step_detailed(X, Y, u, cfg)
        change = float(np.linalg.norm(detail.u_next - u))
        u = detail.u_next
        iterations = t
        if trajectory is not None:
            loss = float(np.linalg.norm(Y - detail.iso_fitted) / np.sqrt(n))
            trajectory.append((t, change, loss))
        if change < cfg.param_tol:
            converged = True
            break
    link = fit_link(X @ u, Y)
    return SodSimFit(
        u_hat=u,
        link=link,
        iterations=iterations,
        converged=converged,
        trajectory=tuple(trajectory) if trajectory is not None else None,
    )


def prediction_error(X, Y, mu_star, fit_result: SodSimFit) -> float:
    """n^{-1/2} l2 distance between the isotonic fit of Y on the estimated
    scores and the true conditional mean."""
    X = as_matrix(X)
    Y = as_vector(Y)
    mu_star = as_vector(mu_star)
    if Y.shape != mu_star.shape or X.shape[0] != Y.shape[0]:
        raise LengthMismatchError("X, Y, and mu_star must agree in sample count")
    fitted = iso_project(X @ fit_result.u_hat, Y).fitted
    return float(np.linalg.norm(fitted - mu_star) / np.sqrt(Y.size))
