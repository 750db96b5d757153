"""Comparison estimators: linear and least-squares objectives over the
approximate-sparsity set (projected gradient with Dykstra projections) and
l1-penalized logistic regression via proximal gradient.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit as _expit

from .core import (
    InsufficientDataError,
    NonConvergenceWarning,
    RngHandle,
    as_matrix,
    as_vector,
    spectral_norm_sq,
)
from .operators import BallSpec, dykstra_intersection

INTERCEPT_CLIP = 30.0


@dataclass(frozen=True)
class PgConfig:
    step: Optional[float] = None  # None = auto from the spectral norm
    tol: float = 1e-6
    max_iter: int = 2000
    standardize: bool = False

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class LogisticFit:
    intercept: float
    coefficients: np.ndarray
    lam: float
    iterations: int
    converged: bool


def standardize_columns(X):
    """Center each column and scale to unit sample SD. Constant columns are
    dropped (with a warning); returns (X_std, kept_column_indices)."""
    X = as_matrix(X)
    mean = X.mean(axis=0)
    sd = X.std(axis=0, ddof=1)
    keep = np.nonzero(sd > 0)[0]
    if keep.size < X.shape[1]:
        warnings.warn(f"dropping {X.shape[1] - keep.size} constant column(s)")
    return (X[:, keep] - mean[keep]) / sd[keep], keep


def _maybe_standardize(X, cfg: PgConfig):
    if cfg.standardize:
        return standardize_columns(X)[0]
    return as_matrix(X)


def fit_pv1(X, y, s: int, cfg: PgConfig = PgConfig()) -> np.ndarray:
    """Maximize <y, Xu> over the approximate-sparsity set by projected
    gradient ascent from the zero vector."""
    X = _maybe_standardize(X, cfg)
    y = as_vector(y)
    g = X.T @ y
    balls = BallSpec.approx_sparse(s)
    gn = np.linalg.norm(g)
    if gn == 0.0:
        return np.zeros(X.shape[1])
    alpha = cfg.step if cfg.step is not None else 1.0 / gn
    u = np.zeros(X.shape[1])
    for _ in range(cfg.max_iter):
        u_new = dykstra_intersection(u + alpha * g, balls)
        if np.linalg.norm(u_new - u) < cfg.tol:
            return u_new
        u = u_new
    warnings.warn("PV1 projected gradient did not converge", NonConvergenceWarning)
    return u


def fit_pv2(X, y, s: int, cfg: PgConfig = PgConfig()) -> np.ndarray:
    """Minimize ||y - Xu||_2 over the approximate-sparsity set by projected
    gradient descent with step 1/sigma_max(X)^2."""
    X = _maybe_standardize(X, cfg)
    y = as_vector(y)
    balls = BallSpec.approx_sparse(s)
    sn = spectral_norm_sq(X)
    if sn == 0.0:
        return np.zeros(X.shape[1])
    alpha = cfg.step if cfg.step is not None else 1.0 / sn
    u = np.zeros(X.shape[1])
    for _ in range(cfg.max_iter):
        grad = X.T @ (X @ u - y)
        u_new = dykstra_intersection(u - alpha * grad, balls)
        if np.linalg.norm(u_new - u) < cfg.tol:
            return u_new
        u = u_new
    warnings.warn("PV2 projected gradient did not converge", NonConvergenceWarning)
    return u


def _logistic_grad(X, y, beta, beta0):
    # loss = (1/n) sum log(1 + exp(eta)) - y*eta, eta = X beta + beta0
    n = y.size
    p_hat = _expit(X @ beta + beta0)
    r = (p_hat - y) / n
    return X.T @ r, float(r.sum())


def _soft_threshold(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def fit_sparse_logistic(X, y, lam: float, cfg: PgConfig = PgConfig(),
                        beta_init=None, intercept_init: float = 0.0) -> LogisticFit:
    """l1-penalized logistic regression by proximal gradient: soft threshold
    on the coefficients, plain gradient step on the unpenalized intercept.
    Optional warm start via beta_init/intercept_init.
    """
    X = _maybe_standardize(X, cfg)
    y = as_vector(y)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    n, p = X.shape
    ybar = float(y.mean())
    if ybar in (0.0, 1.0):
        warnings.warn("degenerate single-class response; intercept clipped")
        b0 = INTERCEPT_CLIP if ybar == 1.0 else -INTERCEPT_CLIP
        return LogisticFit(b0, np.zeros(p), lam, 0, True)

    # logistic curvature <= 1/4, so 1/L = 4n / sigma_max([1 X])^2
    aug_sn = spectral_norm_sq(np.hstack([np.ones((n, 1)), X]))
    step = cfg.step if cfg.step is not None else 4.0 * n / aug_sn

    beta = np.zeros(p) if beta_init is None else as_vector(beta_init).copy()
    beta0 = float(intercept_init)
    converged = False
    iterations = 0
    for t in range(1, cfg.max_iter + 1):
        g_beta, g_b0 = _logistic_grad(X, y, beta, beta0)
        beta_new = _soft_threshold(beta - step * g_beta, step * lam)
        beta0_new = float(np.clip(beta0 - step * g_b0, -INTERCEPT_CLIP, INTERCEPT_CLIP))
        change = np.linalg.norm(beta_new - beta) + abs(beta0_new - beta0)
        beta, beta0 = beta_new, beta0_new
        iterations = t
        if change < cfg.tol * step:
            converged = True
            break
    if not converged:
        warnings.warn("sparse logistic proximal gradient did not converge", NonConvergenceWarning)
    return LogisticFit(beta0, beta, lam, iterations, converged)


def logistic_kkt_residual(X, y, fit: LogisticFit) -> float:
    """Max violation of the l1 subgradient optimality conditions."""
    X = as_matrix(X)
    y = as_vector(y)
    g, g0 = _logistic_grad(X, y, fit.coefficients, fit.intercept)
    active = fit.coefficients != 0
    viol = abs(g0)
    if np.any(active):
        viol = max(viol, float(np.max(np.abs(g[active] + fit.lam * np.sign(fit.coefficients[active])))))
    if np.any(~active):
        viol = max(viol, float(np.max(np.maximum(np.abs(g[~active]) - fit.lam, 0.0))))
    return viol


def lambda_max(X, y) -> float:
    X = as_matrix(X)
    y = as_vector(y)
    return float(np.max(np.abs(X.T @ (y - y.mean()))) / y.size)


def lambda_grid(X, y, count: int = 100, ratio: float = 1e-3) -> np.ndarray:
    """Log-spaced penalty grid from lambda_max down to lambda_max * ratio."""
    if count < 2:
        raise ValueError("count must be >= 2")
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie in (0, 1)")
    lmax = lambda_max(X, y)
    return lmax * np.logspace(0.0, np.log10(ratio), count)


def _stratified_folds(y, folds: int, rng: np.random.Generator):
    """Fold assignment balancing both classes across folds."""
    assign = np.empty(y.size, dtype=np.int64)
    for cls in (0.0, 1.0):
        idx = np.nonzero(y == cls)[0]
        idx = idx[rng.permutation(idx.size)]
        assign[idx] = np.arange(idx.size) % folds
    return assign


def binomial_deviance(y, probs) -> float:
    eps = 1e-12
    probs = np.clip(probs, eps, 1 - eps)
    return float(-2.0 * np.mean(y * np.log(probs) + (1 - y) * np.log(1 - probs)))


def cross_validate_lambda(X, y, folds: int, grid, rng: RngHandle,
                          cfg: PgConfig = PgConfig()) -> float:
    """Pick the penalty minimizing mean held-out binomial deviance over
    stratified folds; deviance ties go to the larger (more parsimonious)
    lambda."""
    X = as_matrix(X)
    y = as_vector(y)
    grid = np.sort(as_vector(grid))[::-1]
    if folds < 2:
        raise ValueError("folds must be >= 2")
    assign = _stratified_folds(y, folds, rng.generator())
    deviance = np.zeros(grid.size)
    for k in range(folds):
        test = assign == k
        train = ~test
        y_tr, y_te = y[train], y[test]
        if y_tr.min() == y_tr.max() or y_te.min() == y_te.max():
            raise InsufficientDataError(f"fold {k} lacks both classes")
        X_tr, X_te = X[train], X[test]
        beta, b0 = None, 0.0
        for j, lam in enumerate(grid):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NonConvergenceWarning)
                f = fit_sparse_logistic(X_tr, y_tr, lam, cfg, beta_init=beta, intercept_init=b0)
            beta, b0 = f.coefficients, f.intercept
            deviance[j] += binomial_deviance(y_te, _expit(X_te @ beta + b0))
    deviance /= folds
    best = deviance.min()
    # grid is descending, so the first index within tolerance is the largest lambda
    return float(grid[np.nonzero(deviance <= best + 1e-12)[0][0]])
