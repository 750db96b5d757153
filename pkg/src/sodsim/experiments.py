"""Monte-Carlo harnesses: PU method comparison, convergence-rate study with
the angle-grid global minimizer, and the metric computations they report.
"""

from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from . import baselines, datagen, solver
from ._accel import maybe_njit
from .core import (
    NotTwoColumnsError,
    RngHandle,
    UnderdeterminedSlopeError,
    as_matrix,
    as_vector,
    unit_normalize,
)
from .isotonic import _pava_kernel


@dataclass(frozen=True)
class MetricsRow:
    method: str
    setting: dict
    bias: float
    sd: float
    rmse: float
    correlation: float
    ci_halfwidth: dict
    reps: int


@dataclass(frozen=True)
class ClassMetrics:
    accuracy: float
    f1: float
    brier: float
    auc: float  # nan when labels contain a single class


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    points: tuple


def estimation_metrics(estimates: Sequence, u_star, method: str = "",
                       setting: Optional[dict] = None) -> MetricsRow:
    """Aggregate unit-normalized estimates against the true index vector.

    bias is the norm of the mean deviation, sd the mean norm of deviations
    from the rep mean, rmse the root mean squared l2 error, and correlation
    the mean inner product. CI half-widths use the normal approximation
    1.96 * sd / sqrt(M) on the natural per-rep scalar of each metric.
    """
    if len(estimates) == 0:
        raise ValueError("empty estimate list")
    u_star = unit_normalize(u_star)
    U = np.stack([unit_normalize(e) for e in estimates])
    M = U.shape[0]
    mean_u = U.mean(axis=0)
    errs = np.linalg.norm(U - u_star, axis=1)
    devs = np.linalg.norm(U - mean_u, axis=1)
    corrs = U @ u_star
    bias = float(np.linalg.norm(mean_u - u_star))
    sd = float(devs.mean())
    rmse = float(np.sqrt(np.mean(errs**2)))
    correlation = float(corrs.mean())
    if M == 1:
        warnings.warn("single replication: CI half-widths degenerate to 0")
        ci = {"bias": 0.0, "sd": 0.0, "rmse": 0.0, "correlation": 0.0}
    else:
        z = 1.96 / math.sqrt(M)
        sq_hw = z * float(np.std(errs**2, ddof=1))
        ci = {
            "bias": z * float(np.std(errs, ddof=1)),
            "sd": z * float(np.std(devs, ddof=1)),
            "rmse": sq_hw / (2 * rmse) if rmse > 0 else 0.0,
            "correlation": z * float(np.std(corrs, ddof=1)),
        }
    return MetricsRow(method=method, setting=dict(setting or {}), bias=bias, sd=sd,
                      rmse=rmse, correlation=correlation, ci_halfwidth=ci, reps=M)


def classification_metrics(probs, labels, threshold: float = 0.5) -> ClassMetrics:
    """Accuracy and F1 at the threshold, Brier score, and rank-based AUC
    (ties counted half). AUC is nan when labels contain one class."""
    probs = as_vector(probs)
    labels = as_vector(labels)
    if probs.shape != labels.shape:
        raise ValueError("probs and labels must have equal length")
    pred = (probs >= threshold).astype(np.float64)
    accuracy = float(np.mean(pred == labels))
    tp = float(np.sum((pred == 1) & (labels == 1)))
    fp = float(np.sum((pred == 1) & (labels == 0)))
    fn = float(np.sum((pred == 0) & (labels == 1)))
    f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) > 0 else 0.0
    brier = float(np.mean((labels - probs) ** 2))
    n_pos = int(np.sum(labels == 1))
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        auc = float("nan")
    else:
        ranks = rankdata(probs)
        auc = float((ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))
    return ClassMetrics(accuracy=accuracy, f1=f1, brier=brier, auc=auc)


@maybe_njit
def _theta_grid_losses(x1, x2, y, thetas):
    # l2 isotonic-residual loss per grid angle; ties in the score pooled
    n = y.shape[0]
    losses = np.empty(thetas.shape[0])
    gy = np.empty(n)
    gw = np.empty(n)
    gcount = np.empty(n, dtype=np.int64)
    for k in range(thetas.shape[0]):
        z = np.cos(thetas[k]) * x1 + np.sin(thetas[k]) * x2
        order = np.argsort(z, kind="mergesort")
        m = 0
        i = 0
        while i < n:
            j = i
            acc = 0.0
            zi = z[order[i]]
            while j < n and z[order[j]] == zi:
                acc += y[order[j]]
                j += 1
            gy[m] = acc / (j - i)
            gw[m] = j - i
            gcount[m] = j - i
            m += 1
            i = j
        fit = _pava_kernel(gy[:m], gw[:m])
        loss = 0.0
        idx = 0
        for b in range(m):
            for _ in range(gcount[b]):
                d = y[order[idx]] - fit[b]
                loss += d * d
                idx += 1
        losses[k] = np.sqrt(loss)
    return losses


def theta_grid(increment: float) -> np.ndarray:
    if increment <= 0:
        raise ValueError("increment must be positive")
    count = int(np.floor(np.pi / 2 / increment + 1e-12))
    return increment * np.arange(count + 1)


def grid_minimize_theta(X, Y, increment: float = 0.001):
    """Global minimizer of the isotonic l2 loss over unit vectors
    (cos t, sin t), t on a grid over [0, pi/2]. Ties go to the smallest t.

    Returns (theta_hat, u_hat).
    """
    X = as_matrix(X)
    Y = as_vector(Y)
    if X.shape[1] != 2:
        raise NotTwoColumnsError("grid minimization requires a 2-column design")
    thetas = theta_grid(increment)
    losses = _theta_grid_losses(
        np.ascontiguousarray(X[:, 0]), np.ascontiguousarray(X[:, 1]), Y, thetas
    )
    k = int(np.argmin(losses))
    theta_hat = float(thetas[k])
    return theta_hat, np.array([np.cos(theta_hat), np.sin(theta_hat)])


def slope_loglog(ns, rmses) -> SlopeFit:
    """OLS fit of log rmse on log n."""
    ns = as_vector(ns)
    rmses = as_vector(rmses)
    if np.unique(ns).size < 2:
        raise UnderdeterminedSlopeError("need at least 2 distinct n values")
    if np.any(rmses <= 0):
        raise ValueError("rmses must be positive")
    log_n = np.log(ns)
    log_r = np.log(rmses)
    slope, intercept = np.polyfit(log_n, log_r, 1)
    resid = log_r - (slope * log_n + intercept)
    ss_tot = float(np.sum((log_r - log_r.mean()) ** 2))
    r_sq = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return SlopeFit(slope=float(slope), intercept=float(intercept), r_squared=r_sq,
                    points=tuple(zip(log_n.tolist(), log_r.tolist())))


@dataclass(frozen=True)
class PuStudyConfig:
    seed: int = 0
    reps: int = 100
    p_list: tuple = (100, 400, 800, 1600)
    n_pos: int = 400
    n_unl: int = 400
    rho: float = 0.2
    s: int = 10
    eta: float = 0.1
    max_iter: int = 1000
    param_tol: float = 5e-4
    cv_folds: int = 5
    lambda_count: int = 30
    lambda_ratio: float = 0.01
    threads: int = 1


@dataclass(frozen=True)
class LowerBoundStudyConfig:
    example: int = 1
    seed: int = 0
    reps: int = 100
    n_list: tuple = (100, 150, 200, 300, 400, 600, 800, 1200)
    increment: float = 0.001
    epsilon: float = 0.1
    threads: int = 1


def _map_ordered(fn, items, threads: int):
    """Apply fn over items, optionally with a thread pool; results come back
    in input order so aggregation is deterministic."""
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _pu_single_rep(cfg: PuStudyConfig, p: int, stream_id: int):
    rng = RngHandle(cfg.seed, stream_id)
    data = datagen.gen_pu_dataset(datagen.PuConfig(
        p=p, u_star=datagen.default_pu_u_star(p), seed=rng,
        n_pos=cfg.n_pos, n_unl=cfg.n_unl, rho=cfg.rho,
    ))
    sod = solver.fit(data.X, data.y, solver.SodSimConfig(
        s=cfg.s, eta=cfg.eta, max_iter=cfg.max_iter, param_tol=cfg.param_tol))
    pg_cfg = baselines.PgConfig(tol=1e-5, max_iter=500)
    grid = baselines.lambda_grid(data.X, data.y, cfg.lambda_count, cfg.lambda_ratio)
    lam = baselines.cross_validate_lambda(
        data.X, data.y, cfg.cv_folds, grid, rng.stream(stream_id + (1 << 40)), pg_cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lr = baselines.fit_sparse_logistic(data.X, data.y, lam, pg_cfg)
    u_lr = lr.coefficients if np.any(lr.coefficients) else None
    return sod.u_hat, u_lr


def run_pu_comparison(cfg: PuStudyConfig):
    """One MetricsRow per (method, p); failed reps are excluded and counted
    in the row's setting under "failures"."""
    rows = []
    for pi, p in enumerate(cfg.p_list):
        u_star = datagen.default_pu_u_star(p)
        results = _map_ordered(
            lambda r: _pu_single_rep(cfg, p, (pi << 24) | r),
            range(cfg.reps), cfg.threads)
        sod_estimates = [res[0] for res in results]
        lr_estimates = [res[1] for res in results if res[1] is not None]
        lr_failures = cfg.reps - len(lr_estimates)
        rows.append(estimation_metrics(
            sod_estimates, u_star, method="sodsim", setting={"p": p, "failures": 0}))
        rows.append(estimation_metrics(
            lr_estimates, u_star, method="sparselr",
            setting={"p": p, "failures": lr_failures}))
    return rows


def _lowerbound_single_rep(cfg: LowerBoundStudyConfig, n: int, stream_id: int):
    data = datagen.gen_lowerbound_dataset(datagen.LowerBoundConfig(
        example=cfg.example, n=n, seed=RngHandle(cfg.seed, stream_id),
        epsilon=cfg.epsilon))
    _, u_hat = grid_minimize_theta(data.X, data.y, cfg.increment)
    return u_hat


def run_lowerbound_study(cfg: LowerBoundStudyConfig):
    """Per-n metric rows for the grid global minimizer, plus the fitted
    log-log slope of RMSE against n."""
    rows = []
    rmses = []
    u_star = datagen.LOWERBOUND_U_STAR
    for ni, n in enumerate(cfg.n_list):
        estimates = _map_ordered(
            lambda r: _lowerbound_single_rep(cfg, n, (ni << 24) | r),
            range(cfg.reps), cfg.threads)
        row = estimation_metrics(estimates, u_star, method="grid",
                                 setting={"example": cfg.example, "n": n})
        rows.append(row)
        rmses.append(row.rmse)
    slope = slope_loglog(np.asarray(cfg.n_list, dtype=np.float64), np.asarray(rmses))
    return rows, slope


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_pu_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "p", "reps", "bias", "bias_ci", "sd", "rmse",
                    "rmse_ci", "correlation", "correlation_ci"])
        for r in rows:
            w.writerow([r.method, r.setting["p"], r.reps, _fmt(r.bias),
                        _fmt(r.ci_halfwidth["bias"]), _fmt(r.sd), _fmt(r.rmse),
                        _fmt(r.ci_halfwidth["rmse"]), _fmt(r.correlation),
                        _fmt(r.ci_halfwidth["correlation"])])


def write_lowerbound_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["example", "n", "reps", "rmse", "rmse_ci"])
        for r in rows:
            w.writerow([r.setting["example"], r.setting["n"], r.reps,
                        _fmt(r.rmse), _fmt(r.ci_halfwidth["rmse"])])


def write_slope_csv(slopes, path):
    """slopes: list of (example, SlopeFit) pairs."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["example", "slope", "intercept", "r_squared"])
        for example, s in slopes:
            w.writerow([example, _fmt(s.slope), _fmt(s.intercept), _fmt(s.r_squared)])
