"""Synthetic data generators: AR(1) Gaussian covariates, logistic
single-index responses with positive-unlabeled sampling, and the two
convergence-rate constructions built from a triangle wave.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import expit as _scipy_expit

from .core import RejectionStallError, RngHandle, as_vector

_STALL_PROBE = 20000
_STALL_RATE = 1e-4


@dataclass(frozen=True)
class PuConfig:
    p: int
    u_star: np.ndarray
    seed: RngHandle
    n_pos: int = 400
    n_unl: int = 400
    rho: float = 0.2

    def __post_init__(self):
        if self.n_pos < 1 or self.n_unl < 1:
            raise ValueError("n_pos and n_unl must be >= 1")
        if not -1 < self.rho < 1:
            raise ValueError("rho must lie in (-1, 1)")
        u = as_vector(self.u_star)
        if u.size != self.p:
            raise ValueError("u_star must have length p")
        if abs(np.linalg.norm(u) - 1.0) > 1e-9:
            raise ValueError("u_star must be a unit vector")
        object.__setattr__(self, "u_star", u)


def default_pu_u_star(p: int) -> np.ndarray:
    """(sqrt(2)/2, -sqrt(2)/2, 0, ..., 0): the two-coordinate unit index."""
    u = np.zeros(p)
    u[0] = np.sqrt(2) / 2
    u[1] = -np.sqrt(2) / 2
    return u


@dataclass(frozen=True)
class LowerBoundConfig:
    example: int
    n: int
    seed: RngHandle
    epsilon: float = 0.1
    sigma: Optional[float] = None
    sd1: Optional[float] = None
    sd2: Optional[float] = None

    def __post_init__(self):
        if self.example not in (1, 2):
            raise ValueError("example must be 1 or 2")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        defaults = {1: (1.0, 0.025, 0.4), 2: (0.8, 0.0014, 0.4)}
        sigma, sd1, sd2 = defaults[self.example]
        if self.sigma is None:
            object.__setattr__(self, "sigma", sigma)
        if self.sd1 is None:
            object.__setattr__(self, "sd1", sd1)
        if self.sd2 is None:
            object.__setattr__(self, "sd2", sd2)
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


@dataclass(frozen=True)
class LabeledDataset:
    X: np.ndarray
    y: np.ndarray
    mu_star: np.ndarray
    u_star: np.ndarray
    true_labels: Optional[np.ndarray] = field(default=None)
    prevalence: Optional[float] = field(default=None)


def expit(t):
    """Numerically stable logistic sigmoid."""
    return _scipy_expit(t)


def sample_ar1(n: int, p: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    """n rows of N(0, Sigma_rho) with Sigma_rho[i, j] = rho^|i-j|, by the
    exact sequential AR(1) recursion."""
    if not -1 < rho < 1:
        raise ValueError("rho must lie in (-1, 1)")
    eps = rng.standard_normal((n, p))
    X = np.empty((n, p))
    X[:, 0] = eps[:, 0]
    scale = np.sqrt(1 - rho * rho)
    for j in range(1, p):
        X[:, j] = rho * X[:, j - 1] + scale * eps[:, j]
    return X


def sample_ar1_row(p: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    return sample_ar1(1, p, rho, rng)[0]


def gen_pu_dataset(cfg: PuConfig) -> LabeledDataset:
    """Positive-unlabeled sample: positives by rejection from the positive
    sub-population, unlabeled from the marginal.

    mu_star holds P(label = 1 | X) under the induced case-control link
    gamma*q / (gamma*q + pi) with q = q(x'u), derived from Bayes' rule on
    the pooled sample; pi is the population positive rate, estimated by the
    rejection acceptance rate.
    """
    rng = cfg.seed.generator()
    pos_rows = []
    n_collected = 0
    n_drawn = 0
    n_accepted = 0
    while n_collected < cfg.n_pos:
        batch = max(cfg.n_pos - n_collected, 256)
        X_cand = sample_ar1(batch, cfg.p, cfg.rho, rng)
        probs = expit(X_cand @ cfg.u_star)
        accept = rng.random(batch) < probs
        n_drawn += batch
        n_accepted += int(accept.sum())
        if n_drawn >= _STALL_PROBE and n_accepted / n_drawn < _STALL_RATE:
            raise RejectionStallError(
                f"acceptance rate {n_accepted / n_drawn:.2e} below {_STALL_RATE}"
            )
        X_acc = X_cand[accept]
        take = min(X_acc.shape[0], cfg.n_pos - n_collected)
        pos_rows.append(X_acc[:take])
        n_collected += take
    X_pos = np.vstack(pos_rows)
    prevalence = n_accepted / n_drawn

    X_unl = sample_ar1(cfg.n_unl, cfg.p, cfg.rho, rng)
    hidden_unl = (rng.random(cfg.n_unl) < expit(X_unl @ cfg.u_star)).astype(np.float64)

    X = np.vstack([X_pos, X_unl])
    y = np.concatenate([np.ones(cfg.n_pos), np.zeros(cfg.n_unl)])
    true_labels = np.concatenate([np.ones(cfg.n_pos), hidden_unl])

    gamma = cfg.n_pos / cfg.n_unl
    q = expit(X @ cfg.u_star)
    mu_star = gamma * q / (gamma * q + prevalence)
    return LabeledDataset(X=X, y=y, mu_star=mu_star, u_star=cfg.u_star.copy(),
                          true_labels=true_labels, prevalence=prevalence)


def square_wave(x):
    """Periodic triangle wave on [0, 1]: 2*frac(x) - 4*(frac(x) - 1/2)_+."""
    x = np.asarray(x, dtype=np.float64)
    frac = x - np.floor(x)
    out = 2.0 * frac - 4.0 * np.maximum(frac - 0.5, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def g_n(example: int, n: int, x, epsilon: float = 0.1):
    """Monotone perturbed-identity links: identity minus a shrinking wave.

    Example 1 uses an n^{-1/3} wave amplitude (unbounded second derivative
    in the limit); example 2 uses n^{-2/3} (bounded)."""
    if example == 1:
        amp = n ** (-1.0 / 3.0)
    elif example == 2:
        amp = n ** (-2.0 / 3.0)
    else:
        raise ValueError("example must be 1 or 2")
    x = np.asarray(x, dtype=np.float64)
    out = x - amp * square_wave(n ** (1.0 / 3.0) * x) / (2.0 + epsilon)
    if out.ndim == 0:
        return float(out)
    return out


LOWERBOUND_U_STAR = np.array([np.sqrt(2) / 2, np.sqrt(2) / 2])


def gen_lowerbound_dataset(cfg: LowerBoundConfig) -> LabeledDataset:
    """Two-column design driven by a latent Unif[0,1] variable, with the
    wave component and its complement split across the coordinates."""
    rng = cfg.seed.generator()
    t = rng.random(cfg.n)
    wave = cfg.n ** (-1.0 / 3.0) * square_wave(cfg.n ** (1.0 / 3.0) * t)
    eps_unif = rng.uniform(-0.5, 0.5, cfg.n)
    x1 = (np.sqrt(2) / cfg.sd1) * wave
    x2 = (np.sqrt(2) / cfg.sd2) * (t - wave) + np.sqrt(2) * eps_unif
    X = np.column_stack([x1, x2])
    u_star = LOWERBOUND_U_STAR.copy()
    mu_star = g_n(cfg.example, cfg.n, X @ u_star, cfg.epsilon)
    y = mu_star + cfg.sigma * rng.standard_normal(cfg.n)
    return LabeledDataset(X=X, y=y, mu_star=mu_star, u_star=u_star)
