"""Sparsity and convex-set operators: hard thresholding, orthogonal-complement
projection, and projections onto l2/l1 balls and their intersection (Dykstra).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import NonConvergenceWarning, NonUnitInputError, as_vector


@dataclass(frozen=True)
class BallSpec:
    """Intersection {||x||_2 <= l2_radius, ||x||_1 <= l1_radius}."""

    l2_radius: float
    l1_radius: float

    def __post_init__(self):
        if self.l2_radius <= 0 or self.l1_radius <= 0:
            raise ValueError("ball radii must be positive")

    @classmethod
    def approx_sparse(cls, s: int) -> "BallSpec":
        """The set {||x||_2 <= 1, ||x||_1 <= sqrt(s)} for working sparsity s."""
        return cls(l2_radius=1.0, l1_radius=float(np.sqrt(s)))


def hard_threshold(v, s: int) -> np.ndarray:
    """Keep the s largest-magnitude entries of v, zero out the rest.

    Magnitude ties are broken in favor of the lowest index.
    """
    v = as_vector(v)
    if s >= v.size:
        return v.copy()
    if s <= 0:
        return np.zeros_like(v)
    # stable sort on -|v|: among equal magnitudes the lowest index wins
    keep = np.argsort(-np.abs(v), kind="stable")[:s]
    out = np.zeros_like(v)
    out[keep] = v[keep]
    return out


def project_orthogonal(u, g) -> np.ndarray:
    """Project g onto the orthogonal complement of the unit vector u."""
    u = as_vector(u)
    g = as_vector(g)
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise NonUnitInputError("project_orthogonal requires a unit vector u")
    return g - np.dot(g, u) * u


def project_l2_ball(v, r: float) -> np.ndarray:
    if r <= 0:
        raise ValueError("l2 radius must be positive")
    v = as_vector(v)
    nrm = np.linalg.norm(v)
    if nrm <= r:
        return v.copy()
    return v * (r / nrm)


def project_l1_ball(v, r: float) -> np.ndarray:
    """Euclidean projection onto {||x||_1 <= r} via the sorted soft-threshold."""
    if r <= 0:
        raise ValueError("l1 radius must be positive")
    v = as_vector(v)
    a = np.abs(v)
    if a.sum() <= r:
        return v.copy()
    a_sorted = np.sort(a)[::-1]
    cumsum = np.cumsum(a_sorted)
    ks = np.arange(1, v.size + 1)
    rho = np.nonzero(a_sorted - (cumsum - r) / ks > 0)[0][-1]
    theta = (cumsum[rho] - r) / (rho + 1)
    return np.sign(v) * np.maximum(a - theta, 0.0)


def dykstra_intersection(v, balls: BallSpec, tol: float = 1e-8, max_iter: int = 10000) -> np.ndarray:
    """Euclidean projection onto the intersection of the l2 and l1 balls,
    by Dykstra's alternating projections with correction terms.

    Warns (NonConvergenceWarning) and returns the last iterate if max_iter
    is exhausted before successive iterates differ by < tol in l2.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = as_vector(v)
    x = v.copy()
    p = np.zeros_like(v)
    q = np.zeros_like(v)
    for _ in range(max_iter):
        y = project_l2_ball(x + p, balls.l2_radius)
        p = x + p - y
        x_new = project_l1_ball(y + q, balls.l1_radius)
        q = y + q - x_new
        if np.linalg.norm(x_new - x) < tol:
            return x_new
        x = x_new
    warnings.warn("Dykstra projection did not converge", NonConvergenceWarning)
    return x
