"""Shared numeric utilities, error types, and the seeded randomness contract.

Matrices and vectors are plain float64 numpy arrays (row-major, dense).
Randomness is counter-based: a (seed, stream_id) pair keys a Philox
generator, so replications can run in any order or in parallel and still
reproduce byte-identical results.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


class SodsimError(Exception):
    """Base class for all library errors."""


class ZeroVectorError(SodsimError):
    pass


class EmptyInputError(SodsimError):
    pass


class NonPositiveWeightError(SodsimError):
    pass


class NonUnitInputError(SodsimError):
    pass


class DegenerateInitializationError(SodsimError):
    pass


class LengthMismatchError(SodsimError):
    pass


class RejectionStallError(SodsimError):
    pass


class InsufficientDataError(SodsimError):
    pass


class UnderdeterminedSlopeError(SodsimError):
    pass


class NotTwoColumnsError(SodsimError):
    pass


class NonConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RngHandle:
    """Counter-based RNG key. Identical (seed, stream_id) pairs replay the
    same draw sequence; distinct stream_ids give independent streams."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=[self.seed, self.stream_id]))

    def stream(self, stream_id: int) -> "RngHandle":
        """Sibling handle with the same seed but a different stream."""
        return RngHandle(self.seed, stream_id)


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected 1-d array, got shape {v.shape}")
    return v


def as_matrix(X) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected 2-d array, got shape {X.shape}")
    return X


def unit_normalize(v) -> np.ndarray:
    """Return v / ||v||_2. Raises ZeroVectorError on a zero vector."""
    v = as_vector(v)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ZeroVectorError("cannot normalize the zero vector")
    return v / nrm


def spectral_norm_sq(X, tol: float = 1e-10, max_iter: int = 1000) -> float:
    """Largest squared singular value of X, by power iteration on X^T X.

    Warns (NonConvergenceWarning) and returns the best iterate if max_iter
    is exhausted before the relative change drops below tol.
    """
    X = as_matrix(X)
    if X.size == 0:
        raise EmptyInputError("spectral_norm_sq of an empty matrix")
    p = X.shape[1]
    # fixed-seed start; avoids adversarial orthogonality of a deterministic ones-vector
    v = RngHandle(0x5eed, 0).generator().standard_normal(p)
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(max_iter):
        w = X.T @ (X @ v)
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0
        v = w / lam
        if abs(lam - prev) <= tol * max(lam, 1.0):
            return lam
        prev = lam
    warnings.warn("power iteration did not converge", NonConvergenceWarning)
    return prev
