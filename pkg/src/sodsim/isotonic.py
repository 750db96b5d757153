"""Isotonic regression (weighted PAVA), projection onto the monotone cone
induced by an order key, and monotone step-function links for prediction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import maybe_njit
from .core import EmptyInputError, NonPositiveWeightError, as_vector


@maybe_njit
def _pava_kernel(y, w):
    # stack-based weighted PAVA, O(n)
    n = y.shape[0]
    level = np.empty(n)
    weight = np.empty(n)
    size = np.empty(n, dtype=np.int64)
    m = 0
    for i in range(n):
        level[m] = y[i]
        weight[m] = w[i]
        size[m] = 1
        m += 1
        while m > 1 and level[m - 2] > level[m - 1]:
            tw = weight[m - 2] + weight[m - 1]
            level[m - 2] = (weight[m - 2] * level[m - 2] + weight[m - 1] * level[m - 1]) / tw
            weight[m - 2] = tw
            size[m - 2] += size[m - 1]
            m -= 1
    out = np.empty(n)
    j = 0
    for b in range(m):
        for _ in range(size[b]):
            out[j] = level[b]
            j += 1
    return out


def pava(v, w=None) -> np.ndarray:
    """Weighted least-squares projection of v onto the non-decreasing cone."""
    v = as_vector(v)
    if v.size == 0:
        raise EmptyInputError("pava of an empty vector")
    if w is None:
        w = np.ones_like(v)
    else:
        w = as_vector(w)
        if w.shape != v.shape:
            raise ValueError("weights must match v in length")
        if np.any(w <= 0):
            raise NonPositiveWeightError("pava weights must be positive")
    return _pava_kernel(v, w)


@dataclass(frozen=True)
class IsoResult:
    """Isotonic fit in original sample order plus its block structure.

    blocks are (start, end, level) over the tie-merged sorted order, with
    end exclusive and indices counting tie groups' member samples.
    """

    fitted: np.ndarray
    blocks: tuple


def iso_project(z, v) -> IsoResult:
    """Project v onto {w : w_i <= w_j whenever z_i <= z_j}.

    Ties in z are pre-averaged into weighted blocks (the constraint forces
    equality on tied entries), then weighted PAVA runs over the groups and
    the fit is scattered back to the original order.
    """
    z = as_vector(z)
    v = as_vector(v)
    if z.size == 0:
        raise EmptyInputError("iso_project of an empty vector")
    if z.shape != v.shape:
        raise ValueError("order key and response must have equal length")

    order = np.argsort(z, kind="stable")
    z_sorted = z[order]
    v_sorted = v[order]
    uniq, group_start, counts = np.unique(z_sorted, return_index=True, return_counts=True)
    if uniq.size == z.size:
        group_means = v_sorted
        weights = np.ones_like(v_sorted)
        counts = np.ones(z.size, dtype=np.int64)
    else:
        group_means = np.add.reduceat(v_sorted, group_start) / counts
        weights = counts.astype(np.float64)
    fit_groups = _pava_kernel(np.ascontiguousarray(group_means), np.ascontiguousarray(weights))

    fitted_sorted = np.repeat(fit_groups, counts)
    fitted = np.empty_like(v)
    fitted[order] = fitted_sorted

    blocks = []
    start = 0
    k = 0
    while k < fit_groups.size:
        j = k
        members = 0
        while j < fit_groups.size and fit_groups[j] == fit_groups[k]:
            members += int(counts[j])
            j += 1
        blocks.append((start, start + members, float(fit_groups[k])))
        start += members
        k = j
    return IsoResult(fitted=fitted, blocks=tuple(blocks))


@dataclass(frozen=True)
class StepLink:
    """Monotone link estimate: strictly increasing knots with non-decreasing
    fitted levels."""

    knots: np.ndarray
    levels: np.ndarray

    def __post_init__(self):
        knots = as_vector(self.knots)
        levels = as_vector(self.levels)
        if knots.size == 0 or knots.size != levels.size:
            raise ValueError("knots and levels must be nonempty and equal length")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if np.any(np.diff(levels) < 0):
            raise ValueError("levels must be non-decreasing")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "levels", levels)


def fit_link(scores, y) -> StepLink:
    """Isotonic link fit: knots are the distinct score values (tie-merged),
    levels the corresponding isotonic regression of y."""
    scores = as_vector(scores)
    y = as_vector(y)
    if scores.size == 0:
        raise EmptyInputError("fit_link on empty data")
    if scores.shape != y.shape:
        raise ValueError("scores and y must have equal length")
    res = iso_project(scores, y)
    order = np.argsort(scores, kind="stable")
    knots, first = np.unique(scores[order], return_index=True)
    levels = res.fitted[order][first]
    return StepLink(knots=knots, levels=levels)


def predict_link(link: StepLink, score) -> np.ndarray | float:
    """Evaluate the link by piecewise-linear interpolation between knots,
    clamped to the end levels outside the knot range."""
    out = np.interp(score, link.knots, link.levels)
    if np.isscalar(score):
        return float(out)
    return out
