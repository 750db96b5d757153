"""Sparse monotone single-index model estimation: the orthogonal-descent
solver, isotonic machinery, baselines, generators, and experiment harnesses.
"""

from .core import RngHandle, spectral_norm_sq, unit_normalize
from .isotonic import IsoResult, StepLink, fit_link, iso_project, pava, predict_link
from .operators import (
    BallSpec,
    dykstra_intersection,
    hard_threshold,
    project_l1_ball,
    project_l2_ball,
    project_orthogonal,
)
from .solver import SodSimConfig, SodSimFit, fit, initialize, prediction_error, step

__all__ = [
    "RngHandle",
    "spectral_norm_sq",
    "unit_normalize",
    "IsoResult",
    "StepLink",
    "fit_link",
    "iso_project",
    "pava",
    "predict_link",
    "BallSpec",
    "dykstra_intersection",
    "hard_threshold",
    "project_l1_ball",
    "project_l2_ball",
    "project_orthogonal",
    "SodSimConfig",
    "SodSimFit",
    "fit",
    "initialize",
    "prediction_error",
    "step",
]

__version__ = "0.1.0"
