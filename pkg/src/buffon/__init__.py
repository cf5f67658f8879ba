"""Generalized Buffon needle problem on the plane, the sphere and the Poincare disk."""

from .analytic import (
    DEFICIT_SCALE,
    TWO_OVER_PI,
    CurvatureEstimate,
    DeficitCurve,
    ProbabilityEstimate,
    curvature_estimate,
    deficit,
    expansion_probability,
    probability,
    probability_via_arclength,
    series_probability,
)
from .arclength import arc_length, conditional_probability, euclid_circle_params
from .errors import ConvergenceError, DomainError, FitError, InvalidSetupError
from .montecarlo import McResult, estimate, invariance_experiment
from .quadrature import QuadratureResult, integrate
from .surfaces import Isometry, NeedleSetup, Surface

__all__ = [
    "DEFICIT_SCALE",
    "TWO_OVER_PI",
    "ConvergenceError",
    "CurvatureEstimate",
    "DeficitCurve",
    "DomainError",
    "FitError",
    "InvalidSetupError",
    "Isometry",
    "McResult",
    "NeedleSetup",
    "ProbabilityEstimate",
    "QuadratureResult",
    "Surface",
    "arc_length",
    "conditional_probability",
    "curvature_estimate",
    "deficit",
    "estimate",
    "euclid_circle_params",
    "expansion_probability",
    "integrate",
    "invariance_experiment",
    "probability",
    "probability_via_arclength",
    "series_probability",
]
