"""Intersection probabilities by quadrature, their small-needle expansions,
probability deficits and the curvature fit.

The probability that a needle of half-length ``ell`` meets a grating of
spacing ``2*ell`` is ``2/pi`` on the plane for every ``ell``.  On curved
surfaces it drifts away from ``2/pi`` quadratically in ``ell``; the deficit
``P - 2/pi`` scaled by ``ell**-2`` carries the Gaussian curvature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arclength import conditional_probability, disk_angle_ratio
from .errors import FitError, InvalidSetupError
from .quadrature import DEFAULT_TOL, MAX_LEVEL, integrate
from .surfaces import Kind, NeedleSetup, Surface

TWO_OVER_PI = 2.0 / math.pi

# kappa = lim DEFICIT_SCALE * (P - 2/pi) / ell**2.  The exact integrals give
# deficits of kappa * 2 ell^2 / (9 pi) + O(ell^4) on all three surfaces.
DEFICIT_SCALE = 9.0 * math.pi / 2.0

METHODS = ("exact", "quadrature", "series", "montecarlo")


@dataclass(frozen=True)
class ProbabilityEstimate:
    """A probability with its error and where it came from.

    ``error`` is a quadrature error bound or a Monte Carlo standard error;
    ``detail`` counts integrand evaluations or samples.
    """

    value: float
    error: float
    method: str
    detail: int = 0
    seed: int | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"probability out of range: {self.value}")
        if not self.error >= 0:
            raise ValueError(f"negative error: {self.error}")


def probability(
    setup: NeedleSetup, tol: float = DEFAULT_TOL, max_level: int = MAX_LEVEL
) -> ProbabilityEstimate:
    """Intersection probability from the surface-specific integral formula.

    Plane: exactly ``2/pi``.  Sphere:
    ``1 - 2/(pi ell) * int_0^ell asin(tan(w/r) cot(ell/r)) dw``.  Disk:
    ``2 * (1 - int_0^ell B(z) dz / (pi ell sinh(ell)))`` with ``B`` from
    :func:`buffon.arclength.disk_arc_complement`; since ``B = 2 sinh(ell) arctan(g)``
    the ``sinh`` cancels and large ``ell`` does not overflow.
    """
    ell = setup.half_length
    kind = setup.surface.kind
    if kind is Kind.PLANE:
        return ProbabilityEstimate(TWO_OVER_PI, 0.0, "exact", 0)
    if kind is Kind.SPHERE:
        r = setup.surface.radius
        cot = 1.0 / math.tan(ell / r)

        def integrand(w):
            return np.arcsin(np.minimum(np.tan(w / r) * cot, 1.0))

        scale = 2.0 / (math.pi * ell)
        res = integrate(integrand, 0.0, ell, tol / scale, max_level)
        value = 1.0 - scale * res.value
    else:
        scale = 4.0 / (math.pi * ell)
        res = integrate(lambda z: np.arctan(disk_angle_ratio(z, ell)), 0.0, ell, tol / scale, max_level)
        value = 2.0 - scale * res.value
    value = min(max(value, 0.0), 1.0)
    return ProbabilityEstimate(value, scale * res.error_bound, "quadrature", res.evals)


def probability_via_arclength(
    setup: NeedleSetup, tol: float = DEFAULT_TOL, max_level: int = MAX_LEVEL
) -> ProbabilityEstimate:
    """Intersection probability as the average of ``2 A(z) / C(ell)`` over ``z`` in ``[0, ell]``.

    Uses only the arc-length closed forms, so it checks :func:`probability`
    by a different route.
    """
    ell = setup.half_length
    res = integrate(lambda z: conditional_probability(setup, z), 0.0, ell, tol * ell, max_level)
    value = min(max(res.value / ell, 0.0), 1.0)
    return ProbabilityEstimate(value, res.error_bound / ell, "quadrature", res.evals)


def _require_positive(ell: float) -> float:
    ell = float(ell)
    if not ell > 0:
        raise InvalidSetupError(f"ell must be positive, got {ell}")
    return ell


def series_probability(surface: Surface, ell: float) -> float:
    """Closed-form small-needle model of the probability.

    Sphere ``2/pi + 4 ell^2 / (9 pi r^2)``; disk
    ``2 (1 - ell/(pi sinh ell) ((pi - 1) + ell^2/6 (pi + 1/3)))``; plane ``2/pi``.
    Both curved-surface models carry twice the ``ell^2`` coefficient of the
    exact integrals, so their error is itself of order ``ell^2``; use
    :func:`expansion_probability` for an ``O(ell^4)`` remainder.
    """
    ell = _require_positive(ell)
    if surface.kind is Kind.PLANE:
        return TWO_OVER_PI
    if surface.kind is Kind.SPHERE:
        return TWO_OVER_PI + 4.0 * ell**2 / (9.0 * math.pi * surface.radius**2)
    return 2.0 * (
        1.0 - ell / (math.pi * math.sinh(ell)) * ((math.pi - 1.0) + ell**2 / 6.0 * (math.pi + 1.0 / 3.0))
    )


def expansion_probability(surface: Surface, ell: float) -> float:
    """Second-order Taylor expansion of the exact integrals.

    Sphere ``2/pi + 2 ell^2 / (9 pi r^2)``; disk
    ``2 (1 - 2 ell/(pi sinh ell) ((pi - 1)/2 + ell^2 ((pi - 1)/12 + 1/18)))``.
    The remainder is ``O(ell^4)``.
    """
    ell = _require_positive(ell)
    if surface.kind is Kind.PLANE:
        return TWO_OVER_PI
    if surface.kind is Kind.SPHERE:
        return TWO_OVER_PI + 2.0 * ell**2 / (9.0 * math.pi * surface.radius**2)
    h = (math.pi - 1.0) / 2.0 + ell**2 * ((math.pi - 1.0) / 12.0 + 1.0 / 18.0)
    return 2.0 * (1.0 - 2.0 * ell / (math.pi * math.sinh(ell)) * h)


def deficit(setup: NeedleSetup, tol: float = DEFAULT_TOL) -> float:
    """Probability deficit ``P - 2/pi``; zero on the plane."""
    if setup.surface.kind is Kind.PLANE:
        return 0.0
    return probability(setup, tol).value - TWO_OVER_PI


@dataclass(frozen=True)
class DeficitCurve:
    surface: Surface
    ells: tuple[float, ...]
    probs: tuple[ProbabilityEstimate, ...]
    deficits: tuple[float, ...]

    def __post_init__(self):
        if any(b >= a for a, b in zip(self.ells, self.ells[1:])):
            raise FitError("ell grid must be strictly decreasing")


@dataclass(frozen=True)
class CurvatureEstimate:
    """Curvature read off a deficit curve.

    The deficits are fitted to ``coeff_a * ell^2 + coeff_b * ell^4`` with
    weights ``ell^-4``; ``kappa_hat = scale * coeff_a``.
    """

    kappa_hat: float
    coeff_a: float
    coeff_b: float
    residual_rms: float
    scale: float
    grid: DeficitCurve = field(repr=False)


def default_grid(surface: Surface) -> list[NeedleSetup]:
    """Sphere: ``n`` in 4, 8, ..., 64.  Plane and disk: ``ell = 0.2 * 2**-k`` for k = 0..5."""
    if surface.kind is Kind.SPHERE:
        return [NeedleSetup.sphere(surface.radius, n) for n in (4, 8, 16, 32, 64)]
    return [NeedleSetup(surface, 0.2 * 2.0**-k) for k in range(6)]


def geometric_grid(surface: Surface, ell_max: float, levels: int) -> list[NeedleSetup]:
    """``levels`` half-lengths halving from ``ell_max``.

    On a sphere the first half-length is the largest grating-legal value
    ``pi*r/(2n)`` not above ``ell_max``, and ``n`` then doubles.
    """
    if levels < 1:
        raise InvalidSetupError("levels must be at least 1")
    ell_max = _require_positive(ell_max)
    if surface.kind is Kind.SPHERE:
        n0 = max(2, math.ceil(math.pi * surface.radius / (2.0 * ell_max) * (1 - 1e-12)))
        return [NeedleSetup.sphere(surface.radius, n0 * 2**k) for k in range(levels)]
    return [NeedleSetup(surface, ell_max * 2.0**-k) for k in range(levels)]


def deficit_curve(
    setups: Sequence[NeedleSetup], tol: float = DEFAULT_TOL, max_level: int = MAX_LEVEL
) -> DeficitCurve:
    """Probabilities and deficits over a grid of setups on one surface."""
    if not setups:
        raise FitError("empty grid")
    surface = setups[0].surface
    if any(s.surface != surface for s in setups):
        raise FitError("grid mixes surfaces")
    if surface.kind is Kind.SPHERE and any(not s.commensurate for s in setups):
        raise InvalidSetupError("sphere grid must use ell = pi*r/(2n)")
    probs = tuple(probability(s, tol, max_level) for s in setups)
    return DeficitCurve(
        surface,
        tuple(s.half_length for s in setups),
        probs,
        tuple(p.value - TWO_OVER_PI if surface.kind is not Kind.PLANE else 0.0 for p in probs),
    )


def curvature_estimate(
    surface: Surface,
    grid: Sequence[NeedleSetup] | None = None,
    tol: float = DEFAULT_TOL,
    scale: float = DEFICIT_SCALE,
    max_level: int = MAX_LEVEL,
) -> CurvatureEstimate:
    """Estimate the Gaussian curvature from probability deficits.

    Raises
    ------
    FitError
        With fewer than 4 grid points, or when a quadrature error bound is
        not small against the deficit it belongs to.
    """
    setups = list(grid) if grid is not None else default_grid(surface)
    if len(setups) < 4:
        raise FitError(f"need at least 4 grid points, got {len(setups)}")
    if any(s.surface != surface for s in setups):
        raise FitError("grid setups belong to a different surface")
    curve = deficit_curve(setups, tol, max_level)
    ells = np.array(curve.ells)
    d = np.array(curve.deficits)
    if surface.kind is not Kind.PLANE:
        errs = np.array([p.error for p in curve.probs])
        if np.any(errs >= 0.1 * np.abs(d)):
            raise FitError("quadrature error is not small against the deficit; refine tol or coarsen the grid")
    # weight ell^-4 on d = a ell^2 + b ell^4  <=>  unweighted d/ell^2 = a + b ell^2
    y = d / ells**2
    design = np.column_stack([np.ones_like(ells), ells**2])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([a, b])
    rms = float(np.sqrt(np.mean(resid**2)))
    return CurvatureEstimate(float(scale * a), float(a), float(b), rms, float(scale), curve)
