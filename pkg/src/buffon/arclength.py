"""Arc of the tip circle cut off by the nearest grating line.

For a needle centred a signed distance ``z`` from a grating line (``|z| <= ell``)
the needle tip sits on the geodesic circle of radius ``ell`` about the centre.
``arc_length`` returns the length ``A(z)`` of the smaller arc of that circle
lying across the line; the needle crosses the grating with conditional
probability ``2 A(z) / C(ell)``.

All functions accept scalars or numpy arrays for ``z``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .surfaces import Kind, NeedleSetup, circumference

Z_CLAMP_RTOL = 1e-12
_TINY = 1e-300


@dataclass(frozen=True)
class EuclidCircleParams:
    """Euclidean description of the disk circle of hyperbolic radius ``ell`` about ``(tanh(z/2), 0)``."""

    center_x: np.ndarray | float
    radius_e: np.ndarray | float
    alpha: np.ndarray | float
    beta: np.ndarray | float
    theta_crit: np.ndarray | float


def euclid_circle_params(z, ell: float) -> EuclidCircleParams:
    """Euclidean centre, radius and the auxiliary quantities used for disk arcs.

    ``theta_crit`` is the angle, seen from the euclidean centre, of the upper
    intersection with the diameter ``x = 0``; it is NaN when ``|z| > ell``.
    """
    if not ell > 0:
        raise DomainError("ell must be positive")
    z = np.asarray(z, dtype=float)
    tp = np.tanh((z + ell) / 2)
    tm = np.tanh((z - ell) / 2)
    x = 0.5 * (tp + tm)
    r = 0.5 * (tp - tm)
    alpha = 1 - x * x - r * r
    beta = 2 * r * x
    with np.errstate(invalid="ignore"):
        theta = np.where(np.abs(z) <= ell, np.arccos(np.clip(-x / r, -1.0, 1.0)), np.nan)

    def _s(a):
        return a[()] if a.ndim == 0 else a

    return EuclidCircleParams(_s(x), _s(r), _s(alpha), _s(beta), _s(theta))


def _fold(setup: NeedleSetup, z) -> np.ndarray:
    ell = setup.half_length
    a = np.abs(np.asarray(z, dtype=float))
    if np.any(a > ell * (1 + Z_CLAMP_RTOL)) or np.any(np.isnan(a)):
        raise DomainError(f"offset must satisfy |z| <= ell = {ell}")
    return np.minimum(a, ell)


def disk_angle_ratio(z, ell: float):
    """The argument ``g(z)`` of the arctangent in ``B(z) = 2 sinh(ell) arctan(g(z))``, for ``0 <= z <= ell``.

    ``g = cosh((z+ell)/2) / cosh((z-ell)/2) * sqrt(tanh((ell+z)/2) / tanh((ell-z)/2))``,
    evaluated with the cosh ratio as ``e^z (1 + e^-(ell+z)) / (1 + e^-(ell-z))``
    so it stays finite for large ``ell``.  ``g(0) = 1`` and ``g -> inf`` at tangency.
    """
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore"):
        cosh_ratio = np.exp(z) * (1 + np.exp(-(ell + z))) / (1 + np.exp(-(ell - z)))
        # tanh((ell - z)/2) -> 0 at the tangency; the ratio and g blow up there
        ratio = np.tanh((ell + z) / 2) / np.maximum(np.tanh((ell - z) / 2), _TINY)
        return cosh_ratio * np.sqrt(ratio)


def disk_arc_complement(z, ell: float):
    """The term ``B(z)`` in ``A(z) = 2 (pi sinh(ell) - B(z))`` on the disk, for ``0 <= z <= ell``.

    The prefactor ``2 (t+ - t-) / sqrt((1 - t+^2)(1 - t-^2))`` with
    ``t+- = tanh((z +- ell)/2)`` reduces to ``2 sinh(ell)``.
    """
    return 2 * np.sinh(ell) * np.arctan(disk_angle_ratio(z, ell))


def _disk_half_fraction(a, ell: float):
    # A(z) / C(ell) = (2/pi) arctan(1/g), free of the sinh(ell) factor
    with np.errstate(divide="ignore"):
        return np.arctan(1.0 / disk_angle_ratio(a, ell)) * (2 / np.pi)


def arc_length(setup: NeedleSetup, z):
    """Length ``A(z)`` of the smaller tip-circle arc beyond the nearest grating line."""
    a = _fold(setup, z)
    ell = setup.half_length
    kind = setup.surface.kind
    if kind is Kind.PLANE:
        out = 2 * ell * np.arccos(a / ell)
    elif kind is Kind.SPHERE:
        r = setup.surface.radius
        s = np.sin(ell / r)
        arg = np.minimum(np.tan(a / r) / np.tan(ell / r), 1.0)
        out = np.pi * r * s - 2 * r * s * np.arcsin(arg)
    else:
        # 2 (pi sinh - B) = 4 sinh arctan(1/g), without the cancellation near tangency
        out = 2 * np.pi * np.sinh(ell) * _disk_half_fraction(a, ell)
    out = np.clip(out, 0.0, None)
    return out[()] if np.ndim(out) == 0 else out


def conditional_probability(setup: NeedleSetup, z):
    """Probability that a needle centred at offset ``z`` meets the grating: ``2 A(z) / C(ell)``."""
    if setup.surface.kind is Kind.DISK:
        p = 2 * _disk_half_fraction(_fold(setup, z), setup.half_length)
    else:
        p = 2 * arc_length(setup, z) / circumference(setup.surface, setup.half_length)
    p = np.clip(p, 0.0, 1.0)
    return p[()] if np.ndim(p) == 0 else p
