"""Models of the plane, the sphere of radius r and the Poincare disk.

Points are numpy arrays whose last axis holds the coordinates: ``(x, y)`` on
the plane and the disk, ``(x, y, z)`` on the sphere.  Every function accepts
batches of points and broadcasts over the leading axes.

The equator is the x-axis on the plane and the disk and the circle
``z = 0`` on the sphere, oriented by increasing x (counterclockwise seen from
above on the sphere).  Signed arc length along the equator is measured from
``(0, 0)`` or ``(r, 0, 0)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidSetupError

POINT_RTOL = 1e-12
COMMENSURATE_RTOL = 1e-12


class Kind(enum.Enum):
    PLANE = "plane"
    SPHERE = "sphere"
    DISK = "hyperbolic"


@dataclass(frozen=True)
class Surface:
    """One of the three homogeneous surfaces.

    ``radius`` is set only for spheres.  Use the :meth:`plane`,
    :meth:`sphere` and :meth:`disk` constructors.
    """

    kind: Kind
    radius: float | None = None

    def __post_init__(self):
        if self.kind is Kind.SPHERE:
            if self.radius is None or not self.radius > 0 or not math.isfinite(self.radius):
                raise InvalidSetupError(f"sphere radius must be positive, got {self.radius!r}")
            object.__setattr__(self, "radius", float(self.radius))
        elif self.radius is not None:
            raise InvalidSetupError(f"{self.kind.value} surface takes no radius")

    @classmethod
    def plane(cls) -> Surface:
        return cls(Kind.PLANE)

    @classmethod
    def sphere(cls, radius: float) -> Surface:
        return cls(Kind.SPHERE, radius)

    @classmethod
    def disk(cls) -> Surface:
        return cls(Kind.DISK)

    @property
    def dim(self) -> int:
        """Number of ambient coordinates of a point."""
        return 3 if self.kind is Kind.SPHERE else 2

    @property
    def curvature(self) -> float:
        """Gaussian curvature; used as ground truth in tests."""
        if self.kind is Kind.PLANE:
            return 0.0
        if self.kind is Kind.SPHERE:
            return 1.0 / self.radius**2
        return -1.0

    @property
    def name(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class NeedleSetup:
    """Needle of half-length ``half_length`` dropped on a grating of spacing ``2 * half_length``.

    On a sphere the grating only closes up evenly when the spacing is
    ``pi * r / n``; ``sphere_index`` holds that ``n`` (``None`` for an
    incommensurate sphere setup, which only the quadrature routines accept).
    """

    surface: Surface
    half_length: float
    sphere_index: int | None = None

    def __post_init__(self):
        ell = float(self.half_length)
        if not (ell > 0 and math.isfinite(ell)):
            raise InvalidSetupError(f"half_length must be positive and finite, got {self.half_length!r}")
        object.__setattr__(self, "half_length", ell)
        if self.surface.kind is Kind.SPHERE:
            r = self.surface.radius
            if ell > math.pi * r / 4 * (1 + COMMENSURATE_RTOL):
                raise InvalidSetupError(
                    f"sphere needle half-length {ell} exceeds pi*r/4 = {math.pi * r / 4}"
                )
            n = self.sphere_index
            if n is not None:
                if int(n) != n or n < 2:
                    raise InvalidSetupError(f"sphere index n must be an integer >= 2, got {n!r}")
                if abs(2 * n * ell - math.pi * r) > COMMENSURATE_RTOL * math.pi * r:
                    raise InvalidSetupError(
                        f"sphere spacing 2*ell = {2 * ell} is not pi*r/n for n = {n}"
                    )
                object.__setattr__(self, "sphere_index", int(n))
        elif self.sphere_index is not None:
            raise InvalidSetupError("sphere_index only applies to spheres")

    @classmethod
    def plane(cls, ell: float) -> NeedleSetup:
        return cls(Surface.plane(), ell)

    @classmethod
    def disk(cls, ell: float) -> NeedleSetup:
        return cls(Surface.disk(), ell)

    @classmethod
    def sphere(cls, radius: float, n: int) -> NeedleSetup:
        if int(n) != n or n < 2:
            raise InvalidSetupError(f"sphere index n must be an integer >= 2, got {n!r}")
        return cls(Surface.sphere(radius), math.pi * radius / (2 * int(n)), int(n))

    @classmethod
    def sphere_from_ell(cls, radius: float, ell: float, allow_incommensurate: bool = False) -> NeedleSetup:
        """Sphere setup from a half-length, recovering ``n`` when ``ell = pi*r/(2n)``."""
        surface = Surface.sphere(radius)
        if not ell > 0:
            raise InvalidSetupError(f"half_length must be positive, got {ell!r}")
        n = round(math.pi * radius / (2 * ell))
        if n >= 2 and abs(2 * n * ell - math.pi * radius) <= COMMENSURATE_RTOL * math.pi * radius:
            return cls(surface, math.pi * radius / (2 * n), n)
        if allow_incommensurate:
            return cls(surface, ell, None)
        raise InvalidSetupError(
            f"sphere grating needs 2*ell = pi*r/n for an integer n >= 2; "
            f"ell = {ell} with r = {radius} gives n = {math.pi * radius / (2 * ell):.6g}"
        )

    @classmethod
    def for_surface(cls, surface: Surface, ell: float) -> NeedleSetup:
        if surface.kind is Kind.SPHERE:
            return cls.sphere_from_ell(surface.radius, ell)
        return cls(surface, ell)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length

    @property
    def commensurate(self) -> bool:
        return self.surface.kind is not Kind.SPHERE or self.sphere_index is not None


def check_points(surface: Surface, p) -> np.ndarray:
    """Return ``p`` as a float array, raising DomainError if any point is off the surface."""
    p = np.asarray(p, dtype=float)
    if p.shape[-1:] != (surface.dim,):
        raise DomainError(f"{surface.name} points need {surface.dim} coordinates, got shape {p.shape}")
    if surface.kind is Kind.SPHERE:
        r2 = surface.radius**2
        if np.any(np.abs(np.sum(p * p, axis=-1) - r2) > POINT_RTOL * r2):
            raise DomainError("point not on the sphere")
    elif surface.kind is Kind.DISK:
        if np.any(np.sum(p * p, axis=-1) >= 1.0):
            raise DomainError("point outside the open unit disk")
    return p


def circumference(surface: Surface, rho):
    """Circumference of a geodesic circle of radius ``rho``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("circle radius must be positive")
    if surface.kind is Kind.PLANE:
        out = 2 * np.pi * rho
    elif surface.kind is Kind.SPHERE:
        r = surface.radius
        if np.any(rho >= np.pi * r):
            raise DomainError("sphere circle radius must be below pi*r")
        out = 2 * np.pi * r * np.sin(rho / r)
    else:
        out = 2 * np.pi * np.sinh(rho)
    return out[()] if out.ndim == 0 else out


def equator_point(surface: Surface, z) -> np.ndarray:
    """Point on the equator at signed arc length ``z`` from the base point."""
    z = np.asarray(z, dtype=float)
    if surface.kind is Kind.PLANE:
        return np.stack([z, np.zeros_like(z)], axis=-1)
    if surface.kind is Kind.SPHERE:
        r = surface.radius
        a = np.mod(z / r, 2 * np.pi)
        return np.stack([r * np.cos(a), r * np.sin(a), np.zeros_like(z)], axis=-1)
    return np.stack([np.tanh(z / 2), np.zeros_like(z)], axis=-1)


def _sphere_frame(p: np.ndarray, r: float) -> tuple[np.ndarray, np.ndarray]:
    # east = z_hat x p (normalized), north = p_hat x east; degenerate at the poles
    east = np.stack([-p[..., 1], p[..., 0], np.zeros(p.shape[:-1])], axis=-1)
    norm = np.linalg.norm(east, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise DomainError("tangent frame undefined at the poles")
    east = east / norm
    north = np.cross(p / r, east)
    return east, north


def exp_map(surface: Surface, p, theta, t) -> np.ndarray:
    """Follow the geodesic leaving ``p`` at angle ``theta`` for signed length ``t``.

    ``theta`` is measured counterclockwise from the positive equator
    direction (on the sphere: from east towards north).
    """
    p = check_points(surface, p)
    theta = np.asarray(theta, dtype=float)
    t = np.asarray(t, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    if surface.kind is Kind.PLANE:
        return p + np.stack([t * c, t * s], axis=-1)
    if surface.kind is Kind.SPHERE:
        r = surface.radius
        east, north = _sphere_frame(p, r)
        u = c[..., None] * east + s[..., None] * north
        a = (t / r)[..., None]
        return np.cos(a) * p + r * np.sin(a) * u
    # Moebius map w -> (w + p) / (1 + conj(p) w) sends 0 to p with a positive
    # real derivative, so directions at 0 are carried over unchanged.
    pc = p[..., 0] + 1j * p[..., 1]
    w = np.tanh(t / 2) * (c + 1j * s)
    q = (w + pc) / (1 + np.conj(pc) * w)
    return np.stack([q.real, q.imag], axis=-1)


def geodesic_distance(surface: Surface, p, q):
    """Intrinsic distance between points ``p`` and ``q``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if surface.kind is Kind.PLANE:
        out = np.linalg.norm(p - q, axis=-1)
    elif surface.kind is Kind.SPHERE:
        cross = np.linalg.norm(np.cross(p, q), axis=-1)
        out = surface.radius * np.arctan2(cross, np.sum(p * q, axis=-1))
    else:
        pc = p[..., 0] + 1j * p[..., 1]
        qc = q[..., 0] + 1j * q[..., 1]
        out = 2 * np.arctanh(np.abs(pc - qc) / np.abs(1 - np.conj(pc) * qc))
    return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Isometry:
    """Orientation-preserving isometry that maps the equator to itself.

    ``parameter`` is the translation distance on the plane, the rotation
    angle about the polar axis on the sphere (kept in ``[0, 2*pi)``) and the
    Moebius parameter ``tau`` in ``(-1, 1)`` of ``(w + tau) / (tau*w + 1)`` on
    the disk.
    """

    surface: Surface
    parameter: float

    def __post_init__(self):
        v = float(self.parameter)
        if self.surface.kind is Kind.SPHERE:
            v = math.fmod(v, 2 * math.pi)
            if v < 0:
                v += 2 * math.pi
            if v >= 2 * math.pi:
                v = 0.0
        elif self.surface.kind is Kind.DISK and not -1 < v < 1:
            raise DomainError(f"Moebius parameter must lie in (-1, 1), got {v}")
        object.__setattr__(self, "parameter", v)

    @classmethod
    def from_displacement(cls, surface: Surface, d: float) -> Isometry:
        """The isometry moving equator points forward by arc length ``d``."""
        if surface.kind is Kind.PLANE:
            return cls(surface, d)
        if surface.kind is Kind.SPHERE:
            return cls(surface, d / surface.radius)
        return cls(surface, math.tanh(d / 2))

    @property
    def displacement(self) -> float:
        """Signed distance the isometry moves equator points (mod 2*pi*r on a sphere)."""
        if self.surface.kind is Kind.PLANE:
            return self.parameter
        if self.surface.kind is Kind.SPHERE:
            return self.surface.radius * self.parameter
        return 2 * math.atanh(self.parameter)

    def compose(self, other: Isometry) -> Isometry:
        """``self`` after ``other``."""
        if other.surface != self.surface:
            raise DomainError("cannot compose isometries of different surfaces")
        a, b = self.parameter, other.parameter
        if self.surface.kind is Kind.DISK:
            return Isometry(self.surface, (a + b) / (1 + a * b))
        return Isometry(self.surface, a + b)

    def inverse(self) -> Isometry:
        return Isometry(self.surface, -self.parameter)

    def __call__(self, p) -> np.ndarray:
        return apply(self, p)


def apply(iso: Isometry, p) -> np.ndarray:
    """Image of the point(s) ``p`` under ``iso``."""
    surface = iso.surface
    p = np.asarray(p, dtype=float)
    v = iso.parameter
    if surface.kind is Kind.PLANE:
        return p + np.array([v, 0.0])
    if surface.kind is Kind.SPHERE:
        c, s = math.cos(v), math.sin(v)
        rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        return p @ rot.T
    x, y = p[..., 0], p[..., 1]
    den = (v * x + 1) ** 2 + v * v * y * y
    return np.stack(
        [(v * (x * x + y * y) + (v * v + 1) * x + v) / den, (1 - v * v) * y / den],
        axis=-1,
    )


def grating_offsets(setup: NeedleSetup, window: int) -> list[float]:
    """Signed equator positions of the grating lines.

    Plane and disk: the ``2*window + 1`` lines nearest the base point.  Sphere:
    all ``2n`` crossing points, whatever ``window`` is.
    """
    if window < 0:
        raise DomainError("window must be non-negative")
    L = setup.spacing
    if setup.surface.kind is Kind.SPHERE:
        if setup.sphere_index is None:
            raise InvalidSetupError("incommensurate sphere setup has no grating")
        return [m * L for m in range(2 * setup.sphere_index)]
    return [m * L for m in range(-window, window + 1)]
