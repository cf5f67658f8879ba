"""Needle-drop simulation.

Samples are addressed by a global index.  Index ``i`` lives in block
``i // BLOCK_SIZE``; each block draws from its own Philox stream keyed by
``(seed, block)``, and sample ``j`` of a block uses draws ``2j`` and ``2j+1``.
Hit counts therefore depend only on ``(setup, n, seed)``, never on how the
blocks are spread over workers.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import ProbabilityEstimate
from .arclength import arc_length
from .errors import InvalidSetupError
from .surfaces import Kind, NeedleSetup, circumference, equator_point, exp_map

BLOCK_SIZE = 1 << 16
BOUNDARY_GUARD = 1e-12
# needle endpoints reach hyperbolic distance 2*ell from the origin; beyond this
# their euclidean disk coordinates no longer resolve which side of a line they are on
MAX_DISK_ELL = 10.0
_U64 = 1 << 64


@dataclass(frozen=True)
class RandomStream:
    """Counter-based stream of uniforms on ``[0, 1)`` for one block of samples."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v < _U64:
                raise ValueError(f"{name} must be an integer in [0, 2**64), got {v!r}")
            object.__setattr__(self, name, int(v))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=(self.stream_id << 64) | self.seed))

    def uniforms(self, count: int) -> np.ndarray:
        """The first ``count`` uniforms of the stream."""
        return self.generator().random(count)


@dataclass(frozen=True)
class DropSample:
    """Needle centre offsets ``z`` in ``[-ell, ell]`` and directions ``theta`` in ``[0, 2 pi)``."""

    z: np.ndarray | float
    theta: np.ndarray | float


def sample_block(stream: RandomStream, setup: NeedleSetup, count: int) -> DropSample:
    u = stream.uniforms(2 * count)
    ell = setup.half_length
    return DropSample(ell * (2.0 * u[0::2] - 1.0), 2.0 * math.pi * u[1::2])


def sample_drop(stream: RandomStream, setup: NeedleSetup, index: int = 0) -> DropSample:
    """The single drop at position ``index`` of ``stream``."""
    if index < 0:
        raise ValueError("index must be non-negative")
    s = sample_block(stream, setup, index + 1)
    return DropSample(float(s.z[-1]), float(s.theta[-1]))


def _needle_ends(setup: NeedleSetup, center: np.ndarray, theta: np.ndarray):
    surface = setup.surface
    p = equator_point(surface, center)
    ell = setup.half_length
    return p, exp_map(surface, p, theta, ell), exp_map(surface, p, theta, -ell)


def _moebius_x(tau: np.ndarray, pts: np.ndarray) -> np.ndarray:
    x, y = pts[..., 0], pts[..., 1]
    den = (tau * x + 1) ** 2 + tau * tau * y * y
    return (tau * (x * x + y * y) + (tau * tau + 1) * x + tau) / den


def geometric_clearance(setup: NeedleSetup, sample: DropSample, offset: float = 0.0):
    """Intersection indicator from the needle's actual geodesic, plus endpoint clearance.

    Returns ``(hit, clearance)`` where ``clearance`` is the distance from
    the closer needle endpoint to the nearest tested grating line (euclidean
    on the disk, chordal on the sphere).  Both are boolean/float arrays.
    """
    surface = setup.surface
    z = np.atleast_1d(np.asarray(sample.z, dtype=float))
    theta = np.atleast_1d(np.asarray(sample.theta, dtype=float))
    c = z + offset
    L = setup.spacing
    if surface.kind is Kind.SPHERE:
        if setup.sphere_index is None:
            raise InvalidSetupError("incommensurate sphere setup has no grating")
        r = surface.radius
        c = np.mod(c, 2 * math.pi * r)
        p, e1, e2 = _needle_ends(setup, c, theta)
        ph = p / r
        tangent = e1 - math.cos(setup.half_length / r) * p
        m = np.cross(ph, tangent)
        hit = np.zeros(z.shape, dtype=bool)
        clearance = np.full(z.shape, np.inf)
        for k in range(setup.sphere_index):
            a = k * L / r
            normal = np.array([-math.sin(a), math.cos(a), 0.0])
            q = np.cross(m, normal)
            qn = np.linalg.norm(q, axis=-1)
            # needle circle coincides with the grating circle
            same = qn <= 1e-15 * np.linalg.norm(m, axis=-1)
            ang = np.arctan2(np.linalg.norm(np.cross(ph, q), axis=-1), np.abs(np.sum(ph * q, axis=-1)))
            hit |= same | (ang <= setup.half_length / r)
            clearance = np.minimum(clearance, np.minimum(np.abs(e1 @ normal), np.abs(e2 @ normal)))
        return hit, clearance

    _, e1, e2 = _needle_ends(setup, c, theta)
    hit = np.zeros(z.shape, dtype=bool)
    clearance = np.full(z.shape, np.inf)
    for k in (np.floor(c / L), np.ceil(c / L)):
        if surface.kind is Kind.PLANE:
            x1 = e1[..., 0] - k * L
            x2 = e2[..., 0] - k * L
        else:
            tau = np.tanh(-k * L / 2)
            x1 = _moebius_x(tau, e1)
            x2 = _moebius_x(tau, e2)
        hit |= x1 * x2 <= 0
        clearance = np.minimum(clearance, np.minimum(np.abs(x1), np.abs(x2)))
    return hit, clearance


def intersects_geometric(setup: NeedleSetup, sample: DropSample, offset: float = 0.0):
    """Whether the needle segment meets a grating line (closed event)."""
    hit, _ = geometric_clearance(setup, sample, offset)
    return hit if np.ndim(sample.z) else bool(hit[0])


def intersects_arc(setup: NeedleSetup, sample: DropSample, offset: float = 0.0):
    """Whether the needle direction falls in the critical arcs given by ``A(z)``.

    The tip circle arc of length ``A`` beyond the nearest line subtends
    ``2 pi A / C`` at the centre, symmetric about the equator direction, so
    the needle (or its reverse) crosses iff ``theta`` is within ``pi A / C``
    of 0 or pi.
    """
    z = np.asarray(sample.z, dtype=float) + offset
    theta = np.asarray(sample.theta, dtype=float)
    L = setup.spacing
    if setup.surface.kind is Kind.SPHERE:
        if setup.sphere_index is None:
            raise InvalidSetupError("incommensurate sphere setup has no grating")
        z = np.mod(z, 2 * math.pi * setup.surface.radius)
    local = z - np.round(z / L) * L
    half_width = math.pi * arc_length(setup, local) / circumference(setup.surface, setup.half_length)
    delta = np.arctan2(np.abs(np.sin(theta)), np.abs(np.cos(theta)))
    hit = delta <= half_width
    return hit if np.ndim(hit) else bool(hit)


@dataclass(frozen=True)
class McResult:
    hits: int
    samples: int
    seed: int
    wall_time: float = 0.0

    @property
    def estimate(self) -> float:
        return self.hits / self.samples

    @property
    def stderr(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1.0 - p) / self.samples)

    def to_estimate(self) -> ProbabilityEstimate:
        return ProbabilityEstimate(self.estimate, self.stderr, "montecarlo", self.samples, self.seed)


def _validate(setup: NeedleSetup, n: int, workers: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"number of samples must be a positive integer, got {n!r}")
    if int(workers) != workers or workers < 1:
        raise ValueError(f"workers must be a positive integer, got {workers!r}")
    if not setup.commensurate:
        raise InvalidSetupError("sphere Monte Carlo needs ell = pi*r/(2n) for an integer n >= 2")
    if setup.surface.kind is Kind.DISK and setup.half_length > MAX_DISK_ELL:
        raise InvalidSetupError(f"disk Monte Carlo needs ell <= {MAX_DISK_ELL:g} for double precision")


def _block_hits(setup: NeedleSetup, seed: int, block: int, count: int, offset: float) -> int:
    s = sample_block(RandomStream(seed, block), setup, count)
    return int(np.count_nonzero(intersects_geometric(setup, s, offset)))


def estimate(
    setup: NeedleSetup,
    n: int,
    seed: int,
    workers: int = 1,
    offset: float = 0.0,
) -> McResult:
    """Drop ``n`` needles and count grating intersections.

    ``offset`` shifts every centre along the equator before testing, i.e. the
    drop window is centred at the image of the base point under the
    isometry of that displacement.
    """
    _validate(setup, n, workers)
    seed = RandomStream(seed).seed
    t0 = time.perf_counter()
    blocks = [(b, min(BLOCK_SIZE, n - b * BLOCK_SIZE)) for b in range(-(-n // BLOCK_SIZE))]
    if workers == 1:
        hits = sum(_block_hits(setup, seed, b, m, offset) for b, m in blocks)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(lambda bm: _block_hits(setup, seed, bm[0], bm[1], offset), blocks))
    return McResult(hits, n, seed, time.perf_counter() - t0)


def derive_seed(seed: int, tag: int) -> int:
    """A platform-stable 64-bit seed derived from ``(seed, tag)``."""
    state = np.random.SeedSequence([int(seed), int(tag)]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def invariance_experiment(
    setup: NeedleSetup,
    displacement: float,
    n: int,
    seed: int,
    shared_seed: bool = False,
    workers: int = 1,
) -> tuple[McResult, McResult]:
    """Baseline run and a run with every centre moved by ``displacement`` along the equator.

    The two runs use independent seeds derived from ``seed`` unless
    ``shared_seed`` is set, in which case both use ``seed`` itself.
    """
    if shared_seed:
        s0 = s1 = seed
    else:
        s0, s1 = derive_seed(seed, 0), derive_seed(seed, 1)
    base = estimate(setup, n, s0, workers)
    moved = estimate(setup, n, s1, workers, offset=displacement)
    return base, moved


def z_statistic(a: McResult, b: McResult) -> float:
    """Two-sample z-statistic of the difference of two hit rates."""
    se = math.hypot(a.stderr, b.stderr)
    diff = a.estimate - b.estimate
    if se == 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / se
