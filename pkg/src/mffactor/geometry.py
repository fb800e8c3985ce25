"""
Source supports, quadrature over them, and the ground-truth sets that
reconstructions are judged against.

Supported shapes are balls and axis-aligned boxes in 2D or 3D, plus the
2D ellipse and kite.  Unions of disjoint shapes are allowed.  All shapes
describe *open* regions: points on the boundary are outside.

The kite is the usual test curve of qualitative inverse scattering,

    x(t) = (cos t + 0.65 cos 2t - 0.65,  1.5 sin t),   t in [0, 2 pi),

scaled by ``scale`` and shifted by ``center``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, ResolutionTooCoarse

DEFAULT_BOUNDARY_SAMPLES = 100_000

KITE_A = 0.65
KITE_B = 1.5


def _as_points(points, dim):
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != dim:
        raise InvalidArgument(
            f"point dimension {pts.shape[-1]} does not match domain dimension {dim}")
    return pts, single


def _unit(direction, tol=1e-12):
    d = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(d) - 1.0) > tol:
        raise InvalidArgument(f"direction {d} is not a unit vector")
    return d


def direction_from_angle(theta_over_pi: float) -> np.ndarray:
    """2D unit vector at angle ``theta_over_pi * pi``."""
    th = np.pi * theta_over_pi
    return np.array([np.cos(th), np.sin(th)])


# --------------------------------------------------------------------------
# shapes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.radius <= 0:
            raise InvalidArgument("ball radius must be positive")
        if self.dimension not in (2, 3):
            raise InvalidArgument("only 2D and 3D balls are supported")

    @property
    def dimension(self) -> int:
        return len(self.center)

    def bounds(self):
        c = np.array(self.center)
        return c - self.radius, c + self.radius

    def _contains(self, pts):
        return np.sum((pts - np.array(self.center)) ** 2, axis=1) < self.radius ** 2

    def boundary_samples(self, n):
        c = np.array(self.center)
        if self.dimension == 2:
            t = 2 * np.pi * np.arange(n) / n
            return c + self.radius * np.column_stack([np.cos(t), np.sin(t)])
        # Fibonacci lattice on the sphere, poles included
        i = np.arange(n)
        z = 1.0 - 2.0 * i / (n - 1)
        rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        phi = i * np.pi * (3.0 - np.sqrt(5.0))
        return c + self.radius * np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])

    def volume(self) -> float:
        if self.dimension == 2:
            return np.pi * self.radius ** 2
        return 4.0 / 3.0 * np.pi * self.radius ** 3

    def _gauss(self, n):
        c = np.array(self.center)
        xr, wr = np.polynomial.legendre.leggauss(n)
        r = 0.5 * self.radius * (xr + 1.0)
        wr = 0.5 * self.radius * wr
        phi = 2 * np.pi * np.arange(n) / n
        wphi = np.full(n, 2 * np.pi / n)
        if self.dimension == 2:
            R, P = np.meshgrid(r, phi, indexing="ij")
            W = np.outer(wr * r, wphi)
            nodes = np.column_stack([R.ravel() * np.cos(P.ravel()), R.ravel() * np.sin(P.ravel())])
            return c + nodes, W.ravel()
        mu, wmu = np.polynomial.legendre.leggauss(n)
        R, M, P = np.meshgrid(r, mu, phi, indexing="ij")
        W = (wr * r * r)[:, None, None] * wmu[None, :, None] * wphi[None, None, :]
        s = np.sqrt(1.0 - M ** 2)
        nodes = np.column_stack([(R * s * np.cos(P)).ravel(),
                                 (R * s * np.sin(P)).ravel(),
                                 (R * M).ravel()])
        return c + nodes, W.ravel()


@dataclass(frozen=True)
class Cube:
    """Axis-aligned box ``|x_i - c_i| < h_i`` (a rectangle in 2D)."""

    center: tuple
    half_widths: tuple

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        hw = np.broadcast_to(np.asarray(self.half_widths, dtype=float), (len(self.center),))
        object.__setattr__(self, "half_widths", tuple(float(h) for h in hw))
        if min(self.half_widths) <= 0:
            raise InvalidArgument("cube half-widths must be positive")
        if self.dimension not in (2, 3):
            raise InvalidArgument("only 2D and 3D boxes are supported")

    @property
    def dimension(self) -> int:
        return len(self.center)

    def bounds(self):
        c, h = np.array(self.center), np.array(self.half_widths)
        return c - h, c + h

    def _contains(self, pts):
        d = np.abs(pts - np.array(self.center))
        return np.all(d < np.array(self.half_widths), axis=1)

    def boundary_samples(self, n):
        # regular grids on every face; odd counts so face centres and
        # vertices are always sampled
        lo, hi = self.bounds()
        dim = self.dimension
        m = int(np.ceil((n / (2 * dim)) ** (1.0 / (dim - 1))))
        m += 1 - m % 2
        faces = []
        for axis in range(dim):
            others = [a for a in range(dim) if a != axis]
            grids = np.meshgrid(*[np.linspace(lo[a], hi[a], m) for a in others], indexing="ij")
            flat = np.column_stack([g.ravel() for g in grids])
            for value in (lo[axis], hi[axis]):
                face = np.empty((flat.shape[0], dim))
                face[:, others] = flat
                face[:, axis] = value
                faces.append(face)
        return np.vstack(faces)

    def volume(self) -> float:
        return float(np.prod(2 * np.array(self.half_widths)))

    def _gauss(self, n):
        lo, hi = self.bounds()
        x, w = np.polynomial.legendre.leggauss(n)
        axes = [0.5 * (hi[a] - lo[a]) * (x + 1) + lo[a] for a in range(self.dimension)]
        wts = [0.5 * (hi[a] - lo[a]) * w for a in range(self.dimension)]
        grids = np.meshgrid(*axes, indexing="ij")
        W = wts[0]
        for wa in wts[1:]:
            W = np.multiply.outer(W, wa)
        return np.column_stack([g.ravel() for g in grids]), W.ravel()


@dataclass(frozen=True)
class Ellipse:
    center: tuple
    semi_axes: tuple

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "semi_axes", tuple(float(a) for a in self.semi_axes))
        if len(self.center) != 2 or len(self.semi_axes) != 2:
            raise InvalidArgument("ellipse is a 2D shape")
        if min(self.semi_axes) <= 0:
            raise InvalidArgument("ellipse semi-axes must be positive")

    dimension = 2

    def bounds(self):
        c, a = np.array(self.center), np.array(self.semi_axes)
        return c - a, c + a

    def _contains(self, pts):
        q = (pts - np.array(self.center)) / np.array(self.semi_axes)
        return np.sum(q * q, axis=1) < 1.0

    def boundary_samples(self, n):
        t = 2 * np.pi * np.arange(n) / n
        a, b = self.semi_axes
        return np.array(self.center) + np.column_stack([a * np.cos(t), b * np.sin(t)])

    def volume(self) -> float:
        return np.pi * self.semi_axes[0] * self.semi_axes[1]

    def _gauss(self, n):
        xr, wr = np.polynomial.legendre.leggauss(n)
        r = 0.5 * (xr + 1.0)
        wr = 0.5 * wr
        phi = 2 * np.pi * np.arange(n) / n
        R, P = np.meshgrid(r, phi, indexing="ij")
        a, b = self.semi_axes
        W = np.outer(wr * r, np.full(n, 2 * np.pi / n)) * a * b
        nodes = np.column_stack([a * (R * np.cos(P)).ravel(), b * (R * np.sin(P)).ravel()])
        return np.array(self.center) + nodes, W.ravel()


@dataclass(frozen=True)
class Kite:
    center: tuple = (0.0, 0.0)
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) != 2:
            raise InvalidArgument("kite is a 2D shape")
        if self.scale <= 0:
            raise InvalidArgument("kite scale must be positive")

    dimension = 2

    def curve(self, t):
        t = np.asarray(t, dtype=float)
        x = np.cos(t) + KITE_A * np.cos(2 * t) - KITE_A
        y = KITE_B * np.sin(t)
        return np.array(self.center) + self.scale * np.stack([x, y], axis=-1)

    def curve_derivative(self, t):
        t = np.asarray(t, dtype=float)
        dx = -np.sin(t) - 2 * KITE_A * np.sin(2 * t)
        dy = KITE_B * np.cos(t)
        return self.scale * np.stack([dx, dy], axis=-1)

    def bounds(self):
        # x(t) is extremal at t = 0 and cos t = -1 / (4 * 0.65)
        c = -1.0 / (4 * KITE_A)
        xmin = c + KITE_A * (2 * c * c - 1) - KITE_A
        lo = np.array([xmin, -KITE_B])
        hi = np.array([1.0, KITE_B])
        return np.array(self.center) + self.scale * lo, np.array(self.center) + self.scale * hi

    def _contains(self, pts):
        # every horizontal line meets the kite in one interval:
        # |x + 2 a s^2| < sqrt(1 - s^2) with s = y / b
        q = (pts - np.array(self.center)) / self.scale
        s = q[:, 1] / KITE_B
        inside = np.abs(s) < 1.0
        half = np.sqrt(np.clip(1.0 - s * s, 0.0, None))
        return inside & (np.abs(q[:, 0] + 2 * KITE_A * s * s) < half)

    def boundary_samples(self, n):
        return self.curve(2 * np.pi * np.arange(n) / n)

    def volume(self) -> float:
        return KITE_B * np.pi * self.scale ** 2

    def _gauss(self, n):
        # (t, u) -> (-2a sin^2 t + u cos t, b sin t), t in (-pi/2, pi/2), u in (-1, 1)
        xt, wt = np.polynomial.legendre.leggauss(n)
        t = 0.5 * np.pi * xt
        wt = 0.5 * np.pi * wt
        u, wu = np.polynomial.legendre.leggauss(n)
        T, U = np.meshgrid(t, u, indexing="ij")
        x = -2 * KITE_A * np.sin(T) ** 2 + U * np.cos(T)
        y = KITE_B * np.sin(T)
        W = np.outer(wt * KITE_B * np.cos(t) ** 2, wu) * self.scale ** 2
        nodes = self.scale * np.column_stack([x.ravel(), y.ravel()])
        return np.array(self.center) + nodes, W.ravel()


@dataclass(frozen=True)
class Union:
    """Disjoint union of shapes of one dimension."""

    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise InvalidArgument("union needs at least one component")
        dims = {p.dimension for p in self.parts}
        if len(dims) != 1:
            raise InvalidArgument("union components must share one dimension")

    @property
    def dimension(self) -> int:
        return self.parts[0].dimension

    def bounds(self):
        los, his = zip(*(p.bounds() for p in self.parts))
        return np.min(los, axis=0), np.max(his, axis=0)

    def _contains(self, pts):
        out = np.zeros(len(pts), dtype=bool)
        for p in self.parts:
            out |= p._contains(pts)
        return out

    def boundary_samples(self, n):
        return np.vstack([p.boundary_samples(n) for p in self.parts])

    def volume(self) -> float:
        return sum(p.volume() for p in self.parts)

    def overlap_fraction(self, resolution: int = 64) -> float:
        """Fraction of sampled cells claimed by two or more components."""
        lo, hi = self.bounds()
        pts = _cell_centres(lo, hi, resolution)[0]
        counts = sum(p._contains(pts).astype(int) for p in self.parts)
        return float(np.mean(counts > 1))


SupportDomain = (Ball, Cube, Ellipse, Kite, Union)


def contains(domain, point):
    """Membership in the open region; vectorised over rows of ``point``."""
    pts, single = _as_points(point, domain.dimension)
    res = domain._contains(pts)
    return bool(res[0]) if single else res


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    resolution: int
    method: str = "midpoint"

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise InvalidArgument("nodes and weights differ in length")
        if np.any(self.weights <= 0):
            raise InvalidArgument("quadrature weights must be positive")
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return len(self.weights)

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))


def _cell_centres(lo, hi, resolution):
    h = (hi - lo) / resolution
    axes = [lo[a] + h[a] * (np.arange(resolution) + 0.5) for a in range(len(lo))]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([g.ravel() for g in grids]), float(np.prod(h))


def build_quadrature(domain, resolution: int, method: str = "midpoint") -> QuadratureRule:
    """Quadrature rule over ``domain``.

    ``midpoint`` places cell centres of a ``resolution``-per-axis grid on
    the bounding box and keeps those inside the domain; each keeps the cell
    volume as weight.  ``gauss`` uses a mapped tensor Gauss rule with
    ``resolution`` points per coordinate; it converges spectrally for smooth
    integrands and is what the closed-form oracles are checked against.
    Unions concatenate the rules of their components.
    """
    if resolution < 2:
        raise InvalidArgument("resolution must be at least 2")
    if isinstance(domain, Union):
        rules = [build_quadrature(p, resolution, method) for p in domain.parts]
        return QuadratureRule(np.vstack([r.nodes for r in rules]),
                              np.concatenate([r.weights for r in rules]),
                              resolution, method)
    if method == "midpoint":
        lo, hi = domain.bounds()
        pts, vol = _cell_centres(np.asarray(lo, float), np.asarray(hi, float), resolution)
        keep = domain._contains(pts)
        if not np.any(keep):
            raise ResolutionTooCoarse(
                f"no cell centre inside {type(domain).__name__} at resolution {resolution}")
        nodes = pts[keep]
        return QuadratureRule(nodes, np.full(len(nodes), vol), resolution, method)
    if method == "gauss":
        nodes, weights = domain._gauss(resolution)
        return QuadratureRule(nodes, weights, resolution, method)
    raise InvalidArgument(f"unknown quadrature method {method!r}")


# --------------------------------------------------------------------------
# extents, strips, hulls, annuli
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectionalExtent:
    low: float
    high: float
    direction: np.ndarray = field(compare=False)

    def __post_init__(self):
        if not self.low < self.high:
            raise InvalidArgument("extent needs low < high")

    @property
    def width(self) -> float:
        return self.high - self.low

    def dilated(self, margin: float) -> "DirectionalExtent":
        return DirectionalExtent(self.low - margin, self.high + margin, self.direction)


def directional_extent(domain, direction, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> DirectionalExtent:
    """Projection interval (inf x.D, sup x.D) from dense boundary sampling."""
    d = _unit(direction)
    if d.shape != (domain.dimension,):
        raise InvalidArgument("direction dimension does not match the domain")
    proj = domain.boundary_samples(samples) @ d
    return DirectionalExtent(float(proj.min()), float(proj.max()), d)


def strip_membership(extent: DirectionalExtent, point):
    pts = np.atleast_2d(np.asarray(point, dtype=float))
    p = pts @ extent.direction
    res = (extent.low < p) & (p < extent.high)
    return bool(res[0]) if np.ndim(point) == 1 else res


def theta_hull_membership(extents: Sequence[DirectionalExtent], point):
    if not extents:
        raise InvalidArgument("theta hull needs at least one extent")
    res = None
    for e in extents:
        m = strip_membership(e, point)
        res = m if res is None else (res & m)
    return res


def distance_range(domain, point, samples: int = DEFAULT_BOUNDARY_SAMPLES):
    """(inf, sup) of |x - z| over z in the domain, for x outside it.

    Exact for balls and boxes; other shapes use boundary samples.
    """
    x = np.asarray(point, dtype=float)
    if x.shape != (domain.dimension,):
        raise InvalidArgument("point dimension does not match the domain")
    if isinstance(domain, Ball):
        r = float(np.linalg.norm(x - np.array(domain.center)))
        return max(r - domain.radius, 0.0), r + domain.radius
    if isinstance(domain, Cube):
        off = np.abs(x - np.array(domain.center))
        h = np.array(domain.half_widths)
        return float(np.linalg.norm(np.maximum(off - h, 0.0))), float(np.linalg.norm(off + h))
    d = np.linalg.norm(domain.boundary_samples(samples) - x, axis=1)
    inner = 0.0 if domain._contains(x[None, :])[0] else float(d.min())
    return inner, float(d.max())


def annulus_membership(domain, observation_point, query, samples: int = DEFAULT_BOUNDARY_SAMPLES,
                       radii=None):
    """Membership in the open shell inf|x-z| < |x-y| < sup|x-z|.

    ``radii`` may carry a precomputed ``distance_range`` result.
    """
    x = np.asarray(observation_point, dtype=float)
    inner, outer = radii if radii is not None else distance_range(domain, x, samples)
    pts = np.atleast_2d(np.asarray(query, dtype=float))
    r = np.linalg.norm(pts - x, axis=1)
    res = (inner < r) & (r < outer)
    return bool(res[0]) if np.ndim(query) == 1 else res


def separable_along(d1, d2, direction, T: float, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> bool:
    """True when the projections onto ``direction`` are more than T apart."""
    if d1.dimension != d2.dimension:
        raise InvalidArgument("domains differ in dimension")
    if T < 0:
        raise InvalidArgument("T must be nonnegative")
    e1 = directional_extent(d1, direction, samples)
    e2 = directional_extent(d2, direction, samples)
    return (e2.low - e1.high > T) or (e1.low - e2.high > T)


def kite_area_oracle(scale: float = 1.0, n: int = 4096) -> float:
    """Area enclosed by the kite curve via Green's theorem (periodic trapezoid)."""
    k = Kite((0.0, 0.0), scale)
    t = 2 * np.pi * np.arange(n) / n
    p, dp = k.curve(t), k.curve_derivative(t)
    return float(0.5 * np.mean(p[:, 0] * dp[:, 1] - p[:, 1] * dp[:, 0]) * 2 * np.pi)


def centroid(domain, resolution: int = 64) -> np.ndarray:
    q = build_quadrature(domain, resolution, "gauss")
    return (q.weights @ q.nodes) / q.total_weight


# --------------------------------------------------------------------------
# 2D hull polygons
# --------------------------------------------------------------------------

def _clip_half_plane(poly, normal, level, keep_below):
    """Clip a convex polygon to {p : normal.p <= level} (or >= when not keep_below)."""
    if len(poly) == 0:
        return poly
    s = poly @ normal - level
    if not keep_below:
        s = -s
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        sp, sq = s[i], s[(i + 1) % n]
        if sp <= 0:
            out.append(p)
        if sp * sq < 0:
            out.append(p + (q - p) * (sp / (sp - sq)))
    return np.array(out).reshape(-1, 2)


def theta_hull_polygon(extents: Sequence[DirectionalExtent], box: float = 1e3) -> np.ndarray:
    """Vertices (counter-clockwise) of the intersection of 2D strips."""
    if not extents:
        raise InvalidArgument("theta hull needs at least one extent")
    poly = np.array([[-box, -box], [box, -box], [box, box], [-box, box]], dtype=float)
    for e in extents:
        d = np.asarray(e.direction, dtype=float)
        if d.shape != (2,):
            raise InvalidArgument("hull polygons are 2D only")
        poly = _clip_half_plane(poly, d, e.high, True)
        poly = _clip_half_plane(poly, d, e.low, False)
    return poly


def polygon_area(poly) -> float:
    """Shoelace area of a simple polygon."""
    p = np.asarray(poly, dtype=float)
    if len(p) < 3:
        return 0.0
    x, y = p[:, 0], p[:, 1]
    return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def distance_to_convex_polygon(poly, points) -> np.ndarray:
    """Euclidean distance to a convex polygon (zero inside)."""
    poly = np.asarray(poly, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    best = np.full(len(pts), np.inf)
    inside = np.ones(len(pts), dtype=bool)
    area2 = np.dot(poly[:, 0], np.roll(poly[:, 1], -1)) - np.dot(poly[:, 1], np.roll(poly[:, 0], -1))
    orient = 1.0 if area2 >= 0 else -1.0
    for i in range(len(poly)):
        a, b = poly[i], poly[(i + 1) % len(poly)]
        ab = b - a
        ap = pts - a
        cross = ab[0] * ap[:, 1] - ab[1] * ap[:, 0]
        inside &= orient * cross >= 0
        t = np.clip(ap @ ab / max(ab @ ab, 1e-300), 0.0, 1.0)
        best = np.minimum(best, np.linalg.norm(ap - np.outer(t, ab), axis=1))
    return np.where(inside, 0.0, best)
