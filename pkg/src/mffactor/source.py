"""
Separable space-time sources S(x, t) = a(x) b(t) and their
wave-number-dependent counterpart

    f(x, k) = (2 pi)^(-1/2) * int_{t_min}^{t_max} S(x, t) exp(+i k t) dt.

The spatial factor comes from a small catalog (constant, affine, radial);
the temporal factor is a polynomial (closed-form time integral) or a
tabulated profile (Gauss-Legendre quadrature).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from . import geometry
from .errors import InvalidArgument, InvalidConfig, PositivityError, PositivityWarning

SQRT_2PI = np.sqrt(2.0 * np.pi)

SPATIAL_KINDS = ("constant", "affine", "radial")


@dataclass(frozen=True)
class SpatialFactor:
    """a(x) = amplitude * g(x) with g chosen by ``kind``.

    constant: g = 1
    affine:   g = gradient . x + offset
    radial:   g = |x|^2 + offset
    """

    kind: str = "constant"
    amplitude: float = 1.0
    offset: float = 0.0
    gradient: tuple = ()

    def __post_init__(self):
        if self.kind not in SPATIAL_KINDS:
            raise InvalidConfig(f"unknown spatial factor {self.kind!r}; expected one of {SPATIAL_KINDS}")
        object.__setattr__(self, "gradient", tuple(float(g) for g in self.gradient))
        if self.kind == "affine" and not self.gradient:
            raise InvalidConfig("affine spatial factor needs a gradient")

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.kind == "constant":
            g = np.ones(len(x))
        elif self.kind == "affine":
            if len(self.gradient) != x.shape[1]:
                raise InvalidArgument("gradient dimension does not match the points")
            g = x @ np.array(self.gradient) + self.offset
        else:
            g = np.sum(x * x, axis=1) + self.offset
        return self.amplitude * g


@dataclass(frozen=True)
class PolynomialProfile:
    """b(t) = sum_j coeffs[j] t^j."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise InvalidConfig("temporal polynomial needs at least one coefficient")

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), self.coeffs)


@dataclass(frozen=True)
class TabulatedProfile:
    """b(t) by linear interpolation of samples; integrated with Gauss-Legendre."""

    times: tuple
    values: tuple
    nodes: int = 64

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.times) != len(self.values) or len(self.times) < 2:
            raise InvalidConfig("tabulated profile needs matching times/values (>= 2 samples)")
        if np.any(np.diff(self.times) <= 0):
            raise InvalidConfig("tabulated times must be strictly increasing")
        if self.nodes < 2:
            raise InvalidConfig("tabulated profile needs at least 2 quadrature nodes")

    def __call__(self, t):
        return np.interp(np.asarray(t, dtype=float), self.times, self.values)


def _centered_moments(k, half, degree):
    """M_n(k) = int_{-h}^{h} u^n exp(i k u) du for n = 0..degree.

    Power series for |k| h <= 2, upward recursion otherwise.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.empty((degree + 1,) + k.shape, dtype=complex)
    small = np.abs(k) * half <= 2.0
    if np.any(small):
        ks = k[small]
        for n in range(degree + 1):
            acc = np.zeros(ks.shape, dtype=complex)
            for j in range(60):
                p = n + j + 1
                # only the even powers of u survive on a symmetric interval
                if p % 2 == 0:
                    continue
                acc += (1j * ks) ** j / factorial(j) * (2.0 * half ** p / p)
            out[n][small] = acc
    big = ~small
    if np.any(big):
        kb = k[big]
        ik = 1j * kb
        ep, em = np.exp(ik * half), np.exp(-ik * half)
        prev = (ep - em) / ik
        out[0][big] = prev
        for n in range(1, degree + 1):
            bnd = (half ** n * ep - (-half) ** n * em) / ik
            prev = bnd - n / ik * prev
            out[n][big] = prev
    return out


def polynomial_time_transform(coeffs, t_min, t_max, k):
    """int_{t_min}^{t_max} p(t) exp(i k t) dt in closed form, vectorised over k."""
    c = 0.5 * (t_min + t_max)
    h = 0.5 * (t_max - t_min)
    # re-expand p about the window centre: p(c + u) = sum_n q_n u^n
    shifted = np.polynomial.Polynomial(coeffs)(np.polynomial.Polynomial([c, 1.0])).coef
    k = np.asarray(k, dtype=float)
    moments = _centered_moments(k, h, len(shifted) - 1).reshape((len(shifted),) + k.shape)
    val = np.tensordot(shifted, moments, axes=(0, 0))
    return np.exp(1j * k * c) * val


def gauss_time_transform(profile, t_min, t_max, k, nodes):
    if nodes < 2:
        raise InvalidConfig("time quadrature needs at least 2 nodes")
    x, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (t_max - t_min) * (x + 1.0) + t_min
    w = 0.5 * (t_max - t_min) * w
    k = np.asarray(k, dtype=float)
    return np.exp(1j * np.multiply.outer(k, t)) @ (w * profile(t))


@dataclass(frozen=True)
class SpaceTimeSource:
    """S(x, t) = a(x) b(t) on D x [t_min, t_max].

    Construction scans quadrature nodes of D times 64 instants for the sign
    condition S >= c0 > 0.  A violation issues :class:`PositivityWarning`,
    or raises :class:`PositivityError` when ``strict`` is set.
    """

    spatial: SpatialFactor
    temporal: object
    t_min: float
    t_max: float
    support: object
    strict: bool = False
    min_value: float = field(init=False, default=np.nan)

    def __post_init__(self):
        if self.t_min < 0:
            raise InvalidConfig("t_min must be nonnegative")
        if not self.t_max > self.t_min:
            raise InvalidConfig("t_max must exceed t_min")
        res = 24 if self.support.dimension == 3 else 64
        nodes = geometry.build_quadrature(self.support, res, "gauss").nodes
        ts = np.linspace(self.t_min, self.t_max, 64)
        smin = float(np.min(np.multiply.outer(self.spatial(nodes), self.temporal(ts))))
        object.__setattr__(self, "min_value", smin)
        if not smin > 0:
            msg = (f"source is not bounded below by a positive constant on its support "
                   f"(min sampled S = {smin:.6g})")
            if self.strict:
                raise PositivityError(msg)
            warnings.warn(msg, PositivityWarning, stacklevel=3)

    @property
    def duration(self) -> float:
        return self.t_max - self.t_min

    @property
    def dimension(self) -> int:
        return self.support.dimension

    @property
    def is_positive(self) -> bool:
        return self.min_value > 0

    def __call__(self, x, t):
        """S(x, t); zero outside D x [t_min, t_max].  Broadcasts rows of x against t."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        t = np.asarray(t, dtype=float)
        inside = geometry.contains(self.support, x)
        active = (t >= self.t_min) & (t <= self.t_max)
        return np.where(inside & active, self.spatial(x) * self.temporal(t), 0.0)

    def time_transform(self, k):
        """B(k) = (2 pi)^(-1/2) int b(t) exp(i k t) dt, so f(x, k) = a(x) B(k)."""
        if isinstance(self.temporal, PolynomialProfile):
            val = polynomial_time_transform(self.temporal.coeffs, self.t_min, self.t_max, k)
        else:
            val = gauss_time_transform(self.temporal, self.t_min, self.t_max, k,
                                       getattr(self.temporal, "nodes", 64))
        return val / SQRT_2PI

    def sup_abs(self, resolution: int = 32) -> float:
        nodes = geometry.build_quadrature(self.support, resolution, "gauss").nodes
        ts = np.linspace(self.t_min, self.t_max, 257)
        return float(np.max(np.abs(np.multiply.outer(self.spatial(nodes), self.temporal(ts)))))


def eval_source(src: SpaceTimeSource, x, t):
    val = src(x, t)
    return float(val[0]) if np.ndim(x) == 1 and np.ndim(t) == 0 else val


def frequency_source(src: SpaceTimeSource, x, k):
    """f(x, k); vectorised over rows of x (first axis) and over k (second axis)."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    a = np.where(geometry.contains(src.support, pts), src.spatial(pts), 0.0)
    out = np.multiply.outer(a, src.time_transform(np.atleast_1d(k)))
    if np.ndim(k) == 0:
        out = out[:, 0]
    if np.ndim(x) == 1:
        out = out[0]
    return complex(out) if np.ndim(out) == 0 else out


def make_source(support, spatial="constant", amplitude=1.0, offset=0.0, gradient=(),
                temporal=(1.0,), t_min=0.0, t_max=0.1, strict=False) -> SpaceTimeSource:
    """Convenience constructor mirroring the configuration keys."""
    return SpaceTimeSource(SpatialFactor(spatial, amplitude, offset, tuple(gradient)),
                           PolynomialProfile(tuple(temporal)), t_min, t_max, support, strict)
