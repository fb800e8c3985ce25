"""
Synthetic multi-frequency data by direct quadrature of the integral
representations:

    far field   w_inf(x^, k) = int_D exp(-i k x^.y) f(y, k) dy
    near field  w(x, k)      = int_D exp(i k |x-y|) / (4 pi |x-y|) f(y, k) dy
    time domain U(x, t)      = (1 / 4 pi) int_D S(y, t - |x-y|) / |x-y| dy

The same phase integral is used for 2D far fields; the 2D Hankel
normalisation only rescales the data and does not affect the indicators.
Near-field and time-domain data are 3D only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import InvalidArgument, InvalidGeometry
from .source import SQRT_2PI

CHUNK = 1 << 15


@dataclass(frozen=True)
class FarFieldRecord:
    direction: np.ndarray
    wavenumbers: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.wavenumbers)


@dataclass(frozen=True)
class NearFieldRecord:
    point: np.ndarray
    wavenumbers: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.wavenumbers)


def _weighted_density(src, quad):
    return quad.weights * src.spatial(quad.nodes)


def _phase_sum(k, phase_arg, density, kernel=None):
    """sum_q density_q kernel_q exp(i k phase_arg_q) for each k."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.zeros(k.shape, dtype=complex)
    coef = density if kernel is None else density * kernel
    for start in range(0, len(coef), CHUNK):
        sl = slice(start, start + CHUNK)
        out += np.exp(1j * np.multiply.outer(k, phase_arg[sl])) @ coef[sl]
    return out


def _conjugate_symmetric(k, compute):
    """Evaluate ``compute`` at |k| and conjugate for k < 0; w(0) is real."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    vals = compute(np.abs(k))
    vals = np.where(k < 0, np.conj(vals), vals)
    vals[k == 0] = vals[k == 0].real
    return vals


def far_field(src, quad, direction, k):
    """Far-field pattern at ``direction`` for wavenumber(s) ``k``."""
    d = geometry._unit(direction)
    if d.shape != (src.dimension,):
        raise InvalidArgument("direction dimension does not match the source")
    density = _weighted_density(src, quad)
    proj = quad.nodes @ d

    def compute(kk):
        return src.time_transform(kk) * _phase_sum(-kk, proj, density)

    vals = _conjugate_symmetric(k, compute)
    return complex(vals[0]) if np.ndim(k) == 0 else vals


def _check_exterior(src, point):
    x = np.asarray(point, dtype=float)
    if src.dimension != 3:
        raise InvalidArgument("near-field and time-domain data are 3D only")
    if x.shape != (3,):
        raise InvalidArgument("observation point must be 3D")
    inner, _ = geometry.distance_range(src.support, x, samples=20_000)
    if inner <= 1e-9:
        raise InvalidGeometry(f"observation point {x} lies inside or on the source support")
    return x


def near_field(src, quad, point, k):
    """Radiated field w(x, k) at the exterior point x."""
    x = _check_exterior(src, point)
    density = _weighted_density(src, quad)
    r = np.linalg.norm(quad.nodes - x, axis=1)
    kernel = 1.0 / (4 * np.pi * r)

    def compute(kk):
        return src.time_transform(kk) * _phase_sum(kk, r, density, kernel)

    vals = _conjugate_symmetric(k, compute)
    return complex(vals[0]) if np.ndim(k) == 0 else vals


def time_domain_signal(src, quad, point, times):
    """Retarded potential U(x, t) at the given times (sharp cut-off outside [t_min, t_max])."""
    x = _check_exterior(src, point)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    r = np.linalg.norm(quad.nodes - x, axis=1)
    coef = _weighted_density(src, quad) / (4 * np.pi * r)
    out = np.zeros(times.shape)
    step = max(1, CHUNK * 8 // max(len(r), 1))
    for start in range(0, len(times), step):
        t = times[start:start + step]
        ret = t[:, None] - r[None, :]
        active = (ret >= src.t_min) & (ret <= src.t_max)
        out[start:start + step] = np.where(active, src.temporal(ret), 0.0) @ coef
    return out


def time_to_frequency(times, signal, k):
    """(2 pi)^(-1/2) int U(t) exp(i k t) dt by the trapezoid rule."""
    times = np.asarray(times, dtype=float)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    dt = np.diff(times)
    w = np.zeros(len(times))
    w[:-1] += 0.5 * dt
    w[1:] += 0.5 * dt
    return np.exp(1j * np.multiply.outer(k, times)) @ (w * signal) / SQRT_2PI


def signal_window(src, point, samples: int = geometry.DEFAULT_BOUNDARY_SAMPLES):
    """(arrival, terminal) times of the signal at ``point``."""
    inner, outer = geometry.distance_range(src.support, point, samples)
    return src.t_min + inner, src.t_max + outer


def sample_wavenumbers(src, quad, observation, wavenumbers, kind="far"):
    ks = np.asarray(wavenumbers, dtype=float)
    obs = np.asarray(observation, dtype=float)
    if kind == "far":
        return FarFieldRecord(obs, ks, far_field(src, quad, obs, ks))
    if kind == "near":
        return NearFieldRecord(obs, ks, near_field(src, quad, obs, ks))
    raise InvalidArgument(f"unknown record kind {kind!r}")


def sample_band(src, quad, observation, grid, kind="far"):
    """Data at the 2N - 1 wavenumbers required by ``grid``."""
    return sample_wavenumbers(src, quad, observation, grid.sample_wavenumbers(), kind)
