"""
Test vectors and Picard-sum indicators.

For a spectrum (lambda_n, psi_n) of F# and a test vector phi,

    W = [ sum_{n <= truncation} |<phi, psi_n>|^2 / lambda_n ]^(-1).

Far-field test vectors depend on the sampling point y only through
x^.y, near-field ones only through |x - y|, so the indicators are
constant on lines (planes) x^.y = const and on spheres around the sensor.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j1

from .errors import InvalidArgument, SingularTestPoint
from .spectral import (OperatorSpectrum, add_noise, assemble_far_operator,
                       assemble_near_operator, eigensystem, sharp_operator)

EIGEN_FLOOR = 1e-14
SENSOR_EXCLUSION = 1e-6


@dataclass(frozen=True)
class TestVector:
    values: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class


@dataclass(frozen=True)
class Lattice:
    """Axis-aligned sampling lattice, points in C order (last axis fastest)."""

    lower: tuple
    upper: tuple
    shape: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        shape = tuple(int(s) for s in np.broadcast_to(self.shape, (len(lo),)))
        if len(lo) != len(hi):
            raise InvalidArgument("lattice bounds differ in dimension")
        if any(not h > l for l, h in zip(lo, hi)):
            raise InvalidArgument("lattice bounds must have positive extent on every axis")
        if any(s < 2 for s in shape):
            raise InvalidArgument("lattice needs at least 2 points per axis")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "shape", shape)

    @property
    def dimension(self) -> int:
        return len(self.shape)

    def axes(self):
        return [np.linspace(l, h, s) for l, h, s in zip(self.lower, self.upper, self.shape)]

    def points(self) -> np.ndarray:
        grids = np.meshgrid(*self.axes(), indexing="ij")
        return np.column_stack([g.ravel() for g in grids])

    def __len__(self):
        return int(np.prod(self.shape))


@dataclass
class IndicatorField:
    lattice: Lattice
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def grid(self) -> np.ndarray:
        return self.values.reshape(self.lattice.shape)

    def normalized(self) -> np.ndarray:
        finite = self.values[np.isfinite(self.values)]
        top = finite.max() if finite.size else 0.0
        return self.values / top if top > 0 else self.values.copy()


# --------------------------------------------------------------------------
# test vectors
# --------------------------------------------------------------------------

def time_factor(tau, t_min, t_max):
    """(1/T) int_{t_min}^{t_max} exp(i tau t) dt, with value 1 at tau = 0."""
    tau = np.asarray(tau, dtype=float)
    T = t_max - t_min
    if not T > 0:
        raise InvalidArgument("t_max must exceed t_min")
    mid = 0.5 * (t_min + t_max)
    return np.exp(1j * tau * mid) * np.sinc(tau * T / (2 * np.pi))


def far_test_vectors(points, direction, grid, t_min, t_max):
    """Rows are phi_y(tau_n) = time_factor(tau_n) exp(-i tau_n x^.y)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    tau = grid.tau
    proj = pts @ np.asarray(direction, dtype=float)
    return time_factor(tau, t_min, t_max)[None, :] * np.exp(-1j * np.multiply.outer(proj, tau))


def far_test_vector(y, direction, grid, t_min, t_max) -> TestVector:
    vals = far_test_vectors(y, direction, grid, t_min, t_max)[0]
    return TestVector(vals, "far", {"y": tuple(y), "direction": tuple(direction)})


def ball_average_factor(z, dimension):
    """Mean of exp(-i tau x^.z) over a ball of radius eps, as a function of z = tau eps."""
    z = np.asarray(z, dtype=float)
    out = np.ones(z.shape)
    big = np.abs(z) > 1e-3
    small = ~big
    zb = z[big]
    if dimension == 3:
        out[big] = 3 * (np.sin(zb) - zb * np.cos(zb)) / zb ** 3
        out[small] = 1 - z[small] ** 2 / 10 + z[small] ** 4 / 280
    elif dimension == 2:
        out[big] = 2 * j1(zb) / zb
        out[small] = 1 - z[small] ** 2 / 8 + z[small] ** 4 / 192
    else:
        raise InvalidArgument("ball averages are defined in 2D and 3D")
    return out


def smoothed_far_test_vector(y, direction, grid, t_min, t_max, eps) -> TestVector:
    if not eps > 0:
        raise InvalidArgument("smoothing radius must be positive")
    base = far_test_vectors(y, direction, grid, t_min, t_max)[0]
    vals = base * ball_average_factor(grid.tau * eps, len(y))
    return TestVector(vals, "far_smoothed", {"y": tuple(y), "direction": tuple(direction), "eps": eps})


def near_test_vectors(points, sensor, grid, t_min, t_max):
    """Rows are exp(i tau |x-y|) / (4 pi |x-y|) * time_factor(tau)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != 3:
        raise InvalidArgument("near-field test vectors are 3D only")
    r = np.linalg.norm(pts - np.asarray(sensor, dtype=float), axis=1)
    if np.any(r < 1e-9):
        raise SingularTestPoint("sampling point coincides with the sensor")
    tau = grid.tau
    kern = np.exp(1j * np.multiply.outer(r, tau)) / (4 * np.pi * r[:, None])
    return kern * time_factor(tau, t_min, t_max)[None, :]


def near_test_vector(y, sensor, grid, t_min, t_max) -> TestVector:
    vals = near_test_vectors(y, sensor, grid, t_min, t_max)[0]
    return TestVector(vals, "near", {"y": tuple(y), "sensor": tuple(sensor)})


# --------------------------------------------------------------------------
# Picard sums
# --------------------------------------------------------------------------

def kept_modes(spectrum: OperatorSpectrum, truncation=None, noise: float = 0.0,
               floor: float = EIGEN_FLOOR) -> np.ndarray:
    """Indices used in the Picard sum.

    The first ``truncation`` modes (all when None), minus those below
    ``floor * lambda_1``; with noisy data and no explicit truncation the
    cutoff rises to ``noise * lambda_1``.
    """
    lam = spectrum.eigenvalues
    n = len(lam)
    if truncation is None:
        truncation = n
    if not 1 <= truncation <= n:
        raise InvalidArgument(f"truncation must lie in [1, {n}]")
    if lam[0] <= 0:
        return np.arange(0)
    cut = max(floor, noise) * lam[0]
    idx = np.arange(truncation)
    return idx[lam[:truncation] >= cut]


def picard_sums(spectrum: OperatorSpectrum, vectors, modes) -> np.ndarray:
    """sum_n |<phi, psi_n>|^2 / lambda_n for each row phi of ``vectors``."""
    V = np.atleast_2d(vectors)
    coeffs = V @ spectrum.eigenvectors[:, modes].conj()
    return (np.abs(coeffs) ** 2) @ (1.0 / spectrum.eigenvalues[modes])


def _invert(sums, n_modes):
    with np.errstate(divide="ignore"):
        W = np.where(sums > 0, 1.0 / np.where(sums > 0, sums, 1.0), np.inf)
    if n_modes == 0:
        W = np.zeros_like(sums)
    return W


def picard_value(spectrum: OperatorSpectrum, phi, truncation: int) -> float:
    """Indicator value for one test vector.

    A zero test vector gives W = inf; a spectrum with no usable mode
    gives W = 0.  Both cases warn.
    """
    vals = phi.values if isinstance(phi, TestVector) else np.asarray(phi)
    modes = kept_modes(spectrum, truncation)
    s = picard_sums(spectrum, vals, modes)
    W = float(_invert(s, len(modes))[0])
    if len(modes) == 0 or not np.isfinite(W):
        warnings.warn("degenerate Picard sum", RuntimeWarning, stacklevel=2)
    return W


def operator_spectrum(record, grid, kind="far", noise=0.0, seed=0, stream=0, complex_noise=False):
    """Assemble, optionally pollute, and decompose one operator."""
    F = assemble_far_operator(record, grid) if kind == "far" else assemble_near_operator(record, grid)
    if noise > 0:
        F = add_noise(F, noise, [int(seed), int(stream)], complex_noise)
    return eigensystem(sharp_operator(F))


def _scan(records, grid, lattice, t_min, t_max, truncation, noise, seed, kind, complex_noise=False):
    if not records:
        raise InvalidArgument("at least one record is needed")
    pts = lattice.points()
    valid = np.ones(len(pts), dtype=bool)
    if kind == "near":
        # lattice points at a sensor carry no value
        for rec in records:
            valid &= np.linalg.norm(pts - np.asarray(rec.point, float), axis=1) >= SENSOR_EXCLUSION
    total = np.zeros(len(pts))
    used = []
    for j, rec in enumerate(records):
        spec = operator_spectrum(rec, grid, kind, noise, seed, j, complex_noise)
        modes = kept_modes(spec, truncation, noise if truncation is None else 0.0)
        used.append(len(modes))
        if kind == "far":
            vecs = far_test_vectors(pts, rec.direction, grid, t_min, t_max)
        else:
            vecs = near_test_vectors(pts[valid], rec.point, grid, t_min, t_max)
        total[valid] += picard_sums(spec, vecs, modes)
    W = _invert(total, sum(used))
    W[~valid] = np.nan
    meta = {
        "kind": kind,
        "observations": [tuple(map(float, getattr(r, "direction", getattr(r, "point", ()))))
                         for r in records],
        "truncation": truncation if truncation is not None else "auto",
        "modes_used": used,
        "noise": noise,
        "seed": seed,
        "t_min": t_min,
        "t_max": t_max,
        "excluded": int(np.sum(~valid)),
        "degenerate": int(np.sum(np.isinf(W))) + (len(W) if sum(used) == 0 else 0),
    }
    return IndicatorField(lattice, W, meta)


def scan_strip(record, grid, lattice, t_min, t_max, truncation=None, noise=0.0, seed=0,
               complex_noise=False):
    """Single-direction far-field indicator over ``lattice``."""
    return _scan([record], grid, lattice, t_min, t_max, truncation, noise, seed, "far", complex_noise)


def scan_hull(records, grid, lattice, t_min, t_max, truncation=None, noise=0.0, seed=0,
              complex_noise=False):
    """Multi-direction indicator: 1/W = sum over directions of 1/W_j."""
    return _scan(list(records), grid, lattice, t_min, t_max, truncation, noise, seed, "far", complex_noise)


def scan_annulus(record, grid, lattice, t_min, t_max, truncation=None, noise=0.0, seed=0,
                 complex_noise=False):
    return _scan([record], grid, lattice, t_min, t_max, truncation, noise, seed, "near", complex_noise)


def scan_annuli(records, grid, lattice, t_min, t_max, truncation=None, noise=0.0, seed=0,
                complex_noise=False):
    """Several sensors combined like ``scan_hull``."""
    return _scan(list(records), grid, lattice, t_min, t_max, truncation, noise, seed, "near", complex_noise)
