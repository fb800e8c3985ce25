"""
Discrete oracles for the structural results behind the method.

* The factorization F = L T L*: with the spatial quadrature of the data
  and a Gauss rule in time, the assembled operator equals L Tmid L* up to
  rounding.  For k_min = 0 and S > 0 the middle factor is real positive,
  so F is Hermitian PSD and F# = F = L |Tmid| L*.
* Range membership of test vectors, probed by ridge least squares
  against L instead of through the spectrum of F#.
* The supporting interval of the inverse Fourier transform of the far
  field, and its positivity for positive sources.

The range identity itself lives in infinite dimensions; these checks are
its testable finite shadows.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import forward, geometry
from .errors import DegenerateSignal, InvalidArgument, InvalidConfig
from .source import SQRT_2PI, SpaceTimeSource, make_source
from .spectral import FrequencyGrid, assemble_far_operator, assemble_near_operator, sharp_operator


def default_time_nodes(src: SpaceTimeSource, grid: FrequencyGrid) -> int:
    """Gauss-Legendre nodes enough to resolve exp(ikt) over the window for all band samples."""
    kmax = np.max(np.abs(grid.sample_wavenumbers()))
    return int(max(16, np.ceil(kmax * src.duration / 2) + 16))


@dataclass(frozen=True)
class DiscreteFactorization:
    L: np.ndarray
    tmid: np.ndarray
    F_rebuilt: np.ndarray
    L_right: np.ndarray

    @property
    def Tmid(self) -> np.ndarray:
        return np.diag(self.tmid)

    def sharp_identity(self) -> np.ndarray:
        """L (|Re Tmid| + |Im Tmid|) L_right*."""
        d = np.abs(self.tmid.real) + np.abs(self.tmid.imag)
        return (self.L * d) @ self.L_right.conj().T


def _phases(src, quad, observation, kind):
    """Per-node spatial phase and extra amplitude for the chosen data kind."""
    obs = np.asarray(observation, dtype=float)
    if kind == "far":
        d = geometry._unit(obs)
        return quad.nodes @ d, np.ones(len(quad))
    if kind == "near":
        r = np.linalg.norm(quad.nodes - obs, axis=1)
        # exp(ik(|x-y| + t)) = exp(-ik(xi)) with xi = -|x-y| - t
        return -r, 1.0 / (4 * np.pi * r)
    raise InvalidArgument(f"unknown record kind {kind!r}")


def build_discrete_factorization(src: SpaceTimeSource, quad, observation, grid: FrequencyGrid,
                                 time_nodes: int | None = None, kind: str = "far") -> DiscreteFactorization:
    """L, Tmid and L Tmid L_right* on the (spatial node, time node) product grid."""
    if quad.nodes.shape[1] != src.dimension:
        raise InvalidConfig("quadrature and source differ in dimension")
    if not np.all(geometry.contains(src.support, quad.nodes)):
        raise InvalidConfig("quadrature nodes fall outside the source support")
    R = default_time_nodes(src, grid) if time_nodes is None else int(time_nodes)
    if R < 2:
        raise InvalidConfig("time rule needs at least 2 nodes")
    x, w = np.polynomial.legendre.leggauss(R)
    t = src.t_min + 0.5 * src.duration * (x + 1.0)
    wt = 0.5 * src.duration * w

    phase, amp = _phases(src, quad, observation, kind)
    xi = (phase[:, None] - t[None, :]).ravel()
    weights = np.sqrt(np.outer(quad.weights, wt).ravel())
    S = np.outer(src.spatial(quad.nodes) * amp, src.temporal(t)).ravel()

    scale = np.sqrt(grid.dk)
    L = scale * np.exp(-1j * np.outer(grid.tau, xi)) * weights
    L_right = L if grid.shift == 0 else scale * np.exp(-1j * np.outer(grid.s, xi)) * weights
    tmid = np.exp(-1j * grid.k_c * xi) * S / SQRT_2PI
    F = (L * tmid) @ L_right.conj().T
    return DiscreteFactorization(L, tmid, F, L_right)


def relative_residual(A, B) -> float:
    A = np.asarray(A)
    denom = np.linalg.norm(A)
    if denom == 0:
        return float(np.linalg.norm(B))
    return float(np.linalg.norm(A - B) / denom)


def range_membership_residual(L, phi, regularizer: float = 1e-12) -> float:
    """min_g ||L g - phi||^2 + alpha ||g||^2, reported as ||L g - phi|| / ||phi||.

    ``regularizer`` is relative: alpha = regularizer * sigma_1(L)^2.
    """
    v = phi.values if hasattr(phi, "values") else np.asarray(phi, dtype=complex)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise DegenerateSignal("zero test vector")
    lam, U = np.linalg.eigh(L @ L.conj().T)
    lam = np.clip(lam, 0.0, None)
    alpha = regularizer * max(lam.max(), np.finfo(float).tiny)
    c = U.conj().T @ v
    res = U @ (alpha / (lam + alpha) * c)
    return float(np.linalg.norm(res) / nv)


# --------------------------------------------------------------------------
# supporting interval
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SupportEstimate:
    interval: tuple
    clusters: list
    times: np.ndarray
    signal: np.ndarray
    bin: float

    @property
    def min_relative(self) -> float:
        """Most negative real part of the signal inside the interval, relative to the peak."""
        lo, hi = self.interval
        sel = (self.times >= lo) & (self.times <= hi)
        peak = np.max(np.abs(self.signal))
        return float(np.min(self.signal.real[sel]) / peak)


def raised_cosine_taper(k, k_hi, fraction: float = 0.1) -> np.ndarray:
    """1 on |k| <= (1 - fraction) k_hi, cosine roll-off to 0 at k_hi."""
    a = np.abs(np.asarray(k, dtype=float))
    start = (1.0 - fraction) * k_hi
    w = np.ones(a.shape)
    roll = a > start
    w[roll] = 0.5 * (1 + np.cos(np.pi * (a[roll] - start) / (k_hi - start)))
    return w


def inverse_transform(wavenumbers, values, times, taper: float = 0.1) -> np.ndarray:
    """(2 pi)^(-1/2) int w(k) exp(i k t) dk by the trapezoid rule on a uniform band."""
    k = np.asarray(wavenumbers, dtype=float)
    order = np.argsort(k)
    k = k[order]
    v = np.asarray(values, dtype=complex)[order]
    step = np.diff(k)
    if len(k) < 3 or np.ptp(step) > 1e-9 * np.max(np.abs(k)):
        raise InvalidArgument("inverse transform needs a uniform band")
    if abs(k[0] + k[-1]) > 1e-9 * k[-1]:
        raise InvalidArgument("inverse transform needs a symmetric band")
    wts = np.full(len(k), step[0])
    wts[[0, -1]] *= 0.5
    if taper > 0:
        wts = wts * raised_cosine_taper(k, k[-1], taper)
    return np.exp(1j * np.outer(np.asarray(times, dtype=float), k)) @ (wts * v) / SQRT_2PI


def support_interval_estimate(record, threshold: float = 0.02, taper: float = 0.1,
                              span: float | None = None, oversample: int = 8) -> SupportEstimate:
    """Smallest interval holding every |signal| above ``threshold`` times its peak.

    The resolution bin is pi / k_hi.  The signal is evaluated ``oversample``
    times per bin over [-span, span] so that the threshold crossing is not
    quantised to the bin grid; ``span`` defaults to half the alias-free
    period pi / dk.
    """
    if oversample < 1:
        raise InvalidArgument("oversample must be at least 1")
    k = np.asarray(record.wavenumbers, dtype=float)
    k_hi = float(np.max(np.abs(k)))
    dk = float(np.min(np.diff(np.sort(k))))
    bin_ = np.pi / k_hi
    half = 0.5 * np.pi / dk if span is None else span
    step = bin_ / oversample
    n = int(np.floor(half / step))
    times = np.arange(-n, n + 1) * step
    sig = inverse_transform(k, record.values, times, taper)
    mag = np.abs(sig)
    if mag.max() == 0:
        raise DegenerateSignal("far-field signal is identically zero")
    above = mag >= threshold * mag.max()
    idx = np.flatnonzero(above)
    clusters = []
    start = idx[0]
    for a, b in zip(idx[:-1], idx[1:]):
        if b != a + 1:
            clusters.append((float(times[start]), float(times[a])))
            start = b
    clusters.append((float(times[start]), float(times[idx[-1]])))
    return SupportEstimate((float(times[idx[0]]), float(times[idx[-1]])), clusters, times, sig, bin_)


def predicted_interval(support, direction, t_min, t_max, samples=geometry.DEFAULT_BOUNDARY_SAMPLES):
    """(inf x.D - t_max, sup x.D - t_min)."""
    e = geometry.directional_extent(support, direction, samples)
    return e.low - t_max, e.high - t_min


# --------------------------------------------------------------------------
# catalog
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogCase:
    name: str
    source: SpaceTimeSource
    observation: tuple
    kind: str = "far"
    resolution: int = 48
    method: str = "gauss"
    k_min: float = 0.0
    k_max: float = 16 * np.pi / 6
    n: int = 16
    scheme: str = "nystrom"

    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(self.k_min, self.k_max, self.n, self.scheme)


@dataclass
class Check:
    name: str
    value: float
    bound: float
    seconds: float = 0.0
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.bound)


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def text(self) -> str:
        lines = []
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            lines.append(f"{tag} {c.name}: {c.value:.3e} <= {c.bound:.1e} ({c.seconds:.2f}s){' ' + c.note if c.note else ''}")
        lines.append(f"{sum(c.passed for c in self.checks)}/{len(self.checks)} checks passed")
        return "\n".join(lines) + "\n"

    def csv(self) -> str:
        # no timings here, so reruns give identical bytes
        rows = ["check,value,bound,passed"]
        for c in self.checks:
            rows.append(f"{c.name},{float(c.value)!r},{float(c.bound)!r},{int(c.passed)}")
        return "\n".join(rows) + "\n"


def default_catalog():
    """Kite with the three single-direction sources, the unit cube and a ball, plus an offset band."""
    import warnings

    from .errors import PositivityWarning

    kite = geometry.Kite()
    cube = geometry.Cube((0.0, 0.0, 0.0), (0.5, 0.5, 0.5))
    ball = geometry.Ball((0.0, 0.0, 0.0), 0.5)
    d = geometry.direction_from_angle
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PositivityWarning)
        return [
            CatalogCase("kite_constant", make_source(kite, "constant", 3.0, temporal=(1, 1)), tuple(d(0.25))),
            CatalogCase("kite_affine", make_source(kite, "affine", 3.0, 0.0, (1.0, 0.0), (1, 1)), tuple(d(0.5))),
            CatalogCase("kite_radial", make_source(kite, "radial", 3.0, -4.0, (), (1, 1)), tuple(d(0.75))),
            CatalogCase("cube_far", make_source(cube, "radial", 1.0, 1.0, (), (1, 1)), (1.0, 0.0, 0.0),
                        resolution=16),
            CatalogCase("cube_near", make_source(cube, "constant", 3.0, temporal=(1, 1)), (1.5, 0.0, 0.0),
                        kind="near", resolution=16),
            CatalogCase("ball_constant", make_source(ball, "constant", 1.0), (0.0, 0.0, 1.0), resolution=16),
            CatalogCase("kite_offset_band", make_source(kite, "constant", 3.0, temporal=(1, 1)),
                        tuple(d(0.25)), k_min=np.pi, k_max=4 * np.pi),
        ]


def factorization_check(case: CatalogCase, mismatch: bool = False, bound: float = 1e-8) -> Check:
    """Assemble F from synthetic data and compare with L Tmid L*.

    ``mismatch`` builds the factorization on a different spatial rule
    (midpoint instead of Gauss or vice versa) as a negative control.
    """
    t0 = time.perf_counter()
    grid = case.grid()
    quad = geometry.build_quadrature(case.source.support, case.resolution, case.method)
    rec = forward.sample_band(case.source, quad, case.observation, grid, case.kind)
    F = (assemble_far_operator if case.kind == "far" else assemble_near_operator)(rec, grid)
    if mismatch:
        other = "midpoint" if case.method == "gauss" else "gauss"
        fq = geometry.build_quadrature(case.source.support, case.resolution, other)
    else:
        fq = quad
    fac = build_discrete_factorization(case.source, fq, case.observation, grid, kind=case.kind)
    val = relative_residual(F.entries, fac.F_rebuilt)
    return Check(f"factorization_residual[{case.name}]", val, bound, time.perf_counter() - t0)


def sharp_identity_check(case: CatalogCase, bound: float = 1e-6) -> Check:
    """F# against L (|Re Tmid| + |Im Tmid|) L* for k_c = 0 and S > 0."""
    t0 = time.perf_counter()
    grid = case.grid()
    quad = geometry.build_quadrature(case.source.support, case.resolution, case.method)
    fac = build_discrete_factorization(case.source, quad, case.observation, grid, kind=case.kind)
    val = relative_residual(sharp_operator(fac.F_rebuilt), fac.sharp_identity())
    return Check(f"sharp_identity[{case.name}]", val, bound, time.perf_counter() - t0)


def psd_check(case: CatalogCase, bound: float = 1e-10) -> Check:
    t0 = time.perf_counter()
    grid = case.grid()
    quad = geometry.build_quadrature(case.source.support, case.resolution, case.method)
    rec = forward.sample_band(case.source, quad, case.observation, grid, case.kind)
    F = (assemble_far_operator if case.kind == "far" else assemble_near_operator)(rec, grid)
    lam = np.linalg.eigvalsh(sharp_operator(F))
    val = max(0.0, -lam.min() / lam.max())
    return Check(f"sharp_psd[{case.name}]", val, bound, time.perf_counter() - t0)


def support_check(bound_bins: float = 1.0) -> list:
    t0 = time.perf_counter()
    ball = geometry.Ball((0.0, 0.0, 0.0), 0.5)
    src = make_source(ball, "constant", 1.0)
    quad = geometry.build_quadrature(ball, 24, "gauss")
    grid = FrequencyGrid(0.0, 16 * np.pi / 6, 16)
    d = (0.0, 0.0, 1.0)
    rec = forward.sample_wavenumbers(src, quad, d, grid.wide_band())
    est = support_interval_estimate(rec)
    lo, hi = predicted_interval(ball, d, src.t_min, src.t_max)
    err = max(abs(est.interval[0] - lo), abs(est.interval[1] - hi)) / est.bin
    dt = time.perf_counter() - t0
    return [Check("support_interval_bins[ball]", err, bound_bins, dt,
                  f"estimate=({est.interval[0]:.4f},{est.interval[1]:.4f})"),
            Check("support_negativity[ball]", max(0.0, -est.min_relative), 0.01, 0.0)]


def run_catalog(cases=None, mismatch: bool = False) -> ValidationReport:
    cases = default_catalog() if cases is None else list(cases)
    if not cases:
        raise InvalidConfig("validation catalog is empty")
    report = ValidationReport()
    for case in cases:
        report.checks.append(factorization_check(case, mismatch))
        if case.k_min == 0 and case.source.is_positive:
            report.checks.append(psd_check(case))
            report.checks.append(sharp_identity_check(case))
    if not mismatch:
        report.checks.extend(support_check())
    return report
