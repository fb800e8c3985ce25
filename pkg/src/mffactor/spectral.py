"""
Discretised far-field / near-field operators, the F# construction, and
the eigensystems that feed the Picard indicators.

Two collocation schemes are available on the operator interval (0, K):

``nystrom`` (default)
    rows and columns both at the midpoints (n - 1/2) dk.  Entry (n, m) is
    w(k_c + (n - m) dk) dk, so the 2N - 1 samples are k_c + j dk,
    |j| < N.  With k_min = 0 the matrix is exactly Toeplitz and Hermitian
    and factors exactly as L T L* at the discrete level.

``shifted``
    rows at n dk and columns at (m - 1/2) dk, so the samples are
    k_c + (j + 1/2) dk; with k_min = 0 these are the +-(n - 1/2) dk
    samples and the matrix is the Toeplitz display with w(k_1) dk on the
    diagonal.  It is Toeplitz but not Hermitian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IncompleteRecord, InvalidArgument, NumericFailure

SCHEMES = ("nystrom", "shifted")


@dataclass(frozen=True)
class FrequencyGrid:
    k_min: float
    k_max: float
    n: int
    scheme: str = "nystrom"

    def __post_init__(self):
        if self.k_min < 0 or not self.k_max > self.k_min:
            raise InvalidArgument("band needs 0 <= k_min < k_max")
        if self.n < 1:
            raise InvalidArgument("sample count must be positive")
        if self.scheme not in SCHEMES:
            raise InvalidArgument(f"unknown scheme {self.scheme!r}")

    @property
    def symmetric(self) -> bool:
        """k_min = 0: the band is extended to (-k_max, k_max) by conjugation."""
        return self.k_min == 0

    @property
    def k_c(self) -> float:
        return 0.0 if self.symmetric else 0.5 * (self.k_min + self.k_max)

    @property
    def half_band(self) -> float:
        return self.k_max if self.symmetric else 0.5 * (self.k_max - self.k_min)

    @property
    def dk(self) -> float:
        return self.half_band / self.n

    @property
    def shift(self) -> float:
        return 0.0 if self.scheme == "nystrom" else 0.5

    @property
    def tau(self) -> np.ndarray:
        """Row nodes: where test vectors are sampled."""
        i = np.arange(1, self.n + 1)
        return (i - 0.5 + self.shift) * self.dk

    @property
    def s(self) -> np.ndarray:
        return (np.arange(1, self.n + 1) - 0.5) * self.dk

    @property
    def offsets(self) -> np.ndarray:
        """Diagonal offsets j = n - m, from -(N-1) to N-1."""
        return np.arange(-(self.n - 1), self.n)

    def sample_wavenumbers(self) -> np.ndarray:
        """The 2N - 1 wavenumbers k_c + tau_n - s_m, ascending."""
        return self.k_c + (self.offsets + self.shift) * self.dk

    def wide_band(self, factor: float = 8.0, refine: int = 4) -> np.ndarray:
        """Uniform symmetric band (-k_hi, k_hi) with spacing dk / refine."""
        step = self.dk / refine
        j = int(np.ceil(factor * self.k_max / step))
        return np.arange(-j, j + 1) * step


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    kind: str
    provenance: tuple
    dk: float

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class OperatorSpectrum:
    """Eigenpairs in descending order; eigenvectors are the columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self):
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def lookup_samples(record, wavenumbers, rtol=1e-9):
    """Values of ``record`` at ``wavenumbers``; raises IncompleteRecord."""
    rk = np.asarray(record.wavenumbers, dtype=float)
    rv = np.asarray(record.values, dtype=complex)
    order = np.argsort(rk)
    rk, rv = rk[order], rv[order]
    want = np.asarray(wavenumbers, dtype=float)
    idx = np.clip(np.searchsorted(rk, want), 0, len(rk) - 1)
    best = idx.copy()
    left = np.clip(idx - 1, 0, len(rk) - 1)
    closer = np.abs(rk[left] - want) < np.abs(rk[idx] - want)
    best[closer] = left[closer]
    ok = np.abs(rk[best] - want) <= rtol * np.maximum(1.0, np.abs(want))
    if not np.all(ok):
        raise IncompleteRecord(want[~ok])
    return rv[best]


def _assemble(record, grid: FrequencyGrid, kind, provenance):
    vals = lookup_samples(record, grid.sample_wavenumbers())
    n = grid.n
    i = np.arange(n)
    # entry (n, m) depends on n - m only
    entries = vals[(i[:, None] - i[None, :]) + (n - 1)] * grid.dk
    return OperatorMatrix(entries, kind, provenance, grid.dk)


def assemble_far_operator(record, grid: FrequencyGrid) -> OperatorMatrix:
    return _assemble(record, grid, "far", tuple(np.asarray(record.direction, float)))


def assemble_near_operator(record, grid: FrequencyGrid) -> OperatorMatrix:
    return _assemble(record, grid, "near", tuple(np.asarray(record.point, float)))


def _hermitian_abs(A):
    lam, V = np.linalg.eigh(A)
    out = (V * np.abs(lam)) @ V.conj().T
    return 0.5 * (out + out.conj().T)


def sharp_operator(F, shortcut: bool = False) -> np.ndarray:
    """F# = |Re F| + |Im F| with Re F = (F + F*)/2 and Im F = (F - F*)/(2i).

    ``shortcut`` replaces this by |Re l| + |Im l| on the eigenvectors of F,
    which equals the definition only when F is normal.
    """
    A = F.entries if isinstance(F, OperatorMatrix) else np.asarray(F, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgument("F# needs a square matrix")
    try:
        if shortcut:
            lam, V = np.linalg.eig(A)
            out = (V * (np.abs(lam.real) + np.abs(lam.imag))) @ np.linalg.inv(V)
            return 0.5 * (out + out.conj().T)
        re = 0.5 * (A + A.conj().T)
        im = (A - A.conj().T) / 2j
        im = 0.5 * (im + im.conj().T)
        return _hermitian_abs(re) + _hermitian_abs(im)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigensolver failed: {exc}") from exc


def eigensystem(F_sharp, tol: float = 1e-8) -> OperatorSpectrum:
    A = np.asarray(F_sharp, dtype=complex)
    scale = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    if np.linalg.norm(A - A.conj().T) > tol * scale:
        raise NumericFailure("matrix is not Hermitian")
    try:
        lam, V = np.linalg.eigh(0.5 * (A + A.conj().T))
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigensolver failed: {exc}") from exc
    if lam.min() < -tol * scale:
        raise NumericFailure(f"matrix is not positive semidefinite (min eigenvalue {lam.min():.3g})")
    order = np.argsort(lam)[::-1]
    return OperatorSpectrum(np.clip(lam[order], 0.0, None), V[:, order])


def spectral_norm(A) -> float:
    """||A||_2 from the eigenvalues of A* A."""
    A = np.asarray(A, dtype=complex)
    return float(np.sqrt(max(np.linalg.eigvalsh(A.conj().T @ A).max(), 0.0)))


def noise_matrix(n: int, seed, complex_noise: bool = False) -> np.ndarray:
    rng = np.random.default_rng(seed)
    M = rng.uniform(-1.0, 1.0, size=(n, n))
    if complex_noise:
        M = M + 1j * rng.uniform(-1.0, 1.0, size=(n, n))
    return M


def add_noise(F: OperatorMatrix, delta: float, seed, complex_noise: bool = False) -> OperatorMatrix:
    """F + delta ||F||_2 M with M uniform on [-1, 1] (real unless ``complex_noise``)."""
    if delta < 0:
        raise InvalidArgument("noise level must be nonnegative")
    if delta == 0:
        return F
    M = noise_matrix(F.size, seed, complex_noise)
    entries = F.entries + delta * spectral_norm(F.entries) * M
    return OperatorMatrix(entries, F.kind, F.provenance, F.dk)
