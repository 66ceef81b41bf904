"""Exact diagonalization and spectral chaos diagnostics.

The pipeline is diagonalize -> unfold -> spacings -> distance to the
Poisson / Wigner-Dyson reference distributions. Bands in a spectrum are
defined empirically by gap clustering, and band_overlap_fraction
quantifies how much the drive has merged the undriven level clusters.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, StatisticsError
from .hamiltonian import CouplingMatrix, build_rotating, diagonal_energies
from .spins import ChainSpec

SPACING_MODELS = ("poisson", "wigner-dyson")

DEFAULT_UNFOLD_DEGREE = 7
DEFAULT_UNFOLD_TRIM = 0.10
DEFAULT_GAP_FACTOR = 5.0


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Full eigendecomposition of a Hermitian matrix.

    values are ascending; vectors[:, i] is the eigenvector of values[i].
    When the matrix is diagonal-phase equivalent to a real symmetric one
    (true for every build_rotating output), basis_phases holds the phase
    vector u with u* H u^dagger real; then (basis_phases * vectors) is real
    and is the natural gauge for component statistics.
    """

    values: np.ndarray
    vectors: np.ndarray
    basis_phases: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def fluctuation_components(self) -> np.ndarray:
        """Real component matrix used for eigenvector fluctuation statistics."""
        if self.basis_phases is not None:
            return (self.basis_phases[:, None] * self.vectors).real
        return self.vectors.real


def _fingerprint(H: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(H).tobytes()).hexdigest()[:16]


def _popcount_phases(N: int) -> np.ndarray:
    n = np.arange(N, dtype=np.uint64)
    return (1j) ** (np.bitwise_count(n).astype(np.int64) % 4)


def diagonalize(H: np.ndarray) -> Spectrum:
    """Eigendecompose a Hermitian matrix into an ascending Spectrum.

    Matrices whose entries turn exactly real under the diagonal phase
    rotation u_n = i^popcount(n) (the case for the rotating-frame builder)
    are routed through the real-symmetric solver, which is several times
    faster at large dimension; the returned eigenpairs are identical.
    """
    H = np.asarray(H)
    N = H.shape[0]
    if H.ndim != 2 or H.shape[1] != N:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    try:
        if N & (N - 1) == 0 and N > 1:
            ph = _popcount_phases(N)
            T = H * np.outer(ph, ph.conj())
            if np.abs(T.imag).max() == 0.0:
                w, W = np.linalg.eigh(T.real)
                return Spectrum(values=w, vectors=ph.conj()[:, None] * W,
                                basis_phases=ph)
            del T
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"eigensolver failed on {N}x{N} matrix (fingerprint {_fingerprint(H)}): {exc}"
        ) from exc
    return Spectrum(values=w, vectors=V)


def unfold(values: np.ndarray, degree: int = DEFAULT_UNFOLD_DEGREE,
           trim: float = DEFAULT_UNFOLD_TRIM) -> np.ndarray:
    """Map sorted levels to unit mean spacing via a smooth staircase fit.

    Fits the cumulative level count with a polynomial of the given degree
    after trimming a fraction `trim` of levels from each spectral edge,
    then evaluates the fit at the retained levels. The output is forced
    nondecreasing (running maximum).
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    cut = int(round(n * trim))
    kept = values[cut:n - cut] if cut else values
    if kept.shape[0] < 50:
        raise StatisticsError(
            f"{kept.shape[0]} levels left after trimming; need at least 50")
    counts = np.arange(kept.shape[0]) + 0.5
    fit = np.polynomial.Polynomial.fit(kept, counts, degree)
    return np.maximum.accumulate(fit(kept))


def spacings(unfolded: np.ndarray) -> np.ndarray:
    """Nearest-neighbor spacings s_i = u_{i+1} - u_i."""
    u = np.asarray(unfolded, dtype=float)
    if u.shape[0] < 2:
        raise StatisticsError("need at least 2 levels for spacings")
    return np.diff(u)


def reference_density(model: str, s) -> np.ndarray:
    """P(s) for the named reference: Poisson e^{-s} or the GOE Wigner
    surmise (pi/2) s e^{-pi s^2 / 4}. Both have unit mean and norm."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("spacings are nonnegative")
    if model == "poisson":
        return np.exp(-s)
    if model == "wigner-dyson":
        return (np.pi / 2) * s * np.exp(-np.pi * s ** 2 / 4)
    raise ValueError(f"unknown spacing model {model!r}, expected one of {SPACING_MODELS}")


def reference_cdf(model: str, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("spacings are nonnegative")
    if model == "poisson":
        return 1.0 - np.exp(-s)
    if model == "wigner-dyson":
        return 1.0 - np.exp(-np.pi * s ** 2 / 4)
    raise ValueError(f"unknown spacing model {model!r}, expected one of {SPACING_MODELS}")


def ks_distance(samples: np.ndarray, model: str) -> float:
    """Kolmogorov-Smirnov distance between the sample CDF and the model CDF."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = s.shape[0]
    if n == 0:
        raise StatisticsError("ks_distance needs a nonempty sample")
    F = reference_cdf(model, s)
    i = np.arange(n)
    return float(np.max(np.maximum(F - i / n, (i + 1) / n - F)))


@dataclass(frozen=True, eq=False)
class SpacingHistogram:
    """Binned P(s): densities integrate to 1 over the binned range."""

    bin_edges: np.ndarray
    counts: np.ndarray
    densities: np.ndarray
    sample_count: int
    mean_spacing: float

    @classmethod
    def from_spacings(cls, s: np.ndarray, bins: int = 50) -> "SpacingHistogram":
        s = np.asarray(s, dtype=float)
        if s.shape[0] == 0:
            raise StatisticsError("no spacings to histogram")
        counts, edges = np.histogram(s, bins=bins)
        widths = np.diff(edges)
        densities = counts / (s.shape[0] * widths)
        return cls(bin_edges=edges, counts=counts, densities=densities,
                   sample_count=int(s.shape[0]), mean_spacing=float(s.mean()))


@dataclass(frozen=True)
class BandPartition:
    """Contiguous index ranges (half-open) over a sorted spectrum."""

    ranges: tuple
    gap_threshold: float
    gap_factor: float

    @property
    def count(self) -> int:
        return len(self.ranges)


def band_partition(values: np.ndarray, gap_factor: float = DEFAULT_GAP_FACTOR) -> BandPartition:
    """Split a sorted spectrum wherever a gap exceeds gap_factor x median gap.

    The median is taken over positive gaps only, so exact degeneracies
    (zero gaps) never zero out the threshold; degenerate levels always
    share a band. A spectrum with no positive gaps is a single band.
    """
    if gap_factor <= 1:
        raise ValueError(f"gap_factor must exceed 1, got {gap_factor}")
    v = np.asarray(values, dtype=float)
    n = v.shape[0]
    if n < 2:
        raise ValueError("need at least 2 levels to partition")
    gaps = np.diff(v)
    positive = gaps[gaps > 0]
    if positive.size == 0:
        return BandPartition(ranges=((0, n),), gap_threshold=np.inf, gap_factor=gap_factor)
    threshold = gap_factor * float(np.median(positive))
    splits = np.nonzero(gaps > threshold)[0] + 1
    edges = np.concatenate(([0], splits, [n]))
    ranges = tuple((int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]))
    return BandPartition(ranges=ranges, gap_threshold=threshold, gap_factor=gap_factor)


def band_overlap_fraction(spec: ChainSpec, cm: CouplingMatrix,
                          gap_factor: float = DEFAULT_GAP_FACTOR) -> float:
    """How much the drive has merged the undriven bands, in [0, 1].

    Compares the band count of the full spectrum against the Omega = 0
    spectrum (the sorted diagonal energies): 1 - count(Omega)/count(0),
    clamped to [0, 1]. 0 means no merging.
    """
    base = band_partition(np.sort(diagonal_energies(spec, cm)), gap_factor)
    full = band_partition(diagonalize(build_rotating(spec, cm)).values, gap_factor)
    return float(np.clip(1.0 - full.count / base.count, 0.0, 1.0))
