"""Eigenstate delocalization measures and the numerical chaos border.

participation_ratio and component_moments quantify how spread out and how
Gaussian the eigenvector components are in the natural spin basis; the
delocalization_scan sweeps the coupling strength and locates the border
where the mean participation ratio doubles relative to its weak-coupling
baseline, to be compared against the analytic prediction 4 a^2 / Omega.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StatisticsError
from .hamiltonian import CouplingSpec, build_rotating, predicted_border, sample_couplings
from .spectral import Spectrum, diagonalize
from .spins import ChainSpec

NORM_TOL = 1e-10

DELOC_MEASURES = ("pr", "npc")

DEFAULT_WINDOW = 0.5
DEFAULT_THRESHOLD = 2.0


def participation_ratio(v: np.ndarray) -> float:
    """PR = 1 / sum_n |v_n|^4 for a normalized vector; 1 <= PR <= N."""
    v = np.asarray(v)
    p = np.abs(v) ** 2
    total = p.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"vector norm^2 = {total!r} is not 1 within {NORM_TOL}")
    return float(1.0 / np.sum(p ** 2))


def principal_components(v: np.ndarray) -> float:
    """Shannon-entropy alternative to the PR: exp(-sum p ln p)."""
    v = np.asarray(v)
    p = np.abs(v) ** 2
    total = p.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"vector norm^2 = {total!r} is not 1 within {NORM_TOL}")
    nz = p[p > 0]
    return float(np.exp(-np.sum(nz * np.log(nz))))


def _central_slice(n_states: int, window: float) -> slice:
    keep = int(round(n_states * window))
    lo = (n_states - keep) // 2
    return slice(lo, lo + keep)


@dataclass(frozen=True, eq=False)
class ComponentMoments:
    """Per-state and pooled moments of eigenvector components."""

    state_indices: np.ndarray
    variances: np.ndarray
    kurtoses: np.ndarray
    aggregate_kurtosis: float


def component_moments(spectrum: Spectrum, window: float = DEFAULT_WINDOW) -> ComponentMoments:
    """Fluctuation moments of eigenvector components in the real gauge.

    Selects the central `window` fraction of eigenstates (by energy order),
    standardizes each state's components to zero mean and unit variance, and
    reports per-state variances and excess kurtoses plus the excess kurtosis
    of all standardized components pooled. Near 0 means Gaussian fluctuations
    (strong chaos); large positive values mean peaked, localized states.
    """
    if not 0 < window <= 1:
        raise ValueError(f"window must be in (0, 1], got {window}")
    sel = _central_slice(spectrum.dim, window)
    if sel.stop - sel.start < 10:
        raise StatisticsError(
            f"window selects {sel.stop - sel.start} states; need at least 10")
    comps = spectrum.fluctuation_components()[:, sel]
    centered = comps - comps.mean(axis=0, keepdims=True)
    var = centered.var(axis=0)
    z = centered / np.sqrt(var)[None, :]
    kurt = (z ** 4).mean(axis=0) - 3.0
    return ComponentMoments(
        state_indices=np.arange(sel.start, sel.stop),
        variances=var,
        kurtoses=kurt,
        aggregate_kurtosis=float((z ** 4).mean() - 3.0),
    )


@dataclass(frozen=True, eq=False)
class BorderScanResult:
    """Mean delocalization versus coupling strength, with the border estimate.

    estimated_border is the smallest grid J whose mean PR reaches
    threshold x (mean PR at the smallest grid J), or None if never reached.
    """

    kind: str
    j_grid: np.ndarray
    mean_pr: np.ndarray
    stderr_pr: np.ndarray
    estimated_border: float | None
    predicted_border: float
    realizations: int
    master_seed: int
    window: float
    threshold: float
    measure: str


def _border_cell(spec: ChainSpec, kind: str, distribution: str, J: float,
                 seed: int, window: float, measure: str) -> float:
    """Mean delocalization over the central window for one realization."""
    if kind == "nn-constant":
        cs = CouplingSpec(kind=kind, J=J, distribution=distribution)
    else:
        cs = CouplingSpec(kind=kind, J=J, seed=seed, distribution=distribution)
    spectrum = diagonalize(build_rotating(spec, sample_couplings(cs, spec.L)))
    sel = _central_slice(spectrum.dim, window)
    p = np.abs(spectrum.vectors[:, sel]) ** 2
    if measure == "pr":
        vals = 1.0 / np.sum(p ** 2, axis=0)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(p > 0, p * np.log(p), 0.0)
        vals = np.exp(-np.sum(plogp, axis=0))
    return float(vals.mean())


def delocalization_scan(spec: ChainSpec, kind: str, j_grid, realizations: int,
                        master_seed: int, window: float = DEFAULT_WINDOW,
                        threshold: float = DEFAULT_THRESHOLD, workers: int = 1,
                        measure: str = "pr", distribution: str = "symmetric") -> BorderScanResult:
    """Sweep J over a grid and estimate the delocalization border.

    Each (grid point, realization) cell is a pure function of its derived
    seed, so rerunning with the same master seed is bit-identical and the
    result does not depend on worker scheduling. Realization seeds are
    shared across grid points only through the master seed; identical
    (master_seed, grid index, realization index) give identical couplings.
    """
    from .sweep import derive_stream_seed, map_cells

    j_grid = np.asarray(j_grid, dtype=float)
    if j_grid.size == 0:
        raise ValueError("empty J grid")
    if j_grid.size > 1 and np.any(np.diff(j_grid) <= 0):
        raise ValueError("J grid must be strictly increasing")
    if realizations < 1:
        raise ValueError("need at least one realization")
    if measure not in DELOC_MEASURES:
        raise ValueError(f"unknown measure {measure!r}, expected one of {DELOC_MEASURES}")
    if spec.Omega <= 0:
        raise ValueError("delocalization scan requires Omega > 0")

    cells = [(gi, ri) for gi in range(j_grid.size) for ri in range(realizations)]

    def run(cell):
        gi, ri = cell
        seed = derive_stream_seed(master_seed, gi, ri)
        return _border_cell(spec, kind, distribution, float(j_grid[gi]), seed,
                            window, measure)

    values = np.array(map_cells(run, cells, workers)).reshape(j_grid.size, realizations)
    mean = values.mean(axis=1)
    if realizations > 1:
        stderr = values.std(axis=1, ddof=1) / np.sqrt(realizations)
    else:
        stderr = np.zeros(j_grid.size)

    border = None
    for J, m in zip(j_grid, mean):
        if m >= threshold * mean[0]:
            border = float(J)
            break
    return BorderScanResult(
        kind=kind, j_grid=j_grid, mean_pr=mean, stderr_pr=stderr,
        estimated_border=border, predicted_border=predicted_border(spec),
        realizations=realizations, master_seed=master_seed, window=window,
        threshold=threshold, measure=measure,
    )
