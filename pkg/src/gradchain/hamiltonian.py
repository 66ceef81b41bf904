"""Hamiltonian construction for the gradient-field Ising chain.

Two builders are provided. build_rotating assembles the stationary
single-pulse Hamiltonian in the frame co-rotating with the drive,

    H = sum_k [ -delta_k I^z_k + Omega I^y_k ] - 2 sum_{n>k} J_{k,n} I^z_k I^z_n,

with detunings delta_k = a*k - nu. build_lab assembles the time-dependent
laboratory-frame Hamiltonian driven by a schedule of rectangular pulses,

    H(t) = -sum_k ( omega_k I^z_k + 2 sum_{n>k} J_{k,n} I^z_k I^z_n )
           - (1/2) sum_p Theta_p(t) Omega_p sum_k ( e^{-i nu_p t - i phi_p} I^-_k + h.c. ).

Both are exactly Hermitian and traceless by construction. Couplings come
in three flavours: constant nearest-neighbor, seeded random nearest-
neighbor and seeded random all-to-all.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .spins import ChainSpec, spin_values

COUPLING_KINDS = ("nn-constant", "nn-random", "all-random")
RANDOM_KINDS = ("nn-random", "all-random")
COUPLING_DISTRIBUTIONS = ("symmetric", "nonnegative")

# Dense complex storage: 2^13 keeps a single matrix at 1 GiB.
DENSE_MAX_QUBITS = 13


@dataclass(frozen=True)
class CouplingSpec:
    """Which Ising-coupling model to realize and at what scale.

    kind "nn-constant" sets J_{k,k+1} = J; the random kinds draw each
    active J_{k,n} independently and uniformly from [-J, J] ("symmetric"
    distribution) or [0, J] ("nonnegative"), deterministically from seed.
    """

    kind: str
    J: float
    seed: int | None = None
    distribution: str = "symmetric"

    def __post_init__(self):
        if self.kind not in COUPLING_KINDS:
            raise ValueError(f"unknown coupling kind {self.kind!r}, expected one of {COUPLING_KINDS}")
        if self.J < 0:
            raise ValueError(f"coupling scale J must be >= 0, got {self.J}")
        if self.distribution not in COUPLING_DISTRIBUTIONS:
            raise ValueError(f"unknown coupling distribution {self.distribution!r}")
        if self.kind in RANDOM_KINDS and self.seed is None:
            raise ValueError(f"coupling kind {self.kind!r} requires a seed")
        if self.kind == "nn-constant" and self.seed is not None:
            raise ValueError("nn-constant couplings take no seed")
        object.__setattr__(self, "J", float(self.J))

    @property
    def is_random(self) -> bool:
        return self.kind in RANDOM_KINDS


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Realized couplings; values[k, n] holds J_{k,n} for n > k, zero elsewhere."""

    L: int
    values: np.ndarray

    def coupling(self, k: int, n: int) -> float:
        if k > n:
            k, n = n, k
        return float(self.values[k, n])

    def pairs(self):
        """(k, n, J) triples for the nonzero upper-triangle entries."""
        ks, ns = np.nonzero(np.triu(self.values, 1))
        return [(int(k), int(n), float(self.values[k, n])) for k, n in zip(ks, ns)]


def sample_couplings(cs: CouplingSpec, L: int) -> CouplingMatrix:
    """Draw a coupling matrix; a pure function of (kind, J, distribution, seed, L).

    Random values are placed in a fixed order: bond order k = 0..L-2 for
    nn-random, row-major upper triangle (0,1), (0,2), ..., (L-2,L-1) for
    all-random.
    """
    if L < 2:
        raise ValueError(f"need at least 2 sites, got L={L}")
    values = np.zeros((L, L))
    if cs.kind == "nn-constant":
        values[np.arange(L - 1), np.arange(1, L)] = cs.J
    else:
        rng = np.random.default_rng(cs.seed)
        lo = -cs.J if cs.distribution == "symmetric" else 0.0
        if cs.kind == "nn-random":
            values[np.arange(L - 1), np.arange(1, L)] = rng.uniform(lo, cs.J, L - 1)
        else:
            iu = np.triu_indices(L, 1)
            values[iu] = rng.uniform(lo, cs.J, iu[0].size)
    return CouplingMatrix(L=L, values=values)


@dataclass(frozen=True)
class PulseSpec:
    """One rectangular drive pulse: amplitude Omega_p at frequency nu_p,
    phase phase_p, active on [start, start + duration)."""

    Omega_p: float
    nu_p: float
    phase_p: float
    duration: float
    start: float = 0.0

    def __post_init__(self):
        if self.Omega_p <= 0:
            raise ValueError(f"pulse Rabi frequency must be > 0, got {self.Omega_p}")
        if self.duration <= 0:
            raise ValueError(f"pulse duration must be > 0, got {self.duration}")

    @property
    def end(self) -> float:
        return self.start + self.duration

    def active(self, t: float) -> bool:
        return self.start <= t < self.end


def single_pulse(spec: ChainSpec, duration: float, start: float = 0.0) -> PulseSpec:
    """The chain's own drive parameters as a one-pulse schedule."""
    return PulseSpec(Omega_p=spec.Omega, nu_p=spec.nu, phase_p=spec.phase,
                     duration=duration, start=start)


def validate_schedule(pulses) -> None:
    """Pulses must be time-ordered and non-overlapping."""
    for p, q in zip(pulses, pulses[1:]):
        if q.start < p.end:
            raise ValueError(f"pulses overlap or are out of order at t={q.start}")


def site_detuning(spec: ChainSpec, k: int) -> float:
    """delta_k = omega_k - nu = a*k - nu."""
    if not 0 <= k < spec.L:
        raise ValueError(f"site index {k} out of range for L={spec.L}")
    return spec.a * k - spec.nu


def detunings(spec: ChainSpec) -> np.ndarray:
    return spec.a * np.arange(spec.L, dtype=float) - spec.nu


def _check_dense(L: int) -> None:
    if L > DENSE_MAX_QUBITS:
        raise ConfigError(
            f"dense Hamiltonian needs 2^{2 * L} complex entries; refusing L={L} > {DENSE_MAX_QUBITS}")


def _check_match(spec: ChainSpec, cm: CouplingMatrix) -> None:
    if cm.L != spec.L:
        raise ValueError(f"coupling matrix is for L={cm.L}, spec has L={spec.L}")


def _ising_energies(m: np.ndarray, cm: CouplingMatrix) -> np.ndarray:
    """-2 sum_{n>k} J_{k,n} m_k m_n per basis state; m is the spin_values table."""
    E = np.zeros(m.shape[0])
    for k, n, J in cm.pairs():
        E -= 2.0 * J * m[:, k] * m[:, n]
    return E


def diagonal_energy(spec: ChainSpec, cm: CouplingMatrix, n: int) -> float:
    """Energy of basis state n under the rotating Hamiltonian with Omega = 0."""
    _check_match(spec, cm)
    if not 0 <= n < spec.dim:
        raise ValueError(f"basis index {n} out of range for L={spec.L}")
    bits = (n >> np.arange(spec.L)) & 1
    m = 0.5 - bits.astype(float)
    E = -float(detunings(spec) @ m)
    for k, j, J in cm.pairs():
        E -= 2.0 * J * m[k] * m[j]
    return E


def diagonal_energies(spec: ChainSpec, cm: CouplingMatrix) -> np.ndarray:
    """diagonal_energy for every basis state, vectorized."""
    _check_match(spec, cm)
    m = spin_values(spec.L)
    return -(m @ detunings(spec)) + _ising_energies(m, cm)


def _flip_index_pairs(L: int):
    """Per site k: (indices with bit k set, same indices with bit k clear)."""
    n = np.arange(1 << L)
    for k in range(L):
        up = n[(n & (1 << k)) == 0]
        yield up | (1 << k), up


def build_rotating(spec: ChainSpec, cm: CouplingMatrix) -> np.ndarray:
    """Dense rotating-frame Hamiltonian; see the module docstring for the form."""
    _check_match(spec, cm)
    _check_dense(spec.L)
    N = spec.dim
    H = np.zeros((N, N), dtype=complex)
    idx = np.arange(N)
    H[idx, idx] = diagonal_energies(spec, cm)
    # Omega I^y_k couples states differing in bit k: <down|I^y|up> = i/2
    for dn, up in _flip_index_pairs(spec.L):
        H[dn, up] += 0.5j * spec.Omega
        H[up, dn] += -0.5j * spec.Omega
    return H


def build_lab(spec: ChainSpec, cm: CouplingMatrix, pulses, t: float) -> np.ndarray:
    """Dense lab-frame Hamiltonian at time t under the given pulse schedule."""
    _check_match(spec, cm)
    _check_dense(spec.L)
    validate_schedule(pulses)
    N = spec.dim
    m = spin_values(spec.L)
    H = np.zeros((N, N), dtype=complex)
    idx = np.arange(N)
    H[idx, idx] = -(m @ spec.omegas) + _ising_energies(m, cm)
    for p in pulses:
        if not p.active(t):
            continue
        # -(Omega_p/2) e^{-i nu_p t - i phi_p} I^-_k and Hermitian conjugate
        c = -(p.Omega_p / 2) * np.exp(-1j * (p.nu_p * t + p.phase_p))
        for dn, up in _flip_index_pairs(spec.L):
            H[dn, up] += c
            H[up, dn] += np.conj(c)
    return H


def predicted_border(spec: ChainSpec) -> float:
    """Analytic weak-chaos border J_cr ~ 4 a^2 / Omega (independent of L)."""
    if spec.Omega <= 0:
        raise ValueError("predicted border requires Omega > 0")
    return 4.0 * spec.a ** 2 / spec.Omega


def trace_h2_rotating(spec: ChainSpec, cm: CouplingMatrix) -> float:
    """Closed form for trace(H^2) of build_rotating:
    N * [ (1/4) sum_k delta_k^2 + (L/4) Omega^2 + (1/4) sum_{n>k} J_{k,n}^2 ]."""
    _check_match(spec, cm)
    d = detunings(spec)
    j2 = float(np.sum(np.triu(cm.values, 1) ** 2))
    return spec.dim * ((d @ d) / 4 + spec.L * spec.Omega ** 2 / 4 + j2 / 4)
