"""Spin-1/2 basis encoding, state vectors and single-spin operator actions.

Basis convention (fixed package-wide): basis index n runs over [0, 2^L);
bit k of n describes qubit k, with qubit 0 the least significant bit.
A clear bit means spin up, m_k = +1/2, so the all-up state is index 0.
I^{x,y,z} = sigma^{x,y,z}/2 with sigma^y = [[0, -i], [i, 0]], and
I^+ = I^x + i I^y raises a down spin (clears the bit), I^- lowers an up
spin (sets the bit).

States are plain 1-D complex ndarrays of length 2^L; Hermitian matrices
are dense complex (N, N) ndarrays. Everything here is pure and safe to
share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 24

SPIN_OPS = ("x", "y", "z", "plus", "minus")


@dataclass(frozen=True)
class ChainSpec:
    """Static chain and drive parameters.

    Attributes
    ----------
    L : qubit count, 1 <= L <= 24
    a : frequency gradient per site (angular frequency); qubit k precesses
        at omega_k = a*k
    Omega : Rabi frequency of the drive
    nu : drive frequency; None selects the ladder center a*(L-1)/2
    phase : pulse phase in radians, default pi/2
    """

    L: int
    a: float = 1.0
    Omega: float = 1.0
    nu: float | None = None
    phase: float = math.pi / 2

    def __post_init__(self):
        if not isinstance(self.L, int) or self.L < 1:
            raise ValueError(f"L must be a positive integer, got {self.L!r}")
        if self.L > MAX_QUBITS:
            raise ValueError(f"L exceeds limit {MAX_QUBITS}: {self.L}")
        if self.a < 0:
            raise ValueError(f"gradient a must be >= 0, got {self.a}")
        # Omega = 0 is allowed so undriven (diagonal) spectra can be built;
        # operations that need a finite drive check Omega > 0 themselves.
        if self.Omega < 0:
            raise ValueError(f"Omega must be >= 0, got {self.Omega}")
        if self.nu is None:
            object.__setattr__(self, "nu", self.a * (self.L - 1) / 2)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "Omega", float(self.Omega))
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "phase", float(self.phase))

    @property
    def dim(self) -> int:
        return 1 << self.L

    @property
    def omegas(self) -> np.ndarray:
        """Per-site precession frequencies omega_k = a*k."""
        return self.a * np.arange(self.L, dtype=float)


def qubit_count(dim: int) -> int:
    """Number of qubits for a state of length dim; dim must be a power of 2."""
    L = dim.bit_length() - 1
    if dim <= 0 or (1 << L) != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return L


def basis_spin(n: int, k: int, L: int) -> float:
    """Spin value m_k of basis state n: +1/2 when bit k is clear, else -1/2."""
    if not 0 <= k < L:
        raise ValueError(f"site index {k} out of range for L={L}")
    if not 0 <= n < (1 << L):
        raise ValueError(f"basis index {n} out of range for L={L}")
    return 0.5 if (n >> k) & 1 == 0 else -0.5


def spin_values(L: int) -> np.ndarray:
    """(2^L, L) array of m_k(n) over the whole basis."""
    n = np.arange(1 << L, dtype=np.uint64)
    m = np.empty((1 << L, L))
    for k in range(L):
        m[:, k] = 0.5 - ((n >> np.uint64(k)) & np.uint64(1)).astype(float)
    return m


def total_spin_z(L: int) -> np.ndarray:
    """M_n = sum_k m_k(n) for every basis state."""
    n = np.arange(1 << L, dtype=np.uint64)
    return 0.5 * L - np.bitwise_count(n).astype(float)


def basis_state(L: int, n: int = 0) -> np.ndarray:
    psi = np.zeros(1 << L, dtype=complex)
    psi[n] = 1.0
    return psi


def uniform_state(L: int) -> np.ndarray:
    N = 1 << L
    return np.full(N, 1.0 / math.sqrt(N), dtype=complex)


def normalize(psi: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    return psi / nrm


def inner_product(psi: np.ndarray, chi: np.ndarray) -> complex:
    """<psi|chi> = sum_n conj(psi_n) chi_n."""
    if psi.shape != chi.shape:
        raise ValueError(f"dimension mismatch: {psi.shape} vs {chi.shape}")
    return complex(np.vdot(psi, chi))


def apply_single_spin(op: str, k: int, psi: np.ndarray) -> np.ndarray:
    """Apply a single-site spin operator; returns a new, unnormalized vector.

    op is one of "x", "y", "z", "plus", "minus". I^{x,y,z} carry the
    factor 1/2; I^+ annihilates an up spin and I^- a down spin.
    """
    psi = np.asarray(psi, dtype=complex)
    L = qubit_count(psi.shape[0])
    if not 0 <= k < L:
        raise ValueError(f"site index {k} out of range for L={L}")
    n = np.arange(psi.shape[0])
    bit = 1 << k
    if op == "z":
        m = 0.5 - ((n >> k) & 1)
        return m * psi
    up = n[(n & bit) == 0]
    dn = up | bit
    out = np.zeros_like(psi)
    if op == "minus":
        out[dn] = psi[up]
    elif op == "plus":
        out[up] = psi[dn]
    elif op == "x":
        out[dn] = 0.5 * psi[up]
        out[up] = 0.5 * psi[dn]
    elif op == "y":
        # sigma^y = [[0, -i], [i, 0]] in the (up, down) ordering
        out[dn] = 0.5j * psi[up]
        out[up] = -0.5j * psi[dn]
    else:
        raise ValueError(f"unknown spin operator {op!r}, expected one of {SPIN_OPS}")
    return out
