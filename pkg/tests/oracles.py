"""Independent reference implementations used as test oracles.

Everything here is built from explicit 2x2 Pauli matrices and Kronecker
products, deliberately avoiding the package's bit-twiddling code paths.
"""

import functools

import numpy as np

ID2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SPLUS = np.array([[0, 1], [0, 0]], dtype=complex)   # |up><down|
SMINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |down><up|

PAULI_BY_OP = {"x": SX / 2, "y": SY / 2, "z": SZ / 2, "plus": SPLUS, "minus": SMINUS}


def op_at(site, op2, L):
    """Embed a 2x2 operator at one site; site 0 is the least significant bit."""
    mats = [op2 if k == site else ID2 for k in reversed(range(L))]
    return functools.reduce(np.kron, mats)


def kron_rotating(spec, cm):
    """Rotating-frame Hamiltonian assembled from explicit Pauli strings."""
    L, N = spec.L, spec.dim
    H = np.zeros((N, N), dtype=complex)
    for k in range(L):
        delta = spec.a * k - spec.nu
        H += -delta * op_at(k, SZ / 2, L) + spec.Omega * op_at(k, SY / 2, L)
    for k in range(L):
        for n in range(k + 1, L):
            J = cm.values[k, n]
            if J != 0.0:
                H -= 2 * J * op_at(k, SZ / 2, L) @ op_at(n, SZ / 2, L)
    return H


def kron_lab(spec, cm, pulses, t):
    """Lab-frame Hamiltonian assembled from explicit Pauli strings."""
    L, N = spec.L, spec.dim
    H = np.zeros((N, N), dtype=complex)
    for k in range(L):
        H -= spec.a * k * op_at(k, SZ / 2, L)
    for k in range(L):
        for n in range(k + 1, L):
            J = cm.values[k, n]
            if J != 0.0:
                H -= 2 * J * op_at(k, SZ / 2, L) @ op_at(n, SZ / 2, L)
    for p in pulses:
        if p.start <= t < p.start + p.duration:
            for k in range(L):
                H -= (p.Omega_p / 2) * (
                    np.exp(-1j * (p.nu_p * t + p.phase_p)) * op_at(k, SMINUS, L)
                    + np.exp(1j * (p.nu_p * t + p.phase_p)) * op_at(k, SPLUS, L))
    return H


def poisson_samples(n, rng):
    """Inverse-CDF draws from P(s) = exp(-s)."""
    return -np.log(1.0 - rng.uniform(0, 1, n))


def wigner_dyson_samples(n, rng):
    """Inverse-CDF draws from P(s) = (pi/2) s exp(-pi s^2/4)."""
    return np.sqrt(-(4.0 / np.pi) * np.log(1.0 - rng.uniform(0, 1, n)))
