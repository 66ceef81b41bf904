import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradchain.spins import (ChainSpec, apply_single_spin, basis_spin, basis_state,
                             inner_product, normalize, qubit_count, total_spin_z,
                             uniform_state)

from tests.oracles import PAULI_BY_OP, op_at


def random_state(L, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(1 << L) + 1j * rng.standard_normal(1 << L)
    return v / np.linalg.norm(v)


class TestChainSpec:
    def test_defaults(self):
        spec = ChainSpec(L=10)
        assert spec.dim == 1024
        assert spec.nu == pytest.approx(4.5)       # ladder center a*(L-1)/2
        assert spec.phase == pytest.approx(np.pi / 2)

    def test_omegas(self):
        spec = ChainSpec(L=4, a=0.25)
        assert np.allclose(spec.omegas, [0, 0.25, 0.5, 0.75])

    @pytest.mark.parametrize("kwargs", [
        dict(L=0), dict(L=25), dict(L=-3), dict(L=4, a=-1.0), dict(L=4, Omega=-0.5),
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            ChainSpec(**kwargs)

    def test_explicit_nu_kept(self):
        assert ChainSpec(L=6, a=1.0, nu=2.0).nu == 2.0


class TestBasisSpin:
    def test_examples(self):
        assert basis_spin(0, 0, 4) == 0.5
        assert basis_spin(1, 0, 4) == -0.5
        assert basis_spin(5, 1, 4) == 0.5   # 5 = 101b, bit 1 clear

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            basis_spin(16, 0, 4)
        with pytest.raises(ValueError):
            basis_spin(0, 4, 4)

    def test_matches_z_action_exhaustively(self):
        # I^z_k |n> = m_k(n) |n> for every n, k at small L
        for L in (1, 2, 3, 4):
            for n in range(1 << L):
                psi = basis_state(L, n)
                for k in range(L):
                    out = apply_single_spin("z", k, psi)
                    assert out[n] == basis_spin(n, k, L)
                    assert np.count_nonzero(out) <= 1


class TestApplySingleSpin:
    def test_z_on_all_up(self):
        out = apply_single_spin("z", 0, basis_state(1, 0))
        assert np.allclose(out, [0.5, 0.0])

    def test_plus_annihilates_up(self):
        out = apply_single_spin("plus", 0, basis_state(1, 0))
        assert np.allclose(out, 0.0)

    def test_y_on_up(self):
        # sigma^y = [[0,-i],[i,0]] acting on (1,0): I^y|0> = (i/2)|1>
        out = apply_single_spin("y", 0, basis_state(1, 0))
        assert np.allclose(out, [0.0, 0.5j])

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            apply_single_spin("q", 0, basis_state(2, 0))

    def test_site_out_of_range(self):
        with pytest.raises(ValueError):
            apply_single_spin("x", 2, basis_state(2, 0))

    @pytest.mark.parametrize("op", ["x", "y", "z", "plus", "minus"])
    @pytest.mark.parametrize("L", [1, 2, 3, 4])
    def test_against_kron_oracle(self, op, L):
        mat = PAULI_BY_OP[op]
        for seed in range(3):
            psi = random_state(L, seed)
            for k in range(L):
                expected = op_at(k, mat, L) @ psi
                assert np.allclose(apply_single_spin(op, k, psi), expected, atol=1e-14)

    @given(L=st.integers(1, 6), k=st.integers(0, 5), seed=st.integers(0, 2**32 - 1),
           op=st.sampled_from(["x", "y", "z"]))
    @settings(max_examples=60, deadline=None)
    def test_half_spin_squares_to_quarter(self, L, k, seed, op):
        k = k % L
        psi = random_state(L, seed)
        twice = apply_single_spin(op, k, apply_single_spin(op, k, psi))
        assert np.allclose(twice, psi / 4, atol=1e-14)

    @given(L=st.integers(1, 6), k=st.integers(0, 5), seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_ladder_identities(self, L, k, seed):
        # I^+- = I^x +- i I^y as vector identities
        k = k % L
        psi = random_state(L, seed)
        x = apply_single_spin("x", k, psi)
        y = apply_single_spin("y", k, psi)
        assert np.allclose(apply_single_spin("plus", k, psi), x + 1j * y, atol=1e-14)
        assert np.allclose(apply_single_spin("minus", k, psi), x - 1j * y, atol=1e-14)


class TestInnerProduct:
    def test_norm_of_normalized(self):
        psi = random_state(4, 7)
        assert inner_product(psi, psi) == pytest.approx(1.0)

    def test_orthogonal_basis_states(self):
        assert inner_product(basis_state(2, 0), basis_state(2, 1)) == 0.0

    def test_uniform_against_basis(self):
        assert inner_product(uniform_state(2), basis_state(2, 0)) == pytest.approx(0.5)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            inner_product(basis_state(2, 0), basis_state(3, 0))

    @given(seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_conjugate_symmetry(self, seed):
        psi, chi = random_state(3, seed), random_state(3, seed + 1)
        assert inner_product(psi, chi) == pytest.approx(np.conj(inner_product(chi, psi)))


def test_total_spin_z_matches_basis_spin():
    for L in (1, 3, 5):
        M = total_spin_z(L)
        for n in range(1 << L):
            assert M[n] == sum(basis_spin(n, k, L) for k in range(L))


def test_qubit_count_rejects_non_power():
    with pytest.raises(ValueError):
        qubit_count(6)


def test_normalize_zero_vector():
    with pytest.raises(ValueError):
        normalize(np.zeros(4, dtype=complex))
