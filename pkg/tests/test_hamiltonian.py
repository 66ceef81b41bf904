import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradchain.errors import ConfigError
from gradchain.hamiltonian import (CouplingSpec, PulseSpec, build_lab, build_rotating,
                                   diagonal_energies, diagonal_energy, predicted_border,
                                   sample_couplings, single_pulse, site_detuning,
                                   trace_h2_rotating, validate_schedule)
from gradchain.spins import ChainSpec

from tests.oracles import SY, kron_lab, kron_rotating, op_at


def nn_constant(J, L):
    return sample_couplings(CouplingSpec(kind="nn-constant", J=J), L)


class TestCouplingSpec:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            CouplingSpec(kind="ladder", J=1.0)

    def test_negative_scale(self):
        with pytest.raises(ValueError):
            CouplingSpec(kind="nn-constant", J=-1.0)

    def test_random_needs_seed(self):
        with pytest.raises(ValueError):
            CouplingSpec(kind="nn-random", J=1.0)

    def test_constant_takes_no_seed(self):
        with pytest.raises(ValueError):
            CouplingSpec(kind="nn-constant", J=1.0, seed=3)


class TestSampleCouplings:
    def test_nn_constant(self):
        cm = nn_constant(1.0, 3)
        assert cm.coupling(0, 1) == 1.0
        assert cm.coupling(1, 2) == 1.0
        assert cm.coupling(0, 2) == 0.0

    def test_zero_scale_is_all_zero(self):
        cm = sample_couplings(CouplingSpec(kind="nn-random", J=0.0, seed=5), 4)
        assert np.all(cm.values == 0.0)

    def test_all_random_range_and_determinism(self):
        cs = CouplingSpec(kind="all-random", J=1.0, seed=42)
        cm1 = sample_couplings(cs, 4)
        cm2 = sample_couplings(cs, 4)
        vals = np.array([J for _, _, J in cm1.pairs()])
        assert vals.shape[0] == 6
        assert np.all(np.abs(vals) <= 1.0)
        assert np.array_equal(cm1.values, cm2.values)
        other = sample_couplings(CouplingSpec(kind="all-random", J=1.0, seed=43), 4)
        assert not np.array_equal(cm1.values, other.values)

    def test_nonnegative_distribution(self):
        cs = CouplingSpec(kind="all-random", J=2.0, seed=9, distribution="nonnegative")
        vals = sample_couplings(cs, 5).values
        assert np.all(vals >= 0.0) and vals.max() <= 2.0

    def test_too_few_sites(self):
        with pytest.raises(ValueError):
            sample_couplings(CouplingSpec(kind="nn-constant", J=1.0), 1)

    @given(seed=st.integers(0, 2**63 - 1))
    @settings(max_examples=20, deadline=None)
    def test_pure_function_of_inputs(self, seed):
        cs = CouplingSpec(kind="nn-random", J=0.7, seed=seed)
        assert np.array_equal(sample_couplings(cs, 6).values,
                              sample_couplings(cs, 6).values)


class TestSiteDetuning:
    def test_examples(self):
        assert site_detuning(ChainSpec(L=5, a=1.0, nu=0.0), 3) == 3.0
        assert site_detuning(ChainSpec(L=5, a=1.0, nu=0.5), 0) == -0.5
        assert site_detuning(ChainSpec(L=5, a=0.2, nu=0.3), 4) == pytest.approx(0.5)

    def test_range(self):
        with pytest.raises(ValueError):
            site_detuning(ChainSpec(L=3), 3)


class TestDiagonalEnergy:
    def test_all_up_nn_constant(self):
        # each bond contributes -2J * (1/4)
        for L in (2, 4, 6):
            spec = ChainSpec(L=L, a=0.0, nu=0.0, Omega=1.0)
            assert diagonal_energy(spec, nn_constant(1.0, L), 0) == pytest.approx(-(L - 1) / 2)

    def test_l2_hand_oracle(self):
        # a=1, nu=0.5, J=1: deltas (-1/2, +1/2); E(n) = -d0 m0 - d1 m1 - 2 J m0 m1
        # evaluated by hand per basis state with bit 0 = qubit 0
        spec = ChainSpec(L=2, a=1.0, Omega=0.0, nu=0.5)
        cm = nn_constant(1.0, 2)
        expected = [-0.5, 0.0, 1.0, -0.5]
        for n, e in enumerate(expected):
            assert diagonal_energy(spec, cm, n) == pytest.approx(e)
        assert np.allclose(diagonal_energies(spec, cm), expected)

    def test_field_only_formula(self):
        spec = ChainSpec(L=5, a=0.7, nu=0.0)
        cm = nn_constant(0.0, 5)
        for n in (0, 9, 31):
            clear = sum(0.7 * k / 2 for k in range(5) if not (n >> k) & 1)
            setb = sum(0.7 * k / 2 for k in range(5) if (n >> k) & 1)
            assert diagonal_energy(spec, cm, n) == pytest.approx(-clear + setb)

    def test_index_range(self):
        with pytest.raises(ValueError):
            diagonal_energy(ChainSpec(L=2), nn_constant(1.0, 2), 4)


class TestBuildRotating:
    def test_l1_matrix_and_eigs(self):
        # single spin in a transverse field: H = (Omega/2) sigma^y
        from gradchain.hamiltonian import CouplingMatrix
        spec = ChainSpec(L=1, a=0.0, Omega=1.0, nu=0.0)
        cm = CouplingMatrix(L=1, values=np.zeros((1, 1)))
        H = build_rotating(spec, cm)
        assert np.allclose(H, 0.5 * SY)
        assert np.allclose(np.linalg.eigvalsh(H), [-0.5, 0.5])

    def test_l2_diagonal(self):
        spec = ChainSpec(L=2, a=1.0, Omega=0.0, nu=0.5)
        H = build_rotating(spec, nn_constant(1.0, 2))
        assert np.allclose(H, np.diag([-0.5, 0.0, 1.0, -0.5]))

    @pytest.mark.parametrize("kind,seed", [("nn-constant", None), ("nn-random", 11),
                                           ("all-random", 12)])
    def test_against_kron_oracle(self, kind, seed):
        for L in (2, 3, 4):
            spec = ChainSpec(L=L, a=0.6, Omega=0.8, nu=0.4, phase=np.pi / 2)
            cm = sample_couplings(CouplingSpec(kind=kind, J=0.9, seed=seed), L)
            assert np.allclose(build_rotating(spec, cm), kron_rotating(spec, cm), atol=1e-14)

    def test_trace_zero_and_hermitian(self):
        spec = ChainSpec(L=5, a=1.3, Omega=0.7, nu=2.0)
        cm = sample_couplings(CouplingSpec(kind="all-random", J=1.1, seed=3), 5)
        H = build_rotating(spec, cm)
        # traceless up to summation roundoff of the diagonal energies
        assert abs(np.trace(H)) < 1e-12
        assert np.abs(H - H.conj().T).max() == 0.0

    def test_offdiagonal_sparsity(self):
        spec = ChainSpec(L=4, a=0.9, Omega=1.7, nu=1.0)
        H = build_rotating(spec, nn_constant(0.3, 4))
        n = np.arange(16)
        popcount = np.bitwise_count(n[:, None] ^ n[None, :])
        off = H.copy()
        off[n, n] = 0.0
        assert np.all((np.abs(off) > 0) == (popcount == 1))
        assert np.allclose(np.abs(off[popcount == 1]), spec.Omega / 2)

    def test_trace_h2_closed_form_brute_force(self):
        # closed form checked against an explicit matrix trace at L=2, 3
        rng = np.random.default_rng(0)
        for L in (2, 3):
            for kind, seed in (("nn-constant", None), ("all-random", 21)):
                spec = ChainSpec(L=L, a=rng.uniform(0, 2), Omega=rng.uniform(0.1, 2),
                                 nu=rng.uniform(-1, 1))
                cm = sample_couplings(CouplingSpec(kind=kind, J=0.8, seed=seed), L)
                H = build_rotating(spec, cm)
                brute = float(np.real(np.trace(H @ H)))
                assert brute == pytest.approx(trace_h2_rotating(spec, cm), rel=1e-12)

    def test_dimension_limit(self):
        spec = ChainSpec(L=14)
        with pytest.raises(ConfigError):
            build_rotating(spec, nn_constant(0.0, 14))

    def test_mismatched_coupling_matrix(self):
        with pytest.raises(ValueError):
            build_rotating(ChainSpec(L=3), nn_constant(1.0, 4))


class TestBuildLab:
    def spec(self, L=3):
        return ChainSpec(L=L, a=0.8, Omega=0.6, nu=1.1, phase=np.pi / 2)

    def test_outside_pulse_is_diagonal(self):
        spec = self.spec()
        cm = nn_constant(0.2, 3)
        H = build_lab(spec, cm, [single_pulse(spec, duration=1.0)], t=2.5)
        assert np.abs(H - np.diag(np.diag(H))).max() == 0.0

    def test_transverse_term_at_t0(self):
        # phase pi/2: -(1/2)(e^{-i pi/2} I^- + e^{+i pi/2} I^+) = I^y, so the
        # drive contributes +Omega sum_k I^y_k, matching the rotating builder
        spec = self.spec()
        cm = nn_constant(0.0, 3)
        H = build_lab(spec, cm, [single_pulse(spec, duration=1.0)], t=0.0)
        expected = sum(spec.Omega * op_at(k, SY / 2, 3) for k in range(3))
        off = H - np.diag(np.diag(H))
        assert np.allclose(off, expected, atol=1e-14)

    def test_hermitian_any_time(self):
        spec = self.spec()
        cm = sample_couplings(CouplingSpec(kind="nn-random", J=0.5, seed=8), 3)
        pulses = [single_pulse(spec, duration=2.0)]
        for t in (0.0, 0.37, 1.99):
            H = build_lab(spec, cm, pulses, t)
            assert np.abs(H - H.conj().T).max() == 0.0
            assert np.allclose(H, kron_lab(spec, cm, pulses, t), atol=1e-14)

    def test_schedule_validation(self):
        spec = self.spec()
        p1 = single_pulse(spec, duration=1.0, start=0.0)
        p2 = single_pulse(spec, duration=1.0, start=0.5)
        with pytest.raises(ValueError):
            validate_schedule([p1, p2])


class TestPredictedBorder:
    def test_paper_value(self):
        assert predicted_border(ChainSpec(L=4, a=1.0, Omega=1.0)) == 4.0

    def test_zero_gradient(self):
        assert predicted_border(ChainSpec(L=4, a=0.0, Omega=2.0)) == 0.0

    def test_formula_symmetry(self):
        b1 = predicted_border(ChainSpec(L=4, a=2.0, Omega=1.0))
        b2 = predicted_border(ChainSpec(L=4, a=1.0, Omega=0.25))
        assert b1 == b2 == 16.0

    def test_zero_omega_rejected(self):
        with pytest.raises(ValueError):
            predicted_border(ChainSpec(L=4, a=1.0, Omega=0.0))


class TestPulseSpec:
    def test_bad_duration(self):
        with pytest.raises(ValueError):
            PulseSpec(Omega_p=1.0, nu_p=0.0, phase_p=0.0, duration=0.0)

    def test_bad_amplitude(self):
        with pytest.raises(ValueError):
            PulseSpec(Omega_p=0.0, nu_p=0.0, phase_p=0.0, duration=1.0)

    def test_active_window(self):
        p = PulseSpec(Omega_p=1.0, nu_p=0.0, phase_p=0.0, duration=2.0, start=1.0)
        assert not p.active(0.5)
        assert p.active(1.0)
        assert p.active(2.9)
        assert not p.active(3.0)
