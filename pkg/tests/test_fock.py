import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockbench.errors import ConfigurationError, DegenerateStateError, DomainError
from fockbench.fock import (
    DensityOperator,
    PureState,
    apply_one_mode_operator,
    apply_two_mode_operator,
    auto_cutoff,
    fidelity,
    inner_product,
    partial_trace,
    project_fock,
    tensor_product,
)
from fockbench.optics import BeamSplitterSpec
from fockbench.states import psi_subtracted, subtraction_probability_10, tmsv


def random_state(rng, num_modes, cutoff):
    shape = (cutoff + 1,) * num_modes
    return PureState(rng.normal(size=shape) + 1j * rng.normal(size=shape))


def random_unitary(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestPureState:
    def test_fock_basis_vector(self):
        s = PureState.fock([1, 2], 3)
        assert s.num_modes == 2 and s.cutoff == 3 and s.dim == 16
        assert s.amplitudes[1, 2] == 1 and s.norm_squared == 1.0

    def test_amplitudes_are_read_only_copies(self):
        raw = np.array([1.0, 0.0])
        s = PureState(raw)
        raw[0] = 5.0
        assert s.amplitudes[0] == 1.0
        with pytest.raises(ValueError):
            s.amplitudes[0] = 2.0

    def test_mismatched_axes_rejected(self):
        with pytest.raises(ConfigurationError):
            PureState(np.zeros((2, 3)))

    def test_cutoff_zero_rejected(self):
        with pytest.raises(ConfigurationError):
            PureState(np.ones(1))

    def test_normalize_zero_vector(self):
        with pytest.raises(DegenerateStateError):
            PureState(np.zeros(3)).normalized()

    def test_normalized_flag(self):
        s = PureState(np.array([3.0, 4.0])).normalized()
        assert s.is_normalized()
        assert not PureState(np.array([1.0, 1.0])).is_normalized()

    def test_boundary_mass(self):
        assert PureState(np.array([1.0, 0.0, 1.0])).boundary_mass() == pytest.approx(0.5)
        assert PureState.fock([0, 0], 2).boundary_mass() == 0.0


class TestDensityOperator:
    def test_non_hermitian_rejected(self):
        with pytest.raises(DomainError):
            DensityOperator(np.array([[1.0, 1.0], [0.0, 0.0]]), 1)

    def test_side_must_match_modes(self):
        with pytest.raises(ConfigurationError):
            DensityOperator(np.eye(8), 2)

    def test_tensor_view_and_trace(self):
        rho = PureState.fock([1, 0], 2).to_density()
        assert rho.trace == pytest.approx(1.0)
        assert rho.tensor[1, 0, 1, 0] == 1.0
        assert rho.cutoff == 2


class TestTensorProduct:
    def test_vacuum_product(self):
        v = PureState.vacuum(1, 2)
        out = tensor_product(v, v)
        assert out.amplitudes[0, 0] == 1 and out.norm_squared == 1

    def test_linearity(self):
        a, b = 0.6, 0.8j
        left = PureState(np.array([a, b, 0]))
        out = tensor_product(left, PureState.fock([1], 2))
        assert out.amplitudes[0, 1] == a and out.amplitudes[1, 1] == b
        assert out.norm_squared == pytest.approx(1.0)

    def test_norms_multiply(self):
        psi = tmsv(0.5, 12)
        joint = tensor_product(psi, psi)
        assert joint.num_modes == 4
        assert joint.norm_squared == pytest.approx(psi.norm_squared**2, abs=1e-14)

    def test_cutoff_mismatch(self):
        with pytest.raises(ConfigurationError):
            tensor_product(PureState.vacuum(1, 2), PureState.vacuum(1, 3))


class TestInnerProduct:
    def test_orthonormal_basis(self):
        zero, one = PureState.fock([0], 2), PureState.fock([1], 2)
        assert inner_product(zero, zero) == 1
        assert inner_product(zero, one) == 0

    def test_conjugate_linear_in_first(self):
        a = PureState(np.array([1j, 0.0]))
        b = PureState(np.array([1.0, 0.0]))
        assert inner_product(a, b) == pytest.approx(-1j)

    def test_shape_mismatch(self):
        with pytest.raises(ConfigurationError):
            inner_product(PureState.vacuum(1, 2), PureState.vacuum(2, 2))

    def test_subtracted_norm_matches_series(self):
        spec = BeamSplitterSpec.from_t2(0.9)
        psi = psi_subtracted(0.5, spec, 1, 0, 40)
        p = inner_product(psi, psi).real
        assert p == pytest.approx(subtraction_probability_10(0.5, spec), abs=1e-12)
        assert p == pytest.approx(0.031218, abs=1e-6)

    def test_fidelity_ignores_phase_and_norm(self):
        rng = np.random.default_rng(1)
        s = random_state(rng, 2, 3)
        assert fidelity(s, PureState(-2.5j * s.amplitudes)) == pytest.approx(1.0)


class TestPartialTrace:
    def test_vacuum(self):
        rho = partial_trace(PureState.vacuum(2, 2).to_density(), [0])
        expected = np.zeros((3, 3))
        expected[0, 0] = 1
        assert np.allclose(rho.matrix, expected)

    def test_bell_state_maximally_mixed(self):
        bell = np.zeros((3, 3))
        bell[0, 0] = bell[1, 1] = math.sqrt(0.5)
        rho = partial_trace(PureState(bell).to_density(), [0])
        assert np.allclose(rho.matrix, np.diag([0.5, 0.5, 0.0]))

    def test_tmsv_thermal(self):
        lam, c = 0.5, 20
        rho = partial_trace(tmsv(lam, c).to_density(), [1])
        n = np.arange(c + 1)
        assert np.allclose(rho.matrix, np.diag((1 - lam**2) * lam ** (2 * n)), atol=1e-14)

    def test_recovers_left_factor(self):
        rng = np.random.default_rng(2)
        left = random_state(rng, 1, 3).normalized()
        right = random_state(rng, 2, 3).normalized()
        rho = partial_trace(tensor_product(left, right).to_density(), [0])
        assert np.abs(rho.matrix - left.to_density().matrix).max() < 1e-10

    def test_trace_preserved_on_middle_mode(self):
        rng = np.random.default_rng(3)
        s = random_state(rng, 3, 2).normalized()
        rho = partial_trace(s.to_density(), [0, 2])
        assert rho.trace == pytest.approx(1.0, abs=1e-10)
        assert np.allclose(rho.matrix, rho.matrix.conj().T)

    @pytest.mark.parametrize("keep", [[], [2], [1, 0], [0, 0], [-1]])
    def test_bad_keep_lists(self, keep):
        with pytest.raises(ConfigurationError):
            partial_trace(PureState.vacuum(2, 1).to_density(), keep)


class TestProjectFock:
    def test_detect_one(self):
        out = project_fock(PureState.fock([1, 1], 2), 0, 1)
        assert out.num_modes == 1 and out.amplitudes[1] == 1 and out.norm_squared == 1

    def test_detect_zero_gives_zero_vector(self):
        assert project_fock(PureState.fock([1, 1], 2), 0, 0).norm_squared == 0

    def test_count_above_cutoff(self):
        with pytest.raises(DomainError):
            project_fock(PureState.vacuum(2, 2), 0, 3)

    def test_single_mode_rejected(self):
        with pytest.raises(ConfigurationError):
            project_fock(PureState.vacuum(1, 2), 0, 0)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), mode=st.integers(0, 2))
    def test_completeness(self, seed, mode):
        s = random_state(np.random.default_rng(seed), 3, 3)
        total = sum(project_fock(s, mode, k).norm_squared for k in range(4))
        assert total == pytest.approx(s.norm_squared, rel=1e-10)


class TestOperators:
    def test_identity(self):
        s = random_state(np.random.default_rng(4), 2, 3)
        out = apply_one_mode_operator(s, 1, np.eye(4))
        assert np.array_equal(out.amplitudes, s.amplitudes)

    def test_number_operator(self):
        out = apply_one_mode_operator(PureState.fock([2], 3), 0, np.diag(np.arange(4.0)))
        assert np.allclose(out.amplitudes, 2 * PureState.fock([2], 3).amplitudes)

    def test_acts_on_addressed_mode_only(self):
        lower = np.diag(np.ones(2), 1)
        out = apply_one_mode_operator(PureState.fock([1, 2], 2), 1, lower)
        assert out.amplitudes[1, 1] == 1 and out.norm_squared == 1

    def test_two_mode_swap(self):
        d = 3
        swap = np.zeros((d * d, d * d))
        for i in range(d):
            for j in range(d):
                swap[j * d + i, i * d + j] = 1
        out = apply_two_mode_operator(PureState.fock([2, 0, 1], 2), 0, 2, swap)
        assert out.amplitudes[1, 0, 2] == 1

    def test_dimension_mismatch(self):
        s = PureState.vacuum(2, 2)
        with pytest.raises(ConfigurationError):
            apply_one_mode_operator(s, 0, np.eye(4))
        with pytest.raises(ConfigurationError):
            apply_two_mode_operator(s, 0, 1, np.eye(4))
        with pytest.raises(ConfigurationError):
            apply_two_mode_operator(s, 1, 1, np.eye(9))
        with pytest.raises(ConfigurationError):
            apply_one_mode_operator(s, 2, np.eye(3))

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_unitaries_compose_and_preserve_norm(self, seed):
        rng = np.random.default_rng(seed)
        s = random_state(rng, 2, 3)
        u, v = random_unitary(rng, 4), random_unitary(rng, 4)
        step = apply_one_mode_operator(apply_one_mode_operator(s, 0, u), 0, v)
        once = apply_one_mode_operator(s, 0, v @ u)
        assert np.abs(step.amplitudes - once.amplitudes).max() < 1e-12
        assert once.norm_squared == pytest.approx(s.norm_squared, rel=1e-10)
        w = random_unitary(rng, 16)
        assert apply_two_mode_operator(s, 1, 0, w).norm_squared == pytest.approx(s.norm_squared, rel=1e-10)


class TestAutoCutoff:
    def test_floor(self):
        assert auto_cutoff(0.0) == 12
        assert auto_cutoff(0.1) == 12

    def test_tail_bound(self):
        for decay, degree in [(0.5, 0), (0.5, 3), (0.9, 2)]:
            n = auto_cutoff(decay, degree=degree)
            x = decay**2
            assert x ** (n + 1) * (n + 1) ** degree < 1e-12
            assert n == 12 or x**n * n**degree >= 1e-12

    def test_grows_with_decay(self):
        assert auto_cutoff(0.3) <= auto_cutoff(0.6) <= auto_cutoff(0.9)

    def test_domain(self):
        with pytest.raises(DomainError):
            auto_cutoff(1.0)
