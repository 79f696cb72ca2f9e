import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockbench.entanglement import (
    Bipartition,
    eigenvalues_hermitian,
    eigh_hermitian,
    jacobi_eigh,
    negativity,
    negativity_pure,
    partial_transpose,
    schmidt_coefficients,
)
from fockbench.errors import ConfigurationError, DomainError, TruncationWarning
from fockbench.fock import DensityOperator, PureState, apply_one_mode_operator, tensor_product
from fockbench.optics import BeamSplitterSpec, LossSpec, apply_loss
from fockbench.states import JointStrategy, phi_closed_form, psi_subtracted, tmsv


def bell(cutoff: int = 2) -> PureState:
    amps = np.zeros((cutoff + 1, cutoff + 1))
    amps[0, 0] = amps[1, 1] = math.sqrt(0.5)
    return PureState(amps)


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


def random_pure(rng, cutoff, occupied):
    amps = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    amps[:occupied, :occupied] = rng.normal(size=(occupied, occupied)) + 1j * rng.normal(size=(occupied, occupied))
    return PureState(amps).normalized()


class TestBipartition:
    def test_validation(self):
        Bipartition((0, 2), (1, 3)).validate(4)
        with pytest.raises(ConfigurationError):
            Bipartition((0,), (0, 1)).validate(2)
        with pytest.raises(ConfigurationError):
            Bipartition((0,), ()).validate(1)
        with pytest.raises(ConfigurationError):
            Bipartition((0,), (1,)).validate(3)

    def test_cut_required_beyond_two_modes(self):
        with pytest.raises(ConfigurationError):
            partial_transpose(PureState.vacuum(3, 1).to_density())


class TestPartialTranspose:
    def test_product_unchanged(self):
        rho = PureState.fock([0, 1], 2).to_density()
        assert np.array_equal(partial_transpose(rho), rho.matrix)

    def test_bell_spectrum(self):
        mu = eigenvalues_hermitian(partial_transpose(bell().to_density()))
        nonzero = np.sort(mu[np.abs(mu) > 1e-12])
        assert np.allclose(nonzero, [-0.5, 0.5, 0.5, 0.5])

    def test_involution_and_trace(self):
        rng = np.random.default_rng(0)
        rho = random_pure(rng, 3, 3).to_density()
        once = partial_transpose(rho)
        twice = partial_transpose(DensityOperator(once, 2))
        assert np.allclose(twice, rho.matrix)
        assert np.trace(once).real == pytest.approx(1.0)
        assert np.allclose(once, once.conj().T)

    def test_four_mode_cut_matches_pair_grouping(self):
        # 1 + 2N is multiplicative over independent pairs across the (a1 a2 | b1 b2) cut
        psi = tmsv(0.2, 6).normalized()
        joint = tensor_product(psi, psi).to_density()
        n4 = negativity(joint, Bipartition((0, 2), (1, 3)))
        n2 = negativity_pure(psi)
        assert (1 + 2 * n4) == pytest.approx((1 + 2 * n2) ** 2, rel=1e-8)


class TestEigensolver:
    def test_diagonal(self):
        assert np.allclose(eigenvalues_hermitian(np.diag([3.0, 1.0, 2.0]), "jacobi"), [1, 2, 3])

    def test_pauli_x(self):
        assert np.allclose(eigenvalues_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]]), "jacobi"), [-1, 1])

    def test_non_hermitian_rejected(self):
        with pytest.raises(DomainError):
            eigenvalues_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(ConfigurationError):
            eigh_hermitian(np.eye(2), "qr")

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 10))
    def test_jacobi_reconstruction(self, seed, n):
        m = random_hermitian(np.random.default_rng(seed), n)
        w, v = jacobi_eigh(m)
        scale = np.abs(m).max()
        assert np.all(np.diff(w) >= 0)
        assert np.abs(v @ np.diag(w) @ v.conj().T - m).max() < 1e-8 * scale
        assert np.abs(v.conj().T @ v - np.eye(n)).max() < 1e-10
        assert abs(w.sum() - np.trace(m).real) < 1e-8 * scale
        residual = np.abs(m @ v - v * w).max()
        assert residual < 1e-8 * scale

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_jacobi_agrees_with_lapack(self, seed):
        m = random_hermitian(np.random.default_rng(seed), 6)
        assert np.abs(eigenvalues_hermitian(m, "jacobi") - eigenvalues_hermitian(m)).max() < 1e-10

    def test_input_untouched(self):
        m = random_hermitian(np.random.default_rng(3), 5)
        before = m.copy()
        jacobi_eigh(m)
        assert np.array_equal(m, before)


class TestNegativity:
    def test_product_states(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            a = PureState(np.r_[rng.normal(size=3), 0.0]).normalized()
            b = PureState(np.r_[rng.normal(size=3), 0.0]).normalized()
            prod = tensor_product(a, b)
            assert abs(negativity(prod.to_density())) < 1e-9
            assert abs(negativity_pure(prod)) < 1e-9

    def test_bell(self):
        assert abs(negativity(bell().to_density()) - 0.5) < 1e-10
        assert abs(negativity(bell().to_density(), method="jacobi") - 0.5) < 1e-10
        assert abs(negativity_pure(bell()) - 0.5) < 1e-10

    @pytest.mark.parametrize("lam", [0.3, 0.5])
    def test_tmsv(self, lam):
        rho = tmsv(lam, 30).to_density()
        assert abs(negativity(rho) - lam / (1 - lam)) < 1e-6
        assert abs(negativity_pure(tmsv(lam, 30)) - lam / (1 - lam)) < 1e-6

    def test_unnormalized_rejected(self):
        with pytest.raises(DomainError):
            negativity(DensityOperator(2 * np.eye(4) / 4, 2))
        with pytest.raises(DomainError):
            negativity_pure(PureState(2 * bell().amplitudes))

    def test_truncation_warning(self):
        with pytest.warns(TruncationWarning):
            negativity(bell(1).to_density())
        with warnings.catch_warnings():
            warnings.simplefilter("error", TruncationWarning)
            negativity(bell(2).to_density())

    def test_schmidt_fast_path_matches_svd(self):
        psi = psi_subtracted(0.5, BeamSplitterSpec.from_t2(0.9), 1, 0, 30).normalized()
        c = schmidt_coefficients(psi)
        svd = np.linalg.svd(psi.amplitudes, compute_uv=False)
        assert np.allclose(np.sort(c), np.sort(svd), atol=1e-15)

    def test_subtracted_route_equivalence(self):
        psi = psi_subtracted(0.5, BeamSplitterSpec.from_t2(0.9), 1, 0, 30).normalized()
        assert abs(negativity_pure(psi) - negativity(psi.to_density())) < 1e-8

    @pytest.mark.parametrize("strategy", list(JointStrategy), ids=lambda s: s.label)
    def test_route_equivalence_on_measured_states(self, strategy):
        phi = phi_closed_form(strategy, 0.5, BeamSplitterSpec.from_t2(0.9), 24).normalized()
        assert abs(negativity_pure(phi) - negativity(phi.to_density())) < 1e-8

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_route_equivalence_random(self, seed):
        psi = random_pure(np.random.default_rng(seed), 4, 4)
        assert abs(negativity_pure(psi) - negativity(psi.to_density())) < 1e-8

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), side=st.integers(0, 1))
    def test_local_phase_invariance(self, seed, side):
        rng = np.random.default_rng(seed)
        psi = random_pure(rng, 4, 4)
        phases = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi) * np.arange(5)))
        rotated = apply_one_mode_operator(psi, side, phases)
        assert negativity(rotated.to_density()) == pytest.approx(negativity(psi.to_density()), abs=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), p=st.floats(0.0, 1.0))
    def test_convexity(self, seed, p):
        rng = np.random.default_rng(seed)
        a, b = random_pure(rng, 3, 3), random_pure(rng, 3, 3)
        mix = DensityOperator(p * a.to_density().matrix + (1 - p) * b.to_density().matrix, 2)
        bound = p * negativity(a.to_density()) + (1 - p) * negativity(b.to_density())
        assert negativity(mix) <= bound + 1e-10

    @pytest.mark.parametrize("eta", [0.95, 0.8, 0.5])
    def test_loss_never_increases(self, eta):
        psi = phi_closed_form(JointStrategy.J1001, 0.5, BeamSplitterSpec.from_t2(0.9), 24).normalized()
        d = 25 * 25
        rho = np.zeros((d, d), dtype=complex)
        for _, branch in apply_loss(psi, 1, LossSpec(eta)):
            v = branch.amplitudes.reshape(-1)
            rho += np.outer(v, v.conj())
        assert negativity(DensityOperator(rho, 2)) <= negativity_pure(psi) + 1e-10
