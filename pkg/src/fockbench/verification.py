"""Self-checks comparing closed forms against independent constructions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .identities import verify_delta, verify_factorization
from .entanglement import eigenvalues_hermitian, negativity, negativity_pure
from .fock import PureState, fidelity, tensor_product
from .optics import BeamSplitterSpec, ancilla_detection_operator, beam_splitter_matrix, subtraction_operator
from .protocol import COMBINER, brute_force_joint, gaussian_measure, joint_cutoff
from .states import JointStrategy, phi_closed_form, psi_joint_closed_form, tmsv

OVERLAP_TOL = 1e-8
OPERATOR_TOL = 1e-10
CHECK_LAMBDA = 0.5
CHECK_T2 = (0.8, 0.9, 0.99)


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def _at_least(check_id: str, value: float, threshold: float, detail: str = "") -> CheckResult:
    return CheckResult(check_id, bool(value >= threshold), float(value), threshold, detail)


def _at_most(check_id: str, value: float, threshold: float, detail: str = "") -> CheckResult:
    return CheckResult(check_id, bool(value <= threshold), float(value), threshold, detail)


def check_delta_identity(n_max: int = 12) -> CheckResult:
    violations = verify_delta(n_max)
    detail = "; ".join(f"({v.N},{v.K},{v.P})={v.value:.3g}" for v in violations[:10])
    return _at_most("binomial-delta", len(violations), 0, detail)


def check_factorization() -> CheckResult:
    worst = min(verify_factorization(lam) for lam in (0.3, 0.5, 0.7))
    return _at_least("factorization", worst, 1.0 - OVERLAP_TOL)


def check_ancilla() -> CheckResult:
    worst = 0.0
    for t2 in CHECK_T2:
        spec = BeamSplitterSpec.from_t2(t2)
        for k in range(3):
            diff = ancilla_detection_operator(k, spec, 8) - subtraction_operator(k, spec, 8)
            worst = max(worst, float(np.abs(diff).max()))
    return _at_most("ancilla-subtraction", worst, OPERATOR_TOL)


def _brute(strategy: JointStrategy, spec: BeamSplitterSpec, combiner: np.ndarray | None, cutoff: int) -> PureState:
    return brute_force_joint(strategy, CHECK_LAMBDA, spec, cutoff, combiner=combiner)


def check_joint_forms(combiner_hook: Callable[[int], np.ndarray] | None = None) -> list[CheckResult]:
    """Closed-form joint states and measured states against the operator-by-operator pipeline.

    ``combiner_hook(cutoff)`` replaces the 50:50 combiner matrix, which lets a
    deliberately wrong beam splitter be injected.
    """
    results = []
    for strategy in JointStrategy:
        psi_worst, phi_worst = 1.0, 1.0
        for t2 in CHECK_T2:
            spec = BeamSplitterSpec.from_t2(t2)
            cutoff = joint_cutoff(CHECK_LAMBDA, spec.t, strategy.total_subtracted)
            combiner = None if combiner_hook is None else combiner_hook(cutoff)
            brute = _brute(strategy, spec, combiner, cutoff)
            closed = psi_joint_closed_form(strategy, CHECK_LAMBDA, spec, cutoff)
            psi_worst = min(psi_worst, fidelity(brute, closed))
            measured = gaussian_measure(brute, *strategy.projectors)
            phi_worst = min(phi_worst, fidelity(measured, phi_closed_form(strategy, CHECK_LAMBDA, spec, cutoff)))
        results.append(_at_least(f"joint-closed-form:{strategy.label}", psi_worst, 1.0 - OVERLAP_TOL))
        results.append(_at_least(f"measured-closed-form:{strategy.label}", phi_worst, 1.0 - OVERLAP_TOL))
    return results


def check_negativities() -> list[CheckResult]:
    bell = np.zeros((3, 3))
    bell[0, 0] = bell[1, 1] = math.sqrt(0.5)
    bell_err = abs(negativity(PureState(bell).to_density()) - 0.5)

    tmsv_err = 0.0
    for lam in (0.3, 0.5):
        tmsv_err = max(tmsv_err, abs(negativity(tmsv(lam, 30).to_density()) - lam / (1 - lam)))

    product = tensor_product(PureState(np.array([0.6, 0.8, 0.0, 0.0])), PureState(np.array([0.0, 0.6, 0.8, 0.0])))
    product_err = abs(negativity(product.to_density()))

    route_err = 0.0
    for strategy in JointStrategy:
        phi = phi_closed_form(strategy, CHECK_LAMBDA, BeamSplitterSpec.from_t2(0.9), 24).normalized()
        route_err = max(route_err, abs(negativity_pure(phi) - negativity(phi.to_density())))

    rng = np.random.default_rng(7)
    a = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    herm = a + a.conj().T
    eig_err = float(np.abs(eigenvalues_hermitian(herm, "jacobi") - eigenvalues_hermitian(herm)).max())

    return [
        _at_most("negativity-bell", bell_err, 1e-10),
        _at_most("negativity-tmsv", tmsv_err, 1e-6),
        _at_most("negativity-product", product_err, 1e-9),
        _at_most("negativity-routes", route_err, 1e-8),
        _at_most("eigensolver-jacobi", eig_err, 1e-10),
    ]


def mirrored_combiner(cutoff: int) -> np.ndarray:
    """Transposed 50:50 combiner: the beam splitter with its exchange sign flipped."""
    return np.ascontiguousarray(beam_splitter_matrix(COMBINER, cutoff).T)


def run_checks(*, n_max: int = 12, perturb_beam_splitter: bool = False) -> list[CheckResult]:
    hook = mirrored_combiner if perturb_beam_splitter else None
    return [
        check_delta_identity(n_max),
        check_factorization(),
        check_ancilla(),
        *check_joint_forms(hook),
        *check_negativities(),
    ]

