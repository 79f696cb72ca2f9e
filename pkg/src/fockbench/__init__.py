"""Entanglement concentration by photon subtraction on truncated Fock states."""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DegenerateStateError,
    DomainError,
    FockbenchError,
    TruncationError,
    TruncationWarning,
)
from .fock import DensityOperator, PureState, fidelity, inner_product, partial_trace, tensor_product
from .optics import (
    TILDE_ZERO,
    BeamSplitterSpec,
    GaussianProjector,
    LossSpec,
    apply_loss,
    beam_splitter_matrix,
    subtraction_operator,
)
from .states import JointStrategy, phi_closed_form, psi_joint_closed_form, psi_subtracted, tmsv
from .entanglement import Bipartition, negativity, negativity_pure, partial_transpose
from .protocol import (
    SimpleStrategy,
    SweepRecord,
    TradeoffCurve,
    brute_force_joint,
    find_optimal_gap_t,
    gaussian_measure,
    lossy_homodyne_state,
    optimal_envelope,
    strategy_point,
    tradeoff_curve,
)
from .identities import f_triple_sum, verify_delta, verify_factorization

__all__ = [
    "Bipartition",
    "BeamSplitterSpec",
    "ConfigurationError",
    "DegenerateStateError",
    "DensityOperator",
    "DomainError",
    "FockbenchError",
    "GaussianProjector",
    "JointStrategy",
    "LossSpec",
    "PureState",
    "SimpleStrategy",
    "SweepRecord",
    "TILDE_ZERO",
    "TradeoffCurve",
    "TruncationError",
    "TruncationWarning",
    "apply_loss",
    "beam_splitter_matrix",
    "brute_force_joint",
    "f_triple_sum",
    "fidelity",
    "find_optimal_gap_t",
    "gaussian_measure",
    "inner_product",
    "lossy_homodyne_state",
    "negativity",
    "negativity_pure",
    "optimal_envelope",
    "partial_trace",
    "partial_transpose",
    "phi_closed_form",
    "psi_joint_closed_form",
    "psi_subtracted",
    "strategy_point",
    "subtraction_operator",
    "tensor_product",
    "tmsv",
    "tradeoff_curve",
    "verify_delta",
    "verify_factorization",
]
