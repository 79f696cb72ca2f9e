"""
Dense states and operators on a truncated multimode Fock space.

Amplitudes are stored as a tensor with one axis per mode, each axis running
over occupations ``0..cutoff``. A density operator on ``k`` modes is stored as
a square matrix of side ``(cutoff + 1) ** k`` whose row/column index is the
row-major flattening of the mode occupations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DegenerateStateError, DomainError

NORMALIZATION_TOL = 1e-10
BOUNDARY_MASS_TOL = 1e-8
DEFAULT_CUTOFF_FLOOR = 12


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def auto_cutoff(decay: float, *, degree: int = 0, tol: float = 1e-12, floor: int = DEFAULT_CUTOFF_FLOOR) -> int:
    r"""Smallest cutoff ``N >= floor`` whose neglected tail is below ``tol``.

    The tail of a distribution with probabilities :math:`\propto x^n n^d`,
    ``x = decay**2``, is bounded by :math:`x^{N+1} (N+1)^d`. ``degree`` is the
    polynomial degree ``d`` of the squared amplitudes (one per subtracted photon).
    """
    if not 0 <= decay < 1:
        raise DomainError(f"decay rate must lie in [0, 1), got {decay}")
    if decay == 0:
        return floor
    x = decay * decay
    n = max(floor, math.ceil(math.log(tol) / math.log(x)) - 1)
    while x ** (n + 1) * (n + 1) ** degree >= tol:
        n += 1
    return n


@dataclass(frozen=True, eq=False)
class PureState:
    """Unnormalized pure state; ``amplitudes[n_0, ..., n_{k-1}]`` is ``<n_0...n_{k-1}|psi>``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim < 1:
            raise ConfigurationError("a state needs at least one mode")
        if len(set(amps.shape)) != 1:
            raise ConfigurationError(f"all modes must share one cutoff, got shape {amps.shape}")
        if amps.shape[0] < 2:
            raise ConfigurationError("cutoff must be at least 1")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def fock(cls, occupations: Sequence[int], cutoff: int) -> PureState:
        """The number state ``|n_0, n_1, ...>``."""
        if any(n < 0 or n > cutoff for n in occupations):
            raise DomainError(f"occupations {tuple(occupations)} exceed cutoff {cutoff}")
        amps = np.zeros((cutoff + 1,) * len(occupations), dtype=np.complex128)
        amps[tuple(occupations)] = 1.0
        return cls(amps)

    @classmethod
    def vacuum(cls, num_modes: int, cutoff: int) -> PureState:
        return cls.fock((0,) * num_modes, cutoff)

    @property
    def num_modes(self) -> int:
        return self.amplitudes.ndim

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, tol: float = NORMALIZATION_TOL) -> bool:
        return abs(self.norm_squared - 1.0) < tol

    def normalized(self) -> PureState:
        norm2 = self.norm_squared
        if norm2 == 0.0:
            raise DegenerateStateError("cannot normalize the zero vector")
        return PureState(self.amplitudes / math.sqrt(norm2))

    def boundary_mass(self) -> float:
        """Fraction of the squared norm carried by amplitudes with any occupation at the cutoff."""
        probs = np.abs(self.amplitudes) ** 2
        total = probs.sum()
        if total == 0:
            return 0.0
        inner = probs[(slice(0, -1),) * self.num_modes].sum()
        return float((total - inner) / total)

    def to_density(self) -> DensityOperator:
        vec = self.amplitudes.reshape(-1)
        return DensityOperator(np.outer(vec, vec.conj()), self.num_modes)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Dense operator on ``num_modes`` modes, stored as a ``(D, D)`` matrix."""

    matrix: np.ndarray
    num_modes: int

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.complex128)
        if self.num_modes < 1:
            raise ConfigurationError("num_modes must be positive")
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ConfigurationError(f"density matrix must be square, got {mat.shape}")
        d = round(mat.shape[0] ** (1.0 / self.num_modes))
        if d < 2 or d**self.num_modes != mat.shape[0]:
            raise ConfigurationError(f"side {mat.shape[0]} is not (cutoff+1)**{self.num_modes}")
        if not np.allclose(mat, mat.conj().T, rtol=0.0, atol=1e-10):
            raise DomainError("density operator is not Hermitian")
        object.__setattr__(self, "matrix", _frozen(mat))

    @property
    def cutoff(self) -> int:
        return round(self.matrix.shape[0] ** (1.0 / self.num_modes)) - 1

    @property
    def tensor(self) -> np.ndarray:
        """View with axes ``(row_0, ..., row_{k-1}, col_0, ..., col_{k-1})``."""
        return self.matrix.reshape((self.cutoff + 1,) * (2 * self.num_modes))

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> DensityOperator:
        tr = self.trace
        if tr <= 0.0:
            raise DegenerateStateError("density operator has non-positive trace")
        return DensityOperator(self.matrix / tr, self.num_modes)

    def boundary_mass(self) -> float:
        diag = np.diag(self.matrix).real.reshape((self.cutoff + 1,) * self.num_modes)
        total = diag.sum()
        if total == 0:
            return 0.0
        return float((total - diag[(slice(0, -1),) * self.num_modes].sum()) / total)


def _check_mode(state_modes: int, mode: int) -> None:
    if not 0 <= mode < state_modes:
        raise ConfigurationError(f"mode {mode} out of range for a {state_modes}-mode state")


def tensor_product(left: PureState, right: PureState) -> PureState:
    """Joint state with ``left``'s modes first."""
    if left.cutoff != right.cutoff:
        raise ConfigurationError(f"cutoff mismatch: {left.cutoff} vs {right.cutoff}")
    return PureState(np.multiply.outer(left.amplitudes, right.amplitudes))


def inner_product(a: PureState, b: PureState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.amplitudes.shape != b.amplitudes.shape:
        raise ConfigurationError(f"shape mismatch: {a.amplitudes.shape} vs {b.amplitudes.shape}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: PureState, b: PureState) -> float:
    """Phase- and normalization-insensitive overlap ``|<a|b>|^2 / (<a|a><b|b>)``."""
    num = abs(inner_product(a, b)) ** 2
    den = a.norm_squared * b.norm_squared
    if den == 0.0:
        return 0.0
    return num / den


def partial_trace(rho: DensityOperator, keep: Sequence[int]) -> DensityOperator:
    """Trace out every mode not listed in ``keep``."""
    keep = list(keep)
    k = rho.num_modes
    if not keep:
        raise ConfigurationError("keep list must be nonempty")
    if any(b <= a for a, b in zip(keep, keep[1:])):
        raise ConfigurationError(f"keep list must be strictly increasing, got {keep}")
    if keep[0] < 0 or keep[-1] >= k:
        raise ConfigurationError(f"keep list {keep} out of range for {k} modes")
    rows = list(range(k))
    cols = [k + i for i in range(k)]
    for i in range(k):
        if i not in keep:
            cols[i] = rows[i]
    out = [rows[i] for i in keep] + [cols[i] for i in keep]
    reduced = np.einsum(rho.tensor, rows + cols, out)
    side = (rho.cutoff + 1) ** len(keep)
    return DensityOperator(reduced.reshape(side, side), len(keep))


def project_fock(state: PureState, mode: int, k: int) -> PureState:
    """Unnormalized conditional state after detecting ``k`` photons in ``mode``.

    Its squared norm is the probability of the outcome.
    """
    _check_mode(state.num_modes, mode)
    if not 0 <= k <= state.cutoff:
        raise DomainError(f"photon count {k} outside [0, {state.cutoff}]")
    if state.num_modes == 1:
        raise ConfigurationError("projecting the only mode leaves no state")
    return PureState(np.take(state.amplitudes, k, axis=mode))


def apply_one_mode_operator(state: PureState, mode: int, op_matrix: np.ndarray) -> PureState:
    _check_mode(state.num_modes, mode)
    d = state.cutoff + 1
    op = np.asarray(op_matrix)
    if op.shape != (d, d):
        raise ConfigurationError(f"operator shape {op.shape} does not match ({d}, {d})")
    out = np.tensordot(op, state.amplitudes, axes=([1], [mode]))
    return PureState(np.moveaxis(out, 0, mode))


def apply_two_mode_operator(state: PureState, mode_a: int, mode_b: int, op_matrix: np.ndarray) -> PureState:
    """Contract a ``(d^2, d^2)`` operator into modes ``(mode_a, mode_b)``.

    The operator's row/column index is ``n_a * d + n_b``.
    """
    _check_mode(state.num_modes, mode_a)
    _check_mode(state.num_modes, mode_b)
    if mode_a == mode_b:
        raise ConfigurationError("a two-mode operator needs two distinct modes")
    d = state.cutoff + 1
    op = np.asarray(op_matrix)
    if op.shape != (d * d, d * d):
        raise ConfigurationError(f"operator shape {op.shape} does not match ({d * d}, {d * d})")
    out = np.tensordot(op.reshape(d, d, d, d), state.amplitudes, axes=([2, 3], [mode_a, mode_b]))
    return PureState(np.moveaxis(out, [0, 1], [mode_a, mode_b]))
