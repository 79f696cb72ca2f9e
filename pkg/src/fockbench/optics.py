"""
Fock-basis matrices for beam splitters, photon subtraction, Gaussian
projections and photon loss.

Beam-splitter convention: for the ordered mode pair ``(a, b)``

    B = exp(-tan(theta/2) a b^dag) exp(-ln(cos(theta/2)) (b^dag b - a^dag a)) exp(tan(theta/2) a^dag b)

with ``t = cos(theta/2)`` and ``r = sin(theta/2)``, so that ``B|1,0> = t|1,0> - r|0,1>``.
Equivalently ``B = exp(theta/2 (a^dag b - a b^dag))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import ConfigurationError, DomainError
from .fock import PureState, apply_one_mode_operator

TILDE_ZERO = "~0"


@dataclass(frozen=True)
class BeamSplitterSpec:
    """Amplitude transmittivity ``t`` and reflectivity ``r`` with ``t**2 + r**2 == 1``."""

    t: float
    r: float

    def __post_init__(self):
        if not (0.0 <= self.t <= 1.0 and 0.0 <= self.r <= 1.0):
            raise DomainError(f"t and r must lie in [0, 1], got t={self.t}, r={self.r}")
        if abs(self.t**2 + self.r**2 - 1.0) > 1e-12:
            raise DomainError(f"t^2 + r^2 = {self.t**2 + self.r**2} != 1")

    @classmethod
    def from_t2(cls, t2: float) -> BeamSplitterSpec:
        """From the intensity transmittivity ``t**2``."""
        if not 0.0 <= t2 <= 1.0:
            raise DomainError(f"t^2 must lie in [0, 1], got {t2}")
        return cls(math.sqrt(t2), math.sqrt(1.0 - t2))

    @classmethod
    def from_angle(cls, theta: float) -> BeamSplitterSpec:
        if not 0.0 <= theta <= math.pi:
            raise DomainError(f"mixing angle must lie in [0, pi], got {theta}")
        return cls(math.cos(theta / 2), math.sin(theta / 2))

    @classmethod
    def balanced(cls) -> BeamSplitterSpec:
        h = math.sqrt(0.5)
        return cls(h, h)

    @property
    def theta(self) -> float:
        return 2.0 * math.atan2(self.r, self.t)


class GaussianProjector(enum.Enum):
    """Recentered (zero-displacement) Gaussian measurement outcomes."""

    COHERENT_VACUUM = "vacuum"
    QUADRATURE_X0 = "x0"
    QUADRATURE_P0 = "p0"


@dataclass(frozen=True)
class LossSpec:
    """Intensity transmission ``efficiency`` of a fictitious loss beam splitter."""

    efficiency: float

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise DomainError(f"efficiency must lie in [0, 1], got {self.efficiency}")


def _hopping_block(total: int) -> np.ndarray:
    """``a^dag b`` on the block ``{|n, total-n>}``, indexed by ``n``."""
    d = total + 1
    block = np.zeros((d, d))
    n = np.arange(total)
    block[n + 1, n] = np.sqrt((n + 1.0) * (total - n))
    return block


def factored_block(spec: BeamSplitterSpec, total: int) -> np.ndarray:
    """Fixed-photon-number block evaluated literally as the three-factor product.

    Each factor is a terminating power series. The middle factor scales like
    ``t**-total`` so the product cancels catastrophically for large blocks; use
    it only as a reference for small ``total``.
    """
    if spec.t == 0.0:
        raise DomainError("the factored form is singular at t = 0")
    tau = spec.r / spec.t
    hop = _hopping_block(total)
    d = total + 1

    def nilpotent_exp(x):
        out = np.eye(d)
        term = np.eye(d)
        for j in range(1, d):
            term = term @ x / j
            out = out + term
        return out

    n = np.arange(d)
    middle = np.diag(spec.t ** (2.0 * n - total))
    return nilpotent_exp(-tau * hop.T) @ middle @ nilpotent_exp(tau * hop)


def _rotation_block(spec: BeamSplitterSpec, total: int) -> np.ndarray:
    hop = _hopping_block(total)
    return expm((spec.theta / 2.0) * (hop - hop.T))


@lru_cache(maxsize=64)
def _beam_splitter_cached(t: float, r: float, cutoff: int) -> np.ndarray:
    spec = BeamSplitterSpec(t, r)
    d = cutoff + 1
    out = np.zeros((d, d, d, d))
    for total in range(2 * cutoff + 1):
        block = _rotation_block(spec, total)
        # occupations of the first mode that keep both modes within the cutoff
        n = np.arange(max(0, total - cutoff), min(total, cutoff) + 1)
        rows, cols = np.meshgrid(n, n, indexing="ij")
        out[rows, total - rows, cols, total - cols] = block[rows, cols]
    matrix = out.reshape(d * d, d * d)
    matrix.setflags(write=False)
    return matrix


def beam_splitter_matrix(spec: BeamSplitterSpec, cutoff: int) -> np.ndarray:
    """Two-mode beam-splitter matrix with row/column index ``n_a * (cutoff+1) + n_b``.

    Entries are the exact matrix elements of the untruncated unitary between
    truncated basis states, so each block of total photon number ``<= cutoff``
    is exactly unitary. The returned array is read-only and shared.
    """
    if cutoff < 1:
        raise ConfigurationError("cutoff must be at least 1")
    return _beam_splitter_cached(spec.t, spec.r, cutoff)


@lru_cache(maxsize=256)
def _subtraction_cached(k: int, t: float, r: float, cutoff: int) -> np.ndarray:
    d = cutoff + 1
    op = np.zeros((d, d))
    for n in range(k, d):
        # (1/sqrt(k!)) (-r/t)^k t^n sqrt(n!/(n-k)!) = (-r)^k t^(n-k) sqrt(C(n, k))
        op[n - k, n] = (-r) ** k * t ** (n - k) * math.sqrt(math.comb(n, k))
    op.setflags(write=False)
    return op


def subtraction_operator(k: int, spec: BeamSplitterSpec, cutoff: int) -> np.ndarray:
    """Measurement operator for detecting ``k`` photons in the reflected port.

    ``k = 0`` gives ``diag(t**n)``: beam splitter present, nothing detected.
    """
    if k < 0:
        raise DomainError(f"photon count must be non-negative, got {k}")
    if spec.t == 0.0:
        raise DomainError("subtraction operator is undefined at t = 0")
    return _subtraction_cached(k, spec.t, spec.r, cutoff)


def detection_operator(count: int | str, spec: BeamSplitterSpec | None, cutoff: int) -> np.ndarray:
    """Operator for a per-mode subtraction plan entry.

    ``0`` means no beam splitter (identity), ``"~0"`` a beam splitter with no
    detection, and ``k >= 1`` a beam splitter with ``k`` photons detected.
    """
    if count == 0:
        return np.eye(cutoff + 1)
    if spec is None:
        raise ConfigurationError(f"plan entry {count!r} needs a beam splitter")
    if count == TILDE_ZERO:
        return subtraction_operator(0, spec, cutoff)
    if isinstance(count, (int, np.integer)) and count > 0:
        return subtraction_operator(int(count), spec, cutoff)
    raise ConfigurationError(f"unrecognized plan entry {count!r}")


def ancilla_detection_operator(k: int, spec: BeamSplitterSpec, cutoff: int) -> np.ndarray:
    """``<k|_anc B |0>_anc`` as a one-mode operator, read off the beam-splitter matrix.

    Independent of :func:`subtraction_operator`: the system mode is mixed with
    a vacuum ancilla and the ancilla is projected onto ``|k>``.
    """
    if not 0 <= k <= cutoff:
        raise DomainError(f"photon count must lie in [0, {cutoff}], got {k}")
    d = cutoff + 1
    b = beam_splitter_matrix(spec, cutoff).reshape(d, d, d, d)
    return np.array(b[:, k, :, 0])


def _hermite_at_zero(cutoff: int) -> np.ndarray:
    # psi_n(0) = pi^(-1/4) H_n(0) / sqrt(2^n n!), via psi_n(0) = -sqrt((n-1)/n) psi_{n-2}(0)
    vals = np.zeros(cutoff + 1)
    vals[0] = math.pi**-0.25
    for n in range(2, cutoff + 1, 2):
        vals[n] = -math.sqrt((n - 1) / n) * vals[n - 2]
    return vals


def gaussian_bra_coefficients(projector: GaussianProjector, cutoff: int) -> np.ndarray:
    """Coefficients ``<g|n>`` of the projector's bra in the Fock basis.

    Quadratures follow ``X = (a + a^dag)/sqrt(2)``; the improper normalization
    of quadrature eigenstates is dropped.
    """
    n = np.arange(cutoff + 1)
    if projector is GaussianProjector.COHERENT_VACUUM:
        return (n == 0).astype(np.complex128)
    psi0 = _hermite_at_zero(cutoff).astype(np.complex128)
    if projector is GaussianProjector.QUADRATURE_X0:
        return psi0
    if projector is GaussianProjector.QUADRATURE_P0:
        return psi0 * (-1j) ** n
    raise ConfigurationError(f"unknown projector {projector!r}")


@lru_cache(maxsize=64)
def _loss_kraus_cached(eta: float, cutoff: int) -> tuple[np.ndarray, ...]:
    d = cutoff + 1
    ops = []
    for m in range(d):
        k = np.zeros((d, d))
        for n in range(m, d):
            k[n - m, n] = math.sqrt(math.comb(n, m)) * eta ** ((n - m) / 2) * (1 - eta) ** (m / 2)
        k.setflags(write=False)
        ops.append(k)
    return tuple(ops)


def loss_kraus_operators(loss: LossSpec, cutoff: int) -> tuple[np.ndarray, ...]:
    """Kraus operators ``K_m`` indexed by the number ``m`` of photons lost."""
    return _loss_kraus_cached(loss.efficiency, cutoff)


def apply_loss(state: PureState, mode: int, loss: LossSpec) -> list[tuple[int, PureState]]:
    """Kraus-branch decomposition ``[(m, K_m|psi>)]`` of a loss channel on ``mode``.

    Branches that vanish identically are dropped.
    """
    branches = []
    for m, kraus in enumerate(loss_kraus_operators(loss, state.cutoff)):
        out = apply_one_mode_operator(state, mode, kraus)
        if out.norm_squared > 0.0:
            branches.append((m, out))
    return branches
