"""
Closed-form amplitudes for squeezed, photon-subtracted and jointly measured
two-source states.

Four-mode states are ordered ``(a1, b1, a2, b2)``: source 1 occupies modes
``a1, b1`` and source 2 occupies ``a2, b2``. Alice holds the ``a`` modes and
Bob the ``b`` modes.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .errors import ConfigurationError, DomainError
from .fock import PureState
from .optics import TILDE_ZERO, BeamSplitterSpec, GaussianProjector, detection_operator


def check_squeezing(lam: float) -> float:
    """Validate the squeezing parameter ``lam = tanh(r)``."""
    if not 0.0 <= lam < 1.0:
        raise DomainError(f"squeezing parameter must lie in [0, 1), got {lam}")
    return float(lam)


class JointStrategy(enum.Enum):
    """Two-source subtraction plans; entries are counts on ``(a1, b1, a2, b2)``.

    ``0`` is no beam splitter and ``~0`` a beam splitter with no detection.
    """

    J10T0 = "1,0,~0,0"
    J11TT = "1,1,~0,~0"
    J1001 = "1,0,0,1"
    J1010 = "1,0,1,0"
    J1111 = "1,1,1,1"

    @property
    def label(self) -> str:
        return self.value

    @property
    def plan(self) -> tuple[int | str, ...]:
        return tuple(TILDE_ZERO if e == TILDE_ZERO else int(e) for e in self.value.split(","))

    @property
    def total_subtracted(self) -> int:
        return sum(e for e in self.plan if e != TILDE_ZERO)

    @property
    def projectors(self) -> tuple[GaussianProjector, GaussianProjector]:
        """Best Gaussian measurement on ``(a2, b2)`` for this plan."""
        if self in (JointStrategy.J10T0, JointStrategy.J1010):
            return GaussianProjector.COHERENT_VACUUM, GaussianProjector.COHERENT_VACUUM
        return GaussianProjector.QUADRATURE_X0, GaussianProjector.QUADRATURE_P0

    @classmethod
    def parse(cls, label: str) -> JointStrategy:
        norm = label.replace(" ", "").replace("0\u0303", "~0")
        for member in cls:
            if member.value == norm:
                return member
        raise ConfigurationError(f"unknown joint strategy label {label!r}")


def tmsv(lam: float, cutoff: int) -> PureState:
    """Two-mode squeezed vacuum ``sqrt(1 - lam^2) sum_n lam^n |n, n>``."""
    lam = check_squeezing(lam)
    n = np.arange(cutoff + 1)
    return PureState(np.diag(math.sqrt(1.0 - lam * lam) * lam**n))


def psi_subtracted(lam: float, spec: BeamSplitterSpec | None, i: int | str, j: int | str, cutoff: int) -> PureState:
    """``M_i (x) M_j |TMSV>``; squared norm is the heralding probability.

    ``i`` and ``j`` follow :func:`fockbench.optics.detection_operator`.
    """
    amps = tmsv(lam, cutoff).amplitudes
    left = detection_operator(i, spec, cutoff)
    right = detection_operator(j, spec, cutoff)
    return PureState(left @ amps @ right.T)


def subtraction_probability_10(lam: float, spec: BeamSplitterSpec) -> float:
    """Geometric-series value of ``||psi_{1,0}||^2``."""
    lam = check_squeezing(lam)
    return (1 - lam**2) * spec.r**2 * lam**2 / (1 - lam**2 * spec.t**2) ** 2


def _outer(left: PureState, right: PureState) -> np.ndarray:
    return np.multiply.outer(left.amplitudes, right.amplitudes)


def _pair_diagonal(values: np.ndarray) -> np.ndarray:
    """4-mode tensor with ``values[n, m]`` on ``|n, n, m, m>``."""
    d = values.shape[0]
    out = np.zeros((d,) * 4, dtype=np.complex128)
    n = np.arange(d)[:, None]
    m = np.arange(d)[None, :]
    out[n, n, m, m] = values
    return out


def psi_joint_closed_form(
    strategy: JointStrategy, lam: float, spec: BeamSplitterSpec, cutoff: int, *, as_printed: bool = False
) -> PureState:
    """Four-mode state after subtraction and the two 50:50 combiners.

    The relative sign of the exchanged terms is fixed by the beam-splitter
    convention in :mod:`fockbench.optics`. ``as_printed=True`` reproduces the
    published signs instead, which disagree with any single real convention.
    """
    lam = check_squeezing(lam)
    t, r = spec.t, spec.r
    n = np.arange(cutoff + 1)[:, None]
    m = np.arange(cutoff + 1)[None, :]
    swap = 1.0 if as_printed else -1.0

    def psi(i, j):
        return psi_subtracted(lam, spec, i, j, cutoff)

    T = TILDE_ZERO
    if strategy is JointStrategy.J10T0:
        amps = (_outer(psi(1, 0), psi(T, 0)) + swap * _outer(psi(T, 0), psi(1, 0))) / math.sqrt(2)
    elif strategy is JointStrategy.J11TT:
        x = lam * t * t
        diag = (1 - lam**2) * r**2 * lam * x ** (n + m) * (n + m + 2)
        cross = _outer(psi(1, T), psi(T, 1)) + _outer(psi(T, 1), psi(1, T))
        amps = 0.5 * (_pair_diagonal(diag) + swap * cross)
    elif strategy is JointStrategy.J1001:
        y = lam * t
        diag = (1 - lam**2) * r**2 * lam / t * y ** (n + m) * (n - m)
        cross = _outer(psi(1, 0), psi(0, 1)) - _outer(psi(0, 1), psi(1, 0))
        amps = 0.5 * (_pair_diagonal(diag) + cross)
    elif strategy is JointStrategy.J1010:
        amps = (_outer(psi(2, 0), psi(T, 0)) + swap * _outer(psi(T, 0), psi(2, 0))) / math.sqrt(2)
    elif strategy is JointStrategy.J1111:
        x = lam * t * t
        diag = (1 - lam**2) * r**4 * lam**2 / 2 * x ** (n + m) * ((n + 1) * (n + 2) + (m + 1) * (m + 2))
        cross = _outer(psi(2, T), psi(T, 2)) + _outer(psi(T, 2), psi(2, T))
        amps = 0.5 * (_pair_diagonal(diag) + swap * cross)
    else:
        raise ConfigurationError(f"unknown strategy {strategy!r}")
    return PureState(amps)


def phi_closed_form(
    strategy: JointStrategy, lam: float, spec: BeamSplitterSpec, cutoff: int, *, as_printed: bool = False
) -> PureState:
    """Direction of the two-mode ``(a1, b1)`` state left after the Gaussian measurement.

    Only the direction is meaningful. ``as_printed=True`` returns the published
    vectors: ``psi_{2,~0}`` for ``1,0,1,0`` and the Fock-diagonal part alone
    for ``1,1,1,1``.
    """
    lam = check_squeezing(lam)
    t = spec.t
    n = np.arange(cutoff + 1)
    if strategy is JointStrategy.J10T0:
        return psi_subtracted(lam, spec, 1, 0, cutoff)
    if strategy is JointStrategy.J1010:
        return psi_subtracted(lam, spec, 2, TILDE_ZERO if as_printed else 0, cutoff)
    if strategy is JointStrategy.J11TT:
        x = lam * t * t
        return PureState(np.diag(x**n * (n + 2 + x**2 * (n + 1))))
    if strategy is JointStrategy.J1001:
        y = lam * t
        return PureState(np.diag(y**n * (n + y**2 * (n + 1))))
    if strategy is JointStrategy.J1111:
        x = lam * t * t
        amps = np.diag(x**n * ((n + 1) * (n + 2) + 2 + x**2 * ((x**2 + 2) * n * (n + 3) + 2 * x**2 + 3)))
        if not as_printed:
            # exchange terms a1^2 b2^2 and a2^2 b1^2 survive the X/P projection
            k = n[:-2]
            side = (1 + x**2) * x**2 * x**k * np.sqrt((k + 1.0) * (k + 2.0))
            amps = amps.astype(np.float64)
            amps[k, k + 2] += side
            amps[k + 2, k] -= side
        return PureState(amps)
    raise ConfigurationError(f"unknown strategy {strategy!r}")
