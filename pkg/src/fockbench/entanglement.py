"""Negativity of bipartite Fock states via the partial transpose."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, TruncationWarning
from .fock import BOUNDARY_MASS_TOL, DensityOperator, PureState

TRACE_TOL = 1e-8
HERMITIAN_TOL = 1e-8


@dataclass(frozen=True)
class Bipartition:
    side_a: tuple[int, ...]
    side_b: tuple[int, ...]

    def __init__(self, side_a: Sequence[int], side_b: Sequence[int]):
        object.__setattr__(self, "side_a", tuple(int(i) for i in side_a))
        object.__setattr__(self, "side_b", tuple(int(i) for i in side_b))

    @classmethod
    def pair(cls) -> Bipartition:
        """The ``(0 | 1)`` cut of a two-mode state."""
        return cls((0,), (1,))

    def validate(self, num_modes: int) -> None:
        a, b = set(self.side_a), set(self.side_b)
        if not a or not b:
            raise ConfigurationError("both sides of a bipartition must be nonempty")
        if a & b:
            raise ConfigurationError(f"sides overlap on modes {sorted(a & b)}")
        if a | b != set(range(num_modes)) or len(a) + len(b) != len(self.side_a) + len(self.side_b):
            raise ConfigurationError(f"bipartition {self} does not cover {num_modes} modes exactly once")


def _default_cut(num_modes: int, cut: Bipartition | None) -> Bipartition:
    if cut is None:
        if num_modes != 2:
            raise ConfigurationError("a bipartition is required beyond two modes")
        cut = Bipartition.pair()
    cut.validate(num_modes)
    return cut


def _guard(mass: float) -> None:
    if mass > BOUNDARY_MASS_TOL:
        warnings.warn(
            f"boundary occupation mass {mass:.3g} exceeds {BOUNDARY_MASS_TOL:g}; increase the cutoff",
            TruncationWarning,
            stacklevel=3,
        )


def partial_transpose(rho: DensityOperator, cut: Bipartition | None = None) -> np.ndarray:
    """Matrix of ``rho`` with the indices of ``cut.side_b`` transposed."""
    k = rho.num_modes
    cut = _default_cut(k, cut)
    axes = list(range(2 * k))
    for mode in cut.side_b:
        axes[mode], axes[k + mode] = axes[k + mode], axes[mode]
    side = rho.matrix.shape[0]
    return rho.tensor.transpose(axes).reshape(side, side)


def jacobi_eigh(m: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each rotation first removes the phase of the pivot, then applies the real
    symmetric 2x2 rotation that annihilates it.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    v : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = np.array(m, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(np.abs(a).max(initial=0.0), np.finfo(float).tiny)
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if np.abs(a[offdiag]).max(initial=0.0) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _check_hermitian(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigurationError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    if np.abs(m - m.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale:
        raise DomainError("matrix is not Hermitian within tolerance")
    return m


def eigh_hermitian(m: np.ndarray, method: str = "lapack") -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a Hermitian matrix, ascending; ``method`` is ``"lapack"`` or ``"jacobi"``."""
    m = _check_hermitian(m)
    if method == "lapack":
        return np.linalg.eigh(m)
    if method == "jacobi":
        return jacobi_eigh(m)
    raise ConfigurationError(f"unknown eigensolver {method!r}")


def eigenvalues_hermitian(m: np.ndarray, method: str = "lapack") -> np.ndarray:
    m = _check_hermitian(m)
    if method == "lapack":
        return np.linalg.eigvalsh(m)
    return eigh_hermitian(m, method)[0]


def _clamp(value: float) -> float:
    return 0.0 if value < 0.0 and value > -1e-9 else value


def negativity(rho: DensityOperator, cut: Bipartition | None = None, method: str = "lapack") -> float:
    """``(||rho^{T_B}||_1 - 1) / 2`` for a unit-trace density operator."""
    if abs(rho.trace - 1.0) > TRACE_TOL:
        raise DomainError(f"density operator must have unit trace, got {rho.trace}")
    _guard(rho.boundary_mass())
    mu = eigenvalues_hermitian(partial_transpose(rho, cut), method)
    return _clamp(float((np.abs(mu).sum() - 1.0) / 2.0))


def schmidt_coefficients(state: PureState, cut: Bipartition | None = None) -> np.ndarray:
    cut = _default_cut(state.num_modes, cut)
    d = state.cutoff + 1
    amps = state.amplitudes.transpose(cut.side_a + cut.side_b)
    mat = amps.reshape(d ** len(cut.side_a), d ** len(cut.side_b))
    if state.num_modes == 2 and np.count_nonzero(mat - np.diag(np.diag(mat))) == 0:
        return np.sort(np.abs(np.diag(mat)))[::-1]
    return np.linalg.svd(mat, compute_uv=False)


def negativity_pure(state: PureState, cut: Bipartition | None = None) -> float:
    """Pure-state negativity ``((sum_i c_i)^2 - 1) / 2`` from Schmidt coefficients ``c_i``."""
    if not state.is_normalized(TRACE_TOL):
        raise DomainError(f"state must be normalized, got squared norm {state.norm_squared}")
    _guard(state.boundary_mass())
    c = schmidt_coefficients(state, cut)
    return _clamp(float((c.sum() ** 2 - 1.0) / 2.0))
