"""
End-to-end concentration pipelines: single-source subtraction strategies,
two-source joint strategies with a Gaussian measurement, their trade-off
curves, the optimal single-source envelope and the lossy-homodyne variant.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .entanglement import negativity, negativity_pure
from .errors import ConfigurationError, DegenerateStateError, DomainError, TruncationError
from .fock import (
    BOUNDARY_MASS_TOL,
    DensityOperator,
    PureState,
    apply_one_mode_operator,
    apply_two_mode_operator,
    auto_cutoff,
    tensor_product,
)
from .optics import (
    TILDE_ZERO,
    BeamSplitterSpec,
    GaussianProjector,
    LossSpec,
    apply_loss,
    beam_splitter_matrix,
    detection_operator,
    gaussian_bra_coefficients,
)
from .states import JointStrategy, check_squeezing, phi_closed_form, psi_joint_closed_form, psi_subtracted, tmsv

COMBINER = BeamSplitterSpec.balanced()
AMPLITUDE_TAIL_TOL = 1e-24
MAX_SUBTRACTION = 3
# four-mode dense tensors hold (cutoff + 1)**4 complex amplitudes; 48 keeps one under 100 MB
MAX_JOINT_CUTOFF = 48


@dataclass(frozen=True)
class SimpleStrategy:
    """Subtract ``k_a`` photons from mode A and ``k_b`` from mode B of one source."""

    k_a: int
    k_b: int

    def __post_init__(self):
        if not (0 <= self.k_a <= MAX_SUBTRACTION and 0 <= self.k_b <= MAX_SUBTRACTION):
            raise ConfigurationError(f"subtraction counts must lie in [0, {MAX_SUBTRACTION}]")
        if self.k_a + self.k_b < 1:
            raise ConfigurationError("a strategy must subtract at least one photon")

    @property
    def label(self) -> str:
        return f"{self.k_a}/{self.k_b}"

    @property
    def total_subtracted(self) -> int:
        return self.k_a + self.k_b

    @classmethod
    def parse(cls, label: str) -> SimpleStrategy:
        try:
            a, b = label.strip().split("/")
            return cls(int(a), int(b))
        except ValueError as exc:
            raise ConfigurationError(f"unknown simple strategy label {label!r}") from exc


DEFAULT_SIMPLE = tuple(SimpleStrategy.parse(s) for s in ("1/0", "1/1", "2/0", "2/2", "3/3"))

Strategy = SimpleStrategy | JointStrategy


@dataclass(frozen=True)
class SweepRecord:
    strategy: str
    t2: float
    p_s: float
    log10_ps: float
    negativity: float


@dataclass(frozen=True)
class TradeoffCurve:
    label: str
    points: tuple[SweepRecord, ...]

    @property
    def log10_ps(self) -> np.ndarray:
        return np.array([p.log10_ps for p in self.points])

    @property
    def negativities(self) -> np.ndarray:
        return np.array([p.negativity for p in self.points])


def _subtraction_count(label: str) -> int:
    return sum(int(tok) for tok in label.replace("/", ",").split(",") if tok.strip().isdigit())


def _check_t2(t2: float) -> None:
    if not 0.0 < t2 < 1.0:
        raise DomainError(f"t^2 must lie in (0, 1), got {t2}")


def joint_cutoff(lam: float, t: float, total_subtracted: int) -> int:
    # +1: the combiners spread a tail of total photon number across both outputs
    cutoff = auto_cutoff(lam * t, degree=total_subtracted + 1)
    if cutoff > MAX_JOINT_CUTOFF:
        raise TruncationError(
            f"lambda*t = {lam * t:.4g} needs cutoff {cutoff}, above the four-mode limit {MAX_JOINT_CUTOFF}"
        )
    return cutoff


def simple_cutoff(lam: float, t: float, total_subtracted: int) -> int:
    # negativity sums amplitudes, not probabilities: bound the amplitude tail by 1e-12
    return auto_cutoff(lam * t, degree=total_subtracted, tol=AMPLITUDE_TAIL_TOL)


def _truncation_check(state: PureState, what: str) -> None:
    mass = state.boundary_mass()
    if mass > BOUNDARY_MASS_TOL:
        raise TruncationError(
            f"{what}: boundary mass {mass:.3g} exceeds {BOUNDARY_MASS_TOL:g} at cutoff {state.cutoff}"
        )


def brute_force_joint(
    strategy: JointStrategy | Sequence[int | str],
    lam: float,
    spec: BeamSplitterSpec | None = None,
    cutoff: int | None = None,
    *,
    combiner: np.ndarray | None = None,
    check_truncation: bool = True,
) -> PureState:
    """Build the four-mode state operator by operator.

    ``tmsv (x) tmsv`` on ``(a1, b1, a2, b2)``, per-mode detection operators
    from the plan, then 50:50 combiners on ``(a1, a2)`` and ``(b1, b2)``.
    ``combiner`` overrides the two-mode combiner matrix.
    """
    lam = check_squeezing(lam)
    plan = strategy.plan if isinstance(strategy, JointStrategy) else tuple(strategy)
    if len(plan) != 4:
        raise ConfigurationError(f"a joint plan needs four entries, got {plan}")
    total = sum(e for e in plan if e != TILDE_ZERO)
    if cutoff is None:
        cutoff = joint_cutoff(lam, spec.t if spec is not None else 1.0, total)
    source = tmsv(lam, cutoff)
    state = tensor_product(source, source)
    for mode, entry in enumerate(plan):
        if entry != 0:
            state = apply_one_mode_operator(state, mode, detection_operator(entry, spec, cutoff))
    u = beam_splitter_matrix(COMBINER, cutoff) if combiner is None else combiner
    state = apply_two_mode_operator(state, 0, 2, u)
    state = apply_two_mode_operator(state, 1, 3, u)
    if check_truncation:
        _truncation_check(state, "brute-force joint state")
    return state


def _contract(state: PureState, mode: int, bra: np.ndarray) -> PureState:
    return PureState(np.tensordot(state.amplitudes, bra, axes=([mode], [0])))


def gaussian_measure(state: PureState, proj_a2: GaussianProjector, proj_b2: GaussianProjector) -> PureState:
    """Project ``a2`` and ``b2`` of an ``(a1, b1, a2, b2)`` state; returns the ``(a1, b1)`` state."""
    if state.num_modes != 4:
        raise ConfigurationError(f"expected a four-mode state, got {state.num_modes} modes")
    out = _contract(state, 3, gaussian_bra_coefficients(proj_b2, state.cutoff))
    return _contract(out, 2, gaussian_bra_coefficients(proj_a2, state.cutoff))


def _record(label: str, t2: float, p_s: float, neg: float) -> SweepRecord:
    log_p = math.log10(p_s) if p_s > 0 else -math.inf
    return SweepRecord(label, float(t2), float(p_s), log_p, float(neg))


def _negativity_of(state: PureState) -> float:
    if state.norm_squared == 0.0:
        return 0.0
    return negativity_pure(state.normalized())


def strategy_point(
    strategy: Strategy, lam: float, t2: float, cutoff: int | None = None, route: str = "closed"
) -> SweepRecord:
    """Success probability and output negativity at one transmittivity.

    For joint strategies ``p_s`` is the squared norm of the four-mode state and
    the Gaussian measurement is treated as deterministic. ``route`` selects the
    closed-form (``"closed"``) or operator-by-operator (``"brute"``) pipeline.
    """
    lam = check_squeezing(lam)
    _check_t2(t2)
    spec = BeamSplitterSpec.from_t2(t2)
    if isinstance(strategy, SimpleStrategy):
        c = cutoff if cutoff is not None else simple_cutoff(lam, spec.t, strategy.total_subtracted)
        psi = psi_subtracted(lam, spec, strategy.k_a, strategy.k_b, c)
        _truncation_check(psi, strategy.label)
        return _record(strategy.label, t2, psi.norm_squared, _negativity_of(psi))
    if not isinstance(strategy, JointStrategy):
        raise ConfigurationError(f"unknown strategy {strategy!r}")
    if route == "closed":
        # the combiners are unitary, so ||Psi||^2 factors over the two sources
        c = cutoff if cutoff is not None else simple_cutoff(lam, spec.t, strategy.total_subtracted)
        i, j, u, v = strategy.plan
        p_s = 1.0
        for source in (psi_subtracted(lam, spec, i, j, c), psi_subtracted(lam, spec, u, v, c)):
            _truncation_check(source, strategy.label)
            p_s *= source.norm_squared
        phi = phi_closed_form(strategy, lam, spec, c)
    elif route == "brute":
        c = cutoff if cutoff is not None else joint_cutoff(lam, spec.t, strategy.total_subtracted)
        psi = brute_force_joint(strategy, lam, spec, c)
        p_s = psi.norm_squared
        phi = gaussian_measure(psi, *strategy.projectors)
    else:
        raise ConfigurationError(f"unknown route {route!r}")
    return _record(strategy.label, t2, p_s, _negativity_of(phi))


def tradeoff_curve(
    strategy: Strategy,
    lam: float,
    t2_values: Iterable[float],
    cutoff: int | None = None,
    route: str = "closed",
    workers: int = 1,
) -> TradeoffCurve:
    t2s = sorted(float(t) for t in t2_values)

    def point(t2):
        return strategy_point(strategy, lam, t2, cutoff, route)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(point, t2s))
    else:
        points = [point(t2) for t2 in t2s]
    return TradeoffCurve(strategy.label, tuple(points))


def default_bins() -> np.ndarray:
    """400 uniform bins over log10(p_s) in [-6, 0], as edges."""
    return np.linspace(-6.0, 0.0, 401)


def _interpolate_at(curve: TradeoffCurve, x: float) -> tuple[float, float] | None:
    """Best (negativity, t2) along any segment of ``curve`` spanning ``log10 p_s = x``."""
    best = None
    pts = [p for p in curve.points if math.isfinite(p.log10_ps)]
    for p0, p1 in zip(pts, pts[1:]):
        lo, hi = sorted((p0.log10_ps, p1.log10_ps))
        if not lo <= x <= hi:
            continue
        w = 0.0 if hi == lo else (x - p0.log10_ps) / (p1.log10_ps - p0.log10_ps)
        neg = p0.negativity + w * (p1.negativity - p0.negativity)
        t2 = p0.t2 + w * (p1.t2 - p0.t2)
        if best is None or neg > best[0]:
            best = (neg, t2)
    if best is None and len(pts) == 1 and pts[0].log10_ps == x:
        best = (pts[0].negativity, pts[0].t2)
    return best


def optimal_envelope(curves: Sequence[TradeoffCurve], ps_grid: np.ndarray | None = None) -> TradeoffCurve:
    """Upper envelope of negativity over log10(p_s) bins.

    Each bin is evaluated at its center by linear interpolation along every
    curve; bins no curve reaches are omitted. Ties go to the curve with fewer
    subtracted photons.
    """
    if not curves:
        raise ConfigurationError("the envelope needs at least one curve")
    edges = default_bins() if ps_grid is None else np.asarray(ps_grid, dtype=float)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise ConfigurationError("bin edges must be a strictly increasing sequence")
    ordered = sorted(curves, key=lambda c: _subtraction_count(c.label))
    centers = 0.5 * (edges[:-1] + edges[1:])
    points = []
    for x in centers[::-1]:
        best = None
        for curve in ordered:
            hit = _interpolate_at(curve, float(x))
            if hit is not None and (best is None or hit[0] > best[0]):
                best = (hit[0], hit[1], curve.label)
        if best is not None:
            points.append(SweepRecord(best[2], best[1], 10.0 ** float(x), float(x), best[0]))
    return TradeoffCurve("envelope", tuple(points))


# reflectivities r^2 = 1 - t^2 spanning the whole transmittivity range
_REFLECTIVITY_GRID = np.logspace(-6.0, math.log10(0.999), 300)


def _simple_eval(strategy: SimpleStrategy, lam: float, r2: float) -> tuple[float, float]:
    spec = BeamSplitterSpec(math.sqrt(1.0 - r2), math.sqrt(r2))
    c = simple_cutoff(lam, spec.t, strategy.total_subtracted)
    psi = psi_subtracted(lam, spec, strategy.k_a, strategy.k_b, c)
    return psi.norm_squared, psi


@lru_cache(maxsize=64)
def _log_ps_grid(strategy: SimpleStrategy, lam: float) -> np.ndarray:
    return np.array([math.log(_simple_eval(strategy, lam, r2)[0]) for r2 in _REFLECTIVITY_GRID])


def envelope_negativity(
    p_s: float, lam: float, strategies: Sequence[SimpleStrategy] = DEFAULT_SIMPLE
) -> float | None:
    """Best single-source negativity at exactly success probability ``p_s``.

    Each strategy's ``p_s(t^2)`` is inverted by bracketing on a fixed
    reflectivity grid and refining with Brent's method. ``None`` if no strategy
    reaches ``p_s``.
    """
    lam = check_squeezing(lam)
    if not p_s > 0.0 or lam == 0.0:
        return None
    target = math.log(p_s)
    best = None
    for strategy in strategies:
        grid = _log_ps_grid(strategy, lam) - target
        for i in np.nonzero(np.sign(grid[:-1]) * np.sign(grid[1:]) <= 0)[0]:
            lo, hi = _REFLECTIVITY_GRID[i], _REFLECTIVITY_GRID[i + 1]
            if grid[i] == 0.0:
                r2 = lo
            else:
                r2 = brentq(
                    lambda x: math.log(_simple_eval(strategy, lam, x)[0]) - target, lo, hi, xtol=1e-15, rtol=1e-13
                )
            neg = _negativity_of(_simple_eval(strategy, lam, r2)[1])
            if best is None or neg > best:
                best = neg
    return best


def envelope_gap(strategy: JointStrategy, lam: float, t2: float, cutoff: int | None = None) -> float | None:
    """Joint negativity minus the single-source envelope at equal ``p_s``."""
    rec = strategy_point(strategy, lam, t2, cutoff)
    env = envelope_negativity(rec.p_s, lam)
    return None if env is None else rec.negativity - env


@dataclass(frozen=True)
class GapResult:
    t2_star: float
    gap: float
    advantage: bool


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv * (hi - lo)
    x2 = lo + inv * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


def find_optimal_gap_t(
    lam: float, cutoff: int | None = None, strategy: JointStrategy = JointStrategy.J1001
) -> GapResult:
    """Transmittivity maximizing the joint strategy's advantage over the envelope.

    Coarse scan of ``t^2`` in steps of 0.01, then golden-section refinement to
    1e-4 around the best grid point.
    """
    lam = check_squeezing(lam)

    def gap(t2):
        g = envelope_gap(strategy, lam, t2, cutoff)
        return -math.inf if g is None else g

    grid = np.round(np.arange(1, 100) * 0.01, 10)
    values = [gap(t2) for t2 in grid]
    i = int(np.argmax(values))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    t2_star = _golden_max(gap, float(lo), float(hi), 1e-4)
    best = gap(t2_star)
    if best < values[i]:
        t2_star, best = float(grid[i]), values[i]
    return GapResult(t2_star, best, best > 0.0)


def lossy_homodyne_state(lam: float, t2: float, eta: float, cutoff: int | None = None) -> DensityOperator:
    """Normalized ``(a1, b1)`` state of the ``1,0,0,1`` strategy with lossy X/P homodyne.

    Loss of efficiency ``eta`` acts on ``a2`` and ``b2`` before the quadrature
    projections; the Kraus branches are summed incoherently.
    """
    lam = check_squeezing(lam)
    _check_t2(t2)
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"efficiency must lie in (0, 1], got {eta}")
    strategy = JointStrategy.J1001
    spec = BeamSplitterSpec.from_t2(t2)
    c = cutoff if cutoff is not None else joint_cutoff(lam, spec.t, strategy.total_subtracted)
    psi = psi_joint_closed_form(strategy, lam, spec, c)
    loss = LossSpec(eta)
    proj_a, proj_b = (gaussian_bra_coefficients(p, c) for p in strategy.projectors)
    d = (c + 1) ** 2
    rho = np.zeros((d, d), dtype=np.complex128)
    for _, branch_a in apply_loss(psi, 2, loss):
        measured_a = _contract(branch_a, 2, proj_a)
        for _, branch_b in apply_loss(measured_a, 2, loss):
            chi = _contract(branch_b, 2, proj_b).amplitudes.reshape(-1)
            rho += np.outer(chi, chi.conj())
    if np.trace(rho).real <= 0.0:
        raise DegenerateStateError("every loss branch vanished")
    return DensityOperator(rho, 2).normalized()


def eta_crossing(
    lam: float, t2: float, reference: float, cutoff: int | None = None, lo: float = 0.5
) -> float | None:
    """Efficiency at which the lossy joint negativity falls to ``reference``."""

    def excess(eta):
        return negativity(lossy_homodyne_state(lam, t2, eta, cutoff)) - reference

    f_lo, f_hi = excess(lo), excess(1.0)
    if f_hi <= 0.0 or f_lo > 0.0:
        return None
    return brentq(excess, lo, 1.0, xtol=1e-6)


@dataclass(frozen=True)
class LossScan:
    t2_star: float
    gap: float
    p_s: float
    reference: float
    rows: tuple[tuple[float, float], ...]
    eta_star: float | None
    advantage: bool


def loss_scan(lam: float, eta_grid: Sequence[float], cutoff: int | None = None, workers: int = 1) -> LossScan:
    """Negativity of the lossy ``1,0,0,1`` output against its equal-probability reference."""
    gap = find_optimal_gap_t(lam, None)
    if not gap.advantage:
        return LossScan(gap.t2_star, gap.gap, math.nan, math.nan, (), None, False)
    rec = strategy_point(JointStrategy.J1001, lam, gap.t2_star)
    reference = envelope_negativity(rec.p_s, lam)

    def row(eta):
        return float(eta), negativity(lossy_homodyne_state(lam, gap.t2_star, eta, cutoff))

    etas = sorted((float(e) for e in eta_grid), reverse=True)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(row, etas))
    else:
        rows = tuple(row(e) for e in etas)
    eta_star = eta_crossing(lam, gap.t2_star, reference, cutoff)
    return LossScan(gap.t2_star, gap.gap, rec.p_s, reference, rows, eta_star, True)
