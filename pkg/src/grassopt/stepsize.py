"""Step-size machinery: non-monotone reference recursion, BB initial steps,
Armijo-type backtracking and the adaptive Estimate -> Judge -> Improve
strategy.

All quantities are scalars except backtracking, which needs the model and a
retraction because each trial costs one retraction plus one energy
evaluation.  The adaptive path never touches either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .manifold import StiefelPoint, TangentVector

BB_DENOM_TOL = 1e-30
BB_FALLBACK = 1.0
MAX_BACKTRACKS = 100

BB_MODES = ("odd_even", "bb1", "bb2")


class DegenerateDenominator(Exception):
    """BB denominator too small to trust."""


class NonDescentDirection(Exception):
    """<grad, D> >= 0; the caller must reset the direction first."""


class MaxBacktracks(Exception):
    """Backtracking loop exceeded its cap; the state is pathological."""


@dataclass(frozen=True)
class NonMonotoneState:
    """Weighted reference value (C, Q) with mixing parameter alpha.

    alpha = 0 collapses to plain Armijo: C is always the latest energy.
    """

    alpha: float
    c: float
    q: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("alpha must lie in [0, 1)")


def initial_nm_state(alpha: float, e0: float) -> NonMonotoneState:
    return NonMonotoneState(alpha=alpha, c=e0, q=1.0)


def nm_update(state: NonMonotoneState, e_new: float) -> NonMonotoneState:
    """Advance the (C, Q) recursion with the newest energy."""
    q_new = state.alpha * state.q + 1.0
    c_new = (state.alpha * state.q * state.c + e_new) / q_new
    return replace(state, c=c_new, q=q_new)


@dataclass(frozen=True)
class StepParams:
    """Parameters of the step-size strategies (defaults are the recommended
    set: eta = 1e-4, t_min = 1e-20, k = 0.5, theta = 0.2)."""

    eta: float = 1e-4
    t_min: float = 1e-20
    k: float = 0.5
    theta: float = 0.2

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0, 1)")
        if self.t_min <= 0.0:
            raise ValueError("t_min must be positive")
        if not 0.0 < self.k < 1.0:
            raise ValueError("k must lie in (0, 1)")
        if self.theta <= 0.0:
            raise ValueError("theta must be positive")


@dataclass(frozen=True)
class StepDecision:
    """Outcome of one step-size selection."""

    t: float
    initial_accepted: bool
    estimator: Optional[float]
    clamp_reason: str  # none | trust_radius | floor | curvature_minimizer
    backtracks: int


def bb_step_1(s: np.ndarray, y: np.ndarray) -> float:
    """tau_1 = tr(S^T S) / |tr(S^T Y)|."""
    den = abs(float(np.sum(s * y)))
    if den < BB_DENOM_TOL:
        raise DegenerateDenominator(f"|tr(S^T Y)| = {den:.3e}")
    return float(np.sum(s * s)) / den


def bb_step_2(s: np.ndarray, y: np.ndarray) -> float:
    """tau_2 = |tr(S^T Y)| / tr(Y^T Y)."""
    den = float(np.sum(y * y))
    if den < BB_DENOM_TOL:
        raise DegenerateDenominator(f"tr(Y^T Y) = {den:.3e}")
    return abs(float(np.sum(s * y))) / den


def bb_initial(
    iter_index: int,
    s: Optional[np.ndarray],
    y: Optional[np.ndarray],
    mode: str = "odd_even",
    first_step: float = 1e-2,
) -> float:
    """Initial step for iteration `iter_index`: the configured constant at
    iteration 0, afterwards tau_1 for odd / tau_2 for even indices (or one of
    them exclusively).  Degenerate denominators fall back to 1.0."""
    if mode not in BB_MODES:
        raise ValueError(f"unknown bb mode {mode!r}")
    if iter_index == 0 or s is None or y is None:
        return first_step
    try:
        if mode == "bb1":
            return bb_step_1(s, y)
        if mode == "bb2":
            return bb_step_2(s, y)
        return bb_step_1(s, y) if iter_index % 2 == 1 else bb_step_2(s, y)
    except DegenerateDenominator:
        return BB_FALLBACK


def estimator_zeta(e: float, c: float, g: float, hq: float, t: float) -> float:
    """Acceptance estimator zeta(t) = (E - C + t g + t^2 hq / 2) / (t g)."""
    if g >= 0.0:
        raise NonDescentDirection(f"directional derivative {g:.3e} >= 0")
    if t <= 0.0:
        raise ValueError("t must be positive")
    return (e - c + t * g + 0.5 * t * t * hq) / (t * g)


def acceptable_upper_bound(
    e: float, c: float, g: float, hq: float, eta: float, theta: float, norm_d: float
) -> float:
    """Largest t with zeta(t) >= eta and t * ||D|| <= theta.

    Requires E <= C (guaranteed by the non-monotone recursion); the
    discriminant is then nonnegative.
    """
    if g >= 0.0:
        raise NonDescentDirection(f"directional derivative {g:.3e} >= 0")
    if e > c:
        raise ValueError("requires E <= C")
    if norm_d <= 0.0:
        raise ValueError("||D|| must be positive")
    trust = theta / norm_d
    if hq <= 0.0:
        return trust
    delta = (eta - 1.0) ** 2 - 2.0 * hq * (e - c) / (g * g)
    curvature = ((eta - 1.0) - math.sqrt(delta)) * g / hq
    return min(curvature, trust)


def improve_step(g: float, hq: float, theta: float, norm_d: float) -> float:
    """Minimizer of the local quadratic model, clamped to the trust radius."""
    if g >= 0.0:
        raise NonDescentDirection(f"directional derivative {g:.3e} >= 0")
    if norm_d <= 0.0:
        raise ValueError("||D|| must be positive")
    trust = theta / norm_d
    if hq > 0.0:
        return min(-g / hq, trust)
    return trust


def adaptive_step(
    e: float,
    c: float,
    g: float,
    hq: float,
    t_initial: float,
    params: StepParams,
    norm_d: float,
) -> StepDecision:
    """Estimate -> Judge -> Improve.  Costs no energy or retraction
    evaluations: the decision is made from the local quadratic model alone."""
    if g >= 0.0:
        raise NonDescentDirection(f"directional derivative {g:.3e} >= 0")
    if norm_d <= 0.0:
        raise ValueError("||D|| must be positive")
    trust = params.theta / norm_d
    floored = max(t_initial, params.t_min)
    t = min(floored, trust)
    reason = "none"
    if floored > t_initial:
        reason = "floor"
    if t < floored:
        reason = "trust_radius"
    zeta = estimator_zeta(e, c, g, hq, t)
    if zeta >= params.eta:
        return StepDecision(
            t=t, initial_accepted=True, estimator=zeta, clamp_reason=reason, backtracks=0
        )
    improved = improve_step(g, hq, params.theta, norm_d)
    reason = "curvature_minimizer" if (hq > 0.0 and -g / hq < trust) else "trust_radius"
    return StepDecision(
        t=improved,
        initial_accepted=False,
        estimator=zeta,
        clamp_reason=reason,
        backtracks=0,
    )


Retraction = Callable[[StiefelPoint, TangentVector, float], StiefelPoint]


def backtracking_step(
    model,
    point: StiefelPoint,
    tangent: TangentVector,
    t_initial: float,
    params: StepParams,
    c_ref: float,
    retraction: Retraction,
    g: Optional[float] = None,
) -> tuple[StepDecision, StiefelPoint]:
    """Shrink t by k until the non-monotone sufficient-decrease condition
    E(ortho(U, D, t)) - C <= eta * t * <grad, D> holds.

    Each trial costs one retraction and one energy evaluation; the accepted
    trial point is returned so the caller need not recompute it.
    """
    if g is None:
        from .objectives import grassmann_gradient  # local to avoid cycle

        grad = grassmann_gradient(model, point)
        g = float(np.sum(grad.d * tangent.d))
    if g >= 0.0:
        raise NonDescentDirection(f"directional derivative {g:.3e} >= 0")
    t = max(t_initial, params.t_min)
    reason = "floor" if t > t_initial else "none"
    for count in range(MAX_BACKTRACKS + 1):
        candidate = retraction(point, tangent, t)
        e_trial = model.value(candidate.u)
        if e_trial - c_ref <= params.eta * t * g:
            return (
                StepDecision(
                    t=t,
                    initial_accepted=(count == 0),
                    estimator=None,
                    clamp_reason=reason,
                    backtracks=count,
                ),
                candidate,
            )
        t *= params.k
    raise MaxBacktracks(f"no acceptable step after {MAX_BACKTRACKS} shrinks")
