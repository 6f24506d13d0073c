"""Generic line-search loop on the Grassmann manifold.

Pluggable direction providers (steepest descent, restarted PR+ conjugate
gradient) and step strategies (adaptive, backtracking, none).  The loop
keeps exact counters of energy and retraction evaluations, including those
spent inside backtracking trials.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import stepsize as ss
from .linalg import LinalgError
from .manifold import (
    StiefelPoint,
    TangentVector,
    ORTHO_TOL,
    project_tangent,
    retract_geodesic,
    retract_qr,
)
from .objectives import EnergyModel, grassmann_gradient, grassmann_hessian_qform

STRATEGIES = ("adaptive", "backtracking", "none")
DIRECTIONS = ("steepest", "cg_restart")
RETRACTIONS = ("qr", "geodesic")

# CG safeguards: descent slack and direction-growth bound
_CG_DESCENT_TOL = 1e-12
_CG_GROWTH = 1e3


class Status(Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    FAILED = "failed"


@dataclass(frozen=True)
class SolveConfig:
    epsilon: float = 1e-12
    max_iter: int = 30000
    step_params: ss.StepParams = field(default_factory=ss.StepParams)
    alpha: float = 0.85
    strategy: str = "adaptive"
    bb_mode: str = "odd_even"
    first_step: float = 1e-2
    direction: str = "steepest"
    retraction: str = "qr"
    cg_restart_period: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if self.max_iter <= 0:
            raise ValueError("max_iter must be positive")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.retraction not in RETRACTIONS:
            raise ValueError(f"unknown retraction {self.retraction!r}")
        if self.bb_mode not in ss.BB_MODES:
            raise ValueError(f"unknown bb mode {self.bb_mode!r}")
        if self.cg_restart_period <= 0:
            raise ValueError("cg_restart_period must be positive")


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    energy: float
    residual: float
    step: float
    backtracks: int
    estimator: Optional[float]
    direction_reset: bool
    elapsed: float


@dataclass(frozen=True)
class SolveResult:
    status: Status
    final_point: StiefelPoint
    final_energy: float
    final_residual: float
    trace: list[IterationRecord]
    total_energy_evals: int
    total_retraction_evals: int
    diagnostic: str = ""

    @property
    def iters(self) -> int:
        return len(self.trace)


def steepest_direction(grad: TangentVector) -> TangentVector:
    """Negative gradient; always a descent direction when grad != 0."""
    return -grad


def cg_direction(
    g_new: TangentVector,
    g_old: Optional[TangentVector],
    d_old: Optional[TangentVector],
    u_new: StiefelPoint,
    iter_index: int,
    period: int,
) -> tuple[TangentVector, bool]:
    """Polak-Ribiere-plus direction with periodic restart and descent /
    boundedness safeguards.  Previous tangents are moved to the new tangent
    space by projection."""
    if g_old is None or d_old is None or iter_index % period == 0:
        return steepest_direction(g_new), True
    g_old_here = project_tangent(u_new, g_old.d)
    d_old_here = project_tangent(u_new, d_old.d)
    denom = g_old.norm**2
    beta = 0.0
    if denom > 0.0:
        beta = float(np.sum(g_new.d * (g_new.d - g_old_here.d))) / denom
    beta = max(0.0, beta)
    d = TangentVector(-g_new.d + beta * d_old_here.d, u_new)
    slope = float(np.sum(g_new.d * d.d))
    if slope > -_CG_DESCENT_TOL * g_new.norm**2 or d.norm > _CG_GROWTH * g_new.norm:
        return steepest_direction(g_new), True
    return d, False


class _CountingModel:
    """Delegating wrapper that counts value() calls (the dominant cost unit)."""

    def __init__(self, model: EnergyModel):
        self._model = model
        self.value_calls = 0

    def value(self, u):
        self.value_calls += 1
        return self._model.value(u)

    def euclidean_gradient(self, u):
        return self._model.euclidean_gradient(u)

    def hessian_apply(self, u, d):
        return self._model.hessian_apply(u, d)


def solve(model: EnergyModel, u0: StiefelPoint, config: SolveConfig) -> SolveResult:
    """Run the line-search loop until the Grassmann gradient norm drops
    below epsilon, the iteration cap is hit, or a numerical failure occurs."""
    defect = np.linalg.norm(u0.u.T @ u0.u - np.eye(u0.shape[1]))
    if defect > ORTHO_TOL:
        raise ValueError(f"initial point infeasible: defect {defect:.3e}")

    cmodel = _CountingModel(model)
    base_retract = retract_qr if config.retraction == "qr" else retract_geodesic
    retraction_calls = [0]

    def retraction(point, tangent, t):
        retraction_calls[0] += 1
        return base_retract(point, tangent, t)

    params = config.step_params
    point = u0
    nm: Optional[ss.NonMonotoneState] = None
    prev_u: Optional[np.ndarray] = None
    prev_g: Optional[np.ndarray] = None
    g_prev: Optional[TangentVector] = None
    d_prev: Optional[TangentVector] = None
    trace: list[IterationRecord] = []

    n = 0
    status = Status.MAX_ITERATIONS
    diagnostic = ""
    energy = math.nan
    residual = math.nan
    while True:
        tic = time.perf_counter()
        try:
            grad = grassmann_gradient(model, point)
            residual = grad.norm
            energy = cmodel.value(point.u)
        except (LinalgError, FloatingPointError) as exc:
            status = Status.FAILED
            diagnostic = f"iteration {n}: {exc}"
            break
        if not (math.isfinite(energy) and math.isfinite(residual)):
            status = Status.FAILED
            diagnostic = f"iteration {n}: non-finite energy or residual"
            break
        nm = ss.initial_nm_state(config.alpha, energy) if nm is None else ss.nm_update(nm, energy)
        if residual <= config.epsilon:
            status = Status.CONVERGED
            break
        if n >= config.max_iter:
            status = Status.MAX_ITERATIONS
            break

        if config.direction == "steepest":
            direction, was_reset = steepest_direction(grad), False
        else:
            direction, was_reset = cg_direction(
                grad, g_prev, d_prev, point, n, config.cg_restart_period
            )
        slope = float(np.sum(grad.d * direction.d))
        if slope >= 0.0:
            direction, was_reset = steepest_direction(grad), True
            slope = -residual**2
        assert slope < 0.0

        s = None if prev_u is None else point.u - prev_u
        y = None if prev_g is None else grad.d - prev_g
        t_initial = ss.bb_initial(n, s, y, mode=config.bb_mode, first_step=config.first_step)

        try:
            if config.strategy == "adaptive":
                hq = grassmann_hessian_qform(model, point, direction)
                decision = ss.adaptive_step(
                    energy, nm.c, slope, hq, t_initial, params, direction.norm
                )
                next_point = retraction(point, direction, decision.t)
            elif config.strategy == "backtracking":
                decision, next_point = ss.backtracking_step(
                    cmodel,
                    point,
                    direction,
                    t_initial,
                    params,
                    nm.c,
                    retraction,
                    g=slope,
                )
            else:  # strategy == "none": accept the initial guess unjudged
                t = max(t_initial, params.t_min)
                decision = ss.StepDecision(
                    t=t,
                    initial_accepted=True,
                    estimator=None,
                    clamp_reason="none",
                    backtracks=0,
                )
                next_point = retraction(point, direction, t)
        except (LinalgError, ss.MaxBacktracks, FloatingPointError) as exc:
            status = Status.FAILED
            diagnostic = f"iteration {n}: {exc}"
            break

        trace.append(
            IterationRecord(
                iter=n,
                energy=energy,
                residual=residual,
                step=decision.t,
                backtracks=decision.backtracks,
                estimator=decision.estimator,
                direction_reset=was_reset,
                elapsed=time.perf_counter() - tic,
            )
        )
        prev_u, prev_g = point.u, grad.d
        g_prev, d_prev = grad, direction
        point = next_point
        n += 1

    return SolveResult(
        status=status,
        final_point=point,
        final_energy=energy,
        final_residual=residual,
        trace=trace,
        total_energy_evals=cmodel.value_calls,
        total_retraction_evals=retraction_calls[0],
        diagnostic=diagnostic,
    )
