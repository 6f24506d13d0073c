"""Seeded property suites behind the `check` subcommand.

Each check runs a fixed-seed randomized experiment against an independent
oracle (finite differences, bisection, closed forms) and reports pass/fail.
The pytest suite reuses these so the CLI and the tests agree by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import stepsize as ss
from .linalg import thin_qr
from .manifold import (
    StiefelPoint,
    connecting_direction,
    dist_cf,
    dist_geo,
    parallel_transport,
    principal_angles,
    project_tangent,
    retract_geodesic,
    retract_qr,
)
from .objectives import (
    QuadraticTraceModel,
    grassmann_gradient,
    grassmann_hessian_qform,
    harmonic_lattice,
    random_symmetric,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _random_point(rng, n, p) -> StiefelPoint:
    q, _ = thin_qr(rng.standard_normal((n, p)))
    return StiefelPoint(q)


def _random_tangent(rng, point: StiefelPoint):
    return project_tangent(point, rng.standard_normal(point.shape))


def _random_orthogonal(rng, p) -> np.ndarray:
    q, _ = thin_qr(rng.standard_normal((p, p)))
    return q


# ---------------------------------------------------------------------------
# geometry suite
# ---------------------------------------------------------------------------


def check_retraction_axioms() -> CheckResult:
    """retract(U, D, 0) = U exactly, and (retract(U, D, h) - U)/h -> D with
    O(h) error (first-order decay observed across h = 1e-3, 1e-4, 1e-5)."""
    rng = np.random.default_rng(100)
    worst = 0.0
    for retract in (retract_qr, retract_geodesic):
        for _ in range(20):
            point = _random_point(rng, 25, 4)
            tangent = _random_tangent(rng, point)
            if not np.array_equal(retract(point, tangent, 0.0).u, point.u):
                return CheckResult("retraction_axioms", False, "value at t=0 not exact")
            errs = []
            for h in (1e-3, 1e-4, 1e-5):
                fd = (retract(point, tangent, h).u - point.u) / h
                errs.append(np.linalg.norm(fd - tangent.d))
            ratios = [errs[i] / errs[i + 1] for i in range(2)]
            worst = max(worst, abs(ratios[0] - 10.0), abs(ratios[1] - 10.0))
            if any(r < 5.0 for r in ratios):
                return CheckResult(
                    "retraction_axioms", False, f"FD error ratios {ratios} not ~10x"
                )
    return CheckResult("retraction_axioms", True, f"max |ratio - 10| = {worst:.2f}")


def check_feasibility() -> CheckResult:
    """1000 random retractions with t in [0, 10] keep ||U^T U - I|| <= 1e-10."""
    rng = np.random.default_rng(101)
    worst = 0.0
    for i in range(1000):
        point = _random_point(rng, 20, 3)
        tangent = _random_tangent(rng, point)
        t = 10.0 * rng.random()
        retract = retract_qr if i % 2 == 0 else retract_geodesic
        new = retract(point, tangent, t)
        worst = max(
            worst, np.linalg.norm(new.u.T @ new.u - np.eye(new.shape[1]))
        )
    return CheckResult("feasibility", worst <= 1e-10, f"max defect {worst:.2e}")


def check_second_order_defect() -> CheckResult:
    """||retract(U,D,t) - U - tD|| / (t ||D||) decreases monotonically over
    t = 1e-1, 1e-2, 1e-3 (the o(t ||D||) retraction defect)."""
    rng = np.random.default_rng(102)
    for retract in (retract_qr, retract_geodesic):
        for _ in range(50):
            point = _random_point(rng, 30, 4)
            tangent = _random_tangent(rng, point)
            defects = []
            for t in (1e-1, 1e-2, 1e-3):
                diff = retract(point, tangent, t).u - point.u - t * tangent.d
                defects.append(np.linalg.norm(diff) / (t * tangent.norm))
            if not (defects[0] > defects[1] > defects[2]):
                return CheckResult(
                    "second_order_defect", False, f"defects not decreasing: {defects}"
                )
    return CheckResult("second_order_defect", True)


def check_transport_isometry() -> CheckResult:
    """Parallel transport preserves the Frobenius norm to 1e-10 and lands in
    the tangent space at the endpoint (tangency drift <= 1e-9)."""
    rng = np.random.default_rng(103)
    worst_norm, worst_tan = 0.0, 0.0
    for _ in range(200):
        point = _random_point(rng, 25, 4)
        direction = _random_tangent(rng, point)
        vec = _random_tangent(rng, point)
        t = 2.0 * rng.random()
        moved = parallel_transport(point, direction, t, vec)
        worst_norm = max(worst_norm, abs(moved.norm - vec.norm))
        worst_tan = max(worst_tan, np.linalg.norm(moved.base.u.T @ moved.d))
    ok = worst_norm <= 1e-10 and worst_tan <= 1e-9
    return CheckResult(
        "transport_isometry", ok, f"norm drift {worst_norm:.2e}, tangency {worst_tan:.2e}"
    )


def check_distance_sandwich() -> CheckResult:
    """dist_cF <= dist_geo <= 2 dist_cF on 500 random pairs."""
    rng = np.random.default_rng(104)
    for _ in range(500):
        a = _random_point(rng, 15, 3)
        b = _random_point(rng, 15, 3)
        cf, geo = dist_cf(a, b), dist_geo(a, b)
        if not (cf <= geo + 1e-12 and geo <= 2.0 * cf + 1e-12):
            return CheckResult(
                "distance_sandwich", False, f"cf={cf}, geo={geo} violate sandwich"
            )
    return CheckResult("distance_sandwich", True)


def check_geodesic_reconstruction() -> CheckResult:
    """The geodesic launched with velocity A2 diag(theta) A^T reaches the
    target subspace at t = 1 (endpoint distance <= 1e-8), and the velocity
    norm equals dist_geo."""
    rng = np.random.default_rng(105)
    worst = 0.0
    for _ in range(100):
        a = _random_point(rng, 18, 3)
        b = _random_point(rng, 18, 3)
        angles = principal_angles(a, b)
        velocity = connecting_direction(a, angles)
        endpoint = retract_geodesic(a, velocity, 1.0)
        gap = dist_geo(endpoint, b)
        worst = max(worst, gap, abs(velocity.norm - dist_geo(a, b)))
    return CheckResult("geodesic_reconstruction", worst <= 1e-8, f"max gap {worst:.2e}")


# ---------------------------------------------------------------------------
# objectives suite
# ---------------------------------------------------------------------------


def _models(rng):
    quad = QuadraticTraceModel(random_symmetric(24, seed=int(rng.integers(1 << 30))))
    lattice = harmonic_lattice(32, length=8.0, gamma=1.5, well=1.0)
    return [(quad, 24, 4), (lattice, 32, 4)]


def check_orthogonal_invariance() -> CheckResult:
    """E(UP) = E(U) to 1e-10 and grad_G(UP) = grad_G(U) P to 1e-9 over 200
    random (model, U, P) triples."""
    rng = np.random.default_rng(200)
    for _ in range(100):
        for model, n, p in _models(rng):
            point = _random_point(rng, n, p)
            rot = _random_orthogonal(rng, p)
            rotated = StiefelPoint(point.u @ rot)
            e0 = model.value(point.u)
            if abs(model.value(rotated.u) - e0) > 1e-10 * (1.0 + abs(e0)):
                return CheckResult("orthogonal_invariance", False, "energy not invariant")
            g0 = grassmann_gradient(model, point).d
            g1 = grassmann_gradient(model, rotated).d
            if np.linalg.norm(g1 - g0 @ rot) > 1e-9 * (1.0 + np.linalg.norm(g0)):
                return CheckResult(
                    "orthogonal_invariance", False, "gradient not equivariant"
                )
    return CheckResult("orthogonal_invariance", True)


def check_gradient_fd() -> CheckResult:
    """Central finite differences of E match <grad E, D> to 1e-6 relative
    (100 trials per model, step 1e-5)."""
    rng = np.random.default_rng(201)
    eps = 1e-5
    for _ in range(100):
        for model, n, p in _models(rng):
            u = rng.standard_normal((n, p))
            u /= np.linalg.norm(u)
            d = rng.standard_normal((n, p))
            d /= np.linalg.norm(d)
            exact = float(np.sum(model.euclidean_gradient(u) * d))
            fd = (model.value(u + eps * d) - model.value(u - eps * d)) / (2.0 * eps)
            if abs(exact - fd) > 1e-6 * (1.0 + abs(exact)):
                return CheckResult(
                    "gradient_fd", False, f"exact {exact} vs fd {fd}"
                )
    return CheckResult("gradient_fd", True)


def check_gradient_tangency() -> CheckResult:
    """||U^T grad_G E(U)|| <= 1e-10."""
    rng = np.random.default_rng(202)
    worst = 0.0
    for _ in range(100):
        for model, n, p in _models(rng):
            point = _random_point(rng, n, p)
            g = grassmann_gradient(model, point)
            worst = max(worst, np.linalg.norm(point.u.T @ g.d))
    return CheckResult("gradient_tangency", worst <= 1e-10, f"max {worst:.2e}")


def check_hessian_symmetry() -> CheckResult:
    """<hess[D1], D2> = <hess[D2], D1> to 1e-9 relative."""
    rng = np.random.default_rng(203)
    for _ in range(100):
        for model, n, p in _models(rng):
            u = rng.standard_normal((n, p))
            d1 = rng.standard_normal((n, p))
            d2 = rng.standard_normal((n, p))
            lhs = float(np.sum(model.hessian_apply(u, d1) * d2))
            rhs = float(np.sum(model.hessian_apply(u, d2) * d1))
            if abs(lhs - rhs) > 1e-9 * (1.0 + abs(lhs)):
                return CheckResult("hessian_symmetry", False, f"{lhs} vs {rhs}")
    return CheckResult("hessian_symmetry", True)


def check_taylor_expansion() -> CheckResult:
    """Third-order Taylor remainder along the geodesic: the defect of the
    quadratic model drops ~1000x from t = 1e-1 to t = 1e-2."""
    rng = np.random.default_rng(204)
    bad = 0
    trials = 0
    for _ in range(40):
        for model, n, p in _models(rng):
            point = _random_point(rng, n, p)
            tangent = _random_tangent(rng, point)
            tangent = tangent.scaled(1.0 / tangent.norm)
            e0 = model.value(point.u)
            g = float(np.sum(grassmann_gradient(model, point).d * tangent.d))
            hq = grassmann_hessian_qform(model, point, tangent)
            rems = []
            for t in (1e-1, 1e-2):
                et = model.value(retract_geodesic(point, tangent, t).u)
                rems.append(abs(et - e0 - t * g - 0.5 * t * t * hq))
            trials += 1
            # ratio ~ 1000; allow slack for cancellation noise at 1e-2
            if rems[1] > 0 and rems[0] / rems[1] < 100.0:
                bad += 1
    ok = bad <= trials // 20
    return CheckResult("taylor_expansion", ok, f"{bad}/{trials} weak-decay trials")


def check_qform_fd() -> CheckResult:
    """Second finite difference of t -> E(exp(tD)) at 0 matches the Grassmann
    Hessian quadratic form to 1e-4 relative."""
    rng = np.random.default_rng(205)
    t = 1e-4
    for _ in range(100):
        for model, n, p in _models(rng):
            point = _random_point(rng, n, p)
            tangent = _random_tangent(rng, point)
            tangent = tangent.scaled(1.0 / tangent.norm)
            hq = grassmann_hessian_qform(model, point, tangent)
            e0 = model.value(point.u)
            ep = model.value(retract_geodesic(point, tangent, t).u)
            em = model.value(retract_geodesic(point, tangent, -t).u)
            fd = (ep - 2.0 * e0 + em) / (t * t)
            if abs(fd - hq) > 1e-4 * (1.0 + abs(hq)):
                return CheckResult("qform_fd", False, f"hq {hq} vs fd {fd}")
    return CheckResult("qform_fd", True)


# ---------------------------------------------------------------------------
# stepsize suite
# ---------------------------------------------------------------------------


def _random_tuple(rng):
    e_minus_c = -(10.0 ** rng.uniform(-8, 1)) if rng.random() < 0.8 else 0.0
    g = -(10.0 ** rng.uniform(-4, 2))
    hq = (10.0 ** rng.uniform(-4, 3)) * (1.0 if rng.random() < 0.7 else -1.0)
    eta = 10.0 ** rng.uniform(-5, -0.5)
    theta = 10.0 ** rng.uniform(-2, 1)
    norm_d = 10.0 ** rng.uniform(-2, 2)
    return e_minus_c, g, hq, eta, theta, norm_d


def _bisect_bound(e, c, g, hq, eta, hi):
    """Largest t <= hi with zeta(t) >= eta, by bisection (zeta is monotone
    decreasing in t for hq > 0, E <= C)."""
    if ss.estimator_zeta(e, c, g, hq, hi) >= eta:
        return hi
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if ss.estimator_zeta(e, c, g, hq, mid) >= eta:
            lo = mid
        else:
            hi = mid
    return lo


def check_zeta_interval_equivalence() -> CheckResult:
    """t <= acceptable_upper_bound iff (zeta(t) >= eta and t ||D|| <= theta),
    probed at bound * (1 +/- 1e-6) over 1000 tuples, with a bisection
    cross-check of the curvature branch to 1e-10."""
    rng = np.random.default_rng(300)
    for _ in range(1000):
        e_minus_c, g, hq, eta, theta, norm_d = _random_tuple(rng)
        e, c = e_minus_c, 0.0
        bound = ss.acceptable_upper_bound(e, c, g, hq, eta, theta, norm_d)
        trust = theta / norm_d

        t_in = bound * (1.0 - 1e-6)
        if ss.estimator_zeta(e, c, g, hq, t_in) < eta - 1e-10 or t_in * norm_d > theta:
            return CheckResult(
                "zeta_interval_equivalence", False, f"inside point rejected at {t_in}"
            )
        t_out = bound * (1.0 + 1e-6)
        zeta_out = ss.estimator_zeta(e, c, g, hq, t_out)
        if zeta_out >= eta + 1e-10 and t_out * norm_d <= theta:
            return CheckResult(
                "zeta_interval_equivalence", False, f"outside point accepted at {t_out}"
            )
        if hq > 0.0 and bound < trust:
            bis = _bisect_bound(e, c, g, hq, eta, trust)
            zeta_closed = ss.estimator_zeta(e, c, g, hq, bound)
            if abs(zeta_closed - eta) > 1e-10 or abs(bis - bound) > 1e-8 * bound:
                return CheckResult(
                    "zeta_interval_equivalence",
                    False,
                    f"closed form {bound} vs bisection {bis}",
                )
    return CheckResult("zeta_interval_equivalence", True)


def check_improve_step_acceptable() -> CheckResult:
    """improve_step always lands in the acceptable interval (eta <= 1e-4)."""
    rng = np.random.default_rng(301)
    for _ in range(1000):
        e_minus_c, g, hq, _, theta, norm_d = _random_tuple(rng)
        eta = 1e-4
        t = ss.improve_step(g, hq, theta, norm_d)
        zeta = ss.estimator_zeta(e_minus_c, 0.0, g, hq, t)
        if zeta < eta or t * norm_d > theta * (1.0 + 1e-12):
            return CheckResult(
                "improve_step_acceptable", False, f"zeta {zeta} at t {t}"
            )
    return CheckResult("improve_step_acceptable", True)


def check_nm_recursion() -> CheckResult:
    """Over update sequences with E_new below the running reference (what an
    accepted step guarantees): C >= last E, Q in [1, 1/(1-alpha)); with
    alpha = 0 the reference equals the last energy exactly."""
    rng = np.random.default_rng(302)
    for _ in range(200):
        alpha = rng.choice([0.0, 0.3, 0.85, 0.99])
        state = ss.initial_nm_state(float(alpha), float(rng.standard_normal()))
        for _ in range(50):
            # may exceed the previous energy (non-monotone) but stays under C
            e = state.c - abs(rng.standard_normal())
            state = ss.nm_update(state, float(e))
            if state.c < e - 1e-12 * max(1.0, abs(e)):
                return CheckResult("nm_recursion", False, f"C {state.c} < E {e}")
            if not (1.0 <= state.q < 1.0 / (1.0 - alpha) + 1e-12):
                return CheckResult("nm_recursion", False, f"Q {state.q} out of range")
            if alpha == 0.0 and state.c != e:
                return CheckResult("nm_recursion", False, "alpha=0 not exact Armijo")
    return CheckResult("nm_recursion", True)


def check_bb_positivity() -> CheckResult:
    """BB steps are positive and finite whenever the denominators are."""
    rng = np.random.default_rng(303)
    for _ in range(500):
        s = rng.standard_normal((12, 3))
        y = rng.standard_normal((12, 3))
        for fn in (ss.bb_step_1, ss.bb_step_2):
            try:
                t = fn(s, y)
            except ss.DegenerateDenominator:
                continue
            if not (t > 0.0 and np.isfinite(t)):
                return CheckResult("bb_positivity", False, f"step {t}")
    return CheckResult("bb_positivity", True)


# ---------------------------------------------------------------------------
# suite registry
# ---------------------------------------------------------------------------

SUITES: dict[str, list[Callable[[], CheckResult]]] = {
    "geometry": [
        check_retraction_axioms,
        check_feasibility,
        check_second_order_defect,
        check_transport_isometry,
        check_distance_sandwich,
        check_geodesic_reconstruction,
    ],
    "objectives": [
        check_orthogonal_invariance,
        check_gradient_fd,
        check_gradient_tangency,
        check_hessian_symmetry,
        check_taylor_expansion,
        check_qform_fd,
    ],
    "stepsize": [
        check_zeta_interval_equivalence,
        check_improve_step_acceptable,
        check_nm_recursion,
        check_bb_positivity,
    ],
}


def run_suite(name: str) -> list[CheckResult]:
    if name == "all":
        checks = [fn for suite in SUITES.values() for fn in suite]
    elif name in SUITES:
        checks = SUITES[name]
    else:
        raise ValueError(f"unknown suite {name!r}")
    return [fn() for fn in checks]
