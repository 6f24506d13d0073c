"""End-to-end acceptance suite.

Each test covers one acceptance criterion and prints a single PASS/FAIL
line (visible with pytest -s / in captured output on failure).
"""

import time

import numpy as np
import pytest

from grassopt import (
    QuadraticTraceModel,
    SolveConfig,
    Status,
    StiefelPoint,
    eigen_oracle,
    harmonic_lattice,
    random_symmetric,
    solve,
    thin_qr,
)
from grassopt.checks import run_suite

ETA = 1e-4
ALPHA = 0.85


def report(index, label, passed):
    print(f"ACCEPTANCE {index} {label}: {'PASS' if passed else 'FAIL'}")
    assert passed, f"criterion {index} ({label}) failed"


def start_frame(n, p, seed):
    rng = np.random.default_rng(seed)
    q, _ = thin_qr(rng.standard_normal((n, p)))
    return StiefelPoint(q)


def quadratic_200():
    return QuadraticTraceModel(random_symmetric(200, seed=7))


def test_criterion_1_eigen_oracle_convergence():
    model = quadratic_200()
    u0 = start_frame(200, 10, seed=7)
    config = SolveConfig(epsilon=1e-8, max_iter=30000, strategy="adaptive", alpha=ALPHA)
    tic = time.perf_counter()
    result = solve(model, u0, config)
    runtime = time.perf_counter() - tic
    oracle, _ = eigen_oracle(model, 10)
    ok = (
        result.status is Status.CONVERGED
        and result.final_residual <= 1e-8
        and abs(result.final_energy - oracle) <= 1e-6 * abs(oracle)
        and runtime <= 60.0
    )
    report(1, "eigen-oracle convergence", ok)


def test_criterion_2_strategy_agreement():
    problems = [
        (quadratic_200(), start_frame(200, 10, seed=7)),
        (harmonic_lattice(128, length=10.0, gamma=1.0), start_frame(128, 4, seed=7)),
    ]
    ok = True
    for model, u0 in problems:
        energies = []
        for strategy in ("adaptive", "backtracking"):
            config = SolveConfig(
                epsilon=1e-8, max_iter=30000, strategy=strategy, alpha=ALPHA
            )
            result = solve(model, u0, config)
            ok = ok and result.status is Status.CONVERGED
            energies.append(result.final_energy)
        ok = ok and abs(energies[0] - energies[1]) <= 1e-7 * (1.0 + abs(energies[0]))
    report(2, "strategy agreement on both problems", ok)


def test_criterion_3_zero_probe_counters():
    # condition number 1e4 forces backtracks for the Armijo strategy
    model = QuadraticTraceModel(np.diag(np.logspace(0.0, 4.0, 60)))
    u0 = start_frame(60, 3, seed=5)

    adaptive = solve(
        model, u0, SolveConfig(epsilon=1e-6, max_iter=30000, strategy="adaptive")
    )
    exact = (
        adaptive.status is Status.CONVERGED
        and adaptive.total_energy_evals == adaptive.iters + 1
        and adaptive.total_retraction_evals == adaptive.iters
    )

    backtracking = solve(
        model, u0, SolveConfig(epsilon=1e-6, max_iter=30000, strategy="backtracking")
    )
    shrinks = sum(rec.backtracks for rec in backtracking.trace)
    costly = (
        backtracking.status is Status.CONVERGED
        and shrinks > 0
        and backtracking.total_retraction_evals == backtracking.iters + shrinks
        and backtracking.total_energy_evals
        == backtracking.iters + 1 + backtracking.iters + shrinks
    )
    report(3, "adaptive zero-probe vs backtracking cost", exact and costly)


def test_criterion_4_geometry_suite():
    tic = time.perf_counter()
    results = run_suite("geometry")
    runtime = time.perf_counter() - tic
    ok = all(r.passed for r in results) and runtime <= 30.0
    for r in results:
        if not r.passed:
            print(f"  geometry check failed: {r.name} ({r.detail})")
    report(4, "geometry suite", ok)


def test_criterion_5_stepsize_algebra_suite():
    results = run_suite("stepsize")
    for r in results:
        if not r.passed:
            print(f"  stepsize check failed: {r.name} ({r.detail})")
    report(5, "step-size algebra suite", all(r.passed for r in results))


def test_criterion_6_calculus_suite():
    results = run_suite("objectives")
    for r in results:
        if not r.passed:
            print(f"  calculus check failed: {r.name} ({r.detail})")
    report(6, "energy calculus suite", all(r.passed for r in results))


def test_criterion_7_qualitative_reproduction():
    # Part A: with the raw BB step accepted unjudged, a strongly nonlinear
    # lattice instance with p = 8 diverges for at least one seed while the
    # adaptive strategy converges on the same start.
    model = harmonic_lattice(32, length=10.0, gamma=1e6)
    witnessed = False
    for seed in (0, 1):
        u0 = start_frame(32, 8, seed)
        none_run = solve(
            model, u0, SolveConfig(epsilon=1e-8, max_iter=20000, strategy="none")
        )
        adaptive_run = solve(
            model, u0, SolveConfig(epsilon=1e-8, max_iter=20000, strategy="adaptive")
        )
        if (
            none_run.status is not Status.CONVERGED
            and adaptive_run.status is Status.CONVERGED
        ):
            witnessed = True
            break

    # Part B (reported, never failing): alternating BB should not take more
    # iterations than the worse of the two pure modes.
    violations = []
    for seed in range(5):
        model_q = QuadraticTraceModel(random_symmetric(60, seed=seed))
        u0 = start_frame(60, 3, seed + 100)
        iters = {}
        for mode in ("odd_even", "bb1", "bb2"):
            result = solve(
                model_q,
                u0,
                SolveConfig(
                    epsilon=1e-8, max_iter=30000, strategy="backtracking", bb_mode=mode
                ),
            )
            iters[mode] = result.iters if result.status is Status.CONVERGED else 30001
        if iters["odd_even"] > max(iters["bb1"], iters["bb2"]):
            violations.append((seed, iters))
    if violations:
        print(f"  note: alternating-BB trend violated on seeds {violations} (flagged, not failed)")

    report(7, "no-judgment failure + alternating-BB trend", witnessed)


def test_criterion_8_non_monotone_behavior():
    model = QuadraticTraceModel(np.diag(np.logspace(0.0, 4.0, 60)))
    u0 = start_frame(60, 3, seed=5)
    result = solve(
        model,
        u0,
        SolveConfig(epsilon=1e-6, max_iter=30000, strategy="backtracking", alpha=ALPHA),
    )
    assert result.status is Status.CONVERGED

    # replay the reference recursion from the trace and look for an accepted
    # step that raises the energy while still satisfying the reference test
    witnessed = False
    c, q = result.trace[0].energy, 1.0
    for rec, nxt in zip(result.trace, result.trace[1:]):
        slope = -rec.residual**2  # steepest descent: <grad, D> = -||grad||^2
        decrease_ok = nxt.energy - c <= ETA * rec.step * slope + 1e-12 * (1 + abs(c))
        if nxt.energy > rec.energy and decrease_ok:
            witnessed = True
            break
        q_new = ALPHA * q + 1.0
        c = (ALPHA * q * c + nxt.energy) / q_new
        q = q_new
    report(8, "non-monotone accepted steps", witnessed)
