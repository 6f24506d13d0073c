#!/usr/bin/env python3
"""Desk-scale strategy comparison table.

Runs adaptive / backtracking / none on the quadratic trace problem and the
nonlinear lattice problem over several seeds, and prints iteration counts,
evaluation counts and final energies side by side.

Usage: python3 scripts/strategy_table.py [--seeds 3] [--eps 1e-8]
"""

import argparse
import time

import numpy as np

from grassopt import (
    QuadraticTraceModel,
    SolveConfig,
    StiefelPoint,
    harmonic_lattice,
    random_symmetric,
    solve,
    thin_qr,
)

STRATEGIES = ("adaptive", "backtracking", "none")


def start_frame(n, p, seed):
    q, _ = thin_qr(np.random.default_rng(seed).standard_normal((n, p)))
    return StiefelPoint(q)


def problems(seed):
    yield "quadratic n=120 p=6", QuadraticTraceModel(random_symmetric(120, seed=seed)), 6
    yield "lattice npts=96 p=4", harmonic_lattice(96, length=10.0, gamma=1.0), 4


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--eps", type=float, default=1e-8)
    ap.add_argument("--max-iter", type=int, default=30000)
    args = ap.parse_args()

    header = f"{'problem':<22} {'seed':<5} {'strategy':<13} {'status':<15} {'iter':>6} {'evals E/R':>12} {'energy':>22} {'wct':>8}"
    print(header)
    print("-" * len(header))
    for seed in range(args.seeds):
        for label, model, p in problems(seed):
            u0 = start_frame(model.a.shape[0], p, seed)
            for strategy in STRATEGIES:
                config = SolveConfig(
                    epsilon=args.eps, max_iter=args.max_iter, strategy=strategy
                )
                tic = time.perf_counter()
                result = solve(model, u0, config)
                wct = time.perf_counter() - tic
                print(
                    f"{label:<22} {seed:<5} {strategy:<13} {result.status.value:<15} "
                    f"{result.iters:>6} "
                    f"{result.total_energy_evals:>6}/{result.total_retraction_evals:<5} "
                    f"{result.final_energy:>22.14e} {wct:>7.2f}s"
                )


if __name__ == "__main__":
    main()
