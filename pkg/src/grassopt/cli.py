"""Command-line harness: run a single solve, compare strategies on one
problem instance, or run the property-check suites.

Exit codes: 0 success, 1 usage/config error, 2 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from .checks import SUITES, run_suite
from .linalg import thin_qr
from .manifold import StiefelPoint
from .objectives import (
    EnergyModel,
    QuadraticTraceModel,
    harmonic_lattice,
    load_matrix,
    random_symmetric,
)
from .search import STRATEGIES, SolveConfig, SolveResult, Status, solve
from .stepsize import BB_MODES, StepParams

TRACE_COLUMNS = (
    "iter",
    "energy",
    "residual",
    "step",
    "backtracks",
    "estimator",
    "direction_reset",
    "elapsed_s",
)


class ConfigError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17e}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grassopt",
        description="Line-search minimization on the Stiefel/Grassmann manifold",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_problem_flags(p):
        p.add_argument("--config", help="flat key=value file with flag defaults")
        p.add_argument("--problem", choices=["quadratic", "lattice"], default="quadratic")
        p.add_argument("--n", type=int, default=50, help="quadratic matrix size")
        p.add_argument("--p", type=int, default=3, help="number of columns")
        p.add_argument("--matrix-file", help="dense symmetric matrix file (quadratic)")
        p.add_argument("--npts", type=int, default=128, help="lattice grid size")
        p.add_argument("--length", type=float, default=10.0, help="lattice domain length")
        p.add_argument("--gamma", type=float, default=1.0, help="interaction strength")
        p.add_argument("--well", type=float, default=1.0, help="harmonic well depth")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--eta", type=float, default=1e-4)
        p.add_argument("--alpha", type=float, default=0.85)
        p.add_argument("--k", type=float, default=0.5)
        p.add_argument("--theta", type=float, default=0.2)
        p.add_argument("--t-min", type=float, default=1e-20)
        p.add_argument("--first-step", type=float, default=1e-2)
        p.add_argument("--eps", type=float, default=1e-12)
        p.add_argument("--max-iter", type=int, default=30000)
        p.add_argument("--retraction", choices=["qr", "geodesic"], default="qr")
        p.add_argument("--direction", choices=["steepest", "cg_restart"], default="steepest")
        p.add_argument("--cg-restart-period", type=int, default=50)
        p.add_argument("--out", help="output path (trace CSV / comparison table)")
        p.add_argument("--format", choices=["csv", "json"], default="csv")

    run_p = sub.add_parser("run", help="solve one instance and write its trace")
    add_problem_flags(run_p)
    run_p.add_argument("--strategy", choices=STRATEGIES, default="adaptive")
    run_p.add_argument("--bb-mode", choices=BB_MODES, default="odd_even")

    cmp_p = sub.add_parser("compare", help="run several strategies on one instance")
    add_problem_flags(cmp_p)
    cmp_p.add_argument(
        "--strategy",
        action="append",
        choices=STRATEGIES,
        help="repeatable; default: adaptive + backtracking",
    )
    cmp_p.add_argument(
        "--bb-mode", action="append", choices=BB_MODES, help="repeatable; default: odd_even"
    )

    chk_p = sub.add_parser("check", help="run the property suites")
    chk_p.add_argument(
        "suite", nargs="?", default="all", choices=sorted(SUITES) + ["all"]
    )
    return parser


def apply_config_file(args: argparse.Namespace) -> None:
    """Overlay a flat key=value file; command-line flags keep priority only
    for flags the file does not mention (file entries overwrite defaults and
    explicit flags alike, simplest flat semantics)."""
    if not getattr(args, "config", None):
        return
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        current = getattr(args, attr)
        try:
            if isinstance(current, bool):
                parsed = value.lower() in ("1", "true", "yes")
            elif isinstance(current, int):
                parsed = int(value)
            elif isinstance(current, float):
                parsed = float(value)
            else:
                parsed = value
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
        setattr(args, attr, parsed)


def build_model(args) -> EnergyModel:
    if args.problem == "quadratic":
        if args.matrix_file:
            mat = load_matrix(args.matrix_file)
        else:
            mat = random_symmetric(args.n, seed=args.seed)
        if args.p > mat.shape[0]:
            raise ConfigError("p must not exceed n")
        return QuadraticTraceModel(mat)
    if args.npts < args.p:
        raise ConfigError("p must not exceed npts")
    return harmonic_lattice(args.npts, length=args.length, gamma=args.gamma, well=args.well)


def build_start(args, model: EnergyModel) -> StiefelPoint:
    n = model.a.shape[0]
    rng = np.random.default_rng(args.seed)
    q, _ = thin_qr(rng.standard_normal((n, args.p)))
    return StiefelPoint(q)


def build_solver_config(args, strategy: str, bb_mode: str) -> SolveConfig:
    params = StepParams(eta=args.eta, t_min=args.t_min, k=args.k, theta=args.theta)
    return SolveConfig(
        epsilon=args.eps,
        max_iter=args.max_iter,
        step_params=params,
        alpha=args.alpha,
        strategy=strategy,
        bb_mode=bb_mode,
        first_step=args.first_step,
        direction=args.direction,
        retraction=args.retraction,
        cg_restart_period=args.cg_restart_period,
        seed=args.seed,
    )


def write_trace(result: SolveResult, path: Path, fmt: str) -> None:
    rows = [
        {
            "iter": rec.iter,
            "energy": _fmt(rec.energy),
            "residual": _fmt(rec.residual),
            "step": _fmt(rec.step),
            "backtracks": rec.backtracks,
            "estimator": "" if rec.estimator is None else _fmt(rec.estimator),
            "direction_reset": int(rec.direction_reset),
            "elapsed_s": _fmt(rec.elapsed),
        }
        for rec in result.trace
    ]
    if fmt == "json":
        path.write_text(json.dumps(rows, indent=1))
        return
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TRACE_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def read_trace(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def summary_dict(result: SolveResult, wallclock: float) -> dict:
    return {
        "status": result.status.value,
        "iters": result.iters,
        "final_energy": result.final_energy,
        "final_residual": result.final_residual,
        "energy_evals": result.total_energy_evals,
        "retraction_evals": result.total_retraction_evals,
        "wallclock_s": wallclock,
    }


def cmd_run(args) -> int:
    model = build_model(args)
    u0 = build_start(args, model)
    config = build_solver_config(args, args.strategy, args.bb_mode)
    tic = time.perf_counter()
    result = solve(model, u0, config)
    wallclock = time.perf_counter() - tic

    out = Path(args.out) if args.out else Path(f"trace_{args.problem}_{args.strategy}.csv")
    write_trace(result, out, args.format)
    summary = summary_dict(result, wallclock)
    summary_path = out.with_suffix(out.suffix + ".summary.json")
    summary_path.write_text(json.dumps(summary, indent=1))
    print(json.dumps(summary, indent=1))
    if result.status is Status.CONVERGED:
        return 0
    if result.status is Status.MAX_ITERATIONS:
        return 2
    print(f"error: {result.diagnostic}", file=sys.stderr)
    return 1


COMPARE_COLUMNS = (
    "strategy",
    "energy",
    "iter",
    "final_residual",
    "wct_s",
    "atpi_s",
    "energy_evals",
    "retraction_evals",
    "status",
    "bb_mode",
    "flagged",
)


def cmd_compare(args) -> int:
    strategies = args.strategy or ["adaptive", "backtracking"]
    bb_modes = args.bb_mode or ["odd_even"]
    model = build_model(args)
    u0 = build_start(args, model)  # shared start: fairness across strategies

    rows = []
    for strategy in strategies:
        for bb_mode in bb_modes:
            config = build_solver_config(args, strategy, bb_mode)
            tic = time.perf_counter()
            result = solve(model, u0, config)
            wct = time.perf_counter() - tic
            rows.append(
                {
                    "strategy": strategy,
                    "energy": result.final_energy,
                    "iter": result.iters,
                    "final_residual": result.final_residual,
                    "wct_s": wct,
                    "atpi_s": wct / max(1, result.iters),
                    "energy_evals": result.total_energy_evals,
                    "retraction_evals": result.total_retraction_evals,
                    "status": result.status.value,
                    "bb_mode": bb_mode,
                    "flagged": "",
                }
            )

    converged = [r for r in rows if r["status"] == Status.CONVERGED.value]
    if converged:
        ref = converged[0]["energy"]
        for row in converged:
            if abs(row["energy"] - ref) > 1e-7 * (1.0 + abs(ref)):
                row["flagged"] = "energy_mismatch"

    for row in rows:
        label = row["strategy"] if len(bb_modes) == 1 else f"{row['strategy']}/{row['bb_mode']}"
        print(
            f"{label:<24} {row['status']:<14} E={row['energy']: .12e} "
            f"iter={row['iter']:<6} res={row['final_residual']:.3e} "
            f"evals={row['energy_evals']}/{row['retraction_evals']} {row['flagged']}"
        )

    out = Path(args.out) if args.out else Path(f"compare_{args.problem}.csv")
    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=COMPARE_COLUMNS)
        writer.writeheader()
        for row in rows:
            formatted = dict(row)
            for key in ("energy", "final_residual", "wct_s", "atpi_s"):
                formatted[key] = _fmt(row[key])
            writer.writerow(formatted)
    return 0


def cmd_check(args) -> int:
    results = run_suite(args.suite)
    failed = 0
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        detail = f"  ({res.detail})" if res.detail else ""
        print(f"[{tag}] {res.name}{detail}")
        failed += not res.passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        apply_config_file(args) if args.command in ("run", "compare") else None
        if args.command == "run":
            return cmd_run(args)
        if args.command == "compare":
            return cmd_compare(args)
        return cmd_check(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
