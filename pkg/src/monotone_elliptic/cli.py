"""Config-driven command-line entry point.

Commands: ``solve``, ``check-conditions``, ``exhaust``, ``poisson-test``,
each taking ``--config PATH`` plus optional ``--out DIR`` and ``--seed N``.
Every run writes a JSON report with stable key order carrying the config
echo, condition-check results, the subsolution certificate, the iteration
trace and every constant needed to re-derive the bound checks.

Exit codes: 0 converged and all invariants pass, 2 not converged,
1 any error (with the failing invariant named on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import exhaustion as exh
from . import iteration as it
from .config import RunConfig, compile_expression, parse_config
from .errors import MonotoneEllipticError
from .grids import ScalarField, write_field_csv, write_fields_binary
from .poisson import (
    DEFAULT_TAU_LIN,
    LinearSolveSettings,
    check_sup_bound,
    default_settings,
    make_rhs,
    residual_sup,
    solve_dirichlet,
)
from .subsolution import build_subsolution, chain_violations
from .systems import (
    verify_continuity_from_below,
    verify_cooperative,
    verify_growth,
    verify_lower_envelope,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def _json_default(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_report(report: dict, out_dir: Path, name: str) -> Path:
    path = out_dir / name
    path.write_text(json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _write_solution_fields(out_dir: Path, grid, fields, formats, suffix="") -> list[str]:
    written = []
    for l, f in enumerate(fields):
        if "csv" in formats:
            p = out_dir / f"u{l}{suffix}.csv"
            write_field_csv(p, f)
            written.append(str(p))
        if "binary" in formats:
            p = out_dir / f"u{l}{suffix}.bin"
            write_fields_binary(p, grid, [f])
            written.append(str(p))
    return written


def _run_condition_checks(spec, seed: int, opts: dict) -> tuple[dict, bool, str]:
    kwargs = {}
    if "sample_count" in opts:
        kwargs["sample_count"] = opts["sample_count"]
    box = {}
    if "box_radius" in opts:
        box["box_radius"] = opts["box_radius"]
    results = {}
    note = ""
    if spec.growth is not None:
        results["growth"] = verify_growth(spec, seed=seed, **kwargs, **box).to_dict()
    else:
        results["growth"] = None
    results["lower_envelope"] = verify_lower_envelope(
        spec, seed=seed, **kwargs
    ).to_dict()
    results["cooperative"] = verify_cooperative(spec, seed=seed, **box).to_dict()
    results["continuity_from_below"] = verify_continuity_from_below(spec, seed=seed).to_dict()
    ok = all(r["passed"] for r in results.values() if r is not None)
    if results["growth"] is not None and not results["growth"]["passed"]:
        note = (
            "condition (a) growth check failed; a single-equation system can instead "
            "declare the fixed-point path — condition (a') — by omitting the growth "
            "envelope and setting bound.path = 'fixed_point'"
        )
    return results, ok, note


def _settings_from_config(cfg: RunConfig, grid, criteria: it.StoppingCriteria):
    tau = cfg.iteration.tau_lin if cfg.iteration.tau_lin is not None else criteria.tau_lin()
    if cfg.iteration.method is None:
        return default_settings(grid, tolerance=tau)
    return LinearSolveSettings(method=cfg.iteration.method, tolerance=tau)


def _cmd_check_conditions(cfg: RunConfig, out_dir: Path, seed: int) -> int:
    grid = cfg.domain.build()
    spec = cfg.system.instantiate(grid)
    results, ok, note = _run_condition_checks(spec, seed, cfg.conditions)
    report = {
        "command": "check_conditions",
        "seed": seed,
        "config": cfg.echo,
        "conditions": results,
        "note": note,
    }
    _write_report(report, out_dir, cfg.output.report)
    if not ok:
        print(f"condition checks failed; {note}" if note else "condition checks failed",
              file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def _cmd_solve(cfg: RunConfig, out_dir: Path, seed: int) -> int:
    grid = cfg.domain.build()
    spec = cfg.system.instantiate(grid)
    if cfg.bound_path == "fixed_point" and spec.growth is not None:
        print(
            "error: bound.path = 'fixed_point' requires omitting the growth envelope",
            file=sys.stderr,
        )
        return EXIT_ERROR

    results, ok, note = _run_condition_checks(spec, seed, cfg.conditions)
    report: dict = {
        "command": "solve",
        "seed": seed,
        "config": cfg.echo,
        "conditions": results,
        "note": note,
    }
    if not ok:
        _write_report(report, out_dir, cfg.output.report)
        print(f"condition checks failed; {note}" if note else "condition checks failed",
              file=sys.stderr)
        return EXIT_ERROR

    delta = cfg.subsolution_delta
    if spec.growth is None:
        x0 = it.fixed_point_bound(
            it.scalar_nonlinearity(spec), spec.lambda_upper, grid.slab_diameter,
            x_max=cfg.bound_x_max,
        )
        if x0 is None:
            print(
                "error: no positive fixed point of (d^2/8)*lambda*f(x) on the scan range; "
                "condition (a') cannot be certified and the run is refused",
                file=sys.stderr,
            )
            return EXIT_ERROR
        delta = min(delta, x0 / 2.0)

    criteria = it.StoppingCriteria(
        tol_step=cfg.iteration.tol_step,
        tol_residual=cfg.iteration.tol_residual,
        max_iters=cfg.iteration.max_iters,
    )
    settings = _settings_from_config(cfg, grid, criteria)
    cert = build_subsolution(grid, spec, delta)
    solution = it.run(grid, spec, cert, criteria, settings,
                      fixed_point_x_max=cfg.bound_x_max)

    report["subsolution"] = cert.summary()
    report["subsolution"]["chain_violations"] = chain_violations(grid, spec, cert)
    report["bounds"] = {
        "slab_diameter": grid.slab_diameter,
        "Lambda_lower": spec.ball.lambda_lower,
        "Lambda_upper": spec.lambda_upper,
        "C": cert.c_const,
        "eta": cert.eta,
        **it.check_solution_bounds(solution, spec),
    }
    report["iteration"] = {
        "converged": solution.converged,
        "iterations": solution.iterations,
        "final_step_delta": solution.info["final_step_delta"],
        "final_residual": solution.info["final_residual"],
        "sup_norms": solution.sup_norms,
        "trace": [t.to_dict() for t in solution.trace],
    }
    report["fields_written"] = _write_solution_fields(
        out_dir, grid, solution.fields, cfg.output.formats
    )
    _write_report(report, out_dir, cfg.output.report)
    return EXIT_OK if solution.converged else EXIT_NOT_CONVERGED


def _cmd_exhaust(cfg: RunConfig, out_dir: Path, seed: int) -> int:
    if cfg.domain.type != "strip" or cfg.exhaust_lengths is None:
        print("error: exhaust needs a strip domain and an exhaustion.lengths list",
              file=sys.stderr)
        return EXIT_ERROR
    plan = exh.ExhaustionPlan(
        strip_halfwidth=cfg.domain.halfwidth,
        lengths=cfg.exhaust_lengths,
        spacing=cfg.domain.spacing,
    )
    criteria = it.StoppingCriteria(
        tol_step=cfg.iteration.tol_step,
        tol_residual=cfg.iteration.tol_residual,
        max_iters=cfg.iteration.max_iters,
    )
    result = exh.run_exhaustion(
        plan, cfg.system, criteria, delta=cfg.subsolution_delta
    )
    largest = result.runs[-1]
    D = max(max(r.solution.sup_norms) for r in result.runs)
    decay = exh.boundary_decay_check(largest.solution, D)

    # condition checks on the largest truncation (discontinuous kinds are
    # already rejected by the plan)
    spec_big = cfg.system.instantiate(largest.grid)
    results, ok, note = _run_condition_checks(spec_big, seed, cfg.conditions)

    written = []
    for r in result.runs:
        written += _write_solution_fields(
            out_dir, r.grid, r.solution.fields, cfg.output.formats, suffix=f"_L{r.length:g}"
        )
    report = {
        "command": "exhaust",
        "seed": seed,
        "config": cfg.echo,
        "conditions": results,
        "note": note,
        "exhaustion": result.summary(),
        "boundary_decay": decay.to_dict(),
        "bounds": {
            "slab_diameter": largest.grid.slab_diameter,
            "Lambda_lower": cfg.system.ball.lambda_lower,
            "Lambda_upper": spec_big.lambda_upper,
            "D": D,
        },
        "fields_written": written,
    }
    _write_report(report, out_dir, cfg.output.report)
    if not ok:
        print("condition checks failed on the largest truncation", file=sys.stderr)
        return EXIT_ERROR
    if not result.summary()["window_deltas_decreasing"]:
        print("error: window deltas are not strictly decreasing across truncations",
              file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def _cmd_poisson_test(cfg: RunConfig, out_dir: Path, seed: int) -> int:
    grid = cfg.domain.build()
    X, Y = grid.node_coords()
    expr = compile_expression(cfg.poisson_rhs)
    rhs = make_rhs(grid, np.broadcast_to(np.asarray(expr(X, Y), dtype=float), grid.dims))
    settings = default_settings(grid, tolerance=DEFAULT_TAU_LIN)
    u = solve_dirichlet(grid, rhs, settings)
    res = residual_sup(grid, u, rhs)
    bound_report = check_sup_bound(u, rhs, grid.slab_diameter, settings.tolerance)
    report = {
        "command": "poisson_test",
        "seed": seed,
        "config": cfg.echo,
        "poisson": {
            "rhs": cfg.poisson_rhs,
            "residual_sup": res,
            "sup_u": u.sup_norm,
            "bound": bound_report.bound,
            "attained": bound_report.attained,
            "margin": bound_report.margin,
            "slab_diameter": grid.slab_diameter,
        },
        "fields_written": _write_solution_fields(out_dir, grid, [u], cfg.output.formats),
    }
    _write_report(report, out_dir, cfg.output.report)
    return EXIT_OK


_DISPATCH = {
    "solve": _cmd_solve,
    "check_conditions": _cmd_check_conditions,
    "exhaust": _cmd_exhaust,
    "poisson_test": _cmd_poisson_test,
}


def execute(command: str, config_path, out_dir=None, seed=None) -> int:
    """Parse the config, run one command, write artifacts; returns exit code."""
    try:
        cfg = parse_config(config_path)
        if cfg.command is not None and cfg.command != command:
            raise MonotoneEllipticError(
                f"config declares command {cfg.command!r} but {command!r} was requested"
            )
        if command in ("solve", "check_conditions", "exhaust") and cfg.system is None:
            raise MonotoneEllipticError(f"{command} requires a system section in the config")
        out = Path(out_dir) if out_dir is not None else Path(cfg.output.directory)
        out.mkdir(parents=True, exist_ok=True)
        used_seed = cfg.seed if seed is None else int(seed)
        return _DISPATCH[command](cfg, out, used_seed)
    except MonotoneEllipticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="monotone-elliptic",
        description="Monotone-iteration solver for cooperative sublinear elliptic systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "check-conditions", "exhaust", "poisson-test"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None,
                       help="sampler seed (overrides config)")
    args = parser.parse_args(argv)
    return execute(args.command.replace("-", "_"), args.config, args.out, args.seed)


if __name__ == "__main__":
    sys.exit(main())
