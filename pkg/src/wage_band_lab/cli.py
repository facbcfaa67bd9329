"""Command-line interface: solve, optimize, frontier, sweep, profile,
validate.

Each command reads an optional INI config plus flags (flags win),
runs the corresponding solver, and writes deterministic CSV/JSON
artifacts (plus SVG figures with --figures) into the output
directory. Exit codes: 0 success, 1 solver failure, 2 bad
configuration.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, assemble
from .equilibrium import solve_from_band, solve_from_thresholds
from .errors import ConfigError, DomainError, WageBandError
from .model import validate_assumptions
from .optimizer import (
    FULL,
    NO_INTERVENTION,
    frontier,
    optimize,
    optimize_all,
    sweep,
)
from .output import write_csv, write_json
from .welfare import (
    firm_profit_profile,
    outcome_distributions,
    worker_utility_profile,
)

_PATH_SAMPLE_LIMIT = 400


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="INI file with model/policy/search/output sections")
    common.add_argument("--out", metavar="DIR",
                        help="output directory (default: out)")
    common.add_argument("--figures", action="store_true", default=None,
                        help="also render SVG figures")
    common.add_argument("--threads", type=int, metavar="N",
                        help="worker threads for sweeps")
    common.add_argument("--model", choices=("parametric", "example"),
                        help="model variant")

    parser = argparse.ArgumentParser(
        prog="wage-band-lab",
        description="Wage-band equilibria, optimal policy, and welfare"
                    " experiments for a signaling labor market.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", parents=[common],
                           help="equilibrium for one wage or ability band")
    _add_band_flags(solve)

    opt = sub.add_parser("optimize", parents=[common],
                         help="best policy for a welfare weight")
    opt.add_argument("--omega", type=float, help="weight on firm surplus")
    opt.add_argument("--constraint",
                     choices=(FULL, "MinWageOnly", NO_INTERVENTION),
                     help="policy instrument set (default: Full)")

    front = sub.add_parser("frontier", parents=[common],
                           help="surplus possibility set and its frontier")
    front.add_argument("--grid", type=int, metavar="N",
                       help="bands per axis (default: 40)")

    swp = sub.add_parser("sweep", parents=[common],
                         help="optimal policy as one parameter varies")
    swp.add_argument("--param", required=True,
                     help="model parameter to vary (a, q, rho, b)")
    swp.add_argument("--from", dest="from_value", type=float, required=True,
                     metavar="X", help="first parameter value")
    swp.add_argument("--to", dest="to_value", type=float, required=True,
                     metavar="Y", help="last parameter value")
    swp.add_argument("--steps", type=int, required=True,
                     help="number of values, endpoints included")
    swp.add_argument("--omega", type=float, help="weight on firm surplus")

    prof = sub.add_parser("profile", parents=[common],
                          help="per-agent outcomes against no intervention")
    prof.add_argument("--omega", type=float,
                      help="profile the optimal band at this weight")
    _add_band_flags(prof)

    sub.add_parser("validate", parents=[common],
                   help="spot-check the maintained model assumptions")
    return parser


def _add_band_flags(command: argparse.ArgumentParser) -> None:
    command.add_argument("--t-lo", dest="t_lo", type=float, help="wage floor")
    command.add_argument("--t-hi", dest="t_hi", type=float, help="wage cap")
    command.add_argument("--z-lo", dest="z_lo", type=float,
                         help="entry ability threshold")
    command.add_argument("--z-hi", dest="z_hi", type=float,
                         help="pooling ability threshold")


def _overrides(args: argparse.Namespace) -> dict:
    return {
        ("model", "variant"): getattr(args, "model", None),
        ("output", "directory"): getattr(args, "out", None),
        ("output", "figures"): getattr(args, "figures", None),
        ("search", "threads"): getattr(args, "threads", None),
        ("search", "resolution"): getattr(args, "grid", None),
        ("policy", "omega"): getattr(args, "omega", None),
        ("policy", "constraint"): getattr(args, "constraint", None),
        ("policy", "t_lo"): getattr(args, "t_lo", None),
        ("policy", "t_hi"): getattr(args, "t_hi", None),
        ("policy", "z_lo"): getattr(args, "z_lo", None),
        ("policy", "z_hi"): getattr(args, "z_hi", None),
    }


def _solve_requested_band(cfg: RunConfig, model):
    """Equilibrium for the explicitly configured band (exactly one side)."""
    pol = cfg.policy
    wage_given = pol.t_lo is not None or pol.t_hi is not None
    ability_given = pol.z_lo is not None or pol.z_hi is not None
    if wage_given and ability_given:
        raise ConfigError(
            "give exactly one band: wages (--t-lo/--t-hi) or abilities"
            " (--z-lo/--z-hi), not both")
    if not wage_given and not ability_given:
        raise ConfigError(
            "give exactly one band: wages (--t-lo/--t-hi) or abilities"
            " (--z-lo/--z-hi)")
    if wage_given:
        t_lo = pol.t_lo if pol.t_lo is not None else model.effective_floor
        t_hi = pol.t_hi if pol.t_hi is not None else math.inf
        return solve_from_band((t_lo, t_hi), model)
    z_lo = pol.z_lo if pol.z_lo is not None else model.z_min
    z_hi = pol.z_hi if pol.z_hi is not None else model.z_max
    return solve_from_thresholds((z_lo, z_hi), model)


def _path_rows(eq) -> list:
    if eq.path is None:
        return []
    return list(zip(eq.path.s, eq.path.tau, eq.path.mu))


def _path_sample(eq) -> list:
    if eq.path is None:
        return []
    n = len(eq.path.s)
    stride = max(1, math.ceil(n / _PATH_SAMPLE_LIMIT))
    index = list(range(0, n, stride))
    if index[-1] != n - 1:
        index.append(n - 1)
    return [
        {"s": float(eq.path.s[i]), "tau": float(eq.path.tau[i]),
         "mu": float(eq.path.mu[i])}
        for i in index
    ]


def _equilibrium_payload(eq) -> dict:
    return {
        "kind": eq.kind,
        "z_lo": eq.z_lo,
        "z_hi": eq.z_hi,
        "t_lo": eq.band.t_lo,
        "t_hi": eq.band.t_hi,
        "s_lo": eq.boundary.s_lo,
        "s_hi": eq.pooling.s_hi if eq.pooling is not None else None,
        "path": _path_sample(eq),
    }


def cmd_solve(cfg: RunConfig, args, out: Path) -> None:
    model = cfg.build_model()
    eq = _solve_requested_band(cfg, model)
    write_json(out / "equilibrium.json", _equilibrium_payload(eq))
    write_csv(out / "path.csv", ["s", "tau", "mu"], _path_rows(eq))
    if cfg.output.figures:
        from .figures import schedule_figure

        schedule_figure(eq, out / "schedules.svg")
    band = (f"[{eq.band.t_lo:g}, "
            + ("none" if math.isinf(eq.band.t_hi) else f"{eq.band.t_hi:g}")
            + "]")
    print(f"solve: kind={eq.kind} wages={band}"
          f" abilities=[{eq.z_lo:g}, {eq.z_hi:g}]")


def cmd_optimize(cfg: RunConfig, args, out: Path) -> None:
    model = cfg.build_model()
    omega = cfg.policy.omega
    constraint = cfg.policy.constraint
    if constraint == NO_INTERVENTION:
        best = optimize(model, omega, constraint)
        reference = best
    else:
        policies = optimize_all(model, omega, search=cfg.search)
        best = policies[constraint]
        reference = policies[NO_INTERVENTION]
    gain = None
    if abs(reference.welfare) > 1e-15:
        gain = 100.0 * (best.welfare - reference.welfare) / abs(reference.welfare)
    payload = {
        "constraint": best.constraint,
        "omega": best.omega,
        "kind": best.kind,
        "z_lo": best.z_lo,
        "z_hi": best.z_hi,
        "t_lo": best.t_lo,
        "t_hi": best.t_hi,
        "welfare": best.welfare,
        "worker_surplus": best.report.worker_surplus,
        "firm_surplus": best.report.firm_surplus,
        "no_intervention": {
            "welfare": reference.welfare,
            "worker_surplus": reference.report.worker_surplus,
            "firm_surplus": reference.report.firm_surplus,
        },
        "gain_pct": gain,
    }
    write_json(out / "optimal_policy.json", payload)
    gain_text = "n/a" if gain is None else f"{gain:.3f}%"
    print(f"optimize: {constraint} at omega={omega:g} ->"
          f" abilities=[{best.z_lo:.6g}, {best.z_hi:.6g}]"
          f" welfare={best.welfare:.9g} gain={gain_text}")


def cmd_frontier(cfg: RunConfig, args, out: Path) -> None:
    model = cfg.build_model()
    result = frontier(model, resolution=cfg.resolution, search=cfg.search)
    header = ["z_lo", "z_hi", "worker_surplus", "firm_surplus"]

    def point_rows(points):
        return [(p.z_lo, p.z_hi, p.worker_surplus, p.firm_surplus)
                for p in points]

    write_csv(out / "possibility.csv", header, point_rows(result.points))
    write_csv(out / "frontier.csv", header, point_rows(result.frontier_points))
    base = result.no_intervention
    write_json(out / "convexity.json", {
        "resolution": cfg.resolution,
        "points": len(result.points),
        "pareto_points": len(result.pareto),
        "frontier_points": len(result.frontier),
        "convexity_violations": result.convexity_violations,
        "no_intervention": {
            "worker_surplus": base.worker_surplus,
            "firm_surplus": base.firm_surplus,
        },
        "no_intervention_dominated": result.no_intervention_dominated,
    })
    if cfg.output.figures:
        from .figures import frontier_figure

        frontier_figure(result, out / "frontier.svg")
    print(f"frontier: {len(result.points)} bands,"
          f" {len(result.frontier)} frontier points,"
          f" {result.convexity_violations} convexity violations")


SWEEP_HEADER = ["param", "value", "z_lo", "z_hi", "t_lo", "t_hi",
                "W_full", "W_minonly", "W_none",
                "gain_full_pct", "gain_minonly_pct"]


def cmd_sweep(cfg: RunConfig, args, out: Path) -> None:
    if args.steps < 1:
        raise ConfigError("sweep: --steps must be a positive integer")
    base = cfg.model_params()
    values = np.linspace(args.from_value, args.to_value, args.steps)
    rows = sweep(args.param, values, cfg.policy.omega, base=base,
                 search=cfg.search, threads=cfg.threads)
    records = [
        (r.param, r.value, r.z_lo, r.z_hi, r.t_lo, r.t_hi,
         r.W_full, r.W_minonly, r.W_none,
         r.gain_full_pct, r.gain_minonly_pct)
        for r in rows
    ]
    write_csv(out / "sweep.csv", SWEEP_HEADER, records)
    write_json(out / "sweep.json", [
        dict(zip(SWEEP_HEADER, record)) for record in records
    ])
    if cfg.output.figures:
        from .figures import sweep_gains_figure, sweep_thresholds_figure

        sweep_thresholds_figure(rows, out / "thresholds.svg")
        sweep_gains_figure(rows, out / "gains.svg")
    failed = sum(1 for r in rows if math.isnan(r.W_full))
    print(f"sweep: {args.param} over [{args.from_value:g}, {args.to_value:g}]"
          f" in {args.steps} steps, {failed} failed")


def cmd_profile(cfg: RunConfig, args, out: Path) -> None:
    model = cfg.build_model()
    pol = cfg.policy
    band_given = any(v is not None
                     for v in (pol.t_lo, pol.t_hi, pol.z_lo, pol.z_hi))
    if band_given:
        eq = _solve_requested_band(cfg, model)
    else:
        best = optimize_all(model, pol.omega, search=cfg.search)[FULL]
        eq = solve_from_band((best.t_lo, best.t_hi), model)

    worker = worker_utility_profile(eq, model)
    try:
        firm = firm_profit_profile(eq, model)
    except DomainError as exc:
        print(f"note: firm profile skipped ({exc})", file=sys.stderr)
        firm = None

    write_csv(out / "worker_profile.csv",
              ["z", "value_policy", "value_reference"],
              zip(worker.grid, worker.policy_values, worker.reference_values))
    if firm is not None:
        write_csv(out / "firm_profile.csv",
                  ["x", "value_policy", "value_reference"],
                  zip(firm.grid, firm.policy_values, firm.reference_values))
    distributions = outcome_distributions(eq, model)
    write_csv(out / "education_cdf.csv", ["point", "cdf"],
              distributions.education)
    write_csv(out / "wage_cdf.csv", ["point", "cdf"], distributions.wages)
    write_json(out / "profile.json", {
        "kind": eq.kind,
        "z_lo": eq.z_lo,
        "z_hi": eq.z_hi,
        "t_lo": eq.band.t_lo,
        "t_hi": eq.band.t_hi,
        "worker_crossings": list(worker.crossings),
        "firm_crossings": list(firm.crossings) if firm is not None else None,
    })
    if cfg.output.figures:
        from .figures import cdf_figure, profiles_figure

        profiles_figure(worker, firm, out / "profiles.svg")
        cdf_figure(distributions, out / "cdfs.svg")
    crossings = ", ".join(f"{c:.4g}" for c in worker.crossings) or "none"
    print(f"profile: kind={eq.kind} worker crossings: {crossings}")


def cmd_validate(cfg: RunConfig, args, out: Path) -> None:
    model = cfg.build_model()
    report = validate_assumptions(model)
    write_json(out / "validation.json", report.as_dict())
    for check in report.checks:
        status = "ok" if check.passed else "VIOLATED"
        print(f"validate: {check.name}: {status}"
              f" (worst violation {check.worst_violation:.3g})")
    print("validate: all passed" if report.all_passed
          else "validate: violations found (see validation.json)")


_COMMANDS = {
    "solve": cmd_solve,
    "optimize": cmd_optimize,
    "frontier": cmd_frontier,
    "sweep": cmd_sweep,
    "profile": cmd_profile,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = assemble(args.config, _overrides(args))
        out = Path(cfg.output.directory)
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](cfg, args, out)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WageBandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
