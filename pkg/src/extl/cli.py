"""Batch command-line front end.

Subcommands configure an infectivity law from a JSON file, compute its
characteristics, extinction-time distributions, means, and Monte Carlo
estimates, and emit diff-friendly CSV/JSON artifacts.  All outputs are
deterministic given the configuration (including the simulation seed).

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(no finite decay rate, domain violations, or cap-dominated simulations).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .characteristics import (
    NoFiniteRootError,
    decay_rate,
    effective_reproduction_number,
    match_markov,
    mean_laplace,
)
from .config import ConfigError, RunConfig, load_config
from .lln import MacroState, integrate_kermack
from .markov import sir_cdf, sir_mean
from .mc import empirical_cdf
from .solver import mean_from_cdf, power_cdf, solve_cdf, solve_tilted_cdf

__all__ = ["main"]


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def _write_csv(path: str, header: list[str], columns: list[np.ndarray]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _emit_json(doc: dict, path: str | None = None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    print(text)


def _solve_configured(cfg: RunConfig):
    """Single-ancestor or powered multi-ancestor grid per the config."""
    if cfg.tilted:
        grid = solve_tilted_cdf(cfg.law, cfg.n, cfg.horizon, cfg.quad, cfg.interp)
    else:
        grid = solve_cdf(cfg.law, cfg.n, cfg.horizon, cfg.quad, cfg.interp)
    if cfg.ancestors > 1:
        grid = power_cdf(grid, cfg.ancestors)
    return grid


def _cmd_characteristics(cfg: RunConfig, args) -> int:
    r_eff = effective_reproduction_number(cfg.law, cfg.quad)
    rho = decay_rate(cfg.law, cfg.quad)
    residual = abs(mean_laplace(cfg.law, rho, cfg.quad) - 1.0)
    _emit_json(
        {
            "r_eff": r_eff,
            "rho": rho,
            "lambda_hat_star": cfg.law.rate_bound,
            "residual": residual,
        }
    )
    return 0


def _cmd_cdf(cfg: RunConfig, args) -> int:
    grid = _solve_configured(cfg)
    _write_csv(args.out, ["t", "F"], [grid.times, grid.values])
    return 0


def _cmd_mean(cfg: RunConfig, args) -> int:
    rho = decay_rate(cfg.law, cfg.quad)
    grid = _solve_configured(cfg)
    est = mean_from_cdf(grid, cfg.lambda_cutoff, rho)
    _emit_json(
        {
            "mean_days": est.mean,
            "truncation_bound": est.tail_bound,
            "truncated_mass": est.truncated_mass,
            "truncation_dominates": est.truncation_dominates,
            "n": cfg.n,
            "lambda_cutoff": cfg.lambda_cutoff,
        }
    )
    return 0


def _cmd_compare(cfg: RunConfig, args) -> int:
    r_eff = effective_reproduction_number(cfg.law, cfg.quad)
    rho = decay_rate(cfg.law, cfg.quad)
    lambda_hat, mu = match_markov(r_eff, rho)
    grid = solve_cdf(cfg.law, cfg.n, cfg.horizon, cfg.quad, cfg.interp)
    keep = grid.times <= cfg.lambda_cutoff + 1e-12
    ts = grid.times[keep]
    f_markov = sir_cdf(r_eff, rho, ts)
    _write_csv(args.out, ["t", "F_vi", "F_markov"], [ts, grid.values[keep], f_markov])
    est = mean_from_cdf(grid, cfg.lambda_cutoff, rho)
    summary_path = args.summary or os.path.splitext(args.out)[0] + ".json"
    _emit_json(
        {
            "r_eff": r_eff,
            "rho": rho,
            "lambda_hat": lambda_hat,
            "mu": mu,
            "mean_vi": est.mean,
            "mean_markov": sir_mean(r_eff, rho),
            "truncation_bound": est.tail_bound,
            "n": cfg.n,
            "lambda_cutoff": cfg.lambda_cutoff,
        },
        path=summary_path,
    )
    return 0


def _workers_from_env() -> int:
    raw = os.environ.get("EXTL_THREADS", "1")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"EXTL_THREADS: expected an integer, got {raw!r}") from exc
    if value < 0:
        raise ConfigError(f"EXTL_THREADS: must be >= 0, got {value}")
    return value if value > 0 else (os.cpu_count() or 1)


def _cmd_simulate(cfg: RunConfig, args) -> int:
    t_grid = np.linspace(0.0, cfg.lambda_cutoff, cfg.sim_grid_points)
    emp = empirical_cdf(
        cfg.law,
        cfg.ancestors,
        cfg.tilted,
        cfg.replicates,
        t_grid,
        cfg.sim,
        workers=_workers_from_env(),
    )
    _write_csv(args.out, ["t", "p_hat", "halfwidth"], [emp.t_grid, emp.probs, emp.halfwidth_95])
    if emp.n_capped:
        print(f"capped replicates: {emp.n_capped} of {emp.replicates}", file=sys.stderr)
        if emp.n_capped > emp.replicates // 2:
            print("cap-exceeded replicates dominate; estimate unusable", file=sys.stderr)
            return 3
    return 0


def _cmd_lln(cfg: RunConfig, args) -> int:
    horizon = max(cfg.lln_horizon, args.t0)
    init = MacroState(
        t=0.0,
        susceptible=1.0 - cfg.lln_i0 - cfg.lln_r0,
        infected=cfg.lln_i0,
        recovered=cfg.lln_r0,
    )
    traj = integrate_kermack(
        cfg.law, init, cfg.lln_step_h, horizon, tilted_initial=cfg.lln_tilted_initial
    )
    if args.out:
        _write_csv(
            args.out,
            ["t", "S", "I", "R", "force"],
            [traj.t, traj.susceptible, traj.infected, traj.recovered, traj.force],
        )
    _emit_json({"s_bar_t0": traj.susceptible_at(args.t0)})
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extl",
        description="extinction-time distributions for declining epidemics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            dest="overrides",
            help="dotted-path config override, e.g. solver.n=64",
        )

    common(sub.add_parser("characteristics", help="R_eff, decay rate, and residual"))
    p = sub.add_parser("cdf", help="extinction-time distribution on the grid")
    common(p)
    p.add_argument("--out", required=True, help="output CSV path")
    common(sub.add_parser("mean", help="mean extinction time"))
    p = sub.add_parser("compare", help="varying-infectivity vs matched Markov benchmark")
    common(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--summary", help="summary JSON path (default: CSV path with .json)")
    p = sub.add_parser("simulate", help="Monte Carlo empirical distribution")
    common(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p = sub.add_parser("lln", help="deterministic large-population trajectory")
    common(p)
    p.add_argument("--t0", type=float, required=True, help="time to report S(t0) at")
    p.add_argument("--out", help="trajectory CSV path")
    return parser


_COMMANDS = {
    "characteristics": _cmd_characteristics,
    "cdf": _cmd_cdf,
    "mean": _cmd_mean,
    "compare": _cmd_compare,
    "simulate": _cmd_simulate,
    "lln": _cmd_lln,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NoFiniteRootError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
