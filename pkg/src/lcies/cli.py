"""Command-line interface.

Exit codes: 0 success, 1 usage / input problems, 2 the model is infeasible,
3 the solver hit a limit before proving optimality.
"""

from __future__ import annotations

import dataclasses
import sys
from pathlib import Path

import click

from . import analysis, baselines, chance
from .config import ConfigError, load_config
from .dispatch import DispatchSchedule, ExtractionError, InfeasibleModelError
from .milp import SolverCheckError
from .sequences import ProbSequence

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_LIMIT = 3


class _SolverLimit(RuntimeError):
    pass


def _status_exit(status: str):
    if status == "limit":
        raise _SolverLimit("solver limit reached before optimality")
    raise InfeasibleModelError(f"model ended with status {status!r}")


@click.group()
def cli():
    """Low-carbon integrated energy system scheduling."""


@cli.command("run")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["1", "2", "3"]), default=None,
              help="Operating mode; defaults to the configured one.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--alpha", type=float, default=None,
              help="Override the configured confidence level.")
@click.option("--lp/--no-lp", "write_lp", default=False,
              help="Also export the model in LP format.")
def run_cmd(config_path, mode, out_dir, alpha, write_lp):
    """Solve one day-ahead schedule and write the artifact set."""
    config = load_config(config_path)
    if alpha is not None:
        if not 0.0 <= alpha <= 1.0:
            raise click.UsageError(f"alpha {alpha} outside [0, 1]")
        config = dataclasses.replace(config, alpha=alpha)
    mode = config.mode if mode is None else int(mode)
    report = analysis.run_mode(config, mode, out_dir=out_dir, write_lp=write_lp)
    if report.status != "optimal":
        _status_exit(report.status)
    click.echo(f"mode {mode}: objective {report.objective:.2f} CNY, "
               f"emissions {report.ledger.e_r:.2f} t, "
               f"carbon cost {report.costs.c5_carbon:.2f} CNY")
    click.echo(f"artifacts written to {out_dir}")


@cli.command("compare")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def compare_cmd(config_path, out_dir):
    """Solve all three modes and tabulate costs and emissions."""
    config = load_config(config_path)
    reports = analysis.compare_modes(config, out_dir=out_dir)
    for rep in reports:
        if rep.status == "optimal":
            click.echo(f"mode {rep.mode}: total {rep.costs.total:.2f} CNY, "
                       f"emissions {rep.ledger.e_r:.2f} t")
        else:
            click.echo(f"mode {rep.mode}: {rep.status}")
    if any(r.status == "limit" for r in reports):
        _status_exit("limit")
    if any(r.status != "optimal" for r in reports):
        _status_exit("infeasible")


@cli.command("sweep")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--price-from", type=float, required=True)
@click.option("--price-to", type=float, required=True)
@click.option("--price-step", type=float, required=True)
@click.option("--mode", "mode", type=click.Choice(["1", "2", "3"]), default=None)
@click.option("--stepped-scale", is_flag=True, default=False,
              help="Scale the stepped tiers jointly instead of using a "
                   "single fixed price at each point.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def sweep_cmd(config_path, price_from, price_to, price_step, mode,
              stepped_scale, out_dir):
    """Re-solve over a range of carbon prices."""
    config = load_config(config_path)
    mode = config.mode if mode is None else int(mode)
    points = analysis.sweep_carbon_price(config, price_from, price_to,
                                         price_step, mode=mode,
                                         stepped_scale=stepped_scale,
                                         out_dir=out_dir)
    click.echo(f"{len(points)} price points written to {out_dir}")


@cli.command("verify")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--schedule", "schedule_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--samples", type=int, default=100000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def verify_cmd(config_path, schedule_path, samples, seed):
    """Monte-Carlo check of a schedule's reserve adequacy."""
    config = load_config(config_path)
    schedule = DispatchSchedule.from_csv(schedule_path, config)
    report = analysis.verify_chance(config, schedule, samples, seed)
    click.echo(f"alpha {report.alpha}, {report.samples} samples, "
               f"violation threshold {report.threshold:.6f}")
    click.echo(f"worst period {report.worst_period}: empirical violation "
               f"{report.worst_violation_prob:.6f}")
    click.echo("PASS" if report.passed else "FAIL")
    if not report.passed:
        sys.exit(EXIT_USAGE)


@cli.command("baseline")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(["sa", "saa"]), required=True)
@click.option("--scenarios", type=int, default=200, show_default=True)
@click.option("--runs", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False),
              help="Directory for baseline.csv; defaults to stdout.")
def baseline_cmd(config_path, method, scenarios, runs, seed, out_dir):
    """Scenario-based baseline solves with per-run resampling."""
    config = load_config(config_path)
    rows = baselines.run_baseline(config, method, scenarios, runs, seed)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        baselines.write_baseline_csv(rows, out / "baseline.csv")
    click.echo("method,run,objective_cny,emissions_t,wall_ms")
    for row in rows:
        click.echo(f"{row.method},{row.run},{row.objective_cny:.6f},"
                   f"{row.emissions_t:.6f},{row.wall_ms:.3f}")


@cli.command("dst-oracle")
@click.option("--alpha", type=float, required=True)
@click.option("--seq", "seq_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def dst_oracle_cmd(alpha, seq_path):
    """Exact minimal reserve for a discretized output sequence."""
    if not 0.0 <= alpha <= 1.0:
        raise click.UsageError(f"alpha {alpha} outside [0, 1]")
    seq = ProbSequence.from_csv(seq_path)
    from .sequences import expectation
    e_t = expectation(seq)
    reserve = chance.min_reserve_bruteforce(seq, alpha, e_t)
    click.echo(f"expectation {e_t:.6f} MW")
    click.echo(f"minimal reserve {reserve:.6f} MW")


def main(argv=None) -> int:
    """Entry point with explicit exit-code mapping."""
    try:
        rc = cli.main(args=argv, standalone_mode=False)
        return int(rc) if isinstance(rc, int) else EXIT_OK
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        # click uses 2 for usage errors; keep 2 reserved for infeasibility
        return EXIT_USAGE if code == 2 else code
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except (ConfigError, OSError, ValueError, ExtractionError,
            SolverCheckError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except InfeasibleModelError as exc:
        click.echo(f"infeasible: {exc}", err=True)
        return EXIT_INFEASIBLE
    except _SolverLimit as exc:
        click.echo(f"solver limit: {exc}", err=True)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
