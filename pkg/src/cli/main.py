"""
CLI main entry point for ecrt-stream.

Subcommands:
    simulate     run an ExperimentSpec and write a report
    test         run the sequential test on an NDJSON stream
    fit-sampler  fit a sampler file from unlabeled data
    generate     dump a synthetic dataset
    bench        time the inner loops
"""

import functools
import json
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any, Optional, TypeVar

import click
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from ..core.config import TestConfig, get_settings, load_test_config
from ..core.errors import ECRTError
from ..core.log import configure_logging
from ..core.rng import RngStream
from ..core.stream import read_unlabeled
from ..datagen.synthetic import Regime, SyntheticConfig, dump_dataset, gen_dataset
from ..harness.bench import run_bench
from ..harness.experiment import load_experiment_spec, run_experiment
from ..harness.metrics import MetricsTable
from ..harness.report import ReportFormat, emit_report
from ..harness.stream_test import EXIT_ERROR, SamplerKind, SamplerSpec, test_stream
from ..sampler.gaussian import fit_gaussian_sampler
from ..sampler.io import save_sampler
from ..sampler.logistic import fit_logistic_sampler

# Rich console for messages; stdout stays free for data
console = Console(stderr=True)

F = TypeVar("F", bound=Callable[..., Any])


def handle_errors(func: F) -> F:
    """Map package, validation and I/O errors to exit status 2."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except (ECRTError, ValidationError, OSError) as e:
            console.print(f"[red]Error:[/red] {e}")
            sys.exit(EXIT_ERROR)

    return wrapper  # type: ignore[return-value]


def show_table(table: MetricsTable) -> None:
    """Render a metrics table."""
    view = Table(title=f"Scenario: {table.scenario}")
    view.add_column("Parameter", style="cyan")
    view.add_column("t", justify="right")
    view.add_column("Reject rate", justify="right", style="green")
    view.add_column("Mean wealth", justify="right")
    view.add_column("Stop q50", justify="right")
    view.add_column("Baseline", justify="right")
    for row in table.rows:
        view.add_row(
            row.parameter,
            str(row.t),
            f"{row.rejection_rate:.3f}",
            f"{row.mean_wealth:.3g}",
            "-" if row.stop_q50 is None else f"{row.stop_q50:g}",
            "-" if row.baseline_rejection_rate is None else f"{row.baseline_rejection_rate:.3f}",
        )
    console.print(view)


@click.group()
@click.option("--log-level", envvar="ECRT_LOG_LEVEL", default=None, help="Logging level")
@click.option(
    "--log-format",
    envvar="ECRT_LOG_FORMAT",
    type=click.Choice(["json", "console"]),
    default=None,
    help="Log renderer",
)
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str], log_format: Optional[str]) -> None:
    """ecrt - streaming conditional-independence testing by betting."""
    settings = get_settings()
    configure_logging(log_level or settings.log_level, log_format or settings.log_format)
    ctx.ensure_object(dict)
    ctx.obj["settings"] = settings


@cli.command()
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--parallelism", "-j", type=int, default=None, help="Worker processes")
@click.option(
    "--format",
    "fmt",
    type=click.Choice([f.value for f in ReportFormat]),
    default="csv",
    help="Report format",
)
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None, help="Report path")
@click.pass_context
@handle_errors
def simulate(
    ctx: click.Context,
    spec_file: Path,
    parallelism: Optional[int],
    fmt: str,
    output: Optional[Path],
) -> None:
    """Run the experiment described by SPEC_FILE."""
    spec = load_experiment_spec(spec_file)
    with console.status(f"Running {spec.scenario.value} ({spec.trials} trials)..."):
        table = run_experiment(spec, parallelism)
    show_table(table)
    target = output or ctx.obj["settings"].output_dir / f"{spec.scenario.value}.{fmt}"
    path = emit_report(table, fmt, target)
    console.print(f"[green]Report written:[/green] {path}")


@cli.command()
@click.argument("stream", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--config", "config_file", type=click.Path(exists=True, path_type=Path), default=None)
@click.option(
    "--sampler", "sampler_file", type=click.Path(exists=True, path_type=Path), default=None
)
@click.option(
    "--unlabeled", "unlabeled_file", type=click.Path(exists=True, path_type=Path), default=None
)
@click.option(
    "--sampler-kind",
    type=click.Choice([k.value for k in SamplerKind]),
    default=SamplerKind.GAUSSIAN.value,
    help="Sampler to fit from --unlabeled",
)
@click.option("--log", "log_file", type=click.Path(path_type=Path), default=None)
@handle_errors
def test(
    stream: Path,
    config_file: Optional[Path],
    sampler_file: Optional[Path],
    unlabeled_file: Optional[Path],
    sampler_kind: str,
    log_file: Optional[Path],
) -> None:
    """Test STREAM; exit 0 if rejected, 1 if not, 2 on error."""
    config = load_test_config(config_file) if config_file else TestConfig()
    spec = SamplerSpec(sampler_file, unlabeled_file, SamplerKind(sampler_kind))
    if log_file is None:
        result = test_stream(stream, config, spec, sys.stdout)
    else:
        with open(log_file, "w", encoding="utf-8") as log:
            result = test_stream(stream, config, spec, log)

    outcome = result.outcome
    style = "red" if outcome.rejected else "yellow"
    console.print(
        Panel(
            f"decision: [{style}]{outcome.decision.value}[/{style}]\n"
            f"stop time: {outcome.stop_time} (+{outcome.warmup} warm-up)\n"
            f"wealth: {outcome.final_wealth:.4g} (threshold {config.threshold:g})",
            title="e-CRT",
            border_style="blue",
        )
    )
    sys.exit(result.exit_code)


@cli.command("fit-sampler")
@click.argument("unlabeled", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--kind", type=click.Choice([k.value for k in SamplerKind]), default=SamplerKind.GAUSSIAN.value
)
@click.option("--cv-folds", type=int, default=10, help="Folds for the logistic penalty")
@click.option("--output", "-o", type=click.Path(path_type=Path), required=True)
@handle_errors
def fit_sampler(unlabeled: Path, kind: str, cv_folds: int, output: Path) -> None:
    """Fit a sampler from UNLABELED (x, z) records."""
    rows = read_unlabeled(unlabeled)
    if SamplerKind(kind) == SamplerKind.LOGISTIC:
        sampler = fit_logistic_sampler(rows, cv_folds=cv_folds)
    else:
        sampler = fit_gaussian_sampler(rows)
    save_sampler(output, sampler)
    console.print(f"[green]Sampler written:[/green] {output} ({kind}, d={sampler.dim})")


@cli.command()
@click.option("--regime", type=click.Choice([r.value for r in Regime]), default="null")
@click.option("--n", type=int, default=1000)
@click.option("--d", type=int, default=19)
@click.option("--rho", type=float, default=0.0)
@click.option("--signal-amp", type=float, default=3.0)
@click.option("--seed", type=int, default=0)
@click.option("--output", "-o", type=click.Path(path_type=Path), required=True)
@click.option("--sampler-output", type=click.Path(path_type=Path), default=None)
@handle_errors
def generate(
    regime: str,
    n: int,
    d: int,
    rho: float,
    signal_amp: float,
    seed: int,
    output: Path,
    sampler_output: Optional[Path],
) -> None:
    """Dump a synthetic dataset (and optionally its true sampler)."""
    cfg = SyntheticConfig(
        regime=Regime(regime), n=n, d=d, rho=rho, signal_amp=signal_amp, seed=seed
    )
    dataset = gen_dataset(cfg, RngStream(seed))
    rows = dump_dataset(output, dataset.observations)
    if sampler_output is not None:
        save_sampler(sampler_output, dataset.sampler)
    console.print(f"[green]Wrote {rows} records:[/green] {output}")


@cli.command()
@click.option("--iterations", type=int, default=1000)
@click.option("--json", "as_json", is_flag=True, help="Print results as JSON")
@handle_errors
def bench(iterations: int, as_json: bool) -> None:
    """Time the martingale, lasso and scoring inner loops."""
    results = run_bench(iterations)
    if as_json:
        click.echo(json.dumps({r.name: r.per_op_us for r in results}, indent=2))
        return
    view = Table(title="Inner-loop timings")
    view.add_column("Operation", style="cyan")
    view.add_column("Calls", justify="right")
    view.add_column("us/call", justify="right", style="green")
    for r in results:
        view.add_row(r.name, str(r.iterations), f"{r.per_op_us:.1f}")
    console.print(view)


def main() -> None:
    """Main entry point."""
    cli()


if __name__ == "__main__":
    main()
