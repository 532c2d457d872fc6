"""Click entry point for the `superdense-pingpong` command.

Verbs: run, sweep, curve, compare-capacity, check-bounds, forgery,
list-scenarios. Exit codes: 0 on success, 1 when a check fails or the
simulation itself errors, 2 for configuration errors, 3 for file errors.
"""
from __future__ import annotations

import functools
import logging
from pathlib import Path

import click

from .errors import ConfigError, PingPongError

logger = logging.getLogger(__name__)

EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _exit_codes(f):
    """Turn library exceptions into one-line diagnostics and exit codes."""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return f(*args, **kwargs)
        except ConfigError as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(EXIT_CONFIG)
        except OSError as e:
            click.echo(f"Error: {type(e).__name__}: {e}", err=True)
            ctx.exit(EXIT_IO)
        except PingPongError as e:
            click.echo(f"Error: {type(e).__name__}: {e}", err=True)
            ctx.exit(EXIT_CHECK_FAILED)
    return wrapper


def _seed_option(f):
    return click.option('--seed', type=click.IntRange(0, 2**64 - 1), default=None,
                        help="Override the scenario seed (64-bit unsigned).")(f)


def _report_options(f):
    f = click.option('--if-exists', 'if_exists', type=click.Choice(['overwrite', 'archive', 'fail']),
                     default='archive', show_default=True,
                     help="What to do with earlier reports of the same name.")(f)
    f = click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default=None,
                     help="Table format (default: the scenario's output.format).")(f)
    f = click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default=Path('.'),
                     show_default=True, help="Directory for report files.")(f)
    f = click.option('--runs', type=click.IntRange(min=1), default=None,
                     help="Override the number of protocol runs.")(f)
    return _seed_option(f)


def _optional_out_dir(filename: str):
    return click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default=None,
                        help=f"Also write {filename} here.")


def _prepare_out_dir(out_dir: Path, prefix: str, if_exists: str, scenario_source) -> None:
    from .utils.archive_utils import check_and_archive_outputs
    from .utils.scenario import resolve_scenario

    out_dir.mkdir(parents=True, exist_ok=True)
    source_path, _ = resolve_scenario(scenario_source)
    config_path = source_path if isinstance(source_path, Path) else None
    if not check_and_archive_outputs(out_dir, config_path, policy=if_exists,
                                     file_patterns=[f"{prefix}_*"]):
        raise FileExistsError(f"reports for {prefix!r} already exist in {out_dir}; "
                              f"rerun with --if-exists overwrite or archive")


@click.group(name="superdense-pingpong")
@click.option('-v', '--verbose', is_flag=True, help="Log per-run events.")
@click.option('-q', '--quiet', is_flag=True, help="Only log warnings and errors.")
def cli(verbose, quiet):
    """Simulate the improved ping-pong quantum direct-communication protocol."""
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif quiet:
        logging.getLogger().setLevel(logging.WARNING)


@cli.command(name="run")
@click.argument('scenario')
@_report_options
@click.option('--sessions', type=click.IntRange(min=1), default=1, show_default=True,
              help="Independent sessions to run and pool into one summary.")
@click.option('--workers', type=click.IntRange(min=1), default=1, show_default=True,
              help="Run sessions in this many processes.")
@_exit_codes
def run(scenario, seed, runs, out_dir, fmt, if_exists, sessions, workers):
    """Run SCENARIO (a YAML path or a bundled scenario name)."""
    import pandas as pd

    from .experiments import run_replicates, run_scenario
    from .utils.reports import CONFIG, RUNS, SUMMARY, report_path, to_json, write_json, write_table
    from .utils.scenario import load_scenario, write_yaml_atomic
    from .protocol.records import RUN_COLUMNS

    sc = load_scenario(scenario).with_overrides(seed=seed, n_runs=runs, fmt=fmt)
    _prepare_out_dir(out_dir, sc.prefix, if_exists, scenario)
    if sessions == 1:
        result = run_scenario(sc)
        frame, columns = result.to_frame(), RUN_COLUMNS
        summary = result.summary_dict()
    else:
        results, summary = run_replicates(sc, sessions, workers)
        frame = pd.concat([r.to_frame().assign(session=i) for i, r in enumerate(results)],
                          ignore_index=True)
        columns = ['session'] + RUN_COLUMNS

    if sc.output.write_runs:
        write_table(frame, report_path(out_dir, sc.prefix, RUNS, sc.output.format),
                    sc.output.format, columns)
    write_json(summary, report_path(out_dir, sc.prefix, SUMMARY, 'json'))
    write_yaml_atomic(report_path(out_dir, sc.prefix, CONFIG, 'yml'), sc.snapshot())
    click.echo(to_json(summary), nl=False)


@cli.command(name="sweep")
@click.argument('scenario')
@_report_options
@click.option('--workers', type=click.IntRange(min=1), default=1, show_default=True,
              help="Evaluate sweep points in this many processes.")
@_exit_codes
def sweep(scenario, seed, runs, out_dir, fmt, if_exists, workers):
    """Run SCENARIO once per value of its sweep grid."""
    from .analysis import CURVE_COLUMNS, curve_frame
    from .experiments import SWEEP_COLUMNS, run_sweep, sweep_curve
    from .utils.reports import CONFIG, CURVE, SWEEP, report_path, write_table
    from .utils.scenario import load_scenario, write_yaml_atomic

    sc = load_scenario(scenario).with_overrides(seed=seed, n_runs=runs, fmt=fmt)
    if sc.sweep is None:
        raise ConfigError(ConfigError.BAD_SWEEP, f"scenario {sc.name!r} has no sweep section")
    _prepare_out_dir(out_dir, sc.prefix, if_exists, scenario)
    frame = run_sweep(sc, workers=workers)

    fmt = sc.output.format
    write_table(frame, report_path(out_dir, sc.prefix, SWEEP, fmt), fmt, SWEEP_COLUMNS)
    points = sweep_curve(frame)
    if points is not None:
        write_table(curve_frame(points), report_path(out_dir, sc.prefix, CURVE, fmt), fmt, CURVE_COLUMNS)
    write_yaml_atomic(report_path(out_dir, sc.prefix, CONFIG, 'yml'), sc.snapshot())
    click.echo(f"{len(frame)} sweep points written to {out_dir}")


@cli.command(name="curve")
@click.option('--points', type=click.IntRange(min=2), default=101, show_default=True)
@click.option('--out', 'out_path', type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default='csv', show_default=True)
@_exit_codes
def curve(points, out_path, fmt):
    """Write the γ–d trade-off (gamma,s_max,d_lower,d_exact) on a uniform γ grid."""
    from .analysis import CURVE_COLUMNS, curve_frame, gamma_d_curve
    from .utils.reports import write_table

    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_table(curve_frame(gamma_d_curve(points)), out_path, fmt, CURVE_COLUMNS)


@cli.command(name="compare-capacity")
@_seed_option
@click.option('--runs', type=click.IntRange(min=1), default=1000, show_default=True,
              help="Message runs per protocol.")
@click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Also write compare_capacity.<format> here.")
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default='csv', show_default=True)
@_exit_codes
def compare_capacity_cmd(seed, runs, out_dir, fmt):
    """Bits per EPR pair of the one-bit and the dense-coding protocol."""
    from .experiments import CAPACITY_COLUMNS, compare_capacity
    from .utils.reports import CAPACITY, report_path, to_json, write_table

    report = compare_capacity(runs, seed or 0)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_table(report.to_frame(), report_path(out_dir, 'compare', CAPACITY, fmt), fmt, CAPACITY_COLUMNS)
    click.echo(to_json(report.to_dict()), nl=False)


@cli.command(name="check-bounds")
@_seed_option
@click.option('--samples', type=click.IntRange(min=1), default=10_000, show_default=True)
@_optional_out_dir("check_bounds.json")
@_exit_codes
def check_bounds(seed, samples, out_dir):
    """Test d ≥ γ/2 and the entropy bound on random two-qubit states."""
    import dataclasses

    from .analysis import survey_random_states
    from .utils.reports import BOUNDS, report_path, to_json, write_json
    from .utils.seeding import TRIALS, derive_rng

    survey = dataclasses.asdict(survey_random_states(samples, derive_rng(seed or 0, 0, TRIALS)))
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_json(survey, report_path(out_dir, 'check', BOUNDS, 'json'))
    click.echo(to_json(survey), nl=False)
    if survey['bound_violations']:
        click.get_current_context().exit(EXIT_CHECK_FAILED)


@cli.command(name="forgery")
@_seed_option
@click.option('--trials', type=click.IntRange(min=1), default=100_000, show_default=True)
@click.option('--tag-bits', type=click.IntRange(8, 120), default=32, show_default=True)
@click.option('--scheme', type=click.Choice(['poly', 'hmac']), default='poly', show_default=True)
@click.option('--forge-tag', type=click.Choice(['random', 'keep']), default='random', show_default=True)
@_optional_out_dir("mac_forgery.json")
@_exit_codes
def forgery(seed, trials, tag_bits, scheme, forge_tag, out_dir):
    """Estimate how often a forged announcement passes tag verification."""
    from .adversary.forgery import estimate_forgery_rate
    from .utils.reports import FORGERY, report_path, to_json, write_json
    from .utils.seeding import TRIALS, derive_rng

    estimate = estimate_forgery_rate(trials, tag_bits, derive_rng(seed or 0, 0, TRIALS),
                                     forge_tag=forge_tag, scheme=scheme)
    report = {
        'trials': estimate.trials, 'accepted': estimate.accepted, 'tag_bits': estimate.tag_bits,
        'rate': estimate.rate, 'stderr': estimate.stderr, 'bound': estimate.bound,
        'within_bound': estimate.within_bound(),
    }
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_json(report, report_path(out_dir, 'mac', FORGERY, 'json'))
    click.echo(to_json(report), nl=False)


@cli.command(name="list-scenarios")
def list_scenarios():
    """Names of the bundled scenarios."""
    from .utils.scenario import bundled_scenarios

    for name in bundled_scenarios():
        click.echo(name)
