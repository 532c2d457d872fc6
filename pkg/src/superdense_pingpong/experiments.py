"""Scenario runs, parameter sweeps and the capacity comparison.

Everything here returns data; writing files and exit codes belong to the CLI.
Sweep points are independent: each gets its own random stream (its grid
index), and rows come back in grid order whatever the worker count.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import logging
import math
from typing import Optional

import pandas as pd

from .adversary.strategies import no_attack
from .analysis import (
    SecurityPoint,
    detection_probability,
    holevo_ceiling,
    s_max_bound,
)
from .errors import ChannelLoss, ConfigError, DomainError
from .protocol.records import SessionResult, merge_summaries
from .protocol.session import SessionConfig, run_session
from .qstate import Basis, gamma_of
from .utils.scenario import Scenario

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    'parameter', 'value', 'gamma', 'gamma_exact', 'd_lower', 'd_exact', 's_max', 'holevo_ceiling',
    'runs', 'message_runs', 'control_runs', 'detections', 'detection_rate', 'detection_rate_stderr',
    'bit_errors', 'bit_error_rate', 'bit_error_rate_stderr', 'losses', 'loss_rate', 'loss_rate_stderr',
    'auth_failures', 'bits_per_pair', 'eve_information', 'eve_information_stderr', 'aborted_reason',
]
_SUMMARY_COLUMNS = SWEEP_COLUMNS[SWEEP_COLUMNS.index('runs'):]

CAPACITY_COLUMNS = ['variant', 'message_runs', 'bits_delivered', 'bits_per_pair']


def run_scenario(scenario: Scenario) -> SessionResult:
    """One session with the scenario's settings, on stream 0."""
    return replicate_session(scenario, 0)


def replicate_session(scenario: Scenario, stream: int) -> SessionResult:
    return run_session(scenario.session, scenario.n_runs, scenario.make_message_source(stream),
                       scenario.build_attack(), stream=stream)


def run_replicates(scenario: Scenario, sessions: int, workers: int = 1) -> tuple:
    """Independent sessions on streams 0..sessions-1 and their pooled summary.

    Returns ``(results, merged)`` with results in stream order; stream 0 is
    the session :func:`run_scenario` runs.
    """
    if sessions < 1:
        raise DomainError(f"sessions must be at least 1, got {sessions}")
    streams = list(range(sessions))
    if workers > 1 and sessions > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(replicate_session, [scenario] * sessions, streams))
    else:
        results = [replicate_session(scenario, s) for s in streams]
    merged = merge_summaries(
        [r.summary for r in results], scenario.session.max_loss_rate,
        records=[rec for r in results for rec in r.records],
    )
    merged['sessions'] = sessions
    logger.info(f"{sessions} sessions pooled: {merged['runs']} runs, "
                f"detection_rate={merged['detection_rate']:.4f}")
    return results, merged


def closed_form(scenario: Scenario) -> dict:
    """Exact quantities of the post-attack state the scenario's attack produces."""
    attack = scenario.build_attack()
    cfg = scenario.session
    nominal = attack.nominal_gamma
    nan = float('nan')
    try:
        rho = attack.post_attack_state(cfg.initial_bell)
    except ChannelLoss:
        return {'gamma': nominal if nominal is not None else nan, 'gamma_exact': nan,
                'd_lower': nan, 'd_exact': nan, 's_max': nan, 'holevo_ceiling': nan}
    gamma = min(max(gamma_of(rho), 0.0), 1.0)
    basis = Basis.Z if cfg.variant == 'legacy' else None
    return {
        'gamma': nominal if nominal is not None else nan,
        'gamma_exact': gamma,
        'd_lower': gamma / 2.0,
        'd_exact': detection_probability(rho, cfg.initial_bell, basis),
        's_max': s_max_bound(gamma),
        'holevo_ceiling': holevo_ceiling(rho, cfg.variant),
    }


def sweep_point(scenario: Scenario, index: int, value) -> dict:
    point = scenario.at_sweep_point(value)
    result = run_session(point.session, point.n_runs, point.make_message_source(index),
                         point.build_attack(), stream=index)
    row = {'parameter': scenario.sweep.parameter, 'value': value}
    row.update(closed_form(point))
    row.update({k: result.summary.get(k) for k in _SUMMARY_COLUMNS})
    logger.info(f"Sweep {scenario.sweep.parameter}={value}: "
                f"detection_rate={row['detection_rate']:.4f} over {row['control_runs']} control runs")
    return row


def run_sweep(scenario: Scenario, workers: int = 1) -> pd.DataFrame:
    if scenario.sweep is None:
        raise ConfigError(ConfigError.BAD_SWEEP, f"scenario {scenario.name!r} has no sweep section")
    values = list(scenario.sweep.values)
    indices = list(range(len(values)))
    if workers > 1 and len(values) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(sweep_point, [scenario] * len(values), indices, values))
    else:
        rows = [sweep_point(scenario, i, v) for i, v in zip(indices, values)]
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def sweep_curve(frame: pd.DataFrame) -> Optional[list]:
    """Security points at the swept γ values, or None if the attack has no nominal γ."""
    rows = frame.dropna(subset=['gamma'])
    if rows.empty:
        return None
    return [
        SecurityPoint.at(row.gamma, d_exact=None if math.isnan(row.d_exact) else float(row.d_exact))
        for row in rows.itertuples()
    ]


@dataclass(frozen=True)
class CapacityReport:
    message_runs: int
    legacy_bits_per_pair: float
    dense_bits_per_pair: float
    legacy_bits: int
    dense_bits: int

    @property
    def ratio(self) -> float:
        if self.legacy_bits_per_pair == 0:
            return float('nan')
        return self.dense_bits_per_pair / self.legacy_bits_per_pair

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([
            ['legacy', self.message_runs, self.legacy_bits, self.legacy_bits_per_pair],
            ['dense', self.message_runs, self.dense_bits, self.dense_bits_per_pair],
        ], columns=CAPACITY_COLUMNS)

    def to_dict(self) -> dict:
        return {
            'message_runs': self.message_runs,
            'legacy_bits_per_pair': self.legacy_bits_per_pair,
            'dense_bits_per_pair': self.dense_bits_per_pair,
            'ratio': self.ratio,
        }


def compare_capacity(n_runs: int, seed: int = 0) -> CapacityReport:
    """Both codes over ``n_runs`` message runs each, no attack, no control runs."""
    results = {}
    for variant in ('legacy', 'dense'):
        cfg = SessionConfig(control_probability=0.0, variant=variant, rng_seed=seed)
        summary = run_session(cfg, n_runs, attack=no_attack()).summary
        results[variant] = summary
    legacy, dense = results['legacy'], results['dense']
    report = CapacityReport(
        message_runs=n_runs,
        legacy_bits_per_pair=legacy['bits_per_pair'],
        dense_bits_per_pair=dense['bits_per_pair'],
        legacy_bits=legacy['sent_bits_total'] - legacy['bit_errors'],
        dense_bits=dense['sent_bits_total'] - dense['bit_errors'],
    )
    logger.info(f"Capacity: legacy {report.legacy_bits_per_pair} vs dense "
                f"{report.dense_bits_per_pair} bits per pair (ratio {report.ratio})")
    return report
