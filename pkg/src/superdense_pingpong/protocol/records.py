"""Per-run transcripts and the session summary built from them."""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Iterable, Optional, Sequence, Union

import pandas as pd

from ..analysis import binomial_stderr, eve_pairs, mutual_information_estimate, DEFAULT_MIN_SAMPLES
from ..codec import MessagePair

logger = logging.getLogger(__name__)

MESSAGE = 'message'
CONTROL = 'control'

RUN_COLUMNS = [
    'run_index', 'mode', 'sent_bits', 'decoded_bits', 'control_basis',
    'alice_outcome', 'bob_outcome', 'detected', 'aborted', 'loss_flag',
    'auth_failure', 'eve_guess',
]

# Keys every summary carries, whatever happened in the session.
SUMMARY_KEYS = (
    'runs', 'message_runs', 'control_runs', 'detections', 'losses',
    'auth_failures', 'bit_errors', 'bits_per_pair',
)

# Additive counts; everything else in a summary is derived from these.
_COUNT_KEYS = (
    'runs', 'message_runs', 'control_runs', 'detections', 'losses',
    'auth_failures', 'bit_errors', 'sent_bits_total',
)

Bits = Union[MessagePair, int]


def _bit_tuple(value: Optional[Bits]) -> tuple:
    if value is None:
        return ()
    if isinstance(value, MessagePair):
        return value.bits
    return (int(value),)


def _fmt(value) -> str:
    return '' if value is None else str(value)


@dataclass(frozen=True)
class RunRecord:
    run_index: int
    mode: str
    sent_bits: Optional[Bits] = None
    decoded_bits: Optional[Bits] = None
    control_basis: Optional[str] = None
    alice_outcome: Optional[int] = None
    bob_outcome: Optional[int] = None
    detected: bool = False
    aborted: bool = False
    loss_flag: bool = False
    auth_failure: bool = False
    eve_guess: Optional[Bits] = None

    def __post_init__(self):
        if self.mode not in (MESSAGE, CONTROL):
            raise ValueError(f"mode must be {MESSAGE!r} or {CONTROL!r}, got {self.mode!r}")
        if self.detected and self.mode != CONTROL:
            raise ValueError("only control runs can detect an eavesdropper")
        if self.mode == CONTROL and not (self.loss_flag or self.auth_failure):
            if self.control_basis is None or self.alice_outcome is None or self.bob_outcome is None:
                raise ValueError("a completed control run needs its basis and both outcomes")

    @property
    def bit_errors(self) -> int:
        """Differing bits between what Alice sent and what Bob decoded."""
        sent = _bit_tuple(self.sent_bits)
        if self.mode != MESSAGE or self.loss_flag or not sent:
            return 0
        decoded = _bit_tuple(self.decoded_bits)
        if len(decoded) != len(sent):
            return len(sent)
        return sum(a != b for a, b in zip(sent, decoded))

    def to_row(self) -> dict:
        return {
            'run_index': self.run_index,
            'mode': self.mode,
            'sent_bits': _fmt(self.sent_bits),
            'decoded_bits': _fmt(self.decoded_bits),
            'control_basis': _fmt(self.control_basis),
            'alice_outcome': _fmt(self.alice_outcome),
            'bob_outcome': _fmt(self.bob_outcome),
            'detected': int(self.detected),
            'aborted': int(self.aborted),
            'loss_flag': int(self.loss_flag),
            'auth_failure': int(self.auth_failure),
            'eve_guess': _fmt(self.eve_guess),
        }


def records_frame(records: Iterable[RunRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.to_row() for r in records], columns=RUN_COLUMNS)


def _derive(counts: dict, max_loss_rate: float = 1.0) -> dict:
    runs = counts['runs']
    message_runs = counts['message_runs']
    control_runs = counts['control_runs']
    sent_total = counts['sent_bits_total']
    summary = dict(counts)
    summary['bits_per_pair'] = (
        (sent_total - counts['bit_errors']) / message_runs if message_runs else 0.0
    )
    summary['detection_rate'] = counts['detections'] / control_runs if control_runs else 0.0
    summary['detection_rate_stderr'] = binomial_stderr(counts['detections'], control_runs)
    summary['loss_rate'] = counts['losses'] / runs if runs else 0.0
    summary['loss_rate_stderr'] = binomial_stderr(counts['losses'], runs)
    summary['bit_error_rate'] = counts['bit_errors'] / sent_total if sent_total else 0.0
    summary['bit_error_rate_stderr'] = binomial_stderr(counts['bit_errors'], sent_total)
    summary['loss_alarm'] = summary['loss_rate'] > max_loss_rate
    return summary


def _eve_information(records: Sequence[RunRecord], min_guess_samples: int) -> dict:
    pairs = eve_pairs(records)
    if len(pairs) < max(1, min_guess_samples):
        return {'eve_information': None, 'eve_information_stderr': None}
    estimate = mutual_information_estimate(pairs)
    return {'eve_information': estimate.bits, 'eve_information_stderr': estimate.stderr}


def summarize(records: Iterable[RunRecord], aborted_reason: Optional[str] = None,
              max_loss_rate: float = 1.0,
              min_guess_samples: int = DEFAULT_MIN_SAMPLES) -> dict:
    records = list(records)
    delivered_messages = [r for r in records if r.mode == MESSAGE and not r.loss_flag]
    counts = {
        'runs': len(records),
        'message_runs': len(delivered_messages),
        'control_runs': sum(
            1 for r in records
            if r.mode == CONTROL and r.bob_outcome is not None and not r.loss_flag
        ),
        'detections': sum(r.detected for r in records),
        'losses': sum(r.loss_flag for r in records),
        'auth_failures': sum(r.auth_failure for r in records),
        'bit_errors': sum(r.bit_errors for r in records),
        'sent_bits_total': sum(len(_bit_tuple(r.sent_bits)) for r in delivered_messages),
    }
    summary = _derive(counts, max_loss_rate)
    summary['aborted'] = aborted_reason is not None
    summary['aborted_reason'] = aborted_reason
    summary.update(_eve_information(records, min_guess_samples))
    return summary


def merge_summaries(summaries: Iterable[dict], max_loss_rate: float = 1.0,
                    records: Iterable[RunRecord] = (),
                    min_guess_samples: int = DEFAULT_MIN_SAMPLES) -> dict:
    """Pool independent sessions; the result does not depend on their order.

    Eve's information is re-estimated from the pooled ``records``; without
    them it is left as None.
    """
    summaries = list(summaries)
    counts = {k: sum(s[k] for s in summaries) for k in _COUNT_KEYS}
    merged = _derive(counts, max_loss_rate)
    reasons = sorted({s['aborted_reason'] for s in summaries if s.get('aborted_reason')})
    merged['aborted'] = any(s.get('aborted') for s in summaries)
    merged['aborted_reason'] = ','.join(reasons) or None
    merged.update(_eve_information(list(records), min_guess_samples))
    return merged


@dataclass(frozen=True)
class SessionResult:
    records: tuple
    summary: dict = field(hash=False)
    aborted_reason: Optional[str] = None

    def to_frame(self) -> pd.DataFrame:
        return records_frame(self.records)

    def summary_dict(self) -> dict:
        return dict(self.summary)
