"""Alice and Bob running the improved ping-pong protocol.

Per run: Bob prepares the Bell pair and sends the travel qubit; Eve's B→A hook
acts on it; Alice flips a c-biased coin. In message mode she encodes two bits
(one in the legacy variant) and returns the qubit through Eve's A→B hook to
Bob, who Bell-measures and decodes, then acknowledges with an authenticated
sequence number. In control mode Alice measures in a random basis (B_z only in
the legacy variant) and announces basis and outcome; Bob measures the home
qubit in the same basis and announces his verdict. Both announcements are
tagged and go through Eve's public-channel hook.
"""
from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Optional, Sequence

import numpy as np

from ..adversary.strategies import AttackOutcome, AttackStrategy, NoAttack
from ..analysis import expected_coincidence
from ..codec import MessagePair, decode, legacy_decode, encode, legacy_encode
from ..errors import AuthFailure, DomainError, InvalidState
from ..qstate import (
    BELL_LABELS,
    HOME,
    STRUCT_TOL,
    TRAVEL,
    Basis,
    TwoQubitState,
    bell_measure,
    bell_state,
    measure_qubit,
)
from ..utils.seeding import MESSAGES, PROTOCOL, check_seed, derive_rng
from .auth import AUTH_SCHEMES, Authenticator, MAX_TAG_BITS, MIN_TAG_BITS, make_authenticator
from .messages import ACK, ALICE, ANNOUNCE, BOB, VERDICT, MessageSource, PublicMessage, RandomBits
from .records import CONTROL, MESSAGE, RunRecord, SessionResult, summarize

logger = logging.getLogger(__name__)

VARIANTS = ('dense', 'legacy')

DETECTION = 'detection'
AUTH_FAILURE = 'auth_failure'


@dataclass(frozen=True)
class SessionConfig:
    control_probability: float = 0.5
    initial_bell: str = 'psi_minus'
    auth_key: bytes = b'pre-shared ping-pong key'
    auth_tag_bits: int = 32
    rng_seed: int = 0
    variant: str = 'dense'
    abort_on_detection: bool = True
    max_loss_rate: float = 1.0
    auth_scheme: str = 'poly'

    def __post_init__(self):
        if not 0.0 <= self.control_probability <= 1.0:
            raise DomainError(f"control_probability must lie in [0, 1], got {self.control_probability!r}")
        if self.initial_bell not in BELL_LABELS:
            raise DomainError(f"initial_bell must be one of {BELL_LABELS}, got {self.initial_bell!r}")
        if not MIN_TAG_BITS <= self.auth_tag_bits <= MAX_TAG_BITS:
            raise DomainError(
                f"auth_tag_bits must be {MIN_TAG_BITS}..{MAX_TAG_BITS}, got {self.auth_tag_bits!r}")
        if not self.auth_key:
            raise DomainError("auth_key must be non-empty")
        if self.variant not in VARIANTS:
            raise DomainError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not 0.0 <= self.max_loss_rate <= 1.0:
            raise DomainError(f"max_loss_rate must lie in [0, 1], got {self.max_loss_rate!r}")
        if self.auth_scheme not in AUTH_SCHEMES:
            raise DomainError(f"auth_scheme must be one of {sorted(AUTH_SCHEMES)}, got {self.auth_scheme!r}")
        try:
            check_seed(self.rng_seed)
        except ValueError as e:
            raise DomainError(str(e)) from None

    def authenticator(self) -> Authenticator:
        return make_authenticator(self.auth_scheme, self.auth_key, self.auth_tag_bits)


@dataclass(frozen=True)
class ControlResult:
    detected: bool
    alice_outcome: int
    bob_outcome: int


def control_round(shared: TwoQubitState, basis_choice: Basis, rands: Sequence[float],
                  initial: str = 'psi_minus') -> ControlResult:
    """Alice measures the travel qubit, Bob the home qubit, both in ``basis_choice``.

    Detection means the outcomes show the correlation the prepared Bell state
    forbids; for the singlet that is any coincidence.
    """
    basis = Basis.parse(basis_choice)
    alice, after = measure_qubit(shared, TRAVEL, basis, rands[0])
    bob, _ = measure_qubit(after, HOME, basis, rands[1])
    detected = (alice == bob) != expected_coincidence(initial, basis)
    return ControlResult(detected=detected, alice_outcome=alice, bob_outcome=bob)


def _legacy_guess(guess: Optional[MessagePair]) -> Optional[int]:
    # The legacy phase flip acts like U_01, i.e. the second dense bit.
    return None if guess is None else guess.j


def _check_ancilla(outcome: AttackOutcome) -> None:
    # Eve's share of the joint state must stay normalized.
    if outcome.ancilla_state is None:
        return
    trace = float(np.trace(outcome.ancilla_state.entries).real)
    if abs(trace - 1.0) > STRUCT_TOL:
        raise InvalidState(f"adversary ancilla has trace {trace!r}")


class _Session:
    """One run loop; all mutable per-session state lives here."""

    def __init__(self, cfg: SessionConfig, source: MessageSource, attack: AttackStrategy, stream: int):
        self.cfg = cfg
        self.source = source
        self.attack = attack
        self.rng = derive_rng(cfg.rng_seed, stream, PROTOCOL)
        self.auth = cfg.authenticator()
        self.initial = bell_state(cfg.initial_bell)
        self.legacy = cfg.variant == 'legacy'

    def run(self, n_runs: int) -> SessionResult:
        records = []
        aborted_reason = None
        for k in range(n_runs):
            record = self._run_once(k)
            records.append(record)
            if record.auth_failure:
                aborted_reason = AUTH_FAILURE
                break
            if record.detected and self.cfg.abort_on_detection:
                aborted_reason = DETECTION
                logger.info(f"Run {k}: eavesdropping detected; session aborted")
                break
        summary = summarize(records, aborted_reason, self.cfg.max_loss_rate)
        if summary['loss_alarm']:
            logger.warning(
                f"Loss rate {summary['loss_rate']:.4f} exceeds threshold {self.cfg.max_loss_rate:.4f}")
        return SessionResult(records=tuple(records), summary=summary, aborted_reason=aborted_reason)

    def _run_once(self, k: int) -> RunRecord:
        rng = self.rng
        outcome = AttackOutcome()
        mode = CONTROL if rng.random() < self.cfg.control_probability else MESSAGE
        delivered = self.attack.on_b_to_a(self.initial, outcome, rng)
        _check_ancilla(outcome)
        if delivered is None:
            logger.debug(f"Run {k}: travel qubit lost")
            return RunRecord(run_index=k, mode=mode, loss_flag=True)
        if mode == CONTROL:
            return self._control(k, delivered, outcome)
        return self._message(k, delivered, outcome)

    def _publish(self, message: PublicMessage, outcome: AttackOutcome) -> PublicMessage:
        """Send ``message`` over the public channel; raise AuthFailure if what arrives fails its tag."""
        received = self.attack.on_public(message, outcome, self.rng)
        if not received.verify(self.auth):
            raise AuthFailure(f"{received.kind} from {received.sender} (seq {received.seq}) failed verification")
        return received

    def _control(self, k: int, shared: TwoQubitState, outcome: AttackOutcome) -> RunRecord:
        rng = self.rng
        if self.legacy or rng.random() < 0.5:
            basis = Basis.Z
        else:
            basis = Basis.X
        alice, after = measure_qubit(shared, TRAVEL, basis, rng.random())

        announcement = PublicMessage.signed(self.auth, ALICE, ANNOUNCE, k, basis=basis.value, outcome=alice)
        try:
            received = self._publish(announcement, outcome)
        except AuthFailure as e:
            logger.warning(f"Run {k}: {e}; session aborted")
            return RunRecord(run_index=k, mode=CONTROL, control_basis=basis.value,
                             alice_outcome=alice, aborted=True, auth_failure=True)

        bob_basis = Basis.parse(received.body['basis'])
        bob, _ = measure_qubit(after, HOME, bob_basis, rng.random())
        announced = int(received.body['outcome'])
        detected = (announced == bob) != expected_coincidence(self.cfg.initial_bell, bob_basis)

        verdict = PublicMessage.signed(self.auth, BOB, VERDICT, k, detected=detected)
        try:
            self._publish(verdict, outcome)
        except AuthFailure as e:
            logger.warning(f"Run {k}: {e}; session aborted")
            return RunRecord(run_index=k, mode=CONTROL, control_basis=basis.value,
                             alice_outcome=alice, bob_outcome=bob, detected=detected,
                             aborted=True, auth_failure=True)
        return RunRecord(
            run_index=k, mode=CONTROL, control_basis=basis.value,
            alice_outcome=alice, bob_outcome=bob, detected=detected,
            aborted=detected and self.cfg.abort_on_detection,
        )

    def _message(self, k: int, shared: TwoQubitState, outcome: AttackOutcome) -> RunRecord:
        rng = self.rng
        if self.legacy:
            sent = self.source.next_bit()
            encoded = legacy_encode(sent, shared)
        else:
            sent = self.source.next_pair()
            encoded = encode(sent, shared)
        returned = self.attack.on_a_to_b(encoded, outcome, rng)
        label, _ = bell_measure(returned, rng.random())
        if self.legacy:
            try:
                decoded = legacy_decode(label, self.cfg.initial_bell)
            except KeyError:
                decoded = None  # a Bell label outside the one-bit code
            guess = _legacy_guess(outcome.eve_guess)
        else:
            decoded = decode(label, self.cfg.initial_bell)
            guess = outcome.eve_guess

        ack = PublicMessage.signed(self.auth, BOB, ACK, k)
        try:
            self._publish(ack, outcome)
            failed = False
        except AuthFailure as e:
            logger.warning(f"Run {k}: {e}; session aborted")
            failed = True
        return RunRecord(run_index=k, mode=MESSAGE, sent_bits=sent, decoded_bits=decoded,
                         eve_guess=guess, aborted=failed, auth_failure=failed)


def run_session(cfg: SessionConfig, n_runs: int, message_source: Optional[MessageSource] = None,
                attack: Optional[AttackStrategy] = None, *, stream: int = 0) -> SessionResult:
    """Execute up to ``n_runs`` protocol rounds.

    The session stops at the first authentication failure, and at the first
    detection unless ``cfg.abort_on_detection`` is off. Without an explicit
    ``message_source`` Alice sends seeded random bits.
    """
    if n_runs < 1:
        raise DomainError(f"n_runs must be at least 1, got {n_runs}")
    attack = attack if attack is not None else NoAttack()
    if message_source is None:
        message_source = RandomBits(derive_rng(cfg.rng_seed, stream, MESSAGES))
    logger.info(f"Session: {n_runs} runs, variant={cfg.variant}, c={cfg.control_probability}, "
                f"attack={attack.describe()['name']}, seed={cfg.rng_seed}, stream={stream}")
    return _Session(cfg, message_source, attack, stream).run(n_runs)
