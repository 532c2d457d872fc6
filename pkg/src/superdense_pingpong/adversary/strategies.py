"""Eavesdropping and tampering strategies.

A strategy is an immutable description with three hooks: the B→A leg (before
Alice encodes), the A→B leg (the encoded qubit on its way back) and the public
channel. Anything an attack remembers during one run lives in the
AttackOutcome the session hands it, so strategies can be shared freely.

Eve cannot learn anything from the A→B leg alone: every encoded Bell state has
the travel marginal I/2. Attacks that gain information therefore touch the
B→A leg, which is what the control mode probes.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
import dataclasses
from dataclasses import dataclass, field
import logging
from typing import Any, Optional, Sequence, Tuple

import numpy as np

from ..codec import ENCODING_OPS, MessagePair, decode_table
from ..errors import InvalidDistribution
from ..qstate import (
    BELL_LABELS,
    STRUCT_TOL,
    TRAVEL,
    Basis,
    DensityMatrix,
    StateVector,
    TwoQubitState,
    apply_on_travel,
    bell_state,
    measure_qubit,
    require_unitary,
)
from ..protocol.messages import ANNOUNCE, PublicMessage
from .channels import apply_kraus_on_travel

logger = logging.getLogger(__name__)


@dataclass
class AttackOutcome:
    """What the adversary holds at the end of one run."""
    eve_guess: Optional[MessagePair] = None
    caused_loss: bool = False
    ancilla_state: Optional[DensityMatrix] = None
    # Strategy-private values carried from the B→A hook to the A→B hook.
    memory: dict = field(default_factory=dict)


def _random_bit(rng: np.random.Generator) -> int:
    return int(rng.random() < 0.5)


def _guess_from_flip(basis: Basis, flip: int, rng: np.random.Generator) -> MessagePair:
    # U_10 and U_11 flip a B_z eigenstate; U_01 and U_11 flip a B_x eigenstate.
    if basis is Basis.Z:
        return MessagePair(flip, _random_bit(rng))
    return MessagePair(_random_bit(rng), flip)


class AttackStrategy(ABC):
    name = 'abstract'

    def on_b_to_a(self, state: TwoQubitState, outcome: AttackOutcome,
                  rng: np.random.Generator) -> Optional[TwoQubitState]:
        """Act on the travel qubit before Alice; ``None`` withholds it."""
        return state

    def on_a_to_b(self, state: TwoQubitState, outcome: AttackOutcome,
                  rng: np.random.Generator) -> TwoQubitState:
        return state

    def on_public(self, message: PublicMessage, outcome: AttackOutcome,
                  rng: np.random.Generator) -> PublicMessage:
        return message

    def kraus_b_to_a(self) -> list:
        """Kraus operators of the B→A map on the travel qubit."""
        return [np.eye(2, dtype=complex)]

    @property
    def nominal_gamma(self) -> Optional[float]:
        return None

    def post_attack_state(self, initial: str = 'psi_minus') -> DensityMatrix:
        """Exact shared state after the B→A leg, conditioned on delivery."""
        return apply_kraus_on_travel(self.kraus_b_to_a(), bell_state(initial))

    @abstractmethod
    def describe(self) -> dict:
        """Name and parameters, for reports."""


@dataclass(frozen=True)
class NoAttack(AttackStrategy):
    name = 'none'

    def describe(self) -> dict:
        return {'name': self.name}


@dataclass(frozen=True)
class InterceptResend(AttackStrategy):
    """Measure the travel qubit in a fixed basis on both legs.

    On B→A Eve measures and forwards the eigenstate she saw; on A→B she
    measures again, and a changed outcome tells her Alice flipped that basis.
    """
    basis: Basis = Basis.Z
    name = 'intercept_resend'

    def on_b_to_a(self, state, outcome, rng):
        first, post = measure_qubit(state, TRAVEL, self.basis, rng.random())
        outcome.memory['first'] = first
        return post

    def on_a_to_b(self, state, outcome, rng):
        second, post = measure_qubit(state, TRAVEL, self.basis, rng.random())
        first = outcome.memory.get('first', second)
        outcome.eve_guess = _guess_from_flip(self.basis, first ^ second, rng)
        return post

    def kraus_b_to_a(self) -> list:
        return [np.array(P) for P in self.basis.projectors]

    def describe(self) -> dict:
        return {'name': self.name, 'basis': self.basis.value}


# Pauli on the travel qubit that turns |ψ−⟩ into each Bell state.
_PAULI_FOR_LABEL = {label: ENCODING_OPS[m].matrix for label, m in decode_table('psi_minus').items()}

A_TO_B_MODES = ('pass', 'Z', 'X')


@dataclass(frozen=True)
class BellDiagonalAttack(AttackStrategy):
    """Pauli channel on B→A that leaves the singlet Bell-diagonal.

    ``weights`` follow BELL_LABELS order (phi_plus, phi_minus, psi_plus,
    psi_minus), so γ = 1 − weights[3]. On A→B Eve either lets the qubit pass
    or measures it in B_z / B_x and guesses from that single outcome.
    """
    weights: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 1.0)
    a_to_b: str = 'pass'
    name = 'bell_diagonal'

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (4,) or np.any(w < -STRUCT_TOL) or abs(w.sum() - 1.0) > STRUCT_TOL:
            raise InvalidDistribution(f"Bell weights {list(self.weights)} are not a distribution")
        if np.any(w < 0):
            w = np.clip(w, 0.0, None)
            w = w / w.sum()
        object.__setattr__(self, 'weights', tuple(float(x) for x in w))
        if self.a_to_b not in A_TO_B_MODES:
            raise ValueError(f"a_to_b must be one of {A_TO_B_MODES}, got {self.a_to_b!r}")

    @classmethod
    def from_gamma(cls, gamma: float, a_to_b: str = 'pass') -> 'BellDiagonalAttack':
        """Weight γ/3 on each non-singlet Bell state."""
        if not 0.0 <= gamma <= 1.0:
            raise InvalidDistribution(f"gamma must lie in [0, 1], got {gamma!r}")
        third = gamma / 3.0
        return cls((third, third, third, 1.0 - gamma), a_to_b)

    @property
    def nominal_gamma(self) -> float:
        return 1.0 - self.weights[BELL_LABELS.index('psi_minus')]

    def kraus_b_to_a(self) -> list:
        return [
            np.sqrt(w) * _PAULI_FOR_LABEL[label]
            for label, w in zip(BELL_LABELS, self.weights) if w > 0
        ]

    def on_b_to_a(self, state, outcome, rng):
        outcome.ancilla_state = DensityMatrix(np.diag(self.weights).astype(complex), check=False)
        return apply_kraus_on_travel(self.kraus_b_to_a(), state, renormalize=False)

    def on_a_to_b(self, state, outcome, rng):
        if self.a_to_b == 'pass':
            return state
        basis = Basis.parse(self.a_to_b)
        seen, post = measure_qubit(state, TRAVEL, basis, rng.random())
        outcome.eve_guess = _guess_from_flip(basis, seen, rng)
        return post

    def dilation(self, state: StateVector) -> np.ndarray:
        """Purification Σ_k √w_k (I⊗σ_k)|s⟩ ⊗ |k⟩ with a 4-level ancilla."""
        joint = np.zeros((4, 4), dtype=complex)
        for k, (label, w) in enumerate(zip(BELL_LABELS, self.weights)):
            joint[:, k] = np.sqrt(w) * (np.kron(np.eye(2), _PAULI_FOR_LABEL[label]) @ state.amplitudes)
        return joint.reshape(-1)

    def describe(self) -> dict:
        return {'name': self.name, 'weights': list(self.weights), 'a_to_b': self.a_to_b,
                'gamma': self.nominal_gamma}


MITM_MODES = ('unitary', 'measure', 'forge_public')
FORGE_TAGS = ('random', 'keep')


@dataclass(frozen=True)
class MitmTamper(AttackStrategy):
    """Denial of service on the way back, or forgery on the public channel.

    ``unitary`` rotates the returning travel qubit, ``measure`` collapses it,
    ``forge_public`` flips Alice's announced control outcome and either keeps
    the old tag or guesses a fresh one.
    """
    mode: str = 'unitary'
    unitary: Optional[np.ndarray] = field(default=None, compare=False)
    basis: Basis = Basis.Z
    forge_tag: str = 'random'
    name = 'mitm_tamper'

    def __post_init__(self):
        if self.mode not in MITM_MODES:
            raise ValueError(f"mitm mode must be one of {MITM_MODES}, got {self.mode!r}")
        if self.forge_tag not in FORGE_TAGS:
            raise ValueError(f"forge_tag must be one of {FORGE_TAGS}, got {self.forge_tag!r}")
        if self.mode == 'unitary':
            matrix = np.eye(2, dtype=complex) if self.unitary is None else self.unitary
            object.__setattr__(self, 'unitary', require_unitary(matrix))

    def on_a_to_b(self, state, outcome, rng):
        if self.mode == 'unitary':
            return apply_on_travel(self.unitary, state)
        if self.mode == 'measure':
            seen, post = measure_qubit(state, TRAVEL, self.basis, rng.random())
            outcome.eve_guess = _guess_from_flip(self.basis, seen, rng)
            return post
        return state

    def on_public(self, message, outcome, rng):
        if self.mode != 'forge_public' or message.kind != ANNOUNCE:
            return message
        forged = message.with_body(outcome=1 - int(message.body.get('outcome', 0)))
        if self.forge_tag == 'random':
            width = (message.tag_bits + 7) // 8
            guess = int.from_bytes(rng.bytes(width), 'little') & ((1 << message.tag_bits) - 1)
            forged = dataclasses.replace(forged, tag=guess)
        logger.debug(f"Forged announcement {message.seq} ({self.forge_tag} tag)")
        return forged

    def describe(self) -> dict:
        info: dict[str, Any] = {'name': self.name, 'mode': self.mode}
        if self.mode == 'unitary':
            info['unitary'] = [[str(complex(x)) for x in row] for row in self.unitary]
        elif self.mode == 'measure':
            info['basis'] = self.basis.value
        else:
            info['forge_tag'] = self.forge_tag
        return info


@dataclass(frozen=True)
class LossHiding(AttackStrategy):
    """Withhold a fraction of travel qubits and attack the rest with ``inner``."""
    loss_rate: float = 0.0
    inner: AttackStrategy = field(default_factory=NoAttack)
    name = 'loss_hiding'

    def __post_init__(self):
        if not 0.0 <= self.loss_rate <= 1.0:
            raise ValueError(f"loss_rate must lie in [0, 1], got {self.loss_rate!r}")

    def on_b_to_a(self, state, outcome, rng):
        if rng.random() < self.loss_rate:
            outcome.caused_loss = True
            return None
        return self.inner.on_b_to_a(state, outcome, rng)

    def on_a_to_b(self, state, outcome, rng):
        return self.inner.on_a_to_b(state, outcome, rng)

    def on_public(self, message, outcome, rng):
        return self.inner.on_public(message, outcome, rng)

    def kraus_b_to_a(self) -> list:
        keep = np.sqrt(1.0 - self.loss_rate)
        return [keep * K for K in self.inner.kraus_b_to_a()]

    @property
    def nominal_gamma(self) -> Optional[float]:
        return self.inner.nominal_gamma

    def describe(self) -> dict:
        return {'name': self.name, 'loss_rate': self.loss_rate, 'inner': self.inner.describe()}


# ---------------------------------------------------------------------------
# Factories
# ---------------------------------------------------------------------------


def no_attack() -> AttackStrategy:
    return NoAttack()


def intercept_resend(basis=Basis.Z) -> AttackStrategy:
    return InterceptResend(Basis.parse(basis))


def bell_diagonal_attack(weights: Sequence[float], a_to_b: str = 'pass') -> AttackStrategy:
    """Weights in (p_phi_plus, p_phi_minus, p_psi_plus, p_psi_minus) order."""
    return BellDiagonalAttack(tuple(weights), a_to_b)


def mitm_tamper(mode: str, *, unitary=None, basis=Basis.Z, forge_tag: str = 'random') -> AttackStrategy:
    return MitmTamper(mode=mode, unitary=unitary, basis=Basis.parse(basis), forge_tag=forge_tag)


def loss_hiding(loss_rate: float, inner: Optional[AttackStrategy] = None) -> AttackStrategy:
    return LossHiding(float(loss_rate), inner if inner is not None else NoAttack())
