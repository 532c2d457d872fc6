"""Dense-coding layer.

Alice's four unitaries U_00..U_11 act on the travel qubit and move the shared
pair between the four Bell states; Bob's Bell measurement reads the label back
as two bits. The one-bit phase-flip encoding of the original ping-pong
protocol is kept alongside for comparison runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import itertools
from typing import Union

import numpy as np

from .qstate import (
    BELL_LABELS,
    I2,
    TwoQubitState,
    apply_operator,
    bell_probabilities,
    bell_state,
    require_unitary,
)


@dataclass(frozen=True, order=True)
class MessagePair:
    """Two classical bits (i, j)."""
    i: int
    j: int

    def __post_init__(self):
        if self.i not in (0, 1) or self.j not in (0, 1):
            raise ValueError(f"message bits must be 0 or 1, got ({self.i}, {self.j})")

    @property
    def bits(self) -> tuple:
        return (self.i, self.j)

    def to_int(self) -> int:
        return 2 * self.i + self.j

    @classmethod
    def from_int(cls, value: int) -> 'MessagePair':
        if not 0 <= value <= 3:
            raise ValueError(f"message index must be in 0..3, got {value}")
        return cls(value >> 1, value & 1)

    @classmethod
    def parse(cls, text: Union[str, 'MessagePair']) -> 'MessagePair':
        """``'01'`` → MessagePair(0, 1)."""
        if isinstance(text, MessagePair):
            return text
        text = str(text).strip()
        if len(text) != 2 or any(c not in '01' for c in text):
            raise ValueError(f"expected two bits like '01', got {text!r}")
        return cls(int(text[0]), int(text[1]))

    def __str__(self) -> str:
        return f"{self.i}{self.j}"


@dataclass(frozen=True)
class EncodingOp:
    """A 2×2 unitary acting on the travel qubit, tagged by the bits it carries."""
    bits: tuple
    matrix: np.ndarray = field(compare=False, repr=False)
    lifted: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        matrix = require_unitary(self.matrix)
        matrix.setflags(write=False)
        lifted = np.kron(I2, matrix)
        lifted.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'lifted', lifted)


ENCODING_OPS = {
    MessagePair(0, 0): EncodingOp((0, 0), np.array([[1, 0], [0, 1]], dtype=complex)),
    MessagePair(0, 1): EncodingOp((0, 1), np.array([[1, 0], [0, -1]], dtype=complex)),
    MessagePair(1, 0): EncodingOp((1, 0), np.array([[0, 1], [1, 0]], dtype=complex)),
    MessagePair(1, 1): EncodingOp((1, 1), np.array([[0, 1], [-1, 0]], dtype=complex)),
}

# U_j = (|0⟩⟨0| − |1⟩⟨1|)^j
LEGACY_OPS = {
    0: EncodingOp((0,), np.eye(2, dtype=complex)),
    1: EncodingOp((1,), np.diag([1, -1]).astype(complex)),
}


def encode(m: MessagePair, s: TwoQubitState) -> TwoQubitState:
    """Apply U_m to the travel qubit of the shared pair."""
    return apply_operator(ENCODING_OPS[MessagePair.parse(m)].lifted, s)


def legacy_encode(j: int, s: TwoQubitState) -> TwoQubitState:
    """Identity for j=0, σ_z on the travel qubit for j=1."""
    return apply_operator(LEGACY_OPS[j].lifted, s)


def _label_of(s: TwoQubitState) -> str:
    probs = bell_probabilities(s)
    return BELL_LABELS[int(np.argmax(probs))]


@lru_cache(maxsize=None)
def decode_table(initial: str = 'psi_minus') -> dict:
    """Bell label → MessagePair, derived by encoding every message on ``initial``.

    For the singlet this is psi_minus→00, psi_plus→01, phi_minus→10,
    phi_plus→11. Phases are ignored: U_11 yields −|φ+⟩.
    """
    start = bell_state(initial)
    return {_label_of(encode(m, start)): m for m in ENCODING_OPS}


@lru_cache(maxsize=None)
def legacy_decode_table(initial: str = 'psi_minus') -> dict:
    start = bell_state(initial)
    return {_label_of(legacy_encode(j, start)): j for j in LEGACY_OPS}


def decode(label: str, initial: str = 'psi_minus') -> MessagePair:
    return decode_table(initial)[label]


def legacy_decode(label: str, initial: str = 'psi_minus') -> int:
    """The one-bit read-out; labels outside the two-state code raise KeyError."""
    return legacy_decode_table(initial)[label]


def pauli_closure_ok(atol: float = 1e-12) -> bool:
    """Every product of two encoding matrices is ±1 (or ±i) times a table entry."""
    mats = [op.matrix for op in ENCODING_OPS.values()]
    for a, b in itertools.product(mats, repeat=2):
        prod = a @ b
        if not any(
            np.allclose(prod, phase * m, atol=atol)
            for m in mats for phase in (1, -1, 1j, -1j)
        ):
            return False
    return True
