"""Public-channel messages and the bit streams Alice transmits."""
from __future__ import annotations

from abc import ABC, abstractmethod
import dataclasses
from dataclasses import dataclass, field
import json
from typing import Any, Mapping

import numpy as np

from ..codec import MessagePair
from .auth import Authenticator

ALICE = 'alice'
BOB = 'bob'

# Message kinds
ANNOUNCE = 'announce'    # Alice → Bob: control basis and outcome
VERDICT = 'verdict'      # Bob → Alice: whether the outcomes showed Eve
ACK = 'ack'              # Bob → Alice: message-mode sequence number


@dataclass(frozen=True)
class PublicMessage:
    sender: str
    kind: str
    seq: int
    body: Mapping[str, Any] = field(default_factory=dict, hash=False)
    tag: int = 0
    tag_bits: int = 0

    def payload(self) -> bytes:
        """Canonical bytes covered by the tag (everything except the tag)."""
        return json.dumps(
            {'sender': self.sender, 'kind': self.kind, 'seq': self.seq, 'body': dict(self.body)},
            sort_keys=True, separators=(',', ':'),
        ).encode()

    def verify(self, auth: Authenticator) -> bool:
        return auth.verify(self.payload(), self.tag)

    def with_body(self, **changes) -> 'PublicMessage':
        """Copy with edited body fields and the original tag left in place."""
        return dataclasses.replace(self, body={**self.body, **changes})

    @classmethod
    def signed(cls, auth: Authenticator, sender: str, kind: str, seq: int,
               **body) -> 'PublicMessage':
        unsigned = cls(sender=sender, kind=kind, seq=seq, body=body, tag_bits=auth.tag_bits)
        return dataclasses.replace(unsigned, tag=auth.tag(unsigned.payload()))


class MessageSource(ABC):
    """Stream of bits Alice sends, two per dense-coding run."""

    @abstractmethod
    def next_bit(self) -> int:
        ...

    def next_pair(self) -> MessagePair:
        return MessagePair(self.next_bit(), self.next_bit())


class RandomBits(MessageSource):
    def __init__(self, rng: np.random.Generator):
        self._rng = rng

    def next_bit(self) -> int:
        return int(self._rng.integers(0, 2))


class ConstantBits(MessageSource):
    """Repeats a fixed bit pattern such as ``'11'``."""

    def __init__(self, pattern: str):
        if not pattern or any(c not in '01' for c in pattern):
            raise ValueError(f"bit pattern must be a non-empty string of 0/1, got {pattern!r}")
        self._bits = [int(c) for c in pattern]
        self._pos = 0

    def next_bit(self) -> int:
        bit = self._bits[self._pos % len(self._bits)]
        self._pos += 1
        return bit


class BytesSource(ConstantBits):
    """Bits of a byte string, most significant bit first, cycled."""

    def __init__(self, data: bytes):
        if not data:
            raise ValueError("byte source needs at least one byte")
        super().__init__(''.join(f"{b:08b}" for b in data))


def message_source_from_spec(spec: str, rng: np.random.Generator) -> MessageSource:
    """``random``, ``constant:<bits>`` or ``text:<utf-8 text>``."""
    kind, _, arg = str(spec).partition(':')
    if kind == 'random':
        return RandomBits(rng)
    if kind == 'constant':
        return ConstantBits(arg)
    if kind == 'text':
        return BytesSource(arg.encode('utf-8'))
    raise ValueError(f"unknown message source {spec!r}; expected random, constant:<bits> or text:<text>")
