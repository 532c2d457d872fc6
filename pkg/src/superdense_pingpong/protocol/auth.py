"""Keyed tags for the authenticated public channel.

The default scheme is a polynomial-evaluation universal hash over the prime
field GF(2^127 − 1), one-time-padded and truncated to ``t`` bits:

    tag = ((Σ_k m_k r^(L−k+1)) + s mod p) mod 2^t

with (r, s) derived from the pre-shared key. Two distinct payloads of at most
L blocks collide for at most L/p of the keys, so a key-ignorant forger wins with
probability about 2^−t + L/p. An HMAC-SHA256 scheme is available behind the
same interface.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
import hashlib
import hmac

P127 = (1 << 127) - 1
BLOCK_BYTES = 15
MIN_TAG_BITS = 8
MAX_TAG_BITS = 120


def _check_tag_bits(t: int) -> int:
    t = int(t)
    if not MIN_TAG_BITS <= t <= MAX_TAG_BITS:
        raise ValueError(f"tag length must be {MIN_TAG_BITS}..{MAX_TAG_BITS} bits, got {t}")
    return t


def _derive_poly_keys(key: bytes) -> tuple:
    if not key:
        raise ValueError("authentication key must be non-empty")
    digest = hashlib.blake2b(key, digest_size=32, person=b'pingpong-polymac').digest()
    r = int.from_bytes(digest[:16], 'little') % P127
    s = int.from_bytes(digest[16:], 'little') % P127
    return r, s


def _poly_hash(payload: bytes, r: int) -> int:
    h = 0
    for start in range(0, len(payload), BLOCK_BYTES):
        # The trailing 0x01 marks the block length, so zero padding can't collide.
        block = payload[start:start + BLOCK_BYTES] + b'\x01'
        h = ((h + int.from_bytes(block, 'little')) * r) % P127
    return h


def authenticate(payload: bytes, key: bytes, t: int) -> int:
    """Polynomial MAC of ``payload`` truncated to ``t`` bits."""
    t = _check_tag_bits(t)
    r, s = _derive_poly_keys(key)
    return ((_poly_hash(payload, r) + s) % P127) & ((1 << t) - 1)


def _tags_equal(expected: int, tag: int, t: int) -> bool:
    if not isinstance(tag, int) or tag < 0 or tag >> t:
        return False
    width = (t + 7) // 8
    return hmac.compare_digest(expected.to_bytes(width, 'big'), tag.to_bytes(width, 'big'))


def verify_tag(payload: bytes, tag: int, key: bytes, t: int) -> bool:
    return _tags_equal(authenticate(payload, key, t), tag, t)


class Authenticator(ABC):
    """Tags and verifies public-channel payloads under a pre-shared key."""

    scheme = 'abstract'

    def __init__(self, key: bytes, tag_bits: int):
        if not key:
            raise ValueError("authentication key must be non-empty")
        self.tag_bits = _check_tag_bits(tag_bits)

    @abstractmethod
    def tag(self, payload: bytes) -> int:
        ...

    def verify(self, payload: bytes, tag: int) -> bool:
        return _tags_equal(self.tag(payload), tag, self.tag_bits)


class PolynomialMac(Authenticator):
    scheme = 'poly'

    def __init__(self, key: bytes, tag_bits: int):
        super().__init__(key, tag_bits)
        self._r, self._s = _derive_poly_keys(key)
        self._mask = (1 << self.tag_bits) - 1

    def tag(self, payload: bytes) -> int:
        return ((_poly_hash(payload, self._r) + self._s) % P127) & self._mask


class HmacAuthenticator(Authenticator):
    scheme = 'hmac'

    def __init__(self, key: bytes, tag_bits: int):
        super().__init__(key, tag_bits)
        self._key = bytes(key)

    def tag(self, payload: bytes) -> int:
        digest = hmac.new(self._key, payload, hashlib.sha256).digest()
        return int.from_bytes(digest, 'big') & ((1 << self.tag_bits) - 1)


AUTH_SCHEMES = {
    PolynomialMac.scheme: PolynomialMac,
    HmacAuthenticator.scheme: HmacAuthenticator,
}


def make_authenticator(scheme: str, key: bytes, tag_bits: int) -> Authenticator:
    try:
        cls = AUTH_SCHEMES[scheme]
    except KeyError:
        raise ValueError(f"unknown auth scheme {scheme!r}; expected one of {sorted(AUTH_SCHEMES)}") from None
    return cls(key, tag_bits)
