"""Monte Carlo estimate of how often a key-ignorant forger gets through."""
from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np

from ..analysis import binomial_stderr
from ..protocol.auth import make_authenticator
from ..protocol.messages import ALICE, ANNOUNCE, PublicMessage
from .strategies import AttackOutcome, mitm_tamper

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ForgeryEstimate:
    trials: int
    accepted: int
    tag_bits: int

    @property
    def rate(self) -> float:
        return self.accepted / self.trials if self.trials else 0.0

    @property
    def stderr(self) -> float:
        return binomial_stderr(self.accepted, self.trials)

    @property
    def bound(self) -> float:
        return 2.0 ** -self.tag_bits

    def within_bound(self, sigmas: float = 3.0) -> bool:
        # The binomial σ at the bound itself, so zero observed accepts still count.
        sigma = np.sqrt(self.bound * (1 - self.bound) / max(self.trials, 1))
        return self.rate <= self.bound + sigmas * sigma


def estimate_forgery_rate(trials: int, tag_bits: int, rng: np.random.Generator,
                          forge_tag: str = 'random', scheme: str = 'poly') -> ForgeryEstimate:
    """Forge one control announcement per trial under a fresh random key."""
    attack = mitm_tamper('forge_public', forge_tag=forge_tag)
    accepted = 0
    for seq in range(trials):
        auth = make_authenticator(scheme, rng.bytes(32), tag_bits)
        genuine = PublicMessage.signed(auth, ALICE, ANNOUNCE, seq,
                                       basis='Z', outcome=int(rng.integers(0, 2)))
        forged = attack.on_public(genuine, AttackOutcome(), rng)
        accepted += forged.verify(auth)
    estimate = ForgeryEstimate(trials=trials, accepted=accepted, tag_bits=tag_bits)
    logger.info(f"Forgery: {accepted}/{trials} accepted at t={tag_bits} (bound {estimate.bound:.3g})")
    return estimate
