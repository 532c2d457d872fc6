"""Deterministic random streams.

A scenario carries one 64-bit seed. Every independent consumer (a session, a
sweep point, the message source of a session, a Monte Carlo trial) gets its
own stream by hashing ``(seed, stream index, purpose)`` through numpy's
SeedSequence, so results never depend on execution order or worker count.
"""
from __future__ import annotations

import numpy as np

SEED_BITS = 64

# Purpose codes mixed into the hash so sibling streams never coincide.
PROTOCOL = 0
MESSAGES = 1
TRIALS = 2


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < (1 << SEED_BITS):
        raise ValueError(f"seed must be a {SEED_BITS}-bit unsigned integer, got {seed}")
    return seed


def derive_rng(seed: int, stream: int = 0, purpose: int = PROTOCOL) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([check_seed(seed), int(stream), int(purpose)]))
