from .strategies import (
    AttackOutcome,
    AttackStrategy,
    bell_diagonal_attack,
    intercept_resend,
    loss_hiding,
    mitm_tamper,
    no_attack,
)
from .registry import ATTACKS, build_attack
