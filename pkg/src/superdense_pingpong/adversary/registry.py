"""Build attack strategies from a name and key-value parameters."""
from __future__ import annotations

from typing import Any, Mapping, Optional

import numpy as np

from ..codec import ENCODING_OPS, MessagePair
from ..errors import ConfigError, InvalidDistribution, NonUnitary
from ..qstate import BELL_LABELS
from .strategies import (
    AttackStrategy,
    bell_diagonal_attack,
    BellDiagonalAttack,
    intercept_resend,
    loss_hiding,
    mitm_tamper,
    no_attack,
)

ATTACKS = ('none', 'intercept_resend', 'bell_diagonal', 'mitm_tamper', 'loss_hiding')

_NAMED_UNITARIES = {
    'I': np.eye(2, dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
    'H': np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
}


def parse_unitary(value: Any) -> np.ndarray:
    """``X``/``Y``/``Z``/``H``/``I``, an encoding name like ``U_10``, or a 2×2 list."""
    if isinstance(value, str):
        key = value.strip()
        if key.upper() in _NAMED_UNITARIES:
            return _NAMED_UNITARIES[key.upper()]
        if key.upper().startswith('U_'):
            return ENCODING_OPS[MessagePair.parse(key[2:])].matrix
        raise ValueError(f"unknown unitary name {value!r}")
    matrix = np.array([[complex(x) for x in row] for row in value], dtype=complex)
    if matrix.shape != (2, 2):
        raise ValueError(f"unitary must be 2×2, got shape {matrix.shape}")
    return matrix


def _bell_weights(params: Mapping[str, Any]) -> Optional[list]:
    weights = params.get('weights')
    if weights is None:
        return None
    if isinstance(weights, Mapping):
        unknown = set(weights) - set(BELL_LABELS)
        if unknown:
            raise ValueError(f"unknown Bell labels in weights: {sorted(unknown)}")
        return [float(weights.get(label, 0.0)) for label in BELL_LABELS]
    return [float(w) for w in weights]


def _build(name: str, params: Mapping[str, Any]) -> AttackStrategy:
    if name == 'none':
        return no_attack()
    if name == 'intercept_resend':
        return intercept_resend(params.get('basis', 'Z'))
    if name == 'bell_diagonal':
        a_to_b = str(params.get('a_to_b', 'pass'))
        weights = _bell_weights(params)
        if weights is not None:
            return bell_diagonal_attack(weights, a_to_b)
        return BellDiagonalAttack.from_gamma(float(params.get('gamma', 0.0)), a_to_b)
    if name == 'mitm_tamper':
        mode = str(params.get('mode', 'unitary'))
        unitary = parse_unitary(params['unitary']) if 'unitary' in params else None
        return mitm_tamper(mode, unitary=unitary, basis=params.get('basis', 'Z'),
                           forge_tag=str(params.get('forge_tag', 'random')))
    if name == 'loss_hiding':
        inner_spec = params.get('inner') or {'name': 'none'}
        inner = build_attack(inner_spec.get('name', 'none'), inner_spec.get('params') or {})
        return loss_hiding(float(params.get('loss_rate', 0.0)), inner)
    raise ConfigError(ConfigError.UNKNOWN_ATTACK,
                      f"unknown attack {name!r}; expected one of {', '.join(ATTACKS)}")


def build_attack(name: str, params: Optional[Mapping[str, Any]] = None) -> AttackStrategy:
    """Strategy for ``name``; bad parameters surface as ConfigError."""
    params = dict(params or {})
    try:
        return _build(name, params)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError, InvalidDistribution, NonUnitary) as e:
        raise ConfigError(ConfigError.OUT_OF_DOMAIN,
                          f"attack {name!r}: {type(e).__name__}: {e}") from e
