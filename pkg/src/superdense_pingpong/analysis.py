"""Closed-form security quantities and Monte Carlo estimators.

Control mode catches Eve when Alice's and Bob's same-basis outcomes show the
wrong correlation for the prepared Bell state. For the singlet that is any
coincidence, so with bases chosen uniformly

    d = ½ tr(ρ Π_z) + ½ tr(ρ Π_x),

Π_z = span{φ+, φ−} (coincide in B_z), Π_x = span{φ+, ψ+} (coincide in B_x).
Since 1 − ⟨ψ−|ρ|ψ−⟩ = γ is spread over the three other Bell weights and each
of them lies in at least one of the two projectors, d ≥ γ/2.
"""
from __future__ import annotations

from dataclasses import dataclass
import logging
import math
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd

from .codec import ENCODING_OPS, LEGACY_OPS, encode, legacy_encode
from .errors import DomainError, InsufficientData
from .qstate import (
    BELL_LABELS,
    Basis,
    DensityMatrix,
    Ensemble,
    TwoQubitState,
    as_density,
    bell_diagonal,
    bell_probabilities,
    bell_state,
    gamma_of,
    holevo,
    random_density_matrix,
    von_neumann_entropy,
)

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ['gamma', 's_max', 'd_lower', 'd_exact']

# Bell states whose same-basis outcomes coincide.
COINCIDENT_LABELS = {
    Basis.Z: frozenset({'phi_plus', 'phi_minus'}),
    Basis.X: frozenset({'phi_plus', 'psi_plus'}),
}

DEFAULT_MIN_SAMPLES = 100


def expected_coincidence(initial: str, basis: Basis) -> bool:
    """Whether honest outcomes coincide in ``basis`` for the prepared Bell state."""
    bell_state(initial)  # validates the label
    return initial in COINCIDENT_LABELS[Basis.parse(basis)]


def _wrong_labels(initial: str, basis: Basis) -> frozenset:
    coincident = COINCIDENT_LABELS[basis]
    if expected_coincidence(initial, basis):
        return frozenset(BELL_LABELS) - coincident
    return coincident


def detection_probability(rho: TwoQubitState, initial: str = 'psi_minus',
                          basis: Optional[Basis] = None) -> float:
    """Chance that one control round flags Eve on the shared state ``rho``.

    With ``basis=None`` the two bases are equiprobable; pass ``Basis.Z`` for
    the B_z-only check of the original protocol.
    """
    weights = dict(zip(BELL_LABELS, bell_probabilities(rho)))
    bases = [Basis.Z, Basis.X] if basis is None else [Basis.parse(basis)]
    total = sum(
        sum(weights[label] for label in _wrong_labels(initial, b))
        for b in bases
    )
    return float(total / len(bases))


def _xlog2(x: float) -> float:
    return 0.0 if x <= 0.0 else x * math.log2(x)


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not 0.0 <= gamma <= 1.0 or math.isnan(gamma):
        raise DomainError(f"gamma must lie in [0, 1], got {gamma!r}")
    return gamma


def s_max_bound(gamma: float) -> float:
    """S(ρ_max) = −(1−γ) log₂(1−γ) − γ log₂(γ/3)."""
    gamma = _check_gamma(gamma)
    return -_xlog2(1.0 - gamma) - 3.0 * _xlog2(gamma / 3.0)


def rho_max(gamma: float) -> DensityMatrix:
    """Bell-diagonal state with weight 1−γ on |ψ−⟩ and γ/3 on the others."""
    gamma = _check_gamma(gamma)
    third = gamma / 3.0
    weights = {'phi_plus': third, 'phi_minus': third, 'psi_plus': third, 'psi_minus': 1.0 - gamma}
    return bell_diagonal([weights[k] for k in BELL_LABELS])


@dataclass(frozen=True)
class SecurityPoint:
    gamma: float
    s_max: float
    d_lower: float
    d_exact: Optional[float] = None

    def __post_init__(self):
        if self.s_max < 0:
            raise DomainError(f"s_max must be non-negative, got {self.s_max!r}")
        if not 0.0 <= self.d_lower <= 0.5:
            raise DomainError(f"d_lower must lie in [0, 1/2], got {self.d_lower!r}")
        if self.d_exact is not None and self.d_exact < self.d_lower - 1e-12:
            raise DomainError(f"d_exact {self.d_exact!r} below the γ/2 bound {self.d_lower!r}")

    @classmethod
    def at(cls, gamma: float, d_exact: Optional[float] = None) -> 'SecurityPoint':
        gamma = _check_gamma(gamma)
        return cls(gamma=gamma, s_max=s_max_bound(gamma), d_lower=gamma / 2.0, d_exact=d_exact)


def gamma_d_curve(n_points: int) -> list:
    """Uniform γ grid on [0, 1]; d_exact is evaluated on ρ_max(γ)."""
    if n_points < 2:
        raise DomainError(f"need at least 2 curve points, got {n_points}")
    return [
        SecurityPoint.at(g, d_exact=detection_probability(rho_max(g)))
        for g in np.linspace(0.0, 1.0, n_points)
    ]


def curve_frame(points: Sequence[SecurityPoint]) -> pd.DataFrame:
    rows = [[p.gamma, p.s_max, p.d_lower, p.d_exact] for p in points]
    return pd.DataFrame(rows, columns=CURVE_COLUMNS)


def encoding_ensemble(rho: TwoQubitState, variant: str = 'dense') -> Ensemble:
    """Alice's messages, uniformly distributed, encoded on the post-attack pair."""
    rho = as_density(rho)
    if variant == 'legacy':
        states = [legacy_encode(j, rho) for j in LEGACY_OPS]
    else:
        states = [encode(m, rho) for m in ENCODING_OPS]
    return Ensemble.uniform(states)


def holevo_ceiling(rho: TwoQubitState, variant: str = 'dense') -> float:
    return holevo(encoding_ensemble(rho, variant))


def entropy_excess(rho: TwoQubitState) -> float:
    """S(ρ) − S(ρ_max) at ρ's own γ; positive values break the entropy bound."""
    return von_neumann_entropy(as_density(rho)) - s_max_bound(min(max(gamma_of(rho), 0.0), 1.0))


def binomial_stderr(successes: int, trials: int) -> float:
    if trials <= 0:
        return 0.0
    p = successes / trials
    return math.sqrt(p * (1.0 - p) / trials)


@dataclass(frozen=True)
class MutualInformation:
    """Plug-in estimate of I(X;Y) in bits.

    ``stderr`` is the delta-method standard error, ``bias_bound`` the
    Miller–Madow first-order upward bias of the plug-in estimator, and
    ``cells`` its degrees of freedom. Near independence the plug-in value
    scales like a χ² variable with that many degrees of freedom, whose spread
    the delta method misses, so ``tolerance`` adds it explicitly.
    """
    bits: float
    stderr: float
    bias_bound: float
    n: int
    cells: int = 1

    def tolerance(self, sigmas: float = 3.0) -> float:
        spread = self.bias_bound * math.sqrt(2.0 / max(self.cells, 1))
        return sigmas * self.stderr + self.bias_bound + sigmas * spread


def mutual_information_estimate(pairs: Iterable[tuple], alphabet: int = 4) -> MutualInformation:
    """Estimate I(X;Y) from integer pairs (x, y) in ``range(alphabet)``."""
    counts = np.zeros((alphabet, alphabet))
    for x, y in pairs:
        counts[x, y] += 1
    n = int(counts.sum())
    if n == 0:
        raise InsufficientData("no samples for the mutual information estimate")
    joint = counts / n
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    log_ratio = np.zeros_like(joint)
    log_ratio[mask] = np.log2(joint[mask] / (px @ py)[mask])
    bits = float(np.sum(joint[mask] * log_ratio[mask]))
    second = float(np.sum(joint[mask] * log_ratio[mask] ** 2))
    stderr = math.sqrt(max(second - bits ** 2, 0.0) / n)
    cells = max(int(mask.sum()) - int((px > 0).sum()) - int((py > 0).sum()) + 1, 0)
    bias = cells / (2.0 * n * math.log(2))
    return MutualInformation(bits=max(bits, 0.0), stderr=stderr, bias_bound=bias, n=n, cells=cells)


def _message_index(value) -> int:
    return value.to_int() if hasattr(value, 'to_int') else int(value)


def eve_pairs(records: Iterable) -> list:
    """(sent, guess) message indices from delivered message runs that carry a guess."""
    return [
        (_message_index(r.sent_bits), _message_index(r.eve_guess))
        for r in records
        if r.mode == 'message' and not r.loss_flag
        and r.sent_bits is not None and r.eve_guess is not None
    ]


def empirical_mutual_information(records: Iterable,
                                 min_samples: int = DEFAULT_MIN_SAMPLES) -> float:
    """Plug-in I(sent_bits; eve_guess) over message-mode records."""
    pairs = eve_pairs(records)
    if len(pairs) < max(1, min_samples):
        raise InsufficientData(
            f"{len(pairs)} message runs with an eavesdropper guess; need {max(1, min_samples)}")
    return mutual_information_estimate(pairs).bits


@dataclass(frozen=True)
class BoundSurvey:
    samples: int
    bound_violations: int
    min_margin: float
    entropy_violations: int
    max_entropy_excess: float


def survey_random_states(samples: int, rng: np.random.Generator) -> BoundSurvey:
    """Check d ≥ γ/2 and S(ρ) ≤ S(ρ_max) over random density matrices.

    The first is a theorem and should never fail; the second is only claimed
    for Bell-diagonal states, so excursions are counted rather than asserted.
    """
    margins = np.empty(samples)
    excess = np.empty(samples)
    for k in range(samples):
        rho = random_density_matrix(rng)
        margins[k] = detection_probability(rho) - gamma_of(rho) / 2.0
        excess[k] = entropy_excess(rho)
    survey = BoundSurvey(
        samples=samples,
        bound_violations=int(np.sum(margins < -1e-10)),
        min_margin=float(margins.min()) if samples else 0.0,
        entropy_violations=int(np.sum(excess > 1e-10)),
        max_entropy_excess=float(excess.max()) if samples else 0.0,
    )
    if survey.bound_violations:
        logger.warning(f"d >= gamma/2 violated on {survey.bound_violations} of {samples} states")
    return survey


def check_bound_theorem(samples: int, rng: np.random.Generator) -> int:
    """Number of random states with d < γ/2; anything but zero is a bug."""
    return survey_random_states(samples, rng).bound_violations
