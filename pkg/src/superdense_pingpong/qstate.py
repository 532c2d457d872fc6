"""Exact state engine for one and two qubits.

Two-qubit states are ordered home ⊗ travel, so amplitude index ``2*h + t``
holds the |h t⟩ component. Bob keeps the home qubit; the travel qubit makes
the round trip to Alice.

Every stochastic operation takes its randomness as an explicit uniform real in
[0, 1), which keeps whole sessions replayable from a seed.
"""
from __future__ import annotations

from dataclasses import InitVar, dataclass
from enum import Enum
from functools import lru_cache
import logging
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DegenerateState, InvalidDistribution, InvalidState, NonUnitary

logger = logging.getLogger(__name__)

STRUCT_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-10
BRANCH_TOL = 1e-14

HOME = 'home'
TRAVEL = 'travel'

# Fixed order used by bell_measure's cumulative sampling and by bell_diagonal.
BELL_LABELS = ('phi_plus', 'phi_minus', 'psi_plus', 'psi_minus')

_R = 1 / np.sqrt(2)
I2 = np.eye(2, dtype=complex)


def _readonly(array) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


_KETS = {
    '0': _readonly([1, 0]),
    '1': _readonly([0, 1]),
    '+': _readonly([_R, _R]),
    '-': _readonly([_R, -_R]),
}

_BELL_VECTORS = {
    'phi_plus': _readonly([_R, 0, 0, _R]),
    'phi_minus': _readonly([_R, 0, 0, -_R]),
    'psi_plus': _readonly([0, _R, _R, 0]),
    # Singlet (|01⟩ − |10⟩)/√2; honest control outcomes never coincide.
    'psi_minus': _readonly([0, _R, -_R, 0]),
}

# Columns are the Bell vectors in BELL_LABELS order.
_BELL_MATRIX = _readonly(np.column_stack([_BELL_VECTORS[k] for k in BELL_LABELS]))


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state of one qubit (2 amplitudes) or of the home+travel pair (4)."""
    amplitudes: np.ndarray
    check: InitVar[bool] = True

    def __post_init__(self, check: bool):
        amps = _readonly(np.asarray(self.amplitudes).reshape(-1))
        object.__setattr__(self, 'amplitudes', amps)
        if not check:
            return
        if amps.shape not in ((2,), (4,)):
            raise InvalidState(f"expected 2 or 4 amplitudes, got {amps.shape[0]}")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > STRUCT_TOL:
            raise InvalidState(f"squared norm {norm_sq!r} is not 1")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: 'StateVector') -> complex:
        """⟨self|other⟩."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_density(self) -> 'DensityMatrix':
        return DensityMatrix.from_vector(self)

    def canonical(self) -> 'StateVector':
        """Same ray, rephased so the first nonzero amplitude is real positive."""
        amps = self.amplitudes
        nonzero = np.flatnonzero(np.abs(amps) > STRUCT_TOL)
        if nonzero.size == 0:
            return self
        lead = amps[nonzero[0]]
        return StateVector(amps * (abs(lead) / lead), check=False)

    def equals_up_to_phase(self, other: 'StateVector', atol: float = STRUCT_TOL) -> bool:
        if self.dim != other.dim:
            return False
        return abs(abs(self.inner(other)) - 1.0) <= atol

    @classmethod
    def ket(cls, name: str) -> 'StateVector':
        """Single-qubit |0⟩, |1⟩, |+⟩ or |−⟩."""
        try:
            return cls(_KETS[name], check=False)
        except KeyError:
            raise ValueError(f"unknown ket {name!r}; expected one of {sorted(_KETS)}") from None

    @classmethod
    def product(cls, home: 'StateVector', travel: 'StateVector') -> 'StateVector':
        return cls(np.kron(home.amplitudes, travel.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Density matrix of one qubit (2×2) or of the home+travel pair (4×4)."""
    entries: np.ndarray
    check: InitVar[bool] = True

    def __post_init__(self, check: bool):
        rho = _readonly(self.entries)
        object.__setattr__(self, 'entries', rho)
        if not check:
            return
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
            raise InvalidState(f"expected a 2×2 or 4×4 matrix, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > STRUCT_TOL:
            raise InvalidState("matrix is not Hermitian")
        trace = complex(np.trace(rho))
        if abs(trace - 1.0) > STRUCT_TOL:
            raise InvalidState(f"trace {trace!r} is not 1")
        smallest = float(np.linalg.eigvalsh(rho)[0])
        if smallest < -PSD_TOL:
            raise InvalidState(f"smallest eigenvalue {smallest!r} is negative")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def expectation(self, vector: StateVector) -> float:
        """⟨v|ρ|v⟩ for a pure reference v."""
        v = vector.amplitudes
        return float(np.vdot(v, self.entries @ v).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def allclose(self, other: 'DensityMatrix', atol: float = STRUCT_TOL) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.entries, other.entries, atol=atol, rtol=0))

    @classmethod
    def from_vector(cls, vector: StateVector) -> 'DensityMatrix':
        v = vector.amplitudes
        return cls(np.outer(v, v.conj()), check=False)

    @classmethod
    def maximally_mixed(cls, dim: int = 4) -> 'DensityMatrix':
        return cls(np.eye(dim) / dim, check=False)


TwoQubitState = Union[StateVector, DensityMatrix]


class Basis(Enum):
    """Single-qubit measurement basis: B_z = {|0⟩, |1⟩} or B_x = {|+⟩, |−⟩}."""
    Z = 'Z'
    X = 'X'

    @property
    def vectors(self) -> tuple:
        return _BASIS_KETS[self]

    @property
    def projectors(self) -> tuple:
        return tuple(_readonly(np.outer(v, v.conj())) for v in self.vectors)

    def eigenstate(self, outcome: int) -> StateVector:
        return StateVector(self.vectors[outcome], check=False)

    @classmethod
    def parse(cls, value: Union[str, 'Basis']) -> 'Basis':
        """Accept ``Z``/``X`` in any case, with or without a ``B_`` prefix."""
        if isinstance(value, Basis):
            return value
        text = str(value).strip().upper()
        if text.startswith('B_'):
            text = text[2:]
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"unknown basis {value!r}; expected Z or X") from None


_BASIS_KETS = {
    Basis.Z: (_KETS['0'], _KETS['1']),
    Basis.X: (_KETS['+'], _KETS['-']),
}


@dataclass(frozen=True)
class Ensemble:
    """Classical mixture {(p_i, ρ_i)}."""
    members: tuple

    def __post_init__(self):
        members = tuple((float(p), rho) for p, rho in self.members)
        object.__setattr__(self, 'members', members)
        if not members:
            raise InvalidDistribution("an ensemble needs at least one member")
        probs = np.array([p for p, _ in members])
        if np.any(probs < -STRUCT_TOL) or np.any(probs > 1 + STRUCT_TOL):
            raise InvalidDistribution("ensemble probabilities must lie in [0, 1]")
        if abs(probs.sum() - 1.0) > STRUCT_TOL:
            raise InvalidDistribution(f"ensemble probabilities sum to {probs.sum()!r}")

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.members])

    @property
    def states(self) -> list:
        return [rho for _, rho in self.members]

    def average(self) -> DensityMatrix:
        return DensityMatrix(sum(p * rho.entries for p, rho in self.members), check=False)

    @classmethod
    def uniform(cls, states: Sequence[DensityMatrix]) -> 'Ensemble':
        weight = 1.0 / len(states)
        return cls(tuple((weight, rho) for rho in states))


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def is_unitary(U: np.ndarray, atol: float = UNITARY_TOL) -> bool:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))) <= atol


def require_unitary(U: np.ndarray) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if not is_unitary(U):
        raise NonUnitary(f"operator deviates from unitarity beyond {UNITARY_TOL}")
    return U


def _require_pair(s: TwoQubitState):
    if s.dim != 4:
        raise InvalidState(f"expected a two-qubit state, got dimension {s.dim}")


def as_density(s: TwoQubitState) -> DensityMatrix:
    return s if isinstance(s, DensityMatrix) else DensityMatrix.from_vector(s)


@lru_cache(maxsize=None)
def _qubit_projector(which: str, basis: Basis, outcome: int) -> np.ndarray:
    proj = basis.projectors[outcome]
    if which == HOME:
        return _readonly(np.kron(proj, I2))
    if which == TRAVEL:
        return _readonly(np.kron(I2, proj))
    raise ValueError(f"which must be {HOME!r} or {TRAVEL!r}, got {which!r}")


def _probabilities(s: TwoQubitState, projectors) -> np.ndarray:
    if isinstance(s, StateVector):
        v = s.amplitudes
        probs = np.array([np.vdot(v, P @ v).real for P in projectors])
    else:
        probs = np.array([np.trace(P @ s.entries).real for P in projectors])
    probs = np.where(probs < BRANCH_TOL, 0.0, probs)
    return probs / probs.sum()


def _choose(probs: np.ndarray, rand: float) -> int:
    """Index of the first branch whose cumulative weight exceeds rand."""
    cumulative = 0.0
    last = int(np.flatnonzero(probs)[-1])
    for k, p in enumerate(probs):
        cumulative += p
        if p > 0 and rand < cumulative:
            return k
    return last


def _project(s: TwoQubitState, P: np.ndarray, p: float) -> TwoQubitState:
    if isinstance(s, StateVector):
        return StateVector((P @ s.amplitudes) / np.sqrt(p), check=False)
    return DensityMatrix((P @ s.entries @ P) / p, check=False)


def apply_operator(full: np.ndarray, s: TwoQubitState) -> TwoQubitState:
    """Apply a unitary of the state's full dimension (no unitarity check)."""
    if isinstance(s, StateVector):
        return StateVector(full @ s.amplitudes, check=False)
    return DensityMatrix(full @ s.entries @ full.conj().T, check=False)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def bell_state(label: str) -> StateVector:
    """One of the four Bell states, first nonzero amplitude real positive."""
    try:
        return StateVector(_BELL_VECTORS[label], check=False)
    except KeyError:
        raise ValueError(f"unknown Bell label {label!r}; expected one of {BELL_LABELS}") from None


def bell_diagonal(weights: Sequence[float]) -> DensityMatrix:
    """Σ w_k |B_k⟩⟨B_k| with weights given in BELL_LABELS order."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (4,) or np.any(w < -STRUCT_TOL) or abs(w.sum() - 1.0) > STRUCT_TOL:
        raise InvalidDistribution(f"Bell weights {list(w)} are not a distribution")
    w = np.clip(w, 0.0, None)
    return DensityMatrix(_BELL_MATRIX @ np.diag(w) @ _BELL_MATRIX.conj().T, check=False)


def apply_on_travel(U: np.ndarray, s: TwoQubitState) -> TwoQubitState:
    """(I⊗U) s (I⊗U)† for density matrices, (I⊗U) s for vectors."""
    U = require_unitary(U)
    _require_pair(s)
    return apply_operator(np.kron(I2, U), s)


def branch_probabilities(s: TwoQubitState, which: str, basis: Basis) -> np.ndarray:
    projectors = [_qubit_projector(which, basis, k) for k in (0, 1)]
    return _probabilities(s, projectors)


def measure_qubit(s: TwoQubitState, which: str, basis: Basis,
                  rand: Optional[float] = None, *, outcome: Optional[int] = None):
    """Projective measurement of one qubit of the pair.

    Outcome 0 iff ``rand < p(0)``. Passing ``outcome`` forces a branch
    instead, which raises DegenerateState when that branch cannot occur.
    Returns ``(outcome, post_state)``.
    """
    _require_pair(s)
    basis = Basis.parse(basis)
    probs = branch_probabilities(s, which, basis)
    if outcome is None:
        if rand is None:
            raise ValueError("measure_qubit needs either rand or a forced outcome")
        outcome = _choose(probs, rand)
    p = float(probs[outcome])
    if p < BRANCH_TOL:
        raise DegenerateState(f"branch {outcome} of {which} in {basis.value} has probability {p!r}")
    return outcome, _project(s, _qubit_projector(which, basis, outcome), p)


def bell_probabilities(s: TwoQubitState) -> np.ndarray:
    """Born weights of the four Bell outcomes, in BELL_LABELS order."""
    _require_pair(s)
    if isinstance(s, StateVector):
        coeffs = _BELL_MATRIX.conj().T @ s.amplitudes
        probs = np.abs(coeffs) ** 2
    else:
        probs = np.diag(_BELL_MATRIX.conj().T @ s.entries @ _BELL_MATRIX).real
    probs = np.where(probs < BRANCH_TOL, 0.0, probs)
    return probs / probs.sum()


def bell_measure(s: TwoQubitState, rand: float):
    """Bell-basis measurement of both qubits. Returns ``(label, post_state)``."""
    probs = bell_probabilities(s)
    k = _choose(probs, rand)
    b = _BELL_MATRIX[:, k]
    return BELL_LABELS[k], _project(s, np.outer(b, b.conj()), float(probs[k]))


def partial_trace(s: TwoQubitState, keep: str) -> DensityMatrix:
    """Reduced 2×2 state of the home or travel qubit."""
    _require_pair(s)
    rho = as_density(s).entries.reshape(2, 2, 2, 2)
    if keep == HOME:
        reduced = np.einsum('ijkj->ik', rho)
    elif keep == TRAVEL:
        reduced = np.einsum('ijil->jl', rho)
    else:
        raise ValueError(f"keep must be {HOME!r} or {TRAVEL!r}, got {keep!r}")
    return DensityMatrix(reduced, check=False)


def von_neumann_entropy(s: Union[TwoQubitState, np.ndarray]) -> float:
    """−Σ λ log₂ λ over the spectrum, with 0·log 0 := 0."""
    if isinstance(s, StateVector):
        return 0.0
    rho = s.entries if isinstance(s, DensityMatrix) else np.asarray(s)
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > BRANCH_TOL]
    entropy = float(-np.sum(evals * np.log2(evals)))
    return min(max(entropy, 0.0), float(np.log2(rho.shape[0])))


def fidelity_pure(ref: StateVector, s: TwoQubitState) -> float:
    """√⟨ref|s|ref⟩."""
    overlap = as_density(s).expectation(ref)
    return float(np.sqrt(min(max(overlap, 0.0), 1.0)))


def gamma_of(s: TwoQubitState) -> float:
    """Infidelity with the singlet, 1 − ⟨ψ−|s|ψ−⟩."""
    return 1.0 - fidelity_pure(bell_state('psi_minus'), s) ** 2


def holevo(e: Ensemble) -> float:
    """χ = S(Σ p_i ρ_i) − Σ p_i S(ρ_i), in bits."""
    mixed = von_neumann_entropy(e.average())
    return mixed - sum(p * von_neumann_entropy(rho) for p, rho in e.members)


def random_density_matrix(rng: np.random.Generator, dim: int = 4,
                          rank: Optional[int] = None) -> DensityMatrix:
    """Ginibre-distributed density matrix (Hilbert–Schmidt measure at full rank)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho / np.trace(rho).real, check=False)
