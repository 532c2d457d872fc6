"""Validity checks for the travel-qubit channels an attack applies.

A single-qubit channel is given by Kraus operators {K}. Its Choi matrix,
J = Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|), is positive semidefinite exactly when the map is
completely positive; Σ K†K ≤ I means it never creates probability (loss may
destroy some).
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import ChannelLoss
from ..qstate import BRANCH_TOL, I2, PSD_TOL, DensityMatrix, TwoQubitState, as_density


def apply_kraus(kraus: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    return sum(K @ rho @ K.conj().T for K in kraus)


def apply_kraus_on_travel(kraus: Sequence[np.ndarray], s: TwoQubitState,
                          renormalize: bool = True) -> DensityMatrix:
    """Apply the channel to the travel half of the pair.

    With ``renormalize`` the delivered branch is rescaled to unit trace;
    ChannelLoss is raised if nothing is delivered at all.
    """
    rho = as_density(s).entries
    out = apply_kraus([np.kron(I2, K) for K in kraus], rho)
    if renormalize:
        trace = float(np.trace(out).real)
        if trace < BRANCH_TOL:
            raise ChannelLoss("the channel delivers no travel qubit")
        out = out / trace
    return DensityMatrix(out, check=False)


def choi_matrix(kraus: Sequence[np.ndarray]) -> np.ndarray:
    dim = np.asarray(kraus[0]).shape[1]
    choi = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[i, j] = 1.0
            choi += np.kron(unit, apply_kraus(kraus, unit))
    return choi


def choi_is_completely_positive(choi: np.ndarray, atol: float = PSD_TOL) -> bool:
    if np.max(np.abs(choi - choi.conj().T)) > atol:
        return False
    return float(np.linalg.eigvalsh(choi)[0]) >= -atol


def kraus_completeness(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Σ K†K; the identity for a trace-preserving channel."""
    return sum(np.asarray(K).conj().T @ np.asarray(K) for K in kraus)


def is_trace_nonincreasing(kraus: Sequence[np.ndarray], atol: float = PSD_TOL) -> bool:
    gap = np.eye(np.asarray(kraus[0]).shape[1]) - kraus_completeness(kraus)
    return float(np.linalg.eigvalsh((gap + gap.conj().T) / 2)[0]) >= -atol


def is_trace_preserving(kraus: Sequence[np.ndarray], atol: float = PSD_TOL) -> bool:
    completeness = kraus_completeness(kraus)
    return bool(np.allclose(completeness, np.eye(completeness.shape[0]), atol=atol, rtol=0))


def channel_is_valid(kraus: Sequence[np.ndarray], atol: float = PSD_TOL) -> bool:
    return choi_is_completely_positive(choi_matrix(kraus), atol) and is_trace_nonincreasing(kraus, atol)


def trace_out_ancilla(joint: np.ndarray, ancilla_dim: int) -> DensityMatrix:
    """Reduced home⊗travel state of a pure (home⊗travel⊗ancilla) vector."""
    psi = np.asarray(joint, dtype=complex).reshape(4, ancilla_dim)
    return DensityMatrix(psi @ psi.conj().T, check=False)
