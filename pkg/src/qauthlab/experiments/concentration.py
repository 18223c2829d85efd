"""Concentration of the Haar-conjugated attack around its trace part."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..adversaries import StinespringAttack, _split_attack
from ..qlinalg import QuantumState, RegisterSpace, haar_random_unitaries, permute


@dataclass(frozen=True)
class ConcentrationResult:
    """Samples of ``f(U) = ||Gamma_V|rho> - Lambda_U|rho>||^2``.

    ``mean_bound`` is the analytic upper bound ``(N M - 1) / (N^2 - 1)`` on
    the Haar average and ``threshold`` is ``2^{-s} + delta``.
    """

    values: np.ndarray
    mean_bound: float
    delta: float
    threshold: float

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def sigma(self) -> float:
        return float(self.values.std(ddof=1) / np.sqrt(len(self.values)))

    @property
    def tail_fraction(self) -> float:
        return float(np.mean(self.values >= self.threshold))


def conjugated_outputs(
    attack: StinespringAttack,
    y_space: RegisterSpace,
    state: QuantumState,
    message_label: str,
    tag_qubits: int,
    unitaries: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(Lambda_U |rho>, Gamma_V |rho>)`` for a batch of unitaries.

    ``Lambda_U = <0^s| U^dag V U |0^s>``.  The state lives on the message
    register followed by the side registers the attack reads; outputs are
    arrays of shape ``(batch, M, dim Z_out)`` and ``(M, dim Z_out)``.
    """
    tensor_, zin, zout = _split_attack(attack, y_space.labels)
    if attack.discard or attack.projector is not None:
        raise ValueError("concentration needs a unitary attack without projector or discard")
    ordered = permute(state, (message_label,) + zin.labels)
    m = state.space.dim_of(message_label)
    psi = ordered.vector.reshape(m, zin.dim)
    cols = np.arange(m) << tag_qubits
    iso = unitaries[:, :, cols]  # (batch, N, M)
    sent = np.einsum("nyc,cb->nyb", iso, psi)
    attacked = np.einsum("yaxb,nxb->nya", tensor_, sent)
    real = np.einsum("nym,nya->nma", iso.conj(), attacked)
    gamma = np.einsum("iaic->ac", tensor_) / y_space.dim
    ideal = psi @ gamma.T
    return real, ideal


def haar_concentration(
    attack: StinespringAttack,
    y_space: RegisterSpace,
    state: QuantumState,
    message_label: str,
    tag_qubits: int,
    samples: int,
    rng: np.random.Generator,
    delta: float | None = None,
) -> ConcentrationResult:
    n = y_space.dim
    m = state.space.dim_of(message_label)
    unitaries = haar_random_unitaries(n, samples, rng)
    real, ideal = conjugated_outputs(attack, y_space, state, message_label, tag_qubits, unitaries)
    values = np.sum(np.abs(real - ideal[None]) ** 2, axis=(1, 2))
    delta = 2 * m / n if delta is None else delta
    return ConcentrationResult(values, (n * m - 1) / (n * n - 1), delta, 2.0 ** (-tag_qubits) + delta)
