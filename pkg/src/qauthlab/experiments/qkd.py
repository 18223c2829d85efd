"""Entanglement-based key distribution over an authenticated quantum channel.

Alice prepares maximally entangled qubit pairs, authenticates Bob's halves
with independent keys and sends them.  An eavesdropper may act on one pair.
After Bob confirms receipt the keys are revealed, Bob verifies each pair, the
pairs he accepts form the set ``S``, and both parties measure the pairs in
``S`` in the computational basis.  Pairs are independent, so each is
simulated exactly on its own registers and only the measurement outcomes
are sampled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..adversaries import measure_in_basis_attack, replace_with_junk
from ..qlinalg import (
    RegisterSpace,
    basis_probabilities,
    maximally_entangled,
    measure_in_basis,
    partial_trace,
    permute,
    tensor,
    trace_distance,
    QuantumState,
)
from ..schemes import UnitaryDesignScheme, authenticate

EAVESDROPPERS = ("none", "junk", "measure")


@dataclass
class QKDRun:
    alice_key: list[int]
    bob_key: list[int]
    accepted: list[int]
    accept_probabilities: list[float]
    eve_correlation: float
    target: int | None

    @property
    def agreement(self) -> float:
        """Fraction of accepted pairs on which the key bits agree (1 if none)."""
        if not self.accepted:
            return 1.0
        return float(np.mean([a == b for a, b in zip(self.alice_key, self.bob_key)]))

    def honest_agreement(self) -> float:
        """Agreement restricted to accepted pairs the eavesdropper left alone."""
        pairs = [(a, b) for i, a, b in zip(self.accepted, self.alice_key, self.bob_key) if i != self.target]
        if not pairs:
            return 1.0
        return float(np.mean([a == b for a, b in pairs]))


def _eve_attack(kind: str, y_space: RegisterSpace):
    if kind == "junk":
        return replace_with_junk(y_space, keep_label="E", keep=True)
    if kind == "measure":
        return measure_in_basis_attack(y_space, record_label="E", keep_record=True)
    raise ValueError(f"unknown eavesdropper {kind!r}; choose from {EAVESDROPPERS}")


def _correlation(accepted_state: QuantumState) -> float:
    """Distance of (Alice's measured bit, Eve's register) from a product state."""
    if "E" not in accepted_state.space:
        return 0.0
    ae = partial_trace(accepted_state, [l for l in accepted_state.space.labels if l not in ("A", "E")])
    ae = permute(ae, ("A", "E"))
    ae = measure_in_basis(ae, ["A"])
    product = tensor(partial_trace(ae, ["E"]), partial_trace(ae, ["A"]))
    return trace_distance(ae, product)


def qkd_simulation(
    scheme: UnitaryDesignScheme,
    num_pairs: int,
    rng: np.random.Generator,
    eavesdropper: str = "none",
    target: int = 0,
) -> QKDRun:
    if scheme.message_dim != 2:
        raise ValueError("key distribution sends one qubit per authenticated pair")
    if not 1 <= num_pairs <= 6:
        raise ValueError("between one and six pairs are supported")
    if eavesdropper not in EAVESDROPPERS:
        raise ValueError(f"unknown eavesdropper {eavesdropper!r}")
    alice_space = RegisterSpace.of(("A", 2))
    pair = maximally_entangled(alice_space, scheme.message_space)
    attack = None if eavesdropper == "none" else _eve_attack(eavesdropper, scheme.auth_space)
    keys = [scheme.sample_key(rng) for _ in range(num_pairs)]
    alice, bob, accepted, probs = [], [], [], []
    correlation = 0.0
    for i, key in enumerate(keys):
        sent = authenticate(scheme, key, pair)
        if attack is not None and i == target:
            sent = attack.pre_discard(sent)
        verified = scheme.ver_filter(key, sent)
        p_accept = min(max(verified.weight, 0.0), 1.0)
        probs.append(p_accept)
        if rng.random() >= p_accept:
            continue
        state = verified.normalized()
        joint = basis_probabilities(state, ["A", "M"]).reshape(-1)
        joint = np.clip(joint, 0.0, None)
        outcome = int(rng.choice(4, p=joint / joint.sum()))
        alice.append(outcome >> 1)
        bob.append(outcome & 1)
        accepted.append(i)
        correlation += _correlation(state)
    return QKDRun(alice, bob, accepted, probs, correlation, target if attack is not None else None)


@dataclass
class QKDSummary:
    runs: list[QKDRun] = field(default_factory=list)

    @property
    def target_excluded_fraction(self) -> float:
        tagged = [r for r in self.runs if r.target is not None]
        if not tagged:
            return 0.0
        return float(np.mean([r.target not in r.accepted for r in tagged]))

    @property
    def honest_agreement(self) -> float:
        return float(np.mean([r.honest_agreement() for r in self.runs]))

    @property
    def agreement(self) -> float:
        return float(np.mean([r.agreement for r in self.runs]))

    @property
    def mean_accept_probability_target(self) -> float:
        tagged = [r for r in self.runs if r.target is not None]
        return float(np.mean([r.accept_probabilities[r.target] for r in tagged])) if tagged else 1.0


def qkd_batch(
    scheme: UnitaryDesignScheme, num_pairs: int, runs: int, seed: int, eavesdropper: str = "none", target: int = 0
) -> QKDSummary:
    """Independent runs with counter-based seeds ``(seed, run)``."""
    out = QKDSummary()
    for r in range(runs):
        out.runs.append(qkd_simulation(scheme, num_pairs, np.random.default_rng([seed, r]), eavesdropper, target))
    return out
