"""Named input states for experiments and configuration files."""

from __future__ import annotations

import numpy as np

from .qlinalg import QuantumState, RegisterSpace, maximally_entangled, random_pure_state

STATE_PRESETS = ("basis", "plus", "bell_z", "random")


def make_state(
    message_space: RegisterSpace,
    preset: str = "bell_z",
    *,
    value: int = 0,
    side_label: str = "Z",
    side_dim: int | None = None,
    seed: int = 0,
) -> QuantumState:
    """Build an input state on the message registers and, for entangled
    presets, one side register.

    ``basis`` and ``plus`` carry no side register.  ``bell_z`` maximally
    entangles the message with a side register of equal dimension; ``random``
    draws a Haar-random pure state on message and side register.
    """
    dim = message_space.dim
    if preset == "basis":
        vec = np.zeros(dim, dtype=complex)
        vec[value % dim] = 1.0
        return QuantumState(message_space, vec)
    if preset == "plus":
        return QuantumState(message_space, np.ones(dim, dtype=complex) / np.sqrt(dim))
    if preset == "bell_z":
        return maximally_entangled(message_space, RegisterSpace.of((side_label, dim)))
    if preset == "random":
        side = RegisterSpace.of((side_label, side_dim or 2))
        return random_pure_state(message_space.concat(side), np.random.default_rng([seed, 7]))
    raise ValueError(f"unknown state preset {preset!r}; choose from {STATE_PRESETS}")
