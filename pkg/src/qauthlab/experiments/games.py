"""Real-versus-simulated security games and the derived games.

Every game enumerates or samples keys through :func:`~qauthlab.schemes.select_keys`.
Distances are trace norms, not halved, so two orthogonal states are at
distance 2.  When keys are sampled, ``sigma`` is the standard error of the
key average; for exhaustive enumeration it is zero.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np

from ..adversaries import (
    StinespringAttack,
    construct_ideal_basis_respecting,
    copy_register_attack,
    construct_ideal_oblivious_gamma,
)
from ..qlinalg import (
    QuantumState,
    RegisterSpace,
    apply_on_registers,
    basis_probabilities,
    measure_in_basis,
    partial_trace,
    permute,
    trace_distance,
    trace_norm,
)
from ..schemes import (
    AuthScheme,
    KeyedEnsemble,
    KeySelection,
    authenticate,
    select_keys,
)


@dataclass
class SecurityReport:
    """Outcome of one game at one parameter point."""

    experiment: str
    scheme: dict
    attack: dict | None
    epsilon: float
    sigma: float = 0.0
    acceptance: float | None = None
    bound: float | None = None
    num_keys: int = 0
    exhaustive: bool = True
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def real_experiment(scheme: AuthScheme, attack: StinespringAttack, state: QuantumState, keys: KeySelection) -> KeyedEnsemble:
    """Per key: authenticate, attack, keep the accepting branch of verification.

    Registers the attack discards are disjoint from the ones verification
    reads, so they are traced out after verification to keep states pure
    for as long as possible.
    """
    out = KeyedEnsemble(exhaustive=keys.exhaustive)
    for key, weight in keys:
        sent = authenticate(scheme, key, state)
        received = attack.pre_discard(sent)
        verified = partial_trace(scheme.ver_filter(key, received), attack.discard)
        out.append(scheme.key_id(key), weight, verified)
    return out


def ideal_experiment(
    scheme: AuthScheme,
    simulator,
    state: QuantumState,
    keys: KeySelection,
    key_leak: Callable[[Any], Any] | None = None,
) -> KeyedEnsemble:
    """Per key: authenticate, run the simulator, verify.

    With ``key_leak`` the simulator's ``apply`` also receives ``key_leak(key)``.
    """
    out = KeyedEnsemble(exhaustive=keys.exhaustive)
    for key, weight in keys:
        sent = authenticate(scheme, key, state)
        if key_leak is None:
            received = simulator.pre_discard(sent)
        else:
            received = simulator.pre_discard(sent, key_leak(key))
        verified = partial_trace(scheme.ver_filter(key, received), simulator.discard)
        out.append(scheme.key_id(key), weight, verified)
    return out


def _weighted_mean_and_error(values: np.ndarray, weights: np.ndarray, exhaustive: bool) -> tuple[float, float]:
    mean = float(np.dot(weights, values))
    if exhaustive or len(values) < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / np.sqrt(len(values)))


def epsilon_between(real: KeyedEnsemble, ideal: KeyedEnsemble) -> tuple[float, float]:
    """``sum_k w_k ||real_k - ideal_k||_1`` and its Monte-Carlo standard error."""
    if len(real) != len(ideal):
        raise ValueError("ensembles cover different key sets")
    dists = []
    for (kr, w, sr), (ki, _, si) in zip(real.entries, ideal.entries):
        if kr != ki:
            raise ValueError("ensembles list keys in different orders")
        if sr.space.labels != si.space.labels:
            si = permute(si, sr.space.labels)
        dists.append(trace_distance(sr, si))
    return _weighted_mean_and_error(np.array(dists), real.weights, real.exhaustive and ideal.exhaustive)


def acceptance_probability(ensemble: KeyedEnsemble) -> tuple[float, float]:
    weights = np.array([s.weight for _, _, s in ensemble.entries])
    return _weighted_mean_and_error(weights, ensemble.weights, ensemble.exhaustive)


def make_simulator(kind: str, attack: StinespringAttack, y_space: RegisterSpace):
    if kind == "basis":
        return construct_ideal_basis_respecting(attack, y_space)
    if kind == "oblivious":
        return construct_ideal_oblivious_gamma(attack, y_space)
    raise ValueError(f"unknown simulator kind {kind!r}")


def security_game(
    scheme: AuthScheme,
    attack: StinespringAttack,
    state: QuantumState,
    keys: KeySelection,
    simulator="basis",
    bound: float | None = None,
    seed: int | None = None,
) -> SecurityReport:
    """Distance between the real experiment and the simulated one."""
    sim = make_simulator(simulator, attack, scheme.auth_space) if isinstance(simulator, str) else simulator
    real = real_experiment(scheme, attack, state, keys)
    ideal = ideal_experiment(scheme, sim, state, keys)
    eps, sigma = epsilon_between(real, ideal)
    acc, _ = acceptance_probability(real)
    return SecurityReport(
        "security",
        scheme.describe(),
        attack.describe(),
        eps,
        sigma,
        acc,
        bound,
        len(keys),
        keys.exhaustive,
        seed,
    )


def wegman_carter_bound(num_messages: int, num_tags: int) -> float:
    """Analytic distance bound ``3 sqrt(6 M / T)`` for the hash-tag scheme."""
    return 3.0 * np.sqrt(6.0 * num_messages / num_tags)


def total_auth_game(
    scheme,
    attack: StinespringAttack,
    state: QuantumState,
    keys: KeySelection,
    seed: int | None = None,
) -> SecurityReport:
    """Unitary-design scheme against the oblivious simulator ``Gamma_V``.

    The bound stored in the report is ``2^{-s/2}`` for ``s`` tag qubits.
    """
    report = security_game(scheme, attack, state, keys, "oblivious", 2.0 ** (-scheme.tag_qubits / 2), seed)
    report.experiment = "total_auth"
    return report


# ---------------------------------------------------------------------------
# Forgery
# ---------------------------------------------------------------------------


def forgery_probability(scheme, forger: StinespringAttack, state: QuantumState, keys: KeySelection) -> tuple[float, float]:
    """Probability that measuring both output copies gives two valid pairs
    with different messages.

    Needs a classical-tag scheme exposing ``tags(key)``.
    """
    y = scheme.auth_space
    m_label, t_label = y.labels
    labels = [f"{m_label}_1", f"{t_label}_1", f"{m_label}_2", f"{t_label}_2"]
    nm, nt = scheme.num_messages, scheme.num_tags
    values = []
    for key, _ in keys:
        out = forger.apply(authenticate(scheme, key, state))
        probs = basis_probabilities(out, labels)
        tags = scheme.tags(key)
        valid = probs[np.arange(nm)[:, None], tags[:, None], np.arange(nm)[None, :], tags[None, :]]
        values.append(float(valid.sum() - np.trace(valid)))
    return _weighted_mean_and_error(np.array(values), np.array(keys.weights), keys.exhaustive)


# ---------------------------------------------------------------------------
# Indistinguishability from measured and encryption
# ---------------------------------------------------------------------------


def _averaged(scheme, state, keys, transform=None) -> QuantumState:
    total = None
    space = None
    for key, weight in keys:
        out = authenticate(scheme, key, state)
        if transform is not None:
            out = transform(out)
        rho = out.density_matrix()
        total = weight * rho if total is None else total + weight * rho
        space = out.space
    return QuantumState(space, total)


def _batched_distance(keys: KeySelection, distance: Callable[[KeySelection], float], batches: int) -> tuple[float, float]:
    """Distance on all keys plus, for sampled keys, the spread over disjoint batches."""
    value = distance(keys)
    if keys.exhaustive or len(keys) < 2 * batches:
        return value, 0.0
    size = len(keys) // batches
    parts = []
    for b in range(batches):
        sub = keys.keys[b * size:(b + 1) * size]
        parts.append(distance(KeySelection(sub, tuple([1 / size] * size), False)))
    return value, float(np.std(parts, ddof=1) / np.sqrt(batches))


def indist_from_measured(scheme: AuthScheme, state: QuantumState, keys: KeySelection, batches: int = 10) -> tuple[float, float]:
    """Distance between the key-averaged authenticated state and the same
    state after a computational-basis measurement of the authenticated registers."""
    labels = scheme.auth_space.labels

    def distance(sel):
        plain = _averaged(scheme, state, sel)
        measured = _averaged(scheme, state, sel, lambda s: measure_in_basis(s, labels))
        return trace_distance(plain, measured)

    return _batched_distance(keys, distance, batches)


@dataclass(frozen=True)
class EncryptionResult:
    distance: float
    sigma: float
    side_distance: float


def encryption_game(
    scheme: AuthScheme, state0: QuantumState, state1: QuantumState, keys: KeySelection, batches: int = 10
) -> EncryptionResult:
    """Distance between key-averaged authentications of two inputs.

    ``side_distance`` is the distance between the inputs' side registers,
    which any adversary sees regardless of the scheme.
    """
    msg = scheme.message_space.labels
    side0 = partial_trace(state0, msg)
    side1 = partial_trace(state1, msg)
    side = trace_distance(side0, side1) if len(side0.space) else 0.0

    def distance(sel):
        return trace_distance(_averaged(scheme, state0, sel), _averaged(scheme, state1, sel))

    value, sigma = _batched_distance(keys, distance, batches)
    return EncryptionResult(value, sigma, side)


# ---------------------------------------------------------------------------
# Keyed versus key-averaged security
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CounterexampleResult:
    averaged_epsilon: float
    keyed_epsilon: dict[str, float]
    keyed_lower_bound: float

    @property
    def min_keyed_epsilon(self) -> float:
        return min(self.keyed_epsilon.values())


def counterexample_keyed_vs_averaged(scheme, state: QuantumState, copy_label: str = "C") -> CounterexampleResult:
    """Appended-bit scheme against the attack that copies the bit.

    The attack is invisible once the key is traced out (the copied bit is
    uniform and independent of everything else), but any simulator that
    ignores the key leaves the copy uncorrelated with the key, so the keyed
    distance stays large.  The witnesses are oblivious maps that append a
    fixed state to the copy register.
    """
    attack = copy_register_attack(scheme.auth_space, scheme.bit_label, copy_label)
    keys = select_keys(scheme, policy="exhaustive")
    real = real_experiment(scheme, attack, state, keys)
    averaged_real = real.averaged()

    def appended(state_bit: np.ndarray) -> QuantumState:
        rho = np.kron(state.density_matrix(), state_bit)
        return QuantumState(state.space.concat(RegisterSpace.of((copy_label, 2))), rho)

    witnesses = {
        "append_zero": np.diag([1.0, 0.0]),
        "append_one": np.diag([0.0, 1.0]),
        "append_mixed": np.eye(2) / 2,
        "append_plus": np.full((2, 2), 0.5),
    }
    averaged_ideal = appended(witnesses["append_mixed"])
    averaged_eps = trace_distance(averaged_real, permute(averaged_ideal, averaged_real.space.labels))
    keyed = {}
    for name, bit_state in witnesses.items():
        ideal = appended(bit_state)
        total = 0.0
        for _, w, s in real.entries:
            total += w * trace_distance(s, permute(ideal, s.space.labels))
        keyed[name] = total
    # triangle inequality: the copy is |0> or |1> with equal weight, so any
    # fixed witness is at average distance at least ||0><0| - |1><1||_1 / 2
    return CounterexampleResult(averaged_eps, keyed, trace_norm(np.diag([1.0, -1.0])) / 2)
