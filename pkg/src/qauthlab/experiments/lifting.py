"""Hybrid chain behind lifting security from maximally entangled inputs to
arbitrary inputs for the Pauli-composed scheme.

The message is teleported into the protocol through a fresh maximally
entangled pair.  Four outputs are computed, each per inner key and averaged
over the Pauli key and the Bell outcomes:

``real``
    The protocol run directly on the message.
``teleport_then_correct``
    Bell measurement of message and half of the pair, immediate Pauli
    correction on the other half, then the protocol.
``deferred_correction``
    Bell measurement, the protocol on the uncorrected half with a fresh
    Pauli key, and the correction applied at the very end.
``deferred_measurement``
    The protocol applied to half of the pair first; Bell measurement and
    correction last.

Consecutive outputs must coincide.  The module also builds the key-
independent simulator obtained from the maximally entangled game and checks
that its distance on the actual input never exceeds the distance measured
in that game.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..adversaries import StinespringAttack
from ..qlinalg import (
    LinearMap,
    QuantumState,
    RegisterSpace,
    apply_on_registers,
    maximally_entangled,
    partial_trace,
    pauli_operator,
    permute,
    tensor,
    trace_distance,
)
from ..schemes import PauliComposedScheme, authenticate, select_keys


@dataclass(frozen=True)
class HybridReport:
    real_vs_teleport: float
    teleport_vs_deferred_correction: float
    deferred_correction_vs_deferred_measurement: float
    pauli_merge_error: float
    lifted_epsilon: float
    entangled_epsilon: float

    @property
    def max_discrepancy(self) -> float:
        return max(
            self.real_vs_teleport,
            self.teleport_vs_deferred_correction,
            self.deferred_correction_vs_deferred_measurement,
            self.pauli_merge_error,
        )


def _bell_bra(d_qubits: int, x_mask: int, z_mask: int, left: RegisterSpace, right: RegisterSpace) -> LinearMap:
    """``<beta_pq| = <Phi| (P_pq^dag (x) I)`` as a map to the trivial space."""
    phi = maximally_entangled(left, right).vector
    pauli = pauli_operator(d_qubits, x_mask, z_mask)
    beta = np.kron(pauli, np.eye(left.dim)) @ phi
    return LinearMap(left.concat(right), RegisterSpace(), beta.conj()[None, :], check=False)


def pauli_merge_error(n: int) -> float:
    """Largest deviation from ``P_a P_b = +-P_(a xor b)`` over all n-qubit Pauli pairs."""
    d = 1 << n
    worst = 0.0
    for a in range(d):
        for b in range(d):
            for c in range(d):
                for e in range(d):
                    prod = pauli_operator(n, a, b) @ pauli_operator(n, c, e)
                    merged = pauli_operator(n, a ^ c, b ^ e)
                    sign = 1.0 if np.allclose(prod, merged) else -1.0
                    worst = max(worst, float(np.max(np.abs(prod - sign * merged))))
    return worst


def _protocol(scheme: PauliComposedScheme, attack: StinespringAttack, state: QuantumState, key) -> QuantumState:
    sent = authenticate(scheme, key, state)
    return partial_trace(scheme.ver_filter(key, attack.pre_discard(sent)), attack.discard)


def lifting_hybrid_check(
    scheme: PauliComposedScheme,
    attack: StinespringAttack,
    state: QuantumState,
    pair_labels: tuple[str, str] = ("A", "B"),
) -> HybridReport:
    """Run the hybrid chain exhaustively over inner keys, Pauli keys and Bell outcomes.

    ``state`` must contain the scheme's message register; the pair labels
    must be unused.
    """
    inner = scheme.inner
    msg = scheme.message_space
    (m_label,) = msg.labels
    a_label, b_label = pair_labels
    n = scheme.message_qubits
    d = msg.dim
    a_space = RegisterSpace.of((a_label, d))
    b_space = RegisterSpace.of((b_label, d))
    pair = maximally_entangled(a_space, b_space)
    inner_keys = select_keys(inner, policy="exhaustive")
    paulis = [(p, q) for p in range(d) for q in range(d)]
    w_pauli = 1.0 / len(paulis)
    out_labels = state.space.labels

    def as_message(st: QuantumState) -> QuantumState:
        return st.relabel({a_label: m_label})

    def corrected(st: QuantumState, p: int, q: int) -> QuantumState:
        op = LinearMap(msg, msg, pauli_operator(n, p, q), "unitary", check=False)
        return apply_on_registers(op, st, [m_label])

    def density(st: QuantumState) -> np.ndarray:
        return permute(st, out_labels).density_matrix()

    # the Bell projection is key independent: compute the branches once
    joint = tensor(state, pair)
    branches = {}
    for p, q in paulis:
        bra = _bell_bra(n, p, q, msg, b_space)
        branches[(p, q)] = as_message(apply_on_registers(bra, joint, [m_label, b_label]))

    real_vs_tel = tel_vs_def = def_vs_meas = 0.0
    per_key = {}
    for k, wk in inner_keys:
        real = tel = deferred = meas = 0
        for kp, kq in paulis:
            key = (k, kp, kq)
            real = real + w_pauli * density(_protocol(scheme, attack, state, key))
            for p, q in paulis:
                branch = branches[(p, q)]
                tel = tel + w_pauli * density(_protocol(scheme, attack, corrected(branch, p, q), key))
                deferred = deferred + w_pauli * density(corrected(_protocol(scheme, attack, branch, key), p, q))
        # protocol on half of the pair, then Bell measurement and correction
        half = tensor(state.relabel({m_label: m_label + "_in"}), pair.relabel({a_label: m_label}))
        for kp, kq in paulis:
            out = _protocol(scheme, attack, half, (k, kp, kq))
            for p, q in paulis:
                bra = _bell_bra(n, p, q, RegisterSpace.of((m_label + "_in", d)), b_space)
                teleported = apply_on_registers(bra, out, [m_label + "_in", b_label])
                meas = meas + w_pauli * density(corrected(teleported, p, q))
        real_vs_tel = max(real_vs_tel, trace_distance(_q(real), _q(tel)))
        tel_vs_def = max(tel_vs_def, trace_distance(_q(tel), _q(deferred)))
        def_vs_meas = max(def_vs_meas, trace_distance(_q(deferred), _q(meas)))
        per_key[k] = real
    return _finish_report(scheme, attack, state, inner_keys, paulis, per_key, real_vs_tel, tel_vs_def, def_vs_meas, n)


def _q(mat: np.ndarray) -> QuantumState:
    dim = mat.shape[0]
    return QuantumState(RegisterSpace.of(("_", dim)), mat)


def _key_operator(scheme: PauliComposedScheme, attack: StinespringAttack, side: RegisterSpace, key):
    """Matrix of ``Pauli^dag Ver O Auth Pauli`` from message (x) side to message
    (x) the attack's remaining outputs, discarded registers still attached."""
    msg = scheme.message_space
    space = msg.concat(side)
    # apply to every basis vector through a reference register
    ref = RegisterSpace.of(("_ref", space.dim))
    choi = QuantumState(space.concat(ref), np.eye(space.dim).reshape(-1))
    sent = authenticate(scheme, key, choi)
    out = scheme.ver_filter(key, attack.pre_discard(sent))
    out_side = out.space.without(msg.labels + ("_ref",))
    out = permute(out, msg.labels + out_side.labels + ("_ref",))
    return out.vector.reshape(msg.dim * out_side.dim, space.dim), out_side


def _finish_report(scheme, attack, state, inner_keys, paulis, per_key, real_vs_tel, tel_vs_def, def_vs_meas, n):
    msg = scheme.message_space
    (m_label,) = msg.labels
    side = attack.isometry.input_space.without(scheme.auth_space.labels)
    d = msg.dim
    w_pauli = 1.0 / len(paulis)
    weights = {k: w for k, w in inner_keys}
    # key-independent simulator J_key = Tr_M(K_key) / d, weighted by key probability
    sim = []
    out_side = None
    for k, _ in inner_keys:
        for kp, kq in paulis:
            mat, out_side = _key_operator(scheme, attack, side, (k, kp, kq))
            t = mat.reshape(d, out_side.dim, d, side.dim)
            sim.append((weights[k] * w_pauli, np.einsum("iaib->ab", t) / d))

    def simulate(st: QuantumState) -> np.ndarray:
        total = 0
        for w, j in sim:
            op = LinearMap(side, out_side, j, check=False)
            out = partial_trace(apply_on_registers(op, st.as_density(), side.labels), attack.discard)
            total = total + w * permute(out, st.space.labels).density_matrix()
        return total

    # distance on the actual input, per inner key with the Pauli key averaged
    target = simulate(state)
    lifted = 0.0
    for k, wk in inner_keys:
        lifted += wk * trace_distance(_q(per_key[k]), _q(target))
    # distance in the maximally entangled game with the same simulator
    ref_label = m_label + "_ref"
    ent_in = tensor(
        maximally_entangled(msg, RegisterSpace.of((ref_label, d))),
        state.relabel({m_label: m_label + "_side"}),
    )
    ent_target = simulate(ent_in)
    entangled = 0.0
    for k, wk in inner_keys:
        avg = 0
        for kp, kq in paulis:
            out = _protocol(scheme, attack, ent_in, (k, kp, kq))
            avg = avg + w_pauli * permute(out, ent_in.space.labels).density_matrix()
        entangled += wk * trace_distance(_q(avg), _q(ent_target))
    return HybridReport(real_vs_tel, tel_vs_def, def_vs_meas, pauli_merge_error(n), lifted, entangled)
