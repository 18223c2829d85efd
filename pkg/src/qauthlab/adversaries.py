"""Attacks in Stinespring form and the simulators that stand in for them.

An attack is an isometry from the authenticated registers plus any side
registers it touches, followed by an optional projector and a partial trace.
Three simulator constructions are provided:

* :class:`BasisRespectingIdeal` keeps only the part of the attack that maps
  each basis vector of the authenticated space to itself;
* :class:`ObliviousIdeal` averages the attack over a maximally entangled
  input, producing a map on the side registers alone;
* :class:`KeyLeakIdeal` is the simulator for the Hadamard-sandwich scheme that
  is allowed to see the outer hash key.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .qlinalg import (
    LinearMap,
    QuantumState,
    RegisterError,
    RegisterSpace,
    apply_on_registers,
    haar_random_unitaries,
    haar_random_unitary,
    maximally_entangled,
    partial_trace,
    pauli_operator,
    permute,
    tensor,
)

PRIME = "~"


@dataclass(frozen=True, eq=False)
class StinespringAttack:
    """``rho -> Tr_discard(P V rho V^dag P)``.

    ``isometry`` maps its input registers (matched by label in the state) to
    its output registers.  ``projector`` acts on ``projector_labels`` of the
    output and may be ``None``.  ``discard`` lists output registers traced out
    at the end.
    """

    name: str
    isometry: LinearMap
    projector: LinearMap | None = None
    projector_labels: tuple[str, ...] = ()
    discard: tuple[str, ...] = ()
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        out = self.isometry.output_space
        for label in tuple(self.projector_labels) + tuple(self.discard):
            out.index(label)
        if self.projector is not None and self.projector.input_space.dims != out.select(self.projector_labels).dims:
            raise RegisterError("projector does not fit its registers")

    @property
    def input_labels(self) -> tuple[str, ...]:
        return self.isometry.input_space.labels

    def pre_discard(self, state: QuantumState) -> QuantumState:
        out = apply_on_registers(self.isometry, state, self.input_labels)
        if self.projector is not None:
            out = apply_on_registers(self.projector, out, self.projector_labels)
        return out

    def apply(self, state: QuantumState) -> QuantumState:
        return partial_trace(self.pre_discard(state), self.discard)

    def describe(self) -> dict:
        return {"name": self.name, **self.params}


def _check_dims(y_space: RegisterSpace, z_space: RegisterSpace | None):
    z_space = z_space or RegisterSpace()
    return y_space.concat(z_space)


def _kron_columns(*vectors) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(out, v)
    return out


def _basis_vec(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


# ---------------------------------------------------------------------------
# Attack library
# ---------------------------------------------------------------------------


def identity_attack(y_space: RegisterSpace) -> StinespringAttack:
    return StinespringAttack("identity", LinearMap.identity(y_space))


def measure_in_basis_attack(
    y_space: RegisterSpace, basis: np.ndarray | None = None, record_label: str = "E", keep_record: bool = False
) -> StinespringAttack:
    """Coherently copy the basis index of the authenticated state into a record."""
    d = y_space.dim
    basis = np.eye(d) if basis is None else np.asarray(basis, dtype=complex)
    out_space = y_space.concat(RegisterSpace.of((record_label, d)))
    mat = np.zeros((d * d, d), dtype=complex)
    for i in range(d):
        mat += np.kron(np.outer(basis[:, i], basis[:, i].conj()), _basis_vec(d, i)[:, None])
    iso = LinearMap(y_space, out_space, mat, "isometry")
    return StinespringAttack(
        "measure_in_basis", iso, discard=() if keep_record else (record_label,), params={"keep_record": keep_record}
    )


def replace_with_junk(
    y_space: RegisterSpace, junk: np.ndarray | None = None, keep_label: str = "E", keep: bool = False
) -> StinespringAttack:
    """Move the authenticated state into the adversary's register and send ``junk``."""
    d = y_space.dim
    junk = _basis_vec(d, 0) if junk is None else np.asarray(junk, dtype=complex) / np.linalg.norm(junk)
    out_space = y_space.concat(RegisterSpace.of((keep_label, d)))
    mat = np.zeros((d * d, d), dtype=complex)
    for y in range(d):
        mat[:, y] = np.kron(junk, _basis_vec(d, y))
    iso = LinearMap(y_space, out_space, mat, "isometry")
    return StinespringAttack("replace_with_junk", iso, discard=() if keep else (keep_label,), params={"keep": keep})


def controlled_replace(
    y_space: RegisterSpace,
    control: str = "Z",
    junk: np.ndarray | None = None,
    keep_label: str = "E",
    keep: bool = False,
) -> StinespringAttack:
    """Forward the state when the control qubit is 0, otherwise swap in ``junk``."""
    d = y_space.dim
    junk = _basis_vec(d, 0) if junk is None else np.asarray(junk, dtype=complex) / np.linalg.norm(junk)
    in_space = y_space.concat(RegisterSpace.of((control, 2)))
    out_space = in_space.concat(RegisterSpace.of((keep_label, d)))
    mat = np.zeros((out_space.dim, in_space.dim), dtype=complex)
    for y in range(d):
        mat[:, y * 2 + 0] = _kron_columns(_basis_vec(d, y), _basis_vec(2, 0), _basis_vec(d, 0))
        mat[:, y * 2 + 1] = _kron_columns(junk, _basis_vec(2, 1), _basis_vec(d, y))
    iso = LinearMap(in_space, out_space, mat, "isometry")
    return StinespringAttack(
        "controlled_replace", iso, discard=() if keep else (keep_label,), params={"control": control, "keep": keep}
    )


def random_unitary_attack(
    y_space: RegisterSpace, z_space: RegisterSpace | None = None, seed: int = 0
) -> StinespringAttack:
    """Haar-random unitary on the authenticated and side registers."""
    space = _check_dims(y_space, z_space)
    u = haar_random_unitary(space.dim, np.random.default_rng([seed, space.dim]))
    return StinespringAttack("random_unitary", LinearMap(space, space, u, "unitary"), params={"seed": seed})


def random_controlled_unitary_attack(
    y_space: RegisterSpace, z_space: RegisterSpace, seed: int = 0
) -> StinespringAttack:
    """``sum_y |y><y| (x) W_y`` with independent Haar ``W_y`` on the side registers.

    This attack commutes with computational-basis measurement of the
    authenticated registers, so its basis-respecting simulator is itself.
    """
    space = y_space.concat(z_space)
    ws = haar_random_unitaries(z_space.dim, y_space.dim, np.random.default_rng([seed, space.dim, 1]))
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    dz = z_space.dim
    for y in range(y_space.dim):
        mat[y * dz:(y + 1) * dz, y * dz:(y + 1) * dz] = ws[y]
    return StinespringAttack("random_controlled_unitary", LinearMap(space, space, mat, "unitary"), params={"seed": seed})


def side_unitary_attack(y_space: RegisterSpace, z_space: RegisterSpace, unitary: np.ndarray) -> StinespringAttack:
    """Leave the authenticated registers alone and apply ``unitary`` to the side registers."""
    space = y_space.concat(z_space)
    mat = np.kron(np.eye(y_space.dim), np.asarray(unitary, dtype=complex))
    return StinespringAttack("side_unitary", LinearMap(space, space, mat, "unitary"))


def pauli_tamper(y_space: RegisterSpace, x_mask: int, z_mask: int) -> StinespringAttack:
    d = y_space.dim
    if d & (d - 1):
        raise ValueError("Pauli tampering needs a qubit register space")
    n = d.bit_length() - 1
    mat = pauli_operator(n, x_mask, z_mask)
    return StinespringAttack(
        "pauli_tamper", LinearMap(y_space, y_space, mat, "unitary"), params={"x_mask": x_mask, "z_mask": z_mask}
    )


def copy_register_attack(y_space: RegisterSpace, source: str, copy_label: str = "C") -> StinespringAttack:
    """Copy the computational-basis value of ``source`` into a fresh register that is kept."""
    d_src = y_space.dim_of(source)
    out_space = y_space.concat(RegisterSpace.of((copy_label, d_src)))
    src_pos = y_space.index(source)
    mat = np.zeros((out_space.dim, y_space.dim), dtype=complex)
    for idx in range(y_space.dim):
        value = np.unravel_index(idx, y_space.dims)[src_pos]
        mat[idx * d_src + value, idx] = 1.0
    iso = LinearMap(y_space, out_space, mat, "isometry")
    return StinespringAttack("copy_register", iso, params={"source": source})


def tag_substitution(
    y_space: RegisterSpace, message_label: str, tag_label: str, new_tag: int, flip: int = 1, keep_label: str = "E"
) -> StinespringAttack:
    """Flip message bits by ``flip`` and overwrite the tag with ``new_tag``.

    The old tag is moved into a discarded register so that the map is an
    isometry.
    """
    dm = y_space.dim_of(message_label)
    dt = y_space.dim_of(tag_label)
    if y_space.labels != (message_label, tag_label):
        raise RegisterError("tag substitution expects exactly (message, tag) registers")
    out_space = y_space.concat(RegisterSpace.of((keep_label, dt)))
    mat = np.zeros((out_space.dim, y_space.dim), dtype=complex)
    for m in range(dm):
        for t in range(dt):
            mat[((m ^ flip) * dt + new_tag) * dt + t, m * dt + t] = 1.0
    iso = LinearMap(y_space, out_space, mat, "isometry")
    return StinespringAttack("tag_substitution", iso, discard=(keep_label,), params={"new_tag": new_tag, "flip": flip})


def zero_projector_attack(y_space: RegisterSpace, z_space: RegisterSpace) -> StinespringAttack:
    """Identity isometry followed by the zero projector on the side registers."""
    space = y_space.concat(z_space)
    zero = LinearMap(z_space, z_space, np.zeros((z_space.dim, z_space.dim)), "general", check=False)
    return StinespringAttack("zero_projector", LinearMap.identity(space), zero, z_space.labels)


# ---------------------------------------------------------------------------
# Forgers: attacks that output two authenticated registers
# ---------------------------------------------------------------------------


def forger_labels(y_space: RegisterSpace, copy: int) -> RegisterSpace:
    return y_space.rename({label: f"{label}_{copy}" for label in y_space.labels})


def forger_duplicate(y_space: RegisterSpace) -> StinespringAttack:
    """Measure the authenticated pair and output it twice."""
    d = y_space.dim
    out = forger_labels(y_space, 1).concat(forger_labels(y_space, 2))
    mat = np.zeros((d * d, d), dtype=complex)
    for y in range(d):
        mat[y * d + y, y] = 1.0
    return StinespringAttack("forger_duplicate", LinearMap(y_space, out, mat, "isometry"))


def forger_tag_guess(y_space: RegisterSpace, num_messages: int, flip: int = 1) -> StinespringAttack:
    """Keep the honest pair and add a different message with a uniformly random tag."""
    d = y_space.dim
    nt = d // num_messages
    out = forger_labels(y_space, 1).concat(forger_labels(y_space, 2))
    mat = np.zeros((d * d, d), dtype=complex)
    for m in range(num_messages):
        for t in range(nt):
            y = m * nt + t
            second = np.zeros(d, dtype=complex)
            second[((m ^ flip) % num_messages) * nt:((m ^ flip) % num_messages + 1) * nt] = 1 / np.sqrt(nt)
            mat[:, y] = np.kron(_basis_vec(d, y), second)
    return StinespringAttack("forger_tag_guess", LinearMap(y_space, out, mat, "isometry"), params={"flip": flip})


def forger_random_isometry(y_space: RegisterSpace, seed: int = 0) -> StinespringAttack:
    """Haar unitary on two copies of the authenticated space applied to ``|y>|0>``."""
    d = y_space.dim
    u = haar_random_unitary(d * d, np.random.default_rng([seed, d, 2]))
    out = forger_labels(y_space, 1).concat(forger_labels(y_space, 2))
    mat = u[:, np.arange(d) * d]
    return StinespringAttack("forger_random_isometry", LinearMap(y_space, out, mat, "isometry"), params={"seed": seed})


def forger_as_attack(forger: StinespringAttack, y_space: RegisterSpace, side_label_suffix: str = "_2") -> StinespringAttack:
    """View a forger as an ordinary attack: the first copy goes to the receiver,
    the second copy is kept by the adversary."""
    mapping = {f"{label}_1": label for label in y_space.labels}
    iso = forger.isometry
    out = iso.output_space.rename(mapping)
    relabelled = LinearMap(iso.input_space, out, iso.matrix, iso.kind, check=False)
    discard = tuple(f"{label}{side_label_suffix}" for label in y_space.labels)
    return StinespringAttack(forger.name, relabelled, discard=discard, params=forger.params)


# ---------------------------------------------------------------------------
# Simulator built from the part of the attack that respects a basis
# ---------------------------------------------------------------------------


def _split_attack(attack: StinespringAttack, y_labels: Sequence[str]):
    """Return the attack matrix as a tensor indexed ``[y_out, z_out, y_in, z_in]``."""
    iso = attack.isometry
    y_labels = tuple(y_labels)
    ins, outs = iso.input_space, iso.output_space
    for label in y_labels:
        if outs.dim_of(label) != ins.dim_of(label):
            raise RegisterError(f"attack must return register {label!r} unchanged in size")
    zin = ins.without(y_labels)
    zout = outs.without(y_labels)
    ydim = ins.select(y_labels).dim
    in_perm = [ins.index(l) for l in y_labels + zin.labels]
    out_perm = [outs.index(l) for l in y_labels + zout.labels]
    t = iso.matrix.reshape(outs.dims + ins.dims)
    t = np.transpose(t, out_perm + [len(outs) + i for i in in_perm])
    return t.reshape(ydim, zout.dim, ydim, zin.dim), zin, zout


@dataclass(frozen=True, eq=False)
class BasisRespectingIdeal:
    """Simulator that applies ``A_i = (<b_i| (x) I) V (|b_i> (x) I)`` on the side
    registers whenever the authenticated registers are in basis state ``b_i``.

    ``blocks[i]`` holds ``A_i``.  :meth:`apply` uses the compact single-Kraus
    form; :meth:`apply_literal` runs the explicit circuit (copy into a fresh
    register, attack the copy, compare, keep the matching branch, discard the
    scratch registers) and must agree with it.
    """

    attack: StinespringAttack
    y_space: RegisterSpace
    basis: np.ndarray
    blocks: np.ndarray
    zin: RegisterSpace
    zout: RegisterSpace

    def effective_map(self) -> LinearMap:
        return self._effective

    @cached_property
    def _effective(self) -> LinearMap:
        b = self.basis
        mat = np.einsum("yi,xi,iab->yaxb", b, b.conj(), self.blocks, optimize=True)
        dy = self.y_space.dim
        mat = mat.reshape(dy * self.zout.dim, dy * self.zin.dim)
        in_space = self.y_space.concat(self.zin)
        out_space = self.y_space.concat(self.zout)
        return LinearMap(in_space, out_space, mat, check=False)

    def _apply_blocks(self, state: QuantumState) -> QuantumState:
        """Apply ``sum_i |b_i><b_i| (x) A_i`` without forming it as a matrix."""
        y, zin, zout = self.y_space, self.zin, self.zout
        labels = y.labels + zin.labels
        rest = tuple(l for l in state.space.labels if l not in set(labels))
        ordered = permute(state, labels + rest)
        dy, di, do = y.dim, zin.dim, zout.dim
        rot = self.basis
        out_space = y.concat(zout).concat(state.space.select(rest))
        computational = self.is_computational
        blocks = self.blocks
        if ordered.is_pure:
            psi = ordered.data.reshape(dy, -1)
            if not computational:
                psi = rot.conj().T @ psi
            psi = np.matmul(blocks, psi.reshape(dy, di, -1)).reshape(dy, -1)
            if not computational:
                psi = rot @ psi
            return QuantumState(out_space, psi.reshape(-1))
        r = ordered.space.dim // (dy * di)
        rho = ordered.data
        if not computational:
            full = np.kron(rot, np.eye(di * r))
            rho = full.conj().T @ rho @ full
        # left action: rows indexed (y, a, r)
        rho = np.matmul(blocks, rho.reshape(dy, di, -1)).reshape(dy * do * r, dy * di * r)
        # right action on columns, via the conjugate transpose
        rho = np.matmul(blocks, rho.conj().T.reshape(dy, di, -1)).reshape(dy * do * r, dy * do * r).conj().T
        if not computational:
            full = np.kron(rot, np.eye(do * r))
            rho = full @ rho @ full.conj().T
        return QuantumState(out_space, rho)

    @cached_property
    def is_computational(self) -> bool:
        return bool(np.array_equal(self.basis, np.eye(self.basis.shape[0])))

    @property
    def discard(self) -> tuple[str, ...]:
        return self.attack.discard

    def _project(self, state: QuantumState) -> QuantumState:
        a = self.attack
        if a.projector is not None:
            state = apply_on_registers(a.projector, state, a.projector_labels)
        return state

    def _finish(self, state: QuantumState) -> QuantumState:
        return partial_trace(self._project(state), self.discard)

    def pre_discard(self, state: QuantumState) -> QuantumState:
        return self._project(self._apply_blocks(state))

    def apply(self, state: QuantumState) -> QuantumState:
        return partial_trace(self.pre_discard(state), self.discard)

    def block(self, index: int) -> np.ndarray:
        return self.blocks[index]

    def apply_literal(self, state: QuantumState, flag_label: str = "F~") -> QuantumState:
        y = self.y_space
        dy = y.dim
        b = self.basis
        copy_space = y.rename({l: l + PRIME for l in y.labels})
        # copy the basis index of Y into a fresh register Y~
        clone = np.zeros((dy * dy, dy), dtype=complex)
        for i in range(dy):
            clone += np.kron(np.outer(b[:, i], b[:, i].conj()), b[:, i][:, None])
        state = apply_on_registers(LinearMap(y, y.concat(copy_space), clone, "isometry"), state, y.labels)
        # run the attack on the copy
        mapping = {l: l + PRIME for l in y.labels}
        iso = self.attack.isometry.relabel(mapping)
        state = apply_on_registers(iso, state, iso.input_space.labels)
        # compare Y with Y~: matching branch resets the copy and leaves the flag at 0
        cmp_out = y.concat(copy_space).concat(RegisterSpace.of((flag_label, 2)))
        cmp = np.zeros((cmp_out.dim, dy * dy), dtype=complex)
        for i in range(dy):
            for j in range(dy):
                src = np.kron(b[:, i], b[:, j])
                if i == j:
                    dst = _kron_columns(b[:, i], _basis_vec(dy, 0), _basis_vec(2, 0))
                else:
                    dst = _kron_columns(b[:, i], b[:, j], _basis_vec(2, 1))
                cmp += np.outer(dst, src.conj())
        state = apply_on_registers(LinearMap(y.concat(copy_space), cmp_out, cmp, "isometry"), state, y.labels + copy_space.labels)
        keep = LinearMap(RegisterSpace.of((flag_label, 2)), RegisterSpace.of((flag_label, 2)), np.diag([1.0, 0.0]), "projector")
        state = apply_on_registers(keep, state, [flag_label])
        state = self._finish(state)
        state = partial_trace(state, copy_space.labels + (flag_label,))
        return state


def construct_ideal_basis_respecting(
    attack: StinespringAttack, y_space: RegisterSpace, basis: np.ndarray | None = None
) -> BasisRespectingIdeal:
    tensor_, zin, zout = _split_attack(attack, y_space.labels)
    dy = y_space.dim
    b = np.eye(dy, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    # rotate both Y legs into the chosen basis
    rotated = np.einsum("ia,ibjc,jd->adbc", b.conj(), tensor_, b, optimize=True)
    # rotated[a, d, b, c] = <b_a| V |b_d> with Z indices b (out) and c (in)
    blocks = np.stack([rotated[i, i] for i in range(dy)])
    return BasisRespectingIdeal(attack, y_space, b, blocks, zin, zout)


# ---------------------------------------------------------------------------
# Oblivious simulator from a maximally entangled probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ObliviousIdeal:
    """Map on the side registers alone: ``Gamma = Tr_Y(V) / dim Y``.

    :meth:`apply_entangled` realizes it by attacking one half of a maximally
    entangled pair and projecting the pair back onto that state.
    """

    attack: StinespringAttack
    y_space: RegisterSpace
    gamma: LinearMap

    @property
    def discard(self) -> tuple[str, ...]:
        return self.attack.discard

    def _project(self, state):
        a = self.attack
        if a.projector is not None:
            state = apply_on_registers(a.projector, state, a.projector_labels)
        return state

    def _finish(self, state):
        return partial_trace(self._project(state), self.discard)

    def pre_discard(self, state: QuantumState) -> QuantumState:
        return self._project(apply_on_registers(self.gamma, state, self.gamma.input_space.labels))

    def apply(self, state: QuantumState) -> QuantumState:
        return partial_trace(self.pre_discard(state), self.discard)

    def apply_entangled(self, state: QuantumState) -> QuantumState:
        y = self.y_space
        left = y.rename({l: l + PRIME for l in y.labels})
        right = y.rename({l: l + PRIME + PRIME for l in y.labels})
        pair = maximally_entangled(left, right)
        state = tensor(state, pair)
        iso = self.attack.isometry.relabel({l: l + PRIME for l in y.labels})
        state = apply_on_registers(iso, state, iso.input_space.labels)
        phi = pair.vector
        bra = LinearMap(left.concat(right), RegisterSpace(), phi.conj()[None, :], check=False)
        state = apply_on_registers(bra, state, left.labels + right.labels)
        return self._finish(state)


def construct_ideal_oblivious_gamma(attack: StinespringAttack, y_space: RegisterSpace) -> ObliviousIdeal:
    tensor_, zin, zout = _split_attack(attack, y_space.labels)
    gamma = np.einsum("iaic->ac", tensor_) / y_space.dim
    return ObliviousIdeal(attack, y_space, LinearMap(zin, zout, gamma, check=False))


# ---------------------------------------------------------------------------
# Key-leaking simulator for the Hadamard-sandwich scheme
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KeyLeakIdeal:
    """Simulator that knows the outer hash key ``h``.

    It applies ``Gamma_h = N^{-1} sum_x A_(x, h(x))`` to the side registers,
    where ``A`` are the blocks of a computational-basis-respecting attack on
    the outer authenticated space and ``x`` ranges over the ``N`` inner
    authenticated strings.
    """

    scheme: object
    ideal: BasisRespectingIdeal

    def valid_indices(self, outer_key) -> np.ndarray:
        outer = self.scheme.outer
        tags = outer.tags(outer_key)
        return np.arange(outer.num_messages) * outer.num_tags + tags

    def gamma(self, outer_key) -> np.ndarray:
        idx = self.valid_indices(outer_key)
        return self.ideal.blocks[idx].mean(axis=0)

    def gamma_map(self, outer_key) -> LinearMap:
        return LinearMap(self.ideal.zin, self.ideal.zout, self.gamma(outer_key), check=False)

    @property
    def discard(self) -> tuple[str, ...]:
        return self.ideal.discard

    def pre_discard(self, state: QuantumState, outer_key) -> QuantumState:
        g = self.gamma_map(outer_key)
        return self.ideal._project(apply_on_registers(g, state, g.input_space.labels))

    def apply(self, state: QuantumState, outer_key) -> QuantumState:
        return partial_trace(self.pre_discard(state, outer_key), self.discard)

    def apply_entangled(self, state: QuantumState, outer_key) -> QuantumState:
        """Attack one half of ``N^{-1/2} sum_x |x,h(x)>|x,h(x)>`` with the
        basis-respecting map and project the pair back onto that state."""
        y = self.ideal.y_space
        left = y.rename({l: l + PRIME for l in y.labels})
        right = y.rename({l: l + PRIME + PRIME for l in y.labels})
        idx = self.valid_indices(outer_key)
        phi = np.zeros(y.dim * y.dim, dtype=complex)
        phi[idx * y.dim + idx] = 1 / np.sqrt(len(idx))
        state = tensor(state, QuantumState(left.concat(right), phi))
        eff = self.ideal.effective_map().relabel({l: l + PRIME for l in y.labels})
        state = apply_on_registers(eff, state, eff.input_space.labels)
        bra = LinearMap(left.concat(right), RegisterSpace(), phi.conj()[None, :], check=False)
        state = apply_on_registers(bra, state, left.labels + right.labels)
        return self.ideal._finish(state)


def construct_ideal_keyleak_qft(scheme, attack: StinespringAttack) -> KeyLeakIdeal:
    """Simulator for the Hadamard-sandwich scheme given an attack on its
    outer authenticated registers."""
    ideal = construct_ideal_basis_respecting(attack, scheme.outer.auth_space)
    return KeyLeakIdeal(scheme, ideal)


#: Attack catalog used by the command line interface.
ATTACK_CATALOG = {
    "identity": "leave the authenticated registers untouched",
    "measure_in_basis": "measure the authenticated registers in a basis",
    "replace_with_junk": "swap in a fixed junk state and keep the original",
    "controlled_replace": "replace only when a side qubit is set",
    "random_unitary": "Haar unitary on authenticated and side registers",
    "random_controlled_unitary": "independent Haar unitary on the side registers per basis value",
    "pauli_tamper": "apply a fixed Pauli to the authenticated registers",
    "copy_register": "copy one register's basis value into a kept register",
    "tag_substitution": "flip the message and overwrite the tag",
    "zero_projector": "project the side registers to zero",
    "forger_duplicate": "output the received pair twice",
    "forger_tag_guess": "keep the pair and guess a tag for another message",
    "forger_random_isometry": "random isometry onto two authenticated registers",
}
