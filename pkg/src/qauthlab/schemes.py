"""Keyed quantum authentication schemes.

A scheme fixes a message space, an authenticated space and, for each key, an
isometry from the first into the second.  Verification under a key is the
adjoint of that isometry restricted to the accepting subspace: it returns the
message on acceptance and a subnormalized state otherwise.  The helpers at the
bottom add the explicit reject branch and enumerate or sample keys.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterator, Sequence

import numpy as np

from .hashfam import GF2Field, PolyHashFamily, PolyHashKey
from .qlinalg import (
    LinearMap,
    QuantumState,
    RegisterError,
    RegisterSpace,
    apply_on_registers,
    hadamard_transform,
    haar_random_unitary,
    partial_trace,
    pauli_operator,
    permute,
    tensor,
)

#: Key spaces up to this size are enumerated; larger ones are sampled.
EXHAUSTIVE_KEY_LIMIT = 2 ** 16


class AuthScheme:
    """Interface shared by every construction.

    Subclasses provide :attr:`message_space`, :attr:`auth_space`,
    :attr:`num_keys`, :meth:`keys`, :meth:`sample_key` and
    :meth:`auth_isometry`.  :meth:`key_classes` may group keys that induce the
    same isometry so that exact key averages stay cheap.
    """

    name: str = "scheme"
    tag: str = ""

    message_space: RegisterSpace
    auth_space: RegisterSpace

    @property
    def num_keys(self) -> int:
        raise NotImplementedError

    def keys(self) -> Iterator[Any]:
        raise NotImplementedError

    def sample_key(self, rng: np.random.Generator) -> Any:
        raise NotImplementedError

    def auth_isometry(self, key) -> LinearMap:
        raise NotImplementedError

    def key_classes(self) -> list[tuple[Any, int]] | None:
        """Representative keys with multiplicities, or ``None`` if unavailable."""
        return None

    def key_id(self, key) -> Any:
        """JSON-friendly identifier of a key."""
        return key

    def accept_projector(self, key) -> LinearMap:
        auth = self.auth_isometry(key).matrix
        return LinearMap(self.auth_space, self.auth_space, auth @ auth.conj().T, "projector", check=False)

    def ver_filter(self, key, state: QuantumState) -> QuantumState:
        """Accepting branch of verification: ``Auth_k^dag`` on the authenticated registers."""
        return apply_on_registers(self.auth_isometry(key).adjoint(), state, self.auth_space.labels)

    def describe(self) -> dict:
        return {"name": self.name}


def authenticate(scheme: AuthScheme, key, state: QuantumState) -> QuantumState:
    return apply_on_registers(scheme.auth_isometry(key), state, scheme.message_space.labels)


def ver_filter(scheme: AuthScheme, key, state: QuantumState) -> QuantumState:
    return scheme.ver_filter(key, state)


@dataclass(frozen=True)
class VerOutcome:
    """Both branches of verification.

    ``rejected`` is the maximally mixed message tensored with whatever the
    rejected part leaves on the other registers; ``reject_probability`` is its
    weight.
    """

    accepted: QuantumState
    rejected: QuantumState

    @property
    def accept_probability(self) -> float:
        return self.accepted.weight

    @property
    def reject_probability(self) -> float:
        return self.rejected.weight

    def flagged(self, flag_label: str = "F") -> QuantumState:
        """Single density matrix with a flag register (0 accept, 1 reject) first."""
        acc = tensor(QuantumState.basis(RegisterSpace.of((flag_label, 2)), [0]), self.accepted.as_density())
        rej = tensor(QuantumState.basis(RegisterSpace.of((flag_label, 2)), [1]), self.rejected.as_density())
        return QuantumState(acc.space, acc.data + rej.data)


def ver_full(scheme: AuthScheme, key, state: QuantumState) -> VerOutcome:
    accepted = scheme.ver_filter(key, state)
    y_labels = scheme.auth_space.labels
    proj = scheme.accept_projector(key)
    reject_proj = LinearMap(proj.input_space, proj.output_space, np.eye(proj.matrix.shape[0]) - proj.matrix, check=False)
    rejected_part = apply_on_registers(reject_proj, state, y_labels)
    rest = partial_trace(rejected_part, y_labels)
    msg = scheme.message_space
    mixed = QuantumState(msg, np.eye(msg.dim) / msg.dim)
    rejected = tensor(mixed, rest.as_density())
    # keep the message registers where verification put them
    rejected = permute(rejected, accepted.space.labels)
    return VerOutcome(accepted, rejected)


# ---------------------------------------------------------------------------
# Keyed ensembles and key selection
# ---------------------------------------------------------------------------


@dataclass
class KeyedEnsemble:
    """Per-key outputs of an experiment: ``(key id, weight, state)`` triples.

    Weights sum to one when keys are enumerated exhaustively or sampled
    uniformly.  The key register itself is kept as this explicit list rather
    than as a quantum register.
    """

    entries: list[tuple[Any, float, QuantumState]] = field(default_factory=list)
    exhaustive: bool = True

    def append(self, key_id, weight: float, state: QuantumState) -> None:
        self.entries.append((key_id, float(weight), state))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w, _ in self.entries])

    def averaged(self) -> QuantumState:
        """Key register traced out."""
        first = self.entries[0][2]
        total = sum(w * s.density_matrix() for _, w, s in self.entries)
        return QuantumState(first.space, total)


@dataclass(frozen=True)
class KeySelection:
    keys: tuple
    weights: tuple
    exhaustive: bool

    def __iter__(self):
        return iter(zip(self.keys, self.weights))

    def __len__(self) -> int:
        return len(self.keys)


def select_keys(
    scheme: AuthScheme,
    rng: np.random.Generator | None = None,
    samples: int = 1024,
    policy: str = "auto",
    limit: int = EXHAUSTIVE_KEY_LIMIT,
) -> KeySelection:
    """Exhaustive (possibly class-grouped) enumeration or uniform sampling.

    ``policy`` is ``"auto"`` (enumerate when at most ``limit`` distinct keys or
    key classes exist), ``"exhaustive"`` or ``"sampled"``.
    """
    if policy not in ("auto", "exhaustive", "sampled"):
        raise ValueError(f"unknown key policy {policy!r}")
    if policy != "sampled":
        classes = scheme.key_classes()
        if classes is not None and (policy == "exhaustive" or len(classes) <= limit):
            total = sum(c for _, c in classes)
            return KeySelection(tuple(k for k, _ in classes), tuple(c / total for _, c in classes), True)
        if policy == "exhaustive" or scheme.num_keys <= limit:
            keys = tuple(scheme.keys())
            return KeySelection(keys, tuple([1.0 / len(keys)] * len(keys)), True)
    if rng is None:
        raise ValueError("sampling keys requires a random generator")
    keys = tuple(scheme.sample_key(rng) for _ in range(samples))
    return KeySelection(keys, tuple([1.0 / samples] * samples), False)


# ---------------------------------------------------------------------------
# Classical-hash construction
# ---------------------------------------------------------------------------


def _qubit_space(label: str, bits: int) -> RegisterSpace:
    return RegisterSpace.of((label, 1 << bits))


@dataclass(frozen=True, eq=False)
class WegmanCarterScheme(AuthScheme):
    """``|m> -> |m>|h_k(m)>`` with a three-wise independent hash ``h_k``."""

    family: PolyHashFamily
    message_bits: int
    message_space: RegisterSpace = None  # type: ignore[assignment]
    tag_label: str = "T"

    name = "wegman_carter"
    tag = "classical-hash"

    def __post_init__(self):
        if self.message_bits > self.family.field.width:
            raise ValueError("messages must embed into the field")
        space = self.message_space or _qubit_space("M", self.message_bits)
        if space.dim != 1 << self.message_bits:
            raise RegisterError("message space dimension must be 2^message_bits")
        object.__setattr__(self, "message_space", space)
        object.__setattr__(self, "auth_space", space.concat(RegisterSpace.of((self.tag_label, 1 << self.family.tag_bits))))

    @property
    def num_messages(self) -> int:
        return 1 << self.message_bits

    @property
    def num_tags(self) -> int:
        return 1 << self.family.tag_bits

    @property
    def num_keys(self) -> int:
        return self.family.num_keys

    def keys(self):
        return self.family.keys()

    def sample_key(self, rng):
        return self.family.sample_key(rng)

    def key_id(self, key: PolyHashKey) -> int:
        return key.to_int(self.family.field.width)

    def tags(self, key: PolyHashKey) -> np.ndarray:
        return np.array([self.family(key, m) for m in range(self.num_messages)], dtype=np.int64)

    def auth_from_tags(self, tags: Sequence[int]) -> LinearMap:
        nt = self.num_tags
        mat = np.zeros((self.num_messages * nt, self.num_messages), dtype=complex)
        for m, t in enumerate(tags):
            mat[m * nt + int(t), m] = 1.0
        return LinearMap(self.message_space, self.auth_space, mat, "isometry", check=False)

    def auth_isometry(self, key: PolyHashKey) -> LinearMap:
        return self.auth_from_tags(self.tags(key))

    def key_classes(self):
        if self.num_keys > 1 << 22:
            return None
        table = self.family.tag_table(range(self.num_messages))
        _, first, counts = np.unique(table, axis=0, return_index=True, return_counts=True)
        q = self.family.field.order
        out = []
        for idx, count in sorted(zip(first.tolist(), counts.tolist())):
            if self.family.pairwise_only:
                key = PolyHashKey(0, idx // q, idx % q)
            else:
                key = PolyHashKey(idx // (q * q), (idx // q) % q, idx % q)
            out.append((key, count))
        return out

    def describe(self) -> dict:
        return {
            "name": self.name,
            "field_width": self.family.field.width,
            "message_bits": self.message_bits,
            "tag_bits": self.family.tag_bits,
            "pairwise_only": self.family.pairwise_only,
        }


def wegman_carter_scheme(
    width: int,
    message_bits: int,
    tag_bits: int,
    *,
    pairwise_only: bool = False,
    message_space: RegisterSpace | None = None,
    tag_label: str = "T",
    modulus: int = 0,
) -> WegmanCarterScheme:
    family = PolyHashFamily(GF2Field(width, modulus), tag_bits, pairwise_only)
    return WegmanCarterScheme(family, message_bits, message_space, tag_label)


# ---------------------------------------------------------------------------
# Hash, Hadamard, hash
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AuthQFTAuthScheme(AuthScheme):
    """Classical hash tag, Hadamard on every authenticated qubit, second hash tag.

    Keys are pairs ``(inner key, outer key)``.  ``auth_transform`` replaces the
    Hadamard layer on the authentication side only; verification always uses
    the true inverse, which is how a faulty transform is detected.
    """

    inner: WegmanCarterScheme
    outer: WegmanCarterScheme
    auth_transform: np.ndarray | None = None

    name = "auth_qft_auth"
    tag = "hadamard-sandwich"

    def __post_init__(self):
        if self.outer.message_space != self.inner.auth_space:
            raise RegisterError("outer scheme must authenticate the inner authenticated space")
        object.__setattr__(self, "message_space", self.inner.message_space)
        object.__setattr__(self, "auth_space", self.outer.auth_space)

    @property
    def inner_qubits(self) -> int:
        return int(np.log2(self.inner.auth_space.dim))

    @property
    def hadamard(self) -> LinearMap:
        space = self.inner.auth_space
        return LinearMap(space, space, hadamard_transform(self.inner_qubits), "unitary", check=False)

    @property
    def num_keys(self) -> int:
        return self.inner.num_keys * self.outer.num_keys

    def keys(self):
        return itertools.product(self.inner.keys(), self.outer.keys())

    def sample_key(self, rng):
        return (self.inner.sample_key(rng), self.outer.sample_key(rng))

    def key_id(self, key):
        return [self.inner.key_id(key[0]), self.outer.key_id(key[1])]

    def key_classes(self):
        if self.num_keys > 1 << 24:
            return None
        inner = self.inner.key_classes()
        outer = self.outer.key_classes()
        if inner is None or outer is None or len(inner) * len(outer) > EXHAUSTIVE_KEY_LIMIT:
            return None
        return [((ki, ko), ci * co) for (ki, ci), (ko, co) in itertools.product(inner, outer)]

    def auth_isometry(self, key) -> LinearMap:
        k_inner, k_outer = key
        transform = self.hadamard
        if self.auth_transform is not None:
            transform = LinearMap(transform.input_space, transform.output_space, self.auth_transform, check=False)
        return self.outer.auth_isometry(k_outer).compose(transform.compose(self.inner.auth_isometry(k_inner)))

    def ver_filter(self, key, state: QuantumState) -> QuantumState:
        """Outer filter, inverse Hadamard layer, inner filter."""
        k_inner, k_outer = key
        state = self.outer.ver_filter(k_outer, state)
        state = apply_on_registers(self.hadamard.adjoint(), state, self.inner.auth_space.labels)
        return self.inner.ver_filter(k_inner, state)

    def describe(self) -> dict:
        return {"name": self.name, "inner": self.inner.describe(), "outer": self.outer.describe()}


def auth_qft_auth_scheme(
    message_bits: int,
    inner_tag_bits: int,
    outer_tag_bits: int,
    *,
    inner_width: int | None = None,
    outer_width: int | None = None,
    auth_transform: np.ndarray | None = None,
) -> AuthQFTAuthScheme:
    inner_width = inner_width or max(message_bits, inner_tag_bits)
    n = message_bits + inner_tag_bits
    outer_width = outer_width or max(n, outer_tag_bits)
    inner = wegman_carter_scheme(inner_width, message_bits, inner_tag_bits, tag_label="T1")
    outer = wegman_carter_scheme(outer_width, n, outer_tag_bits, message_space=inner.auth_space, tag_label="T2")
    return AuthQFTAuthScheme(inner, outer, auth_transform)


# ---------------------------------------------------------------------------
# Unitary design construction
# ---------------------------------------------------------------------------


def _single_qubit_layer_circuit(n: int, depth: int, rng: np.random.Generator) -> np.ndarray:
    """Alternating layers of Haar single-qubit gates and a CZ chain."""
    dim = 1 << n
    cz = np.ones(dim, dtype=complex)
    for x in range(dim):
        bits = [(x >> (n - 1 - i)) & 1 for i in range(n)]
        if sum(bits[i] & bits[i + 1] for i in range(n - 1)) % 2:
            cz[x] = -1
    out = np.eye(dim, dtype=complex)
    for _ in range(depth):
        layer = np.ones((1, 1), dtype=complex)
        for _ in range(n):
            layer = np.kron(layer, haar_random_unitary(2, rng))
        out = cz[:, None] * (layer @ out)
    return out


def _random_clifford_circuit(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random word in H, S and CZ gates; Clifford, not uniformly distributed."""
    dim = 1 << n
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    s = np.diag([1, 1j])
    out = np.eye(dim, dtype=complex)
    for _ in range(8 * n * n + 8):
        qubit = int(rng.integers(n))
        choice = int(rng.integers(3 if n > 1 else 2))
        if choice < 2:
            gate = h if choice == 0 else s
            full = np.kron(np.kron(np.eye(1 << qubit), gate), np.eye(1 << (n - qubit - 1)))
            out = full @ out
        else:
            other = (qubit + 1) % n
            diag = np.array([-1 if ((x >> (n - 1 - qubit)) & (x >> (n - 1 - other)) & 1) else 1 for x in range(dim)])
            out = diag[:, None] * out
    return out


@dataclass(frozen=True, eq=False)
class UnitaryDesignScheme(AuthScheme):
    """``|psi> -> U_k (|psi> (x) |0^s>)`` for a keyed family of unitaries.

    ``ensemble`` selects how ``U_k`` is produced: ``"haar"`` draws an exact
    Haar unitary from a per-key seed, ``"layers"`` builds a shallow circuit of
    random single-qubit layers, ``"clifford"`` a random Clifford word and
    ``"explicit"`` uses the matrices in ``unitaries``.
    """

    message_dim: int
    tag_qubits: int
    table_size: int = 1024
    seed: int = 0
    ensemble: str = "haar"
    unitaries: tuple = ()
    depth: int = 4

    name = "unitary_design"
    tag = "unitary-design"

    def __post_init__(self):
        if self.message_dim < 1 or self.tag_qubits < 0:
            raise ValueError("invalid message dimension or tag size")
        if self.ensemble not in ("haar", "layers", "clifford", "explicit"):
            raise ValueError(f"unknown ensemble {self.ensemble!r}")
        if self.ensemble in ("layers", "clifford") and self.message_dim & (self.message_dim - 1):
            raise ValueError("circuit ensembles need a power-of-two message dimension")
        if self.ensemble == "explicit":
            if not self.unitaries:
                raise ValueError("explicit ensemble needs unitaries")
            object.__setattr__(self, "table_size", len(self.unitaries))
        object.__setattr__(self, "message_space", RegisterSpace.of(("M", self.message_dim)))
        object.__setattr__(self, "auth_space", RegisterSpace.of(("M", self.message_dim), ("T", 1 << self.tag_qubits)))
        object.__setattr__(self, "_cache", lru_cache(maxsize=256)(self._make_unitary))

    @property
    def dim(self) -> int:
        return self.message_dim << self.tag_qubits

    @property
    def num_keys(self) -> int:
        return self.table_size

    def keys(self):
        return iter(range(self.table_size))

    def sample_key(self, rng):
        return int(rng.integers(self.table_size))

    def key_classes(self):
        return [(k, 1) for k in range(self.table_size)] if self.table_size <= EXHAUSTIVE_KEY_LIMIT else None

    def _make_unitary(self, key: int) -> np.ndarray:
        if self.ensemble == "explicit":
            return np.asarray(self.unitaries[key], dtype=complex)
        rng = np.random.default_rng([self.seed, key])
        if self.ensemble == "haar":
            return haar_random_unitary(self.dim, rng)
        n = int(np.log2(self.dim))
        if self.ensemble == "layers":
            return _single_qubit_layer_circuit(n, self.depth, rng)
        return _random_clifford_circuit(n, rng)

    def unitary(self, key: int) -> np.ndarray:
        if not 0 <= key < self.table_size:
            raise KeyError(f"key {key} outside the table")
        return self._cache(int(key))  # type: ignore[attr-defined]

    def auth_isometry(self, key: int) -> LinearMap:
        cols = np.arange(self.message_dim) << self.tag_qubits
        return LinearMap(self.message_space, self.auth_space, self.unitary(key)[:, cols], "isometry", check=False)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "message_dim": self.message_dim,
            "tag_qubits": self.tag_qubits,
            "table_size": self.table_size,
            "ensemble": self.ensemble,
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# Pauli-composed lift
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PauliComposedScheme(AuthScheme):
    """Apply a keyed Pauli to the message, then the inner scheme.

    Keys are ``(inner key, x mask, z mask)``.
    """

    inner: AuthScheme

    name = "pauli_composed"
    tag = "pauli-lift"

    def __post_init__(self):
        dim = self.inner.message_space.dim
        if dim & (dim - 1):
            raise ValueError("Pauli lifting needs a qubit message space")
        object.__setattr__(self, "message_space", self.inner.message_space)
        object.__setattr__(self, "auth_space", self.inner.auth_space)

    @property
    def message_qubits(self) -> int:
        return int(np.log2(self.message_space.dim))

    @property
    def num_keys(self) -> int:
        return self.inner.num_keys * 4 ** self.message_qubits

    def keys(self):
        d = self.message_space.dim
        for k in self.inner.keys():
            for p in range(d):
                for q in range(d):
                    yield (k, p, q)

    def sample_key(self, rng):
        d = self.message_space.dim
        return (self.inner.sample_key(rng), int(rng.integers(d)), int(rng.integers(d)))

    def key_id(self, key):
        return [self.inner.key_id(key[0]), key[1], key[2]]

    def key_classes(self):
        inner = self.inner.key_classes()
        if inner is None:
            return None
        d = self.message_space.dim
        return [((k, p, q), c) for k, c in inner for p in range(d) for q in range(d)]

    def pauli(self, p: int, q: int) -> LinearMap:
        space = self.message_space
        return LinearMap(space, space, pauli_operator(self.message_qubits, p, q), "unitary", check=False)

    def auth_isometry(self, key) -> LinearMap:
        k, p, q = key
        return self.inner.auth_isometry(k).compose(self.pauli(p, q))

    def ver_filter(self, key, state):
        k, p, q = key
        state = self.inner.ver_filter(k, state)
        return apply_on_registers(self.pauli(p, q).adjoint(), state, self.message_space.labels)

    def describe(self) -> dict:
        return {"name": self.name, "inner": self.inner.describe()}


# ---------------------------------------------------------------------------
# Append a random bit
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AppendRandomBitScheme(AuthScheme):
    """Inner scheme followed by a keyed classical bit that verification ignores.

    Keys are ``(inner key, bit)``.  Because the bit is never checked, the
    accepting projector is the inner one tensored with the identity on the
    bit register, and the verified output has the bit traced out.
    """

    inner: AuthScheme
    bit_label: str = "B"

    name = "append_random_bit"
    tag = "keyed-vs-averaged"

    def __post_init__(self):
        object.__setattr__(self, "message_space", self.inner.message_space)
        object.__setattr__(self, "auth_space", self.inner.auth_space.concat(RegisterSpace.of((self.bit_label, 2))))

    @property
    def num_keys(self) -> int:
        return self.inner.num_keys * 2

    def keys(self):
        for k in self.inner.keys():
            yield (k, 0)
            yield (k, 1)

    def sample_key(self, rng):
        return (self.inner.sample_key(rng), int(rng.integers(2)))

    def key_id(self, key):
        return [self.inner.key_id(key[0]), key[1]]

    def key_classes(self):
        inner = self.inner.key_classes()
        if inner is None:
            return None
        return [((k, b), c) for k, c in inner for b in (0, 1)]

    def auth_isometry(self, key) -> LinearMap:
        k, b = key
        inner = self.inner.auth_isometry(k)
        ket = np.zeros((2, 1), dtype=complex)
        ket[b, 0] = 1.0
        return LinearMap(self.message_space, self.auth_space, np.kron(inner.matrix, ket), "isometry", check=False)

    def accept_projector(self, key) -> LinearMap:
        inner = self.inner.accept_projector(key[0]).matrix
        return LinearMap(self.auth_space, self.auth_space, np.kron(inner, np.eye(2)), "projector", check=False)

    def ver_filter(self, key, state):
        state = self.inner.ver_filter(key[0], state)
        return partial_trace(state, [self.bit_label])

    def describe(self) -> dict:
        return {"name": self.name, "inner": self.inner.describe()}


#: Constructor catalog used by the command line interface.
SCHEME_CATALOG: dict[str, tuple[str, Callable[..., AuthScheme], str]] = {
    "wegman_carter": ("classical-hash", wegman_carter_scheme, "hash tag appended to a basis message"),
    "auth_qft_auth": ("hadamard-sandwich", auth_qft_auth_scheme, "hash tag, Hadamard layer, second hash tag"),
    "unitary_design": ("unitary-design", UnitaryDesignScheme, "keyed unitary applied to message and zero tag"),
    "pauli_composed": ("pauli-lift", PauliComposedScheme, "keyed Pauli before an inner scheme"),
    "append_random_bit": ("keyed-vs-averaged", AppendRandomBitScheme, "inner scheme plus an unchecked keyed bit"),
}
