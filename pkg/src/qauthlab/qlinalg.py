"""Finite-dimensional linear algebra on labelled tensor-product spaces.

Every quantum object in the package lives on a :class:`RegisterSpace`, an
ordered list of named registers.  States may be pure vectors or density
matrices; both may be subnormalized, in which case their weight is the
probability of the branch they represent.  Operators carry their input and
output spaces so that they can be applied to any subset of a larger state by
label, with the permutation handled internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

#: Absolute tolerance for results that are exact up to floating point.
ATOL_EXACT = 1e-9
#: Absolute tolerance for results produced by multi-stage pipelines.
ATOL_PIPELINE = 1e-8

_MAP_KINDS = ("general", "unitary", "isometry", "projector")


class RegisterError(ValueError):
    """Raised on label collisions, unknown labels or dimension mismatches."""


# ---------------------------------------------------------------------------
# Register spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegisterSpace:
    """Ordered collection of ``(label, dim)`` pairs with unique labels."""

    registers: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        regs = tuple((str(label), int(dim)) for label, dim in self.registers)
        labels = [label for label, _ in regs]
        if len(set(labels)) != len(labels):
            raise RegisterError(f"duplicate register labels in {labels}")
        for label, dim in regs:
            if dim < 1:
                raise RegisterError(f"register {label!r} has dimension {dim}")
        object.__setattr__(self, "registers", regs)

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "RegisterSpace":
        return cls(tuple(pairs))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.registers)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.registers)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.registers else 1

    def __len__(self) -> int:
        return len(self.registers)

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise RegisterError(f"unknown register {label!r}; have {self.labels}") from None

    def dim_of(self, label: str) -> int:
        return self.registers[self.index(label)][1]

    def select(self, labels: Iterable[str]) -> "RegisterSpace":
        """Sub-space made of ``labels`` in the order given."""
        return RegisterSpace(tuple((label, self.dim_of(label)) for label in labels))

    def without(self, labels: Iterable[str]) -> "RegisterSpace":
        drop = set(labels)
        for label in drop:
            self.index(label)
        return RegisterSpace(tuple(r for r in self.registers if r[0] not in drop))

    def concat(self, other: "RegisterSpace") -> "RegisterSpace":
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise RegisterError(f"label collision: {sorted(clash)}")
        return RegisterSpace(self.registers + other.registers)

    def rename(self, mapping: dict[str, str]) -> "RegisterSpace":
        return RegisterSpace(tuple((mapping.get(label, label), dim) for label, dim in self.registers))

    def to_json(self) -> list:
        return [[label, dim] for label, dim in self.registers]

    @classmethod
    def from_json(cls, data: Sequence) -> "RegisterSpace":
        return cls(tuple((label, dim) for label, dim in data))


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------


def matrix_to_json(matrix: np.ndarray) -> dict:
    """Serialize a complex array as separate real and imaginary parts."""
    arr = np.asarray(matrix, dtype=complex)
    return {"shape": list(arr.shape), "re": arr.real.tolist(), "im": arr.imag.tolist()}


def matrix_from_json(data: dict) -> np.ndarray:
    arr = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    return arr.reshape(data["shape"])


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuantumState:
    """A pure vector or a density matrix on a register space.

    The state may be subnormalized; :attr:`weight` is ``<psi|psi>`` for a
    vector and the trace for a density matrix.
    """

    space: RegisterSpace
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        dim = self.space.dim
        if arr.ndim == 1:
            if arr.shape != (dim,):
                raise RegisterError(f"vector of length {arr.shape[0]} does not fit space of dim {dim}")
        elif arr.ndim == 2:
            if arr.shape != (dim, dim):
                raise RegisterError(f"matrix of shape {arr.shape} does not fit space of dim {dim}")
        else:
            raise RegisterError("state data must be a vector or a square matrix")
        object.__setattr__(self, "data", _frozen(arr))

    @classmethod
    def pure(cls, space: RegisterSpace, vector) -> "QuantumState":
        return cls(space, np.asarray(vector, dtype=complex).reshape(-1))

    @classmethod
    def density(cls, space: RegisterSpace, matrix) -> "QuantumState":
        return cls(space, np.asarray(matrix, dtype=complex))

    @classmethod
    def basis(cls, space: RegisterSpace, values: Sequence[int]) -> "QuantumState":
        """Computational basis vector with one value per register."""
        if len(values) != len(space):
            raise RegisterError("one basis value per register is required")
        idx = int(np.ravel_multi_index(tuple(int(v) for v in values), space.dims)) if len(space) else 0
        vec = np.zeros(space.dim, dtype=complex)
        vec[idx] = 1.0
        return cls(space, vec)

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def weight(self) -> float:
        if self.is_pure:
            return float(np.vdot(self.data, self.data).real)
        return float(np.trace(self.data).real)

    @property
    def vector(self) -> np.ndarray:
        if not self.is_pure:
            raise ValueError("state is stored as a density matrix")
        return self.data

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def as_density(self) -> "QuantumState":
        return self if not self.is_pure else QuantumState(self.space, self.density_matrix())

    def normalized(self) -> "QuantumState":
        w = self.weight
        if w <= 0:
            raise ValueError("cannot normalize a state of zero weight")
        scale = 1 / np.sqrt(w) if self.is_pure else 1 / w
        return QuantumState(self.space, self.data * scale)

    def scaled(self, factor: float) -> "QuantumState":
        """Multiply the weight by ``factor`` (non-negative)."""
        if factor < 0:
            raise ValueError("weight factor must be non-negative")
        scale = np.sqrt(factor) if self.is_pure else factor
        return QuantumState(self.space, self.data * scale)

    def relabel(self, mapping: dict[str, str]) -> "QuantumState":
        return QuantumState(self.space.rename(mapping), self.data)

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "kind": "pure" if self.is_pure else "density",
            "data": matrix_to_json(self.data),
        }

    @classmethod
    def from_json(cls, data: dict) -> "QuantumState":
        return cls(RegisterSpace.from_json(data["space"]), matrix_from_json(data["data"]))


# ---------------------------------------------------------------------------
# Linear maps and channels
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Matrix from ``input_space`` to ``output_space``.

    ``kind`` is validated on construction: unitaries and isometries must
    satisfy ``M^dag M = I``, projectors must be Hermitian and idempotent.
    """

    input_space: RegisterSpace
    output_space: RegisterSpace
    matrix: np.ndarray
    kind: str = "general"
    check: bool = True

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.output_space.dim, self.input_space.dim):
            raise RegisterError(
                f"matrix shape {mat.shape} does not map dim {self.input_space.dim} to {self.output_space.dim}"
            )
        if self.kind not in _MAP_KINDS:
            raise ValueError(f"unknown map kind {self.kind!r}")
        object.__setattr__(self, "matrix", _frozen(mat))
        if self.check:
            self._validate()

    def _validate(self):
        mat = self.matrix
        tol = ATOL_PIPELINE
        if self.kind in ("unitary", "isometry"):
            if self.kind == "unitary" and mat.shape[0] != mat.shape[1]:
                raise ValueError("a unitary must be square")
            gram = mat.conj().T @ mat
            if not np.allclose(gram, np.eye(mat.shape[1]), atol=tol):
                raise ValueError(f"matrix declared {self.kind} is not norm preserving")
        elif self.kind == "projector":
            if mat.shape[0] != mat.shape[1]:
                raise ValueError("a projector must be square")
            if not np.allclose(mat, mat.conj().T, atol=tol) or not np.allclose(mat @ mat, mat, atol=tol):
                raise ValueError("matrix declared projector is not a Hermitian idempotent")

    @classmethod
    def identity(cls, space: RegisterSpace) -> "LinearMap":
        return cls(space, space, np.eye(space.dim), "unitary", check=False)

    def adjoint(self) -> "LinearMap":
        kind = self.kind if self.kind in ("unitary", "projector") else "general"
        return LinearMap(self.output_space, self.input_space, self.matrix.conj().T, kind, check=False)

    def compose(self, first: "LinearMap") -> "LinearMap":
        """Return ``self o first`` (apply ``first``, then ``self``)."""
        if first.output_space.dims != self.input_space.dims:
            raise RegisterError("composition dimension mismatch")
        kind = "general"
        if self.kind == first.kind and self.kind in ("unitary", "isometry"):
            kind = self.kind
        elif {self.kind, first.kind} <= {"unitary", "isometry"}:
            kind = "isometry"
        return LinearMap(first.input_space, self.output_space, self.matrix @ first.matrix, kind, check=False)

    def relabel(self, mapping: dict[str, str]) -> "LinearMap":
        return LinearMap(
            self.input_space.rename(mapping), self.output_space.rename(mapping), self.matrix, self.kind, check=False
        )

    def to_json(self) -> dict:
        return {
            "input_space": self.input_space.to_json(),
            "output_space": self.output_space.to_json(),
            "kind": self.kind,
            "matrix": matrix_to_json(self.matrix),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LinearMap":
        return cls(
            RegisterSpace.from_json(data["input_space"]),
            RegisterSpace.from_json(data["output_space"]),
            matrix_from_json(data["matrix"]),
            data.get("kind", "general"),
        )


@dataclass(frozen=True, eq=False)
class Channel:
    """Completely positive map in Kraus form (trace non-increasing allowed)."""

    kraus: tuple[LinearMap, ...]

    def __post_init__(self):
        ops = tuple(self.kraus)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        first = ops[0]
        for op in ops[1:]:
            if op.input_space != first.input_space or op.output_space != first.output_space:
                raise RegisterError("Kraus operators must share input and output spaces")
        object.__setattr__(self, "kraus", ops)

    @property
    def input_space(self) -> RegisterSpace:
        return self.kraus[0].input_space

    @property
    def output_space(self) -> RegisterSpace:
        return self.kraus[0].output_space

    @classmethod
    def from_stinespring(cls, isometry: LinearMap, discard: Sequence[str]) -> "Channel":
        """Kraus form of ``rho -> Tr_discard(V rho V^dag)``.

        Kraus operators that vanish identically are dropped.
        """
        out = isometry.output_space
        keep = [label for label in out.labels if label not in set(discard)]
        env = out.select(discard)
        kept = out.select(keep)
        order = [out.index(label) for label in keep] + [out.index(label) for label in discard]
        tensor_ = isometry.matrix.reshape(out.dims + (isometry.input_space.dim,))
        tensor_ = np.transpose(tensor_, order + [len(out)])
        tensor_ = tensor_.reshape(kept.dim, env.dim, isometry.input_space.dim)
        ops = []
        for e in range(env.dim):
            block = tensor_[:, e, :]
            if np.any(np.abs(block) > 0):
                ops.append(LinearMap(isometry.input_space, kept, block, check=False))
        if not ops:
            ops.append(LinearMap(isometry.input_space, kept, np.zeros((kept.dim, isometry.input_space.dim))))
        return cls(tuple(ops))

    def choi_sum(self) -> np.ndarray:
        """``sum_k K_k^dag K_k``; the identity for a trace-preserving channel."""
        return sum(op.matrix.conj().T @ op.matrix for op in self.kraus)

    def is_trace_preserving(self, atol: float = ATOL_EXACT) -> bool:
        return bool(np.allclose(self.choi_sum(), np.eye(self.input_space.dim), atol=atol))


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------


def tensor(*items):
    """Tensor product of states or of linear maps, left to right.

    Raises :class:`RegisterError` when two factors share a register label.
    """
    if not items:
        raise ValueError("tensor needs at least one factor")
    result = items[0]
    for item in items[1:]:
        result = _tensor_pair(result, item)
    return result


def _tensor_pair(a, b):
    if isinstance(a, QuantumState) and isinstance(b, QuantumState):
        space = a.space.concat(b.space)
        if a.is_pure and b.is_pure:
            return QuantumState(space, np.kron(a.data, b.data))
        return QuantumState(space, np.kron(a.density_matrix(), b.density_matrix()))
    if isinstance(a, LinearMap) and isinstance(b, LinearMap):
        kind = a.kind if a.kind == b.kind else "general"
        if {a.kind, b.kind} <= {"unitary", "isometry"}:
            kind = "unitary" if a.kind == b.kind == "unitary" else "isometry"
        return LinearMap(
            a.input_space.concat(b.input_space),
            a.output_space.concat(b.output_space),
            np.kron(a.matrix, b.matrix),
            kind,
            check=False,
        )
    raise TypeError("tensor factors must all be states or all be linear maps")


def _output_layout(space: RegisterSpace, targets: Sequence[str], op: LinearMap):
    """Work out the register layout after applying ``op`` to ``targets``."""
    targets = tuple(targets)
    if len(set(targets)) != len(targets):
        raise RegisterError(f"repeated target register in {targets}")
    tidx = [space.index(t) for t in targets]
    in_dims = tuple(space.dims[i] for i in tidx)
    if in_dims != op.input_space.dims:
        raise RegisterError(f"targets {targets} have dims {in_dims}, operator expects {op.input_space.dims}")
    rest = [i for i in range(len(space)) if i not in tidx]
    # Registers that the operator passes through keep the caller's label.
    alias = dict(zip(op.input_space.labels, targets))
    out_regs = tuple((alias.get(label, label), dim) for label, dim in op.output_space.registers)
    first = min(tidx) if tidx else len(space)
    pos = sum(1 for i in rest if i < first)
    rest_regs = [space.registers[i] for i in rest]
    new_space = RegisterSpace(tuple(rest_regs[:pos]) + out_regs + tuple(rest_regs[pos:]))
    k = len(out_regs)
    final_perm = [k + j for j in range(pos)] + list(range(k)) + [k + j for j in range(pos, len(rest))]
    return tidx, rest, new_space, final_perm


def apply_on_registers(op: Union[LinearMap, Channel], state: QuantumState, targets: Sequence[str]) -> QuantumState:
    """Apply ``op`` to the named registers of ``state``.

    ``targets`` are matched positionally with the operator's input registers,
    so any order is allowed.  Output registers replace the targets at the
    position of the earliest target; registers that the operator carries from
    input to output under the same label inherit the target's label.
    """
    if isinstance(op, Channel):
        if len(op.kraus) == 1:
            return apply_on_registers(op.kraus[0], state, targets)
        parts = [apply_on_registers(k, state.as_density(), targets) for k in op.kraus]
        return QuantumState(parts[0].space, sum(p.data for p in parts))
    tidx, rest, new_space, final_perm = _output_layout(state.space, targets, op)
    dims = state.space.dims
    din = op.input_space.dim
    out_dims = op.output_space.dims
    rest_dims = tuple(dims[i] for i in rest)
    mat = op.matrix
    if state.is_pure:
        psi = state.data.reshape(dims) if dims else state.data.reshape(())
        psi = np.transpose(psi, tidx + rest).reshape(din, -1)
        out = (mat @ psi).reshape(out_dims + rest_dims)
        out = np.transpose(out, final_perm).reshape(-1)
        return QuantumState(new_space, out)
    n = len(dims)
    rho = state.data.reshape(dims + dims)
    perm = tidx + rest
    rho = np.transpose(rho, perm + [n + i for i in perm]).reshape(din, -1, din, int(np.prod(rest_dims, dtype=np.int64)))
    out = np.einsum("ia,arbs,jb->irjs", mat, rho, mat.conj(), optimize=True)
    m = len(final_perm)
    out = out.reshape(out_dims + rest_dims + out_dims + rest_dims)
    out = np.transpose(out, final_perm + [m + i for i in final_perm])
    return QuantumState(new_space, out.reshape(new_space.dim, new_space.dim))


def permute(state: QuantumState, order: Sequence[str]) -> QuantumState:
    """Reorder the registers of ``state`` to ``order`` (a permutation of its labels)."""
    order = tuple(order)
    if sorted(order) != sorted(state.space.labels):
        raise RegisterError(f"{order} is not a permutation of {state.space.labels}")
    idx = [state.space.index(label) for label in order]
    new_space = state.space.select(order)
    dims = state.space.dims
    if state.is_pure:
        return QuantumState(new_space, np.transpose(state.data.reshape(dims), idx).reshape(-1))
    n = len(dims)
    rho = np.transpose(state.data.reshape(dims + dims), idx + [n + i for i in idx])
    return QuantumState(new_space, rho.reshape(new_space.dim, new_space.dim))


def partial_trace(state: QuantumState, discard: Iterable[str]) -> QuantumState:
    """Trace out the registers in ``discard``; the result is a density matrix
    unless nothing is discarded."""
    discard = tuple(discard)
    if not discard:
        return state
    for label in discard:
        state.space.index(label)
    keep = tuple(label for label in state.space.labels if label not in set(discard))
    ordered = permute(state, keep + discard)
    kdim = state.space.select(keep).dim
    ddim = state.space.select(discard).dim
    if ordered.is_pure:
        psi = ordered.data.reshape(kdim, ddim)
        rho = psi @ psi.conj().T
    else:
        rho = np.einsum("iaja->ij", ordered.data.reshape(kdim, ddim, kdim, ddim))
    return QuantumState(state.space.select(keep), rho)


# ---------------------------------------------------------------------------
# Norms and distances
# ---------------------------------------------------------------------------


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, QuantumState):
        return x.density_matrix()
    if isinstance(x, LinearMap):
        return x.matrix
    return np.asarray(x, dtype=complex)


def trace_norm(x) -> float:
    """Sum of singular values."""
    mat = _as_matrix(x)
    if mat.shape[0] == mat.shape[1] and np.allclose(mat, mat.conj().T, atol=1e-12):
        return float(np.abs(np.linalg.eigvalsh(mat)).sum())
    return float(np.linalg.svd(mat, compute_uv=False).sum())


def operator_norm(x) -> float:
    """Largest singular value."""
    mat = _as_matrix(x)
    return float(np.linalg.svd(mat, compute_uv=False)[0]) if mat.size else 0.0


def frobenius_norm(x) -> float:
    return float(np.linalg.norm(_as_matrix(x)))


def pure_trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``|| |a><a| - |b><b| ||_1`` for possibly subnormalized vectors.

    The difference has rank at most two, so its trace norm follows from the
    two norms and the overlap without forming any matrix.  The Gram
    determinant ``na nb - |<a|b>|^2`` is computed as ``nb`` times the squared
    residual of ``a`` after projecting out ``b``, which stays accurate when
    the two vectors nearly coincide.
    """
    na = float(np.vdot(a, a).real)
    nb = float(np.vdot(b, b).real)
    if nb == 0.0:
        return na
    residual = a - (np.vdot(b, a) / nb) * b
    gram = nb * float(np.vdot(residual, residual).real)
    return float(np.sqrt((na - nb) ** 2 + 4 * gram))


def trace_distance(x: QuantumState, y: QuantumState) -> float:
    """``||x - y||_1`` between two states on the same space (not halved)."""
    if x.space.dims != y.space.dims:
        raise RegisterError("states live on spaces of different dimension")
    if x.is_pure and y.is_pure:
        return pure_trace_distance(x.data, y.data)
    return trace_norm(x.density_matrix() - y.density_matrix())


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------


def measurement_branches(
    state: QuantumState, labels: Sequence[str], basis: np.ndarray | None = None
) -> list[tuple[int, QuantumState]]:
    """Subnormalized post-measurement branches for a projective measurement
    of ``labels`` in the orthonormal ``basis`` (columns; default computational)."""
    sub = state.space.select(labels)
    basis = np.eye(sub.dim) if basis is None else np.asarray(basis, dtype=complex)
    if basis.shape != (sub.dim, sub.dim):
        raise RegisterError("basis must be a square matrix on the measured registers")
    out = []
    for i in range(sub.dim):
        proj = LinearMap(sub, sub, np.outer(basis[:, i], basis[:, i].conj()), check=False)
        out.append((i, apply_on_registers(proj, state, labels)))
    return out


def measure_in_basis(state: QuantumState, labels: Sequence[str], basis: np.ndarray | None = None) -> QuantumState:
    """Non-selective projective measurement: the dephased sum of all branches."""
    sub = state.space.select(labels)
    basis = np.eye(sub.dim) if basis is None else np.asarray(basis, dtype=complex)
    rotate = LinearMap(sub, sub, basis.conj().T, check=False)
    rho = apply_on_registers(rotate, state.as_density(), labels)
    rho = permute(rho, tuple(labels) + tuple(l for l in state.space.labels if l not in set(labels)))
    d = sub.dim
    r = rho.space.dim // d
    mat = rho.data.reshape(d, r, d, r) * np.eye(d)[:, None, :, None]
    deph = QuantumState(rho.space, mat.reshape(d * r, d * r))
    back = LinearMap(sub, sub, basis, check=False)
    deph = apply_on_registers(back, deph, labels)
    return permute(deph, state.space.labels)


def basis_probabilities(state: QuantumState, labels: Sequence[str]) -> np.ndarray:
    """Computational-basis outcome probabilities for ``labels`` (unnormalized
    if the state is), shaped by the register dimensions."""
    reduced = partial_trace(state, [l for l in state.space.labels if l not in set(labels)])
    reduced = permute(reduced, labels)
    diag = np.real(np.diag(reduced.density_matrix()))
    return diag.reshape(reduced.space.dims)


# ---------------------------------------------------------------------------
# Random unitaries and Haar moments
# ---------------------------------------------------------------------------


def haar_random_unitaries(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent Haar-random ``d x d`` unitaries, shape ``(count, d, d)``.

    QR of a complex Gaussian matrix, with the phases of ``diag(R)`` moved into
    ``Q`` so that the result is exactly Haar distributed.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    z = (rng.standard_normal((count, d, d)) + 1j * rng.standard_normal((count, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]


def haar_random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return haar_random_unitaries(d, 1, rng)[0]


def haar_fourth_moment(d: int, a: int, b: int, i: int, j: int, a2: int, b2: int, i2: int, j2: int) -> float:
    """Closed form of ``E[U_ab U_ij conj(U_a2b2) conj(U_i2j2)]`` over Haar ``U(d)``.

    Defined through Weingarten calculus for ``d >= 2``; raises for ``d = 1``
    where the denominator vanishes.
    """
    if d < 2:
        raise ValueError("the fourth-moment formula needs d >= 2")
    for idx in (a, b, i, j, a2, b2, i2, j2):
        if not 0 <= idx < d:
            raise ValueError(f"index {idx} out of range for d={d}")

    def eq(x, y):
        return 1.0 if x == y else 0.0

    same = eq(a, a2) * eq(b, b2) * eq(i, i2) * eq(j, j2) + eq(a, i2) * eq(b, j2) * eq(i, a2) * eq(j, b2)
    cross = eq(a, a2) * eq(b, j2) * eq(i, i2) * eq(j, b2) + eq(a, i2) * eq(b, b2) * eq(i, a2) * eq(j, j2)
    return same / (d * d - 1) - cross / (d * (d * d - 1))


# ---------------------------------------------------------------------------
# Standard objects
# ---------------------------------------------------------------------------


def pauli_operator(n: int, x_mask: int, z_mask: int) -> np.ndarray:
    """n-qubit Pauli ``|x> -> (-1)^{z.x} |x xor x_mask>`` (big-endian bit order)."""
    dim = 1 << n
    if not (0 <= x_mask < dim and 0 <= z_mask < dim):
        raise ValueError("Pauli masks out of range")
    mat = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        mat[x ^ x_mask, x] = -1.0 if bin(z_mask & x).count("1") % 2 else 1.0
    return mat


def hadamard_transform(n: int) -> np.ndarray:
    """``H^{(x) n}`` as a dense matrix."""
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = np.kron(out, h)
    return out


def maximally_entangled(space_a: RegisterSpace, space_b: RegisterSpace) -> QuantumState:
    """``d^{-1/2} sum_i |i>|i>`` across two spaces of equal total dimension."""
    if space_a.dim != space_b.dim:
        raise RegisterError("maximally entangled state needs equal dimensions")
    d = space_a.dim
    return QuantumState(space_a.concat(space_b), np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d))


def schmidt_decomposition(state: QuantumState, labels_a: Sequence[str]):
    """Schmidt form of a pure state across ``labels_a`` versus the rest.

    Returns ``(coefficients, basis_a, basis_b)`` with the vectors as columns,
    keeping only strictly positive coefficients.
    """
    if not state.is_pure:
        raise ValueError("Schmidt decomposition needs a pure state")
    rest = [l for l in state.space.labels if l not in set(labels_a)]
    ordered = permute(state, tuple(labels_a) + tuple(rest))
    da = state.space.select(labels_a).dim
    mat = ordered.data.reshape(da, -1)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    keep = s > 1e-14
    return s[keep], u[:, keep], vh[keep].T


def random_pure_state(space: RegisterSpace, rng: np.random.Generator) -> QuantumState:
    """Normalized Gaussian-random vector (uniform on the unit sphere)."""
    v = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
    return QuantumState(space, v / np.linalg.norm(v))
