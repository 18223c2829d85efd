import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qauthlab.qlinalg import (
    ATOL_EXACT,
    Channel,
    LinearMap,
    QuantumState,
    RegisterError,
    RegisterSpace,
    apply_on_registers,
    basis_probabilities,
    hadamard_transform,
    haar_fourth_moment,
    haar_random_unitaries,
    haar_random_unitary,
    matrix_from_json,
    matrix_to_json,
    maximally_entangled,
    measure_in_basis,
    partial_trace,
    pauli_operator,
    permute,
    pure_trace_distance,
    random_pure_state,
    schmidt_decomposition,
    tensor,
    trace_distance,
    trace_norm,
)


def _space(dims):
    return RegisterSpace.of(*[(f"R{i}", d) for i, d in enumerate(dims)])


def _full_operator(op: np.ndarray, dims, targets):
    """Embed ``op`` on the target positions by brute-force index arithmetic."""
    total = int(np.prod(dims))
    out = np.zeros((total, total), dtype=complex)
    tdims = [dims[t] for t in targets]
    for col in range(total):
        idx = np.unravel_index(col, dims)
        sub_in = np.ravel_multi_index([idx[t] for t in targets], tdims)
        for sub_out in range(op.shape[0]):
            amp = op[sub_out, sub_in]
            if amp == 0:
                continue
            new = list(idx)
            for t, v in zip(targets, np.unravel_index(sub_out, tdims)):
                new[t] = v
            out[np.ravel_multi_index(new, dims), col] += amp
    return out


# ---------------------------------------------------------------------------
# Register spaces and states
# ---------------------------------------------------------------------------


def test_register_space_rejects_duplicates_and_bad_dims():
    with pytest.raises(RegisterError):
        RegisterSpace.of(("A", 2), ("A", 3))
    with pytest.raises(RegisterError):
        RegisterSpace.of(("A", 0))
    with pytest.raises(RegisterError):
        RegisterSpace.of(("A", 2)).concat(RegisterSpace.of(("A", 2)))


def test_register_space_json_round_trip():
    space = RegisterSpace.of(("M", 2), ("T", 8))
    assert RegisterSpace.from_json(space.to_json()) == space
    assert space.dim == 16 and space.index("T") == 1 and space.dim_of("T") == 8
    assert space.without(["M"]).labels == ("T",)


def test_state_json_round_trip():
    rng = np.random.default_rng(0)
    state = random_pure_state(_space([2, 3]), rng)
    back = QuantumState.from_json(state.to_json())
    assert back.space == state.space
    np.testing.assert_allclose(back.data, state.data, atol=0)
    rho = state.as_density()
    np.testing.assert_allclose(QuantumState.from_json(rho.to_json()).data, rho.data, atol=0)


def test_matrix_json_round_trip():
    m = np.array([[1 + 2j, 0.5], [-1j, 3.25]])
    np.testing.assert_array_equal(matrix_from_json(matrix_to_json(m)), m)


def test_state_data_is_read_only():
    state = QuantumState.basis(_space([2]), [0])
    with pytest.raises(ValueError):
        state.data[0] = 2


@pytest.mark.parametrize("dims", [(2,), (2, 3), (3, 2, 2)])
def test_pure_weight_matches_density_trace(dims):
    state = random_pure_state(_space(dims), np.random.default_rng(len(dims)))
    assert state.weight == pytest.approx(np.trace(state.density_matrix()).real, abs=ATOL_EXACT)
    assert state.weight == pytest.approx(1.0, abs=ATOL_EXACT)


def test_linear_map_kind_is_validated():
    space = _space([2])
    with pytest.raises(ValueError):
        LinearMap(space, space, np.array([[1, 1], [0, 1]]), "unitary")
    with pytest.raises(ValueError):
        LinearMap(space, space, np.array([[1, 0], [0, 0.5]]), "projector")


# ---------------------------------------------------------------------------
# Applying operators
# ---------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(
    dims=st.lists(st.integers(2, 3), min_size=2, max_size=4),
    data=st.data(),
)
def test_apply_on_registers_matches_embedded_operator(dims, data):
    n = len(dims)
    targets = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=min(2, n), unique=True))
    seed = data.draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    space = _space(dims)
    tspace = RegisterSpace.of(*[(f"R{t}", dims[t]) for t in targets])
    u = haar_random_unitary(tspace.dim, rng)
    op = LinearMap(tspace, tspace, u, "unitary")
    state = random_pure_state(space, rng)
    expected = _full_operator(u, list(dims), targets) @ state.vector

    pure_out = permute(apply_on_registers(op, state, tspace.labels), space.labels)
    np.testing.assert_allclose(pure_out.vector, expected, atol=1e-10)

    dens_out = permute(apply_on_registers(op, state.as_density(), tspace.labels), space.labels)
    np.testing.assert_allclose(dens_out.data, np.outer(expected, expected.conj()), atol=1e-10)


def test_apply_isometry_adds_register_and_aliases_labels():
    a = RegisterSpace.of(("A", 2))
    out = RegisterSpace.of(("A", 2), ("E", 3))
    mat = np.zeros((6, 2))
    mat[0, 0] = mat[4, 1] = 1.0
    iso = LinearMap(a, out, mat, "isometry")
    state = QuantumState.basis(RegisterSpace.of(("X", 2), ("Z", 2)), [1, 0])
    result = apply_on_registers(iso.relabel({"A": "X"}), state, ["X"])
    assert result.space.labels == ("X", "E", "Z")
    assert basis_probabilities(result, ["X", "E", "Z"])[1, 1, 0] == pytest.approx(1.0)


def test_single_kraus_channel_keeps_pure_state_pure():
    space = _space([2])
    chan = Channel((LinearMap(space, space, hadamard_transform(1), "unitary"),))
    out = apply_on_registers(chan, QuantumState.basis(space, [0]), space.labels)
    assert out.is_pure


def test_stinespring_channel_is_trace_preserving():
    rng = np.random.default_rng(3)
    a = RegisterSpace.of(("A", 2))
    out = RegisterSpace.of(("A", 2), ("E", 2))
    iso = LinearMap(a, out, haar_random_unitary(4, rng)[:, :2], "isometry")
    chan = Channel.from_stinespring(iso, ["E"])
    assert chan.is_trace_preserving()
    state = random_pure_state(a, rng)
    via_kraus = apply_on_registers(chan, state, ["A"])
    via_trace = partial_trace(apply_on_registers(iso, state, ["A"]), ["E"])
    np.testing.assert_allclose(via_kraus.density_matrix(), via_trace.density_matrix(), atol=1e-12)


# ---------------------------------------------------------------------------
# Partial trace, norms, distances
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("discard", [["R0"], ["R1"], ["R0", "R2"], ["R2"]])
def test_partial_trace_matches_einsum(discard):
    dims = (2, 3, 2)
    state = random_pure_state(_space(dims), np.random.default_rng(5))
    rho = state.density_matrix().reshape(dims + dims)
    keep = [i for i in range(3) if f"R{i}" not in discard]
    letters_in = "abc"
    letters_out = "def"
    ket = "".join(letters_in[i] for i in range(3))
    bra = "".join(letters_in[i] if f"R{i}" in discard else letters_out[i] for i in range(3))
    out = "".join(letters_in[i] for i in keep) + "".join(letters_out[i] for i in keep)
    expected = np.einsum(f"{ket}{bra}->{out}", rho)
    dk = int(np.prod([dims[i] for i in keep]))
    got_pure = partial_trace(state, discard).density_matrix()
    got_dens = partial_trace(state.as_density(), discard).density_matrix()
    np.testing.assert_allclose(got_pure, expected.reshape(dk, dk), atol=1e-12)
    np.testing.assert_allclose(got_dens, expected.reshape(dk, dk), atol=1e-12)


def test_orthogonal_states_are_at_distance_two():
    space = _space([3])
    a, b = QuantumState.basis(space, [0]), QuantumState.basis(space, [2])
    assert trace_distance(a, b) == pytest.approx(2.0, abs=ATOL_EXACT)
    assert trace_distance(a.as_density(), b.as_density()) == pytest.approx(2.0, abs=ATOL_EXACT)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 6), scale=st.floats(0.05, 1.0))
def test_pure_distance_agrees_with_spectral_norm(seed, dim, scale):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    b = scale * (rng.normal(size=dim) + 1j * rng.normal(size=dim))
    dense = np.outer(a, a.conj()) - np.outer(b, b.conj())
    assert pure_trace_distance(a, b) == pytest.approx(np.abs(np.linalg.eigvalsh(dense)).sum(), rel=1e-10)


def test_pure_distance_is_accurate_for_nearly_equal_states():
    rng = np.random.default_rng(9)
    a = rng.normal(size=32) + 1j * rng.normal(size=32)
    a /= np.linalg.norm(a)
    assert pure_trace_distance(a, np.exp(0.7j) * a) < 1e-14
    delta = 1e-12
    b = a + delta * (rng.normal(size=32) + 1j * rng.normal(size=32))
    dense = np.outer(a, a.conj()) - np.outer(b, b.conj())
    assert pure_trace_distance(a, b) == pytest.approx(trace_norm(dense), rel=1e-3)


def test_measure_in_basis_dephases():
    space = _space([2])
    plus = QuantumState(space, np.ones(2) / np.sqrt(2))
    np.testing.assert_allclose(measure_in_basis(plus, ["R0"]).data, np.eye(2) / 2, atol=1e-15)


# ---------------------------------------------------------------------------
# Haar unitaries and moments
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("d", [1, 2, 5])
def test_haar_samples_are_unitary(d):
    us = haar_random_unitaries(d, 50, np.random.default_rng(d))
    eye = np.eye(d)
    for u in us:
        np.testing.assert_allclose(u.conj().T @ u, eye, atol=1e-12)


def test_haar_second_moment_is_one_over_d():
    d = 3
    us = haar_random_unitaries(d, 40000, np.random.default_rng(1))
    vals = np.abs(us[:, 0, 1]) ** 2
    assert abs(vals.mean() - 1 / d) <= 3 * vals.std(ddof=1) / np.sqrt(len(vals))


@pytest.mark.parametrize("d", [2, 3, 4, 7])
def test_fourth_moment_known_entries(d):
    # |U_00|^4 averages 2 / (d (d + 1)); entries in different rows and
    # columns give 1 / (d^2 - 1); entries sharing a row give 1 / (d (d + 1))
    assert haar_fourth_moment(d, 0, 0, 0, 0, 0, 0, 0, 0) == pytest.approx(2 / (d * (d + 1)))
    assert haar_fourth_moment(d, 0, 0, 1, 1, 0, 0, 1, 1) == pytest.approx(1 / (d * d - 1))
    assert haar_fourth_moment(d, 0, 0, 0, 1, 0, 0, 0, 1) == pytest.approx(1 / (d * (d + 1)))
    assert haar_fourth_moment(d, 0, 0, 0, 0, 0, 1, 0, 0) == 0.0


def test_fourth_moment_rejects_degenerate_dimension():
    with pytest.raises(ValueError):
        haar_fourth_moment(1, 0, 0, 0, 0, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        haar_fourth_moment(2, 0, 0, 0, 2, 0, 0, 0, 0)


# ---------------------------------------------------------------------------
# Standard objects
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2])
def test_paulis_form_unitary_error_basis(n):
    d = 1 << n
    ops = [pauli_operator(n, x, z) for x in range(d) for z in range(d)]
    gram = np.array([[np.trace(a.conj().T @ b) for b in ops] for a in ops])
    np.testing.assert_allclose(gram, d * np.eye(d * d), atol=1e-12)


def test_x_and_z_anticommute():
    x, z = pauli_operator(1, 1, 0), pauli_operator(1, 0, 1)
    np.testing.assert_allclose(x @ z, -z @ x)


def test_hadamard_is_real_orthogonal_involution():
    h = hadamard_transform(3)
    np.testing.assert_allclose(h @ h, np.eye(8), atol=1e-12)


def test_maximally_entangled_schmidt_coefficients():
    a, b = RegisterSpace.of(("A", 4)), RegisterSpace.of(("B", 4))
    coefs, ua, ub = schmidt_decomposition(maximally_entangled(a, b), ["A"])
    np.testing.assert_allclose(coefs, np.full(4, 0.5), atol=1e-12)


def test_schmidt_decomposition_reconstructs_state():
    space = RegisterSpace.of(("A", 2), ("B", 3))
    state = random_pure_state(space, np.random.default_rng(2))
    coefs, ua, ub = schmidt_decomposition(state, ["A"])
    rebuilt = sum(c * np.kron(ua[:, i], ub[:, i]) for i, c in enumerate(coefs))
    np.testing.assert_allclose(rebuilt, state.vector, atol=1e-12)


def test_tensor_of_states_and_maps():
    a = QuantumState.basis(RegisterSpace.of(("A", 2)), [1])
    b = QuantumState.basis(RegisterSpace.of(("B", 2)), [0])
    ab = tensor(a, b)
    assert ab.space.labels == ("A", "B")
    assert ab.vector[2] == 1
    ma = LinearMap.identity(a.space)
    mb = LinearMap(b.space, b.space, pauli_operator(1, 1, 0), "unitary")
    np.testing.assert_allclose(tensor(ma, mb).matrix, np.kron(np.eye(2), pauli_operator(1, 1, 0)))
