import json

import numpy as np
import pytest

from qauthlab.adversaries import pauli_tamper, tag_substitution
from qauthlab.qlinalg import ATOL_EXACT, QuantumState, RegisterSpace, random_pure_state, trace_distance
from qauthlab.schemes import (
    EXHAUSTIVE_KEY_LIMIT,
    SCHEME_CATALOG,
    AppendRandomBitScheme,
    PauliComposedScheme,
    UnitaryDesignScheme,
    auth_qft_auth_scheme,
    authenticate,
    select_keys,
    ver_full,
    wegman_carter_scheme,
)
from qauthlab.suite import completeness_error, completeness_schemes

PINNED = completeness_schemes()


@pytest.mark.parametrize("name", sorted(PINNED))
def test_verification_undoes_authentication_for_every_key(name):
    err, weight = completeness_error(PINNED[name])
    assert err <= ATOL_EXACT
    assert weight <= ATOL_EXACT


@pytest.mark.parametrize("name", sorted(PINNED))
def test_auth_is_isometry_and_accept_projector_is_idempotent(name):
    scheme = PINNED[name]
    key = scheme.sample_key(np.random.default_rng(1))
    auth = scheme.auth_isometry(key).matrix
    np.testing.assert_allclose(auth.conj().T @ auth, np.eye(scheme.message_space.dim), atol=1e-10)
    proj = scheme.accept_projector(key).matrix
    np.testing.assert_allclose(proj @ proj, proj, atol=1e-10)
    if not isinstance(scheme, AppendRandomBitScheme):
        # the appended bit is unchecked, so that projector has twice the rank
        assert np.trace(proj).real == pytest.approx(scheme.message_space.dim)


def test_catalog_has_five_constructors_with_tags():
    assert len(SCHEME_CATALOG) == 5
    for name, (tag, ctor, description) in SCHEME_CATALOG.items():
        assert tag and callable(ctor) and description


def test_wegman_carter_key_classes_cover_every_key():
    scheme = wegman_carter_scheme(3, 1, 3)
    classes = scheme.key_classes()
    assert sum(c for _, c in classes) == scheme.num_keys
    tags = {tuple(scheme.tags(k)) for k, _ in classes}
    assert len(tags) == len(classes)
    # three-wise independence at two messages: every tag pair appears
    assert len(tags) == scheme.num_tags ** 2


def test_select_keys_policies():
    small = wegman_carter_scheme(2, 1, 2)
    sel = select_keys(small, policy="exhaustive")
    assert sel.exhaustive and sum(sel.weights) == pytest.approx(1.0)
    sampled = select_keys(small, np.random.default_rng(0), samples=10, policy="sampled")
    assert not sampled.exhaustive and len(sampled) == 10
    big = UnitaryDesignScheme(2, 2, table_size=EXHAUSTIVE_KEY_LIMIT * 2)
    auto = select_keys(big, np.random.default_rng(0), samples=7)
    assert not auto.exhaustive and len(auto) == 7
    with pytest.raises(ValueError):
        select_keys(big, policy="sampled")
    with pytest.raises(ValueError):
        select_keys(small, policy="everything")


def test_key_ids_are_json_friendly():
    for scheme in PINNED.values():
        key = scheme.sample_key(np.random.default_rng(3))
        json.dumps(scheme.key_id(key))


def test_ver_full_branches_sum_to_one():
    scheme = wegman_carter_scheme(2, 1, 2)
    side = RegisterSpace.of(("Z", 2))
    state = random_pure_state(scheme.message_space.concat(side), np.random.default_rng(0))
    attack = tag_substitution(scheme.auth_space, "M", "T", new_tag=1)
    for key, _ in select_keys(scheme, policy="exhaustive"):
        attacked = attack.apply(authenticate(scheme, key, state))
        outcome = ver_full(scheme, key, attacked)
        assert outcome.accept_probability + outcome.reject_probability == pytest.approx(1.0, abs=1e-12)
        flagged = outcome.flagged()
        assert np.trace(flagged.density_matrix()).real == pytest.approx(1.0, abs=1e-12)


def test_tag_substitution_is_accepted_with_probability_one_over_t():
    # pairwise uniformity: the substituted tag matches the new message's tag
    # for exactly |K| / T keys
    scheme = wegman_carter_scheme(3, 1, 3)
    state = QuantumState.basis(scheme.message_space, [0])
    attack = tag_substitution(scheme.auth_space, "M", "T", new_tag=5)
    total = 0.0
    for key, w in select_keys(scheme, policy="exhaustive"):
        total += w * scheme.ver_filter(key, attack.apply(authenticate(scheme, key, state))).weight
    assert total == pytest.approx(1 / 8, abs=1e-12)


def test_hadamard_sandwich_equals_stage_composition():
    scheme = auth_qft_auth_scheme(1, 2, 1)
    key = scheme.sample_key(np.random.default_rng(0))
    inner = scheme.inner.auth_isometry(key[0]).matrix
    outer = scheme.outer.auth_isometry(key[1]).matrix
    h = np.full((8, 8), 1.0)
    for i in range(8):
        for j in range(8):
            h[i, j] = (-1) ** bin(i & j).count("1") / np.sqrt(8)
    np.testing.assert_allclose(scheme.auth_isometry(key).matrix, outer @ h @ inner, atol=1e-12)


def test_faulty_hadamard_breaks_completeness():
    h = np.full((8, 8), 1.0)
    for i in range(8):
        for j in range(8):
            h[i, j] = (-1) ** bin(i & j).count("1") / np.sqrt(8)
    h[0, 0] = -h[0, 0]
    err, _ = completeness_error(auth_qft_auth_scheme(1, 2, 1, auth_transform=h))
    assert err > 0.1


@pytest.mark.parametrize("ensemble", ["haar", "layers", "clifford"])
def test_design_ensembles_are_unitary_and_reproducible(ensemble):
    scheme = UnitaryDesignScheme(2, 2, table_size=16, seed=3, ensemble=ensemble)
    u = scheme.unitary(5)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(8), atol=1e-10)
    again = UnitaryDesignScheme(2, 2, table_size=16, seed=3, ensemble=ensemble).unitary(5)
    np.testing.assert_array_equal(u, again)


def test_explicit_design_ensemble():
    us = (np.eye(4), np.kron(np.eye(2), np.array([[0, 1], [1, 0]])))
    scheme = UnitaryDesignScheme(2, 1, ensemble="explicit", unitaries=us)
    assert scheme.num_keys == 2
    np.testing.assert_allclose(scheme.auth_isometry(1).matrix[:, 0], [0, 1, 0, 0])


def test_pauli_lift_detects_pauli_tampering_on_the_tag():
    scheme = PauliComposedScheme(wegman_carter_scheme(2, 1, 2))
    state = QuantumState.basis(scheme.message_space, [1])
    attack = pauli_tamper(scheme.auth_space, x_mask=0b001, z_mask=0)
    accepted = 0.0
    for key, w in select_keys(scheme, policy="exhaustive"):
        accepted += w * scheme.ver_filter(key, attack.apply(authenticate(scheme, key, state))).weight
    assert accepted == pytest.approx(0.0, abs=1e-12)


def test_pauli_lift_averages_message_to_maximally_mixed():
    scheme = PauliComposedScheme(wegman_carter_scheme(2, 1, 2))
    rho = np.zeros((2, 2), dtype=complex)
    for p in range(2):
        for q in range(2):
            col = scheme.pauli(p, q).matrix[:, 0]
            rho += np.outer(col, col.conj()) / 4
    np.testing.assert_allclose(rho, np.eye(2) / 2, atol=1e-12)


def test_appended_bit_is_ignored_by_verification():
    scheme = AppendRandomBitScheme(wegman_carter_scheme(2, 1, 2))
    state = QuantumState.basis(scheme.message_space, [1])
    key = scheme.sample_key(np.random.default_rng(0))
    sent = authenticate(scheme, key, state)
    flipped = pauli_tamper(scheme.auth_space, x_mask=0b0001, z_mask=0).apply(sent)
    out = scheme.ver_filter(key, flipped)
    assert trace_distance(out, state.as_density()) <= ATOL_EXACT
