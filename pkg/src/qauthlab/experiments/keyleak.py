"""Distance between the Hadamard-sandwich scheme and its key-leaking simulator.

For inner key ``k`` and outer key ``h`` the real output is

    mu_kh = Ver1_k( H( Ver2_h( Lambda( Auth2_h H Auth1_k |rho> ))))

with ``Lambda`` the computational-basis-respecting simulator of the attack
on the outer authenticated registers, and the simulated output is
``nu_h = (I (x) Gamma_h)|rho>``.  Two evaluations are provided: a literal
pipeline over register states, and a vectorized one that uses the Walsh
transform of the attack blocks along the valid outer strings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..adversaries import KeyLeakIdeal, StinespringAttack, construct_ideal_keyleak_qft
from ..qlinalg import QuantumState, hadamard_transform, permute
from ..schemes import AuthQFTAuthScheme, KeySelection, auth_qft_auth_scheme, authenticate, select_keys


def keyleak_outputs(scheme: AuthQFTAuthScheme, ideal: KeyLeakIdeal, state: QuantumState, key) -> tuple[QuantumState, QuantumState]:
    """Literal ``(mu_kh, nu_h)`` for one key pair; both are pure when the attack discards nothing."""
    _, outer_key = key
    sent = authenticate(scheme, key, state)
    received = ideal.ideal.pre_discard(sent)
    mu = scheme.ver_filter(key, received)
    nu = ideal.pre_discard(state, outer_key)
    return mu, permute(nu, mu.space.labels)


def keyleak_sq_distance_literal(
    scheme: AuthQFTAuthScheme, attack: StinespringAttack, state: QuantumState, inner: KeySelection, outer_keys
) -> np.ndarray:
    """``||mu_kh - nu_h||^2`` per outer key, averaged over ``inner`` keys."""
    ideal = construct_ideal_keyleak_qft(scheme, attack)
    out = []
    for h in outer_keys:
        total = 0.0
        for k, w in inner:
            mu, nu = keyleak_outputs(scheme, ideal, state, (k, h))
            total += w * float(np.sum(np.abs(mu.vector - nu.vector) ** 2))
        out.append(total)
    return np.array(out)


def walsh_blocks(ideal: KeyLeakIdeal, outer_key) -> np.ndarray:
    """``G_h(c) = N^{-1} sum_x (-1)^{c.x} A_(x, h(x))`` for every string ``c``."""
    idx = ideal.valid_indices(outer_key)
    blocks = ideal.ideal.blocks[idx]
    n = int(np.log2(len(idx)))
    signs = np.real(hadamard_transform(n)) * np.sqrt(len(idx))
    return np.einsum("cx,xab->cab", signs, blocks) / len(idx)


def keyleak_sq_distance_fast(
    scheme: AuthQFTAuthScheme, attack: StinespringAttack, state: QuantumState, inner: KeySelection, outer_keys
) -> np.ndarray:
    """Same quantity as :func:`keyleak_sq_distance_literal`, vectorized over inner keys."""
    ideal = construct_ideal_keyleak_qft(scheme, attack)
    inner_scheme = scheme.inner
    m_label = inner_scheme.message_space.labels[0]
    zin = ideal.ideal.zin
    ordered = permute(state, (m_label,) + zin.labels)
    nm = inner_scheme.num_messages
    psi = ordered.vector.reshape(nm, zin.dim)
    tags = np.array([inner_scheme.tags(k) for k in inner.keys])  # (K, M)
    strings = np.arange(nm)[None, :] * inner_scheme.num_tags + tags  # (K, M)
    diff = strings[:, :, None] ^ strings[:, None, :]  # (K, out m'', in m)
    off = ~np.eye(nm, dtype=bool)
    weights = np.asarray(inner.weights)
    out = []
    for h in outer_keys:
        g = walsh_blocks(ideal, h)  # (N, do, di)
        terms = np.einsum("kpmab,mb->kpma", g[diff], psi)
        err = np.einsum("kpma,pm->kpa", terms, off)
        out.append(float(weights @ np.sum(np.abs(err) ** 2, axis=(1, 2))))
    return np.array(out)


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of ``log d = c + a log M + b log T1``."""

    points: tuple
    values: tuple
    sigmas: tuple
    message_exponent: float
    tag_exponent: float
    tag_exponent_sigma: float


def fit_scaling(points, values, sigmas=None) -> ScalingFit:
    ms = np.array([p[0] for p in points], dtype=float)
    ts = np.array([p[1] for p in points], dtype=float)
    y = np.log(np.asarray(values, dtype=float))
    design = np.column_stack([np.ones_like(ms), np.log(ms), np.log(ts)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    dof = max(len(y) - 3, 1)
    cov = np.linalg.inv(design.T @ design) * float(resid @ resid) / dof
    return ScalingFit(
        tuple(points),
        tuple(float(v) for v in values),
        tuple(float(s) for s in (sigmas if sigmas is not None else [0.0] * len(values))),
        float(coef[1]),
        float(coef[2]),
        float(np.sqrt(cov[2, 2])),
    )


def keyleak_scaling(
    grid,
    attack_factory,
    state_factory,
    outer_tag_bits: int = 1,
    outer_samples: int = 8,
    rng: np.random.Generator | None = None,
) -> ScalingFit:
    """Measure the key-averaged squared distance on a grid of
    ``(message_bits, inner_tag_bits)`` and fit its scaling.

    ``attack_factory(scheme)`` builds an attack on the outer authenticated
    registers; ``state_factory(scheme)`` builds the input state.  Inner keys
    are enumerated through their tag classes, outer keys are sampled.
    """
    rng = rng or np.random.default_rng(0)
    points, values, sigmas = [], [], []
    for message_bits, tag_bits in grid:
        scheme = auth_qft_auth_scheme(message_bits, tag_bits, outer_tag_bits)
        attack = attack_factory(scheme)
        state = state_factory(scheme)
        inner = select_keys(scheme.inner, policy="exhaustive")
        outer_keys = [scheme.outer.sample_key(rng) for _ in range(outer_samples)]
        per_h = keyleak_sq_distance_fast(scheme, attack, state, inner, outer_keys)
        points.append((1 << message_bits, 1 << tag_bits))
        values.append(per_h.mean())
        sigmas.append(per_h.std(ddof=1) / np.sqrt(len(per_h)) if len(per_h) > 1 else 0.0)
    return fit_scaling(points, values, sigmas)
