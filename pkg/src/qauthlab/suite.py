"""Invariant battery run by ``qauthlab verify-suite``.

Each check runs at fixed small parameters with fixed seeds, so the suite's
output is identical on every invocation.  ``inject`` plants a known defect
so the battery can be shown to catch it:

``qft-sign``        flips the sign of one entry of the Hadamard layer on the
                    authentication side of the hash-Hadamard-hash scheme;
``reducible-poly``  builds the hash field over a reducible polynomial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .adversaries import random_unitary_attack
from .experiments.lifting import lifting_hybrid_check
from .experiments.moments import haar_moment_checks, random_index_patterns
from .hashfam import DEFAULT_MODULI, GF2Field, PolyHashFamily, verify_t_wise_uniform
from .qlinalg import ATOL_EXACT, ATOL_PIPELINE, RegisterSpace, apply_on_registers, hadamard_transform, random_pure_state
from .schemes import (
    AppendRandomBitScheme,
    PauliComposedScheme,
    UnitaryDesignScheme,
    auth_qft_auth_scheme,
    authenticate,
    select_keys,
    wegman_carter_scheme,
)
from .qlinalg import trace_distance

INJECTIONS = ("qft-sign", "reducible-poly")
REDUCIBLE_MODULI = {2: 0b101, 3: 0b1001, 4: 0b10101}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _field(width: int, inject: str | None) -> GF2Field:
    if inject == "reducible-poly" and width in REDUCIBLE_MODULI:
        return GF2Field(width, REDUCIBLE_MODULI[width], check=False)
    return GF2Field(width)


def _faulty_hadamard(qubits: int) -> np.ndarray:
    h = hadamard_transform(qubits).copy()
    h[0, 0] = -h[0, 0]
    return h


def completeness_schemes(inject: str | None = None) -> dict:
    """Catalog schemes at the pinned desk parameters."""
    schemes = {f"wegman_carter_w{w}": wegman_carter_scheme(w, 1, w) for w in (2, 3, 4)}
    transform = _faulty_hadamard(3) if inject == "qft-sign" else None
    schemes["auth_qft_auth_m1"] = auth_qft_auth_scheme(1, 2, 1, auth_transform=transform)
    for s in (2, 4):
        schemes[f"unitary_design_s{s}"] = UnitaryDesignScheme(2, s, table_size=1024, seed=0)
    schemes["pauli_composed_n1"] = PauliComposedScheme(wegman_carter_scheme(2, 1, 2))
    schemes["append_random_bit"] = AppendRandomBitScheme(wegman_carter_scheme(2, 1, 2))
    return schemes


def completeness_error(scheme, seed: int = 0) -> tuple[float, float]:
    """Largest ``||Ver_k Auth_k rho - rho||_1`` and largest ``|1 - weight|`` over every key."""
    side = RegisterSpace.of(("Z", 2))
    state = random_pure_state(scheme.message_space.concat(side), np.random.default_rng([seed, 11]))
    worst = worst_weight = 0.0
    for key, _ in select_keys(scheme, policy="exhaustive"):
        out = scheme.ver_filter(key, authenticate(scheme, key, state))
        worst = max(worst, trace_distance(out, state))
        worst_weight = max(worst_weight, abs(1.0 - out.weight))
    return worst, worst_weight


def check_field_inverse(inject: str | None) -> CheckResult:
    bad = [w for w in sorted(DEFAULT_MODULI) if not _field(w, inject).inverse_check()]
    return CheckResult("field-inverse", not bad, f"widths without inverses: {bad}" if bad else "widths 1-8 invertible")


def check_three_wise(inject: str | None) -> CheckResult:
    for width in (2, 3):
        family = PolyHashFamily(_field(width, inject), width)
        for triple in itertools.combinations(range(1 << width), 3):
            if not verify_t_wise_uniform(family, triple):
                return CheckResult("three-wise-uniformity", False, f"width {width}, points {triple}")
    return CheckResult("three-wise-uniformity", True, "all triples at widths 2 and 3")


def check_haar_moments(inject: str | None) -> CheckResult:
    rng = np.random.default_rng([0, 5])
    worst = 0.0
    for d in (2, 3, 4):
        checks = haar_moment_checks(d, random_index_patterns(d, 20, rng), 100_000, rng)
        worst = max(worst, max(c.deviation_in_sigmas for c in checks))
    return CheckResult("haar-moments", worst <= 3.0, f"largest deviation {worst:.3f} standard errors")


def check_qft_stage_hybrid(inject: str | None) -> CheckResult:
    """The scheme's authentication must equal the literal stage composition
    and verification must undo it, for every key."""
    transform = _faulty_hadamard(3) if inject == "qft-sign" else None
    scheme = auth_qft_auth_scheme(1, 2, 1, auth_transform=transform)
    state = random_pure_state(scheme.message_space.concat(RegisterSpace.of(("Z", 2))), np.random.default_rng([0, 13]))
    worst = 0.0
    inner_labels = scheme.inner.auth_space.labels
    for (ki, ko), _ in select_keys(scheme, policy="exhaustive"):
        staged = authenticate(scheme.inner, ki, state)
        staged = apply_on_registers(scheme.hadamard, staged, inner_labels)
        staged = authenticate(scheme.outer, ko, staged)
        sent = authenticate(scheme, (ki, ko), state)
        worst = max(worst, trace_distance(sent, staged), trace_distance(scheme.ver_filter((ki, ko), sent), state))
    return CheckResult("qft-stage-hybrid", worst <= ATOL_EXACT, f"largest discrepancy {worst:.3e}")


def check_lifting_hybrids(inject: str | None) -> CheckResult:
    scheme = PauliComposedScheme(wegman_carter_scheme(2, 1, 2))
    side = RegisterSpace.of(("Z", 2))
    state = random_pure_state(scheme.message_space.concat(side), np.random.default_rng([0, 17]))
    worst = 0.0
    for seed in range(2):
        report = lifting_hybrid_check(scheme, random_unitary_attack(scheme.auth_space, side, seed), state)
        worst = max(worst, report.max_discrepancy)
    return CheckResult("lifting-hybrids", worst <= ATOL_PIPELINE, f"largest discrepancy {worst:.3e}")


def check_completeness(inject: str | None) -> CheckResult:
    for name, scheme in completeness_schemes(inject).items():
        err, weight = completeness_error(scheme)
        if err > ATOL_EXACT or weight > ATOL_EXACT:
            return CheckResult("completeness", False, f"{name}: distance {err:.3e}, weight defect {weight:.3e}")
    return CheckResult("completeness", True, "every catalog scheme, every key")


CHECKS: tuple[Callable[[str | None], CheckResult], ...] = (
    check_field_inverse,
    check_three_wise,
    check_haar_moments,
    check_qft_stage_hybrid,
    check_lifting_hybrids,
    check_completeness,
)


def verify_suite(inject: str | None = None, echo: Callable[[str], None] = print) -> int:
    """Run every check; exit code 0 iff all pass, otherwise name the first failure."""
    if inject is not None and inject not in INJECTIONS:
        raise ValueError(f"unknown injection {inject!r}; choose from {INJECTIONS}")
    first_failure = None
    for check in CHECKS:
        result = check(inject)
        echo(f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.detail}")
        if not result.passed and first_failure is None:
            first_failure = result.name
    if first_failure is not None:
        echo(f"first failing invariant: {first_failure}")
        return 1
    echo("all invariants hold")
    return 0
