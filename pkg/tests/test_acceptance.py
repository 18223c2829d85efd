"""End-to-end acceptance criteria.

Every test records one PASS/FAIL line through the ``record_criterion``
fixture; the lines are printed in criterion order at the end of the session.
Run ``python tests/test_acceptance.py`` to execute only this file.
"""

import itertools
import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from qauthlab import adversaries as adv
from qauthlab.experiments import (
    counterexample_keyed_vs_averaged,
    encryption_game,
    forgery_probability,
    haar_concentration,
    haar_moment_checks,
    keyleak_scaling,
    lifting_hybrid_check,
    qkd_batch,
    random_index_patterns,
    security_game,
    total_auth_game,
    wegman_carter_bound,
)
from qauthlab.hashfam import GF2Field, PolyHashFamily, verify_t_wise_uniform
from qauthlab.presets import make_state
from qauthlab.qlinalg import ATOL_EXACT, ATOL_PIPELINE, QuantumState, RegisterSpace, random_pure_state
from qauthlab.schemes import (
    AppendRandomBitScheme,
    PauliComposedScheme,
    UnitaryDesignScheme,
    select_keys,
    wegman_carter_scheme,
)
from qauthlab.suite import completeness_error, completeness_schemes

pytestmark = pytest.mark.acceptance

SIDE = RegisterSpace.of(("Z", 2))
REPO = Path(__file__).resolve().parents[1]


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_criterion_01_completeness(record_criterion):
    with Timer() as clock:
        worst = max(max(completeness_error(s)) for s in completeness_schemes().values())
    ok = worst <= ATOL_EXACT and clock.seconds <= 60
    record_criterion(1, "completeness", ok, f"worst error {worst:.2e} over {len(completeness_schemes())} schemes, {clock.seconds:.1f}s")
    assert ok


def test_criterion_02_three_wise_uniformity(record_criterion):
    checked, bad = 0, []
    with Timer() as clock:
        for width in (2, 3):
            family = PolyHashFamily(GF2Field(width), width)
            for triple in itertools.permutations(range(1 << width), 3):
                checked += 1
                if not verify_t_wise_uniform(family, triple):
                    bad.append((width, triple))
    ok = not bad and clock.seconds <= 60
    record_criterion(2, "3-wise uniformity", ok, f"{checked} ordered triples at w=2,3, {len(bad)} non-uniform, {clock.seconds:.1f}s")
    assert ok


def _wc_battery(scheme):
    y = scheme.auth_space
    return {
        "tag_substitution": adv.tag_substitution(y, "M", "T", new_tag=1),
        "random_unitary": adv.random_unitary_attack(y, SIDE, 0),
        "controlled_replace": adv.controlled_replace(y, "Z"),
    }


def test_criterion_03_wegman_carter_security(record_criterion):
    eps = {name: [] for name in ("tag_substitution", "random_unitary", "controlled_replace")}
    bounds, over = [], []
    tags = range(3, 7)
    with Timer() as clock:
        for t in tags:
            scheme = wegman_carter_scheme(t, 1, t)
            state = make_state(scheme.message_space, "bell_z")
            keys = select_keys(scheme, policy="exhaustive")
            bound = wegman_carter_bound(scheme.message_space.dim, scheme.num_tags)
            bounds.append(bound)
            for name, attack in _wc_battery(scheme).items():
                report = security_game(scheme, attack, state, keys)
                eps[name].append(report.epsilon)
                if report.epsilon > bound:
                    over.append((t, name))
    decreasing = all(all(b < a for a, b in zip(vals, vals[1:])) for vals in eps.values())
    ok = not over and decreasing and clock.seconds <= 600
    table = "; ".join(f"{n} " + ",".join(f"{v:.4f}" for v in vals) for n, vals in eps.items())
    record_criterion(3, "WC security", ok, f"t=3..6 exhaustive keys, {table}; bounds {bounds[0]:.2f}..{bounds[-1]:.2f}; "
                     f"strictly decreasing {decreasing}, {clock.seconds:.0f}s")
    assert not over
    assert decreasing
    assert clock.seconds <= 600


def test_criterion_04_unforgeability(record_criterion):
    with Timer() as clock:
        scheme = wegman_carter_scheme(3, 1, 3)
        y = scheme.auth_space
        keys = select_keys(scheme, policy="exhaustive")
        state = make_state(scheme.message_space, "bell_z")
        forgers = {
            "duplicate": adv.forger_duplicate(y),
            "tag_guess": adv.forger_tag_guess(y, 2),
            "random_isometry": adv.forger_random_isometry(y, 0),
        }
        battery = dict(_wc_battery(scheme))
        battery.update({f"forger_{n}": adv.forger_as_attack(f, y) for n, f in forgers.items()})
        eps_measured = max(security_game(scheme, a, state, keys).epsilon for a in battery.values())
        forgery = {n: forgery_probability(scheme, f, state, keys) for n, f in forgers.items()}
        guess = {}
        for width in (2, 3, 4):
            wc = wegman_carter_scheme(width, 1, width)
            guess[width] = forgery_probability(wc, adv.forger_tag_guess(wc.auth_space, 2),
                                               make_state(wc.message_space, "bell_z"),
                                               select_keys(wc, policy="exhaustive"))[0]
    within = all(p <= 3 * eps_measured + 5 * s for p, s in forgery.values())
    exact = all(abs(p - 2.0 ** -w) <= ATOL_EXACT for w, p in guess.items())
    ok = within and exact and clock.seconds <= 300
    record_criterion(4, "unforgeability", ok,
                     f"eps_measured {eps_measured:.4f}; forgery " + ", ".join(f"{n} {p:.4f}" for n, (p, _) in forgery.items())
                     + "; tag guess " + ", ".join(f"w={w} {p:.6f}" for w, p in guess.items()) + f", {clock.seconds:.1f}s")
    assert within and exact


def test_criterion_05_haar_moments(record_criterion):
    rng = np.random.default_rng(2026)
    worst, count = 0.0, 0
    with Timer() as clock:
        for d in (2, 3, 4):
            checks = haar_moment_checks(d, random_index_patterns(d, 20, rng), 100_000, rng)
            count += len(checks)
            worst = max(worst, max(c.deviation_in_sigmas for c in checks))
    ok = worst <= 3.0 and clock.seconds <= 300
    record_criterion(5, "Haar moments", ok, f"{count} patterns at d=2,3,4, 1e5 samples each, largest deviation {worst:.2f} sigma, {clock.seconds:.1f}s")
    assert ok


def test_criterion_06_concentration(record_criterion):
    y = RegisterSpace.of(("M", 2), ("T", 8))
    state = random_pure_state(RegisterSpace.of(("M", 2)).concat(SIDE), np.random.default_rng(6))
    means, over, tails = [], [], []
    with Timer() as clock:
        for seed in range(5):
            res = haar_concentration(adv.random_unitary_attack(y, SIDE, seed), y, state, "M", 3, 500,
                                     np.random.default_rng([6, seed]))
            means.append(res.mean)
            tails.append(res.tail_fraction)
            if res.mean > res.mean_bound + 3 * res.sigma:
                over.append(seed)
    ok = not over and max(tails) < 0.05 and clock.seconds <= 600
    record_criterion(6, "concentration", ok, f"means {min(means):.4f}..{max(means):.4f} vs bound {res.mean_bound:.4f} "
                     f"(+3 sigma {3 * res.sigma:.4f}), worst tail {max(tails):.3f}, {clock.seconds:.1f}s")
    assert ok


def test_criterion_07_total_authentication(record_criterion):
    levels = (2, 4, 6)
    eps, sig, over = [], [], []
    with Timer() as clock:
        for s in levels:
            scheme = UnitaryDesignScheme(2, s, table_size=1 << 30, seed=7)
            keys = select_keys(scheme, np.random.default_rng([7, s]), samples=256)
            state = make_state(scheme.message_space, "random", side_dim=2)
            report = total_auth_game(scheme, adv.random_unitary_attack(scheme.auth_space, SIDE, 0), state, keys)
            eps.append(report.epsilon)
            sig.append(report.sigma)
            if report.epsilon > 2.0 ** (-s / 2) + 5 * report.sigma:
                over.append(s)
    # least-squares slope of log2(eps) in s, with propagated standard error
    x = np.array(levels, dtype=float)
    logs = np.log2(eps)
    log_sig = np.array(sig) / (np.array(eps) * np.log(2))
    weights = 1.0 / log_sig ** 2
    xm = np.sum(weights * x) / np.sum(weights)
    slope = np.sum(weights * (x - xm) * logs) / np.sum(weights * (x - xm) ** 2)
    slope_sigma = 1.0 / np.sqrt(np.sum(weights * (x - xm) ** 2))
    halves = abs(slope + 1.0) <= 3 * slope_sigma
    ok = not over and halves and clock.seconds <= 900
    record_criterion(7, "total authentication", ok,
                     "eps " + ", ".join(f"s={s} {e:.4f}+-{q:.4f}" for s, e, q in zip(levels, eps, sig))
                     + f"; log2 slope {slope:.3f}+-{slope_sigma:.3f}, {clock.seconds:.1f}s")
    assert ok


def test_criterion_08_auth_qft_auth_scaling(record_criterion):
    grid = [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]
    with Timer() as clock:
        fit = keyleak_scaling(
            grid,
            lambda sch: adv.random_controlled_unitary_attack(sch.auth_space, SIDE, 0),
            lambda sch: make_state(sch.message_space, "random", side_dim=2),
            outer_tag_bits=1,
            outer_samples=8,
            rng=np.random.default_rng(8),
        )
    ok = abs(fit.tag_exponent + 1.0) <= 0.2 and clock.seconds <= 900
    record_criterion(8, "Auth-QFT-Auth scaling", ok, f"tag exponent {fit.tag_exponent:.3f}+-{fit.tag_exponent_sigma:.3f}, "
                     f"message exponent {fit.message_exponent:.3f}, {len(grid)} grid points, {clock.seconds:.1f}s")
    assert ok


def test_criterion_09_lifting_hybrids(record_criterion):
    scheme = PauliComposedScheme(wegman_carter_scheme(2, 1, 2))
    worst = 0.0
    with Timer() as clock:
        for seed in range(10):
            state = random_pure_state(scheme.message_space.concat(SIDE), np.random.default_rng([9, seed]))
            report = lifting_hybrid_check(scheme, adv.random_unitary_attack(scheme.auth_space, SIDE, seed), state)
            worst = max(worst, report.max_discrepancy)
    ok = worst <= ATOL_PIPELINE and clock.seconds <= 300
    record_criterion(9, "lifting hybrids", ok, f"10 random attacks, largest discrepancy {worst:.2e}, {clock.seconds:.1f}s")
    assert ok


def test_criterion_10_keyed_vs_averaged(record_criterion):
    with Timer() as clock:
        scheme = AppendRandomBitScheme(wegman_carter_scheme(2, 1, 2))
        res = counterexample_keyed_vs_averaged(scheme, make_state(scheme.message_space, "bell_z"))
    ok = res.averaged_epsilon <= ATOL_EXACT and res.min_keyed_epsilon >= 0.5 and clock.seconds <= 60
    record_criterion(10, "keyed vs averaged", ok, f"averaged eps {res.averaged_epsilon:.2e}, "
                     f"smallest keyed eps over witnesses {res.min_keyed_epsilon:.4f}, {clock.seconds:.1f}s")
    assert ok


def test_criterion_11_encryption_controls(record_criterion):
    with Timer() as clock:
        wc = wegman_carter_scheme(2, 1, 2)
        negative = encryption_game(wc, QuantumState.basis(wc.message_space, [0]), QuantumState.basis(wc.message_space, [1]),
                                   select_keys(wc, policy="exhaustive")).distance
        design = UnitaryDesignScheme(2, 6, table_size=1 << 30, seed=11)
        keys = select_keys(design, np.random.default_rng(11), samples=256)
        positive = encryption_game(design, QuantumState.basis(design.message_space, [0]),
                                   QuantumState.basis(design.message_space, [1]), keys)
        eps = total_auth_game(design, adv.random_unitary_attack(design.auth_space, SIDE, 0),
                              make_state(design.message_space, "random", side_dim=2), keys).epsilon
    limit = 14 * np.sqrt(eps) + 5 * positive.sigma
    ok = abs(negative - 2.0) <= ATOL_EXACT and positive.distance <= limit and clock.seconds <= 300
    record_criterion(11, "encryption controls", ok, f"WC distance {negative:.12f}; design s=6 distance "
                     f"{positive.distance:.4f}+-{positive.sigma:.4f} vs 14 sqrt(eps)+5 sigma = {limit:.4f}, {clock.seconds:.1f}s")
    assert ok


def test_criterion_12_key_distribution(record_criterion):
    scheme = UnitaryDesignScheme(2, 4, table_size=1 << 30, seed=12)
    with Timer() as clock:
        clean = qkd_batch(scheme, 4, 100, seed=0)
        junk = qkd_batch(scheme, 4, 100, seed=0, eavesdropper="junk", target=0)
    clean_ok = all(r.accepted == [0, 1, 2, 3] and r.agreement == 1.0 for r in clean.runs)
    excluded = junk.target_excluded_fraction
    agree = junk.honest_agreement
    ok = clean_ok and excluded >= 0.95 and agree == 1.0 and clock.seconds <= 600
    record_criterion(12, "key distribution", ok,
                     f"clean runs all-pairs agreement {clean_ok}; junk pair excluded in {excluded:.2f} of runs "
                     f"(analytic rate 1 - M/N = {1 - 2 / 32:.4f}); honest accepted-pair agreement {agree:.2f}, "
                     f"{clock.seconds:.1f}s")
    assert clean_ok
    assert agree == 1.0
    assert excluded >= 0.95


def _cli(*args, cwd):
    proc = subprocess.run([sys.executable, "-m", "qauthlab", *args], cwd=cwd, capture_output=True, check=False)
    return proc.returncode, proc.stdout


def test_criterion_13_determinism(record_criterion, tmp_path):
    config = tmp_path / "config.json"
    config.write_text((REPO / "configs" / "wc_security.json").read_text())
    start = time.perf_counter()
    first_suite = _cli("verify-suite", cwd=tmp_path)
    suite_seconds = time.perf_counter() - start
    start = time.perf_counter()
    run_code = _cli("run", str(config), "--out", "serial", "--jobs", "1", cwd=tmp_path)[0]
    run_seconds = time.perf_counter() - start
    start = time.perf_counter()
    second_suite = _cli("verify-suite", cwd=tmp_path)
    parallel_code = _cli("run", str(config), "--out", "parallel", "--jobs", "4", cwd=tmp_path)[0]
    repeat_seconds = time.perf_counter() - start
    outputs = {}
    for name in ("serial", "parallel"):
        outputs[name] = tuple((tmp_path / name / f).read_bytes() for f in ("reports.jsonl", "reports.csv"))
    same_suite = first_suite == second_suite and first_suite[0] == 0
    same_run = run_code == parallel_code == 0 and outputs["serial"] == outputs["parallel"]
    # the second invocation of each command must cost no more than twice the first
    budget = 2 * (suite_seconds + run_seconds)
    ok = same_suite and same_run and repeat_seconds <= budget
    record_criterion(13, "determinism", ok, f"verify-suite identical {same_suite}; run jobs=1 vs jobs=4 identical {same_run}; "
                     f"repeat {repeat_seconds:.1f}s vs budget {budget:.1f}s")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", *sys.argv[1:]]))
