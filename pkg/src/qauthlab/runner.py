"""Batch experiment runner driven by a single JSON configuration document.

Configuration fields
--------------------
``experiment``  one of :data:`EXPERIMENTS`.
``scheme``      ``{"kind": <catalog name>, "params": {...}}``; the lifted and
                appended-bit schemes take ``params.inner`` as a nested scheme.
``attack``      ``{"kind": <attack name>, "params": {...}}`` (not needed by
                every experiment).
``state``       ``{"preset": "basis" | "plus" | "bell_z" | "random", ...}``
                plus ``value``, ``side_dim`` and ``seed`` where relevant;
                ``state_alt`` is the second input of the encryption game.
``keys``        ``{"policy": "auto" | "exhaustive" | "sampled", "samples": n}``.
``simulator``   ``"basis"`` or ``"oblivious"`` for the security game.
``options``     experiment-specific settings (see :data:`OPTION_DEFAULTS`).
``grid``        ``{"dotted.path": [values, ...]}``; the run covers the
                Cartesian product in the order the keys are listed.  A
                value that is an object is merged into the object at its
                path, so parameters that must change together can be
                listed as one grid axis.
``seed``        master seed, a 64-bit unsigned integer.
``output``      output directory (``--out`` overrides it).

Seeds
-----
Grid point ``i`` runs with ``SeedSequence([master, i]).generate_state(1,
uint64)[0]``.  The value depends only on the master seed and the point
index, so the number of workers cannot change any result.  Randomized
attacks and the ``random`` state preset default their own ``seed`` to the
master seed, so they stay fixed across the grid unless the grid varies them.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 numerical
failure during a run.
"""

from __future__ import annotations

import copy
import csv
import inspect
import io
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from . import adversaries as adv
from .experiments import games
from .experiments.concentration import haar_concentration
from .experiments.keyleak import keyleak_sq_distance_fast
from .experiments.lifting import lifting_hybrid_check
from .experiments.qkd import EAVESDROPPERS, qkd_batch
from .presets import STATE_PRESETS, make_state
from .qlinalg import RegisterSpace, trace_distance
from .schemes import (
    SCHEME_CATALOG,
    AuthQFTAuthScheme,
    PauliComposedScheme,
    UnitaryDesignScheme,
    WegmanCarterScheme,
    authenticate,
    select_keys,
)

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3, 4

EXPERIMENTS = (
    "completeness",
    "security",
    "total_auth",
    "forgery",
    "indist_from_measured",
    "encryption",
    "keyleak",
    "lifting",
    "counterexample",
    "qkd",
    "concentration",
)

TOP_LEVEL_FIELDS = (
    "experiment", "scheme", "attack", "state", "state_alt", "keys",
    "simulator", "options", "grid", "seed", "output",
)

OPTION_DEFAULTS: dict[str, dict[str, Any]] = {
    "completeness": {},
    "security": {},
    "total_auth": {},
    "forgery": {},
    "indist_from_measured": {"batches": 10},
    "encryption": {"batches": 10},
    "keyleak": {"outer_samples": 8},
    "lifting": {},
    "counterexample": {},
    "qkd": {"pairs": 4, "runs": 100, "eavesdropper": "none", "target": 0},
    "concentration": {"samples": 500, "delta": None},
}

NEEDS_ATTACK = {"security", "total_auth", "forgery", "keyleak", "lifting", "concentration"}

CSV_FIXED = ("experiment", "scheme", "attack")
CSV_TAIL = ("epsilon", "acceptance", "bound", "sigma", "seed")


class ConfigError(Exception):
    """Problem with a configuration; ``code`` is the process exit code."""

    def __init__(self, code: int, message: str, point: int | None = None):
        self.code = code
        self.point = point
        super().__init__(message)

    def __str__(self) -> str:
        where = f"grid point {self.point}: " if self.point is not None else ""
        return where + super().__str__()


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _line_of(text: str, needle: str) -> int | None:
    pos = text.find(needle)
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def _field_error(text: str, field: str, message: str, value: Any = None) -> ConfigError:
    line = None
    if value is not None:
        line = _line_of(text, json.dumps(value))
    if line is None:
        line = _line_of(text, json.dumps(field.split(".")[-1]))
    where = f"line {line}, " if line else ""
    return ConfigError(EXIT_PARSE, f"{where}field '{field}': {message}")


def parse_config(text: str) -> dict:
    """Parse and structurally check a configuration document.

    Syntax errors, unknown fields and unknown kinds are parse errors; value
    problems are left to :func:`validate_point`.
    """
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(EXIT_PARSE, f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(EXIT_PARSE, "line 1: the configuration must be a JSON object")
    for key in cfg:
        if key not in TOP_LEVEL_FIELDS:
            raise _field_error(text, key, f"unknown field; expected one of {list(TOP_LEVEL_FIELDS)}")
    _check_structure(text, cfg)
    grid = cfg.get("grid", {})
    if not isinstance(grid, dict):
        raise _field_error(text, "grid", "must be an object mapping dotted paths to lists")
    for path, values in grid.items():
        if not isinstance(values, list) or not values:
            raise _field_error(text, f"grid.{path}", "must be a non-empty list")
        if path.split(".")[0] not in TOP_LEVEL_FIELDS or path.split(".")[0] == "grid":
            raise _field_error(text, f"grid.{path}", "path does not start with a configuration field")
    return cfg


def _check_structure(text: str, cfg: dict):
    """Kinds, field names and seed range of a (possibly resolved) configuration."""
    exp = cfg.get("experiment")
    if exp not in EXPERIMENTS:
        raise _field_error(text, "experiment", f"unknown experiment {exp!r}; expected one of {list(EXPERIMENTS)}", exp)
    if "scheme" not in cfg:
        raise ConfigError(EXIT_PARSE, "field 'scheme': missing")
    _check_scheme_desc(text, cfg["scheme"], "scheme")
    if exp in NEEDS_ATTACK:
        if "attack" not in cfg:
            raise ConfigError(EXIT_PARSE, f"field 'attack': experiment {exp!r} needs an attack")
    if "attack" in cfg:
        _check_attack_desc(text, cfg["attack"], "attack")
    for name in ("state", "state_alt"):
        if name in cfg:
            _check_state_desc(text, cfg[name], name)
    options = cfg.get("options", {})
    if not isinstance(options, dict):
        raise _field_error(text, "options", "must be an object")
    for key in options:
        if key not in OPTION_DEFAULTS[exp]:
            raise _field_error(text, f"options.{key}", f"not an option of {exp!r}")
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise _field_error(text, "seed", "must be an integer in [0, 2^64)")


def _check_scheme_desc(text: str, desc: Any, path: str):
    if not isinstance(desc, dict) or "kind" not in desc:
        raise _field_error(text, path, "must be an object with a 'kind'")
    kind = desc["kind"]
    if kind not in SCHEME_CATALOG:
        raise _field_error(text, f"{path}.kind", f"unknown scheme {kind!r}; expected one of {list(SCHEME_CATALOG)}", kind)
    params = desc.get("params", {})
    if not isinstance(params, dict):
        raise _field_error(text, f"{path}.params", "must be an object")
    if kind in ("pauli_composed", "append_random_bit"):
        if "inner" not in params:
            raise _field_error(text, f"{path}.params", "needs an 'inner' scheme")
        _check_scheme_desc(text, params["inner"], f"{path}.params.inner")
    ctor = SCHEME_CATALOG[kind][1]
    try:
        inspect.signature(ctor).bind_partial(**params)
    except TypeError as exc:
        raise _field_error(text, f"{path}.params", str(exc)) from None


def _check_attack_desc(text: str, desc: Any, path: str):
    if not isinstance(desc, dict) or "kind" not in desc:
        raise _field_error(text, path, "must be an object with a 'kind'")
    kind = desc["kind"]
    if kind not in ATTACK_BUILDERS:
        raise _field_error(text, f"{path}.kind", f"unknown attack {kind!r}; expected one of {list(ATTACK_BUILDERS)}", kind)
    params = desc.get("params", {})
    if not isinstance(params, dict):
        raise _field_error(text, f"{path}.params", "must be an object")
    allowed = ATTACK_BUILDERS[kind][1]
    for key in params:
        if key not in allowed:
            raise _field_error(text, f"{path}.params.{key}", f"not a parameter of {kind!r}; expected {list(allowed)}")


def _check_state_desc(text: str, desc: Any, path: str):
    if not isinstance(desc, dict):
        raise _field_error(text, path, "must be an object")
    preset = desc.get("preset", "bell_z")
    if preset not in STATE_PRESETS:
        raise _field_error(text, f"{path}.preset", f"unknown preset {preset!r}; expected one of {list(STATE_PRESETS)}", preset)
    for key in desc:
        if key not in ("preset", "value", "side_dim", "seed"):
            raise _field_error(text, f"{path}.{key}", "unknown state field")


# ---------------------------------------------------------------------------
# Grid expansion and seeds
# ---------------------------------------------------------------------------


def point_seed(master: int, index: int) -> int:
    """Counter-based per-point seed; independent of sharding."""
    return int(np.random.SeedSequence([master, index]).generate_state(1, np.uint64)[0])


def _set_path(cfg: dict, path: str, value: Any):
    parts = path.split(".")
    node = cfg
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(EXIT_PARSE, f"field 'grid.{path}': '{part}' is not an object")
    if isinstance(value, dict) and isinstance(node.get(parts[-1]), dict):
        node[parts[-1]].update(copy.deepcopy(value))
    else:
        node[parts[-1]] = copy.deepcopy(value)


def expand_grid(cfg: dict) -> list[tuple[dict, dict]]:
    """Resolved per-point configurations, with the grid removed and defaults filled."""
    grid = cfg.get("grid", {})
    paths = list(grid)
    points = []
    for combo in itertools.product(*(grid[p] for p in paths)):
        resolved = copy.deepcopy({k: v for k, v in cfg.items() if k not in ("grid", "output")})
        for path, value in zip(paths, combo):
            _set_path(resolved, path, value)
        resolved.setdefault("seed", 0)
        options = dict(OPTION_DEFAULTS[resolved["experiment"]])
        options.update(resolved.get("options", {}))
        resolved["options"] = options
        resolved.setdefault("keys", {"policy": "auto", "samples": 1024})
        points.append((resolved, dict(zip(paths, combo))))
    return points


# ---------------------------------------------------------------------------
# Object construction
# ---------------------------------------------------------------------------


def build_scheme(desc: dict):
    kind = desc["kind"]
    params = dict(desc.get("params", {}))
    ctor = SCHEME_CATALOG[kind][1]
    if "inner" in params:
        params["inner"] = build_scheme(params["inner"])
    return ctor(**params)


def build_state(desc: dict | None, message_space: RegisterSpace, master_seed: int):
    desc = dict(desc or {})
    preset = desc.pop("preset", "bell_z")
    desc.setdefault("seed", master_seed)
    return make_state(message_space, preset, **desc)


def _side_space(state, message_space: RegisterSpace) -> RegisterSpace | None:
    side = state.space.without(message_space.labels)
    return side if len(side) else None


def _require_side(side):
    if side is None:
        raise ValueError("this attack needs side registers; use the 'bell_z' or 'random' state preset")
    return side


def _message_and_tag(y: RegisterSpace):
    if len(y) != 2:
        raise ValueError("this attack needs a scheme with one message and one tag register")
    return y.labels


ATTACK_BUILDERS: dict[str, tuple[Callable, tuple[str, ...]]] = {
    "identity": (lambda y, z, p: adv.identity_attack(y), ()),
    "measure_in_basis": (lambda y, z, p: adv.measure_in_basis_attack(y, keep_record=p.get("keep_record", False)), ("keep_record",)),
    "replace_with_junk": (
        lambda y, z, p: adv.replace_with_junk(y, None if p.get("junk") is None else np.asarray(p["junk"]), keep=p.get("keep", False)),
        ("junk", "keep"),
    ),
    "controlled_replace": (
        lambda y, z, p: adv.controlled_replace(y, _require_side(z).labels[0], keep=p.get("keep", False)),
        ("keep",),
    ),
    "random_unitary": (lambda y, z, p: adv.random_unitary_attack(y, z, p["seed"]), ("seed",)),
    "random_controlled_unitary": (
        lambda y, z, p: adv.random_controlled_unitary_attack(y, _require_side(z), p["seed"]),
        ("seed",),
    ),
    "pauli_tamper": (lambda y, z, p: adv.pauli_tamper(y, p.get("x_mask", 1), p.get("z_mask", 0)), ("x_mask", "z_mask")),
    "copy_register": (
        lambda y, z, p: adv.copy_register_attack(y, p.get("source", y.labels[-1])),
        ("source",),
    ),
    "tag_substitution": (
        lambda y, z, p: adv.tag_substitution(y, *_message_and_tag(y), p.get("new_tag", 0), p.get("flip", 1)),
        ("new_tag", "flip"),
    ),
    "zero_projector": (lambda y, z, p: adv.zero_projector_attack(y, _require_side(z)), ()),
    "forger_duplicate": (lambda y, z, p: adv.forger_duplicate(y), ()),
    "forger_tag_guess": (lambda y, z, p: adv.forger_tag_guess(y, p["num_messages"], p.get("flip", 1)), ("flip", "num_messages")),
    "forger_random_isometry": (lambda y, z, p: adv.forger_random_isometry(y, p["seed"]), ("seed",)),
}

FORGERS = ("forger_duplicate", "forger_tag_guess", "forger_random_isometry")


def build_attack(desc: dict, scheme, state, master_seed: int):
    kind = desc["kind"]
    params = dict(desc.get("params", {}))
    if "seed" in ATTACK_BUILDERS[kind][1]:
        params.setdefault("seed", master_seed)
    if kind == "forger_tag_guess":
        params.setdefault("num_messages", scheme.num_messages)
    y = scheme.auth_space
    z = _side_space(state, scheme.message_space)
    return ATTACK_BUILDERS[kind][0](y, z, params)


@dataclass
class PointObjects:
    scheme: Any
    state: Any
    attack: Any = None
    state_alt: Any = None


def validate_point(resolved: dict) -> PointObjects:
    """Build every object a grid point needs and check the experiment's preconditions."""
    exp = resolved["experiment"]
    master = resolved["seed"]
    scheme = build_scheme(resolved["scheme"])
    state = build_state(resolved.get("state"), scheme.message_space, master)
    objs = PointObjects(scheme, state)
    if "attack" in resolved and exp in NEEDS_ATTACK:
        objs.attack = build_attack(resolved["attack"], scheme, state, master)
    keys = resolved["keys"]
    if keys.get("policy", "auto") not in ("auto", "exhaustive", "sampled"):
        raise ValueError(f"unknown key policy {keys.get('policy')!r}")
    if int(keys.get("samples", 1024)) < 1:
        raise ValueError("keys.samples must be positive")
    if keys.get("policy") == "exhaustive" and scheme.num_keys > 2**16 and scheme.key_classes() is None:
        raise ValueError(f"{scheme.num_keys} keys are too many for exhaustive enumeration")
    opts = resolved["options"]
    attack_kind = resolved.get("attack", {}).get("kind")
    if exp == "forgery":
        if not isinstance(scheme, WegmanCarterScheme):
            raise ValueError("forgery needs the wegman_carter scheme")
        if attack_kind not in FORGERS:
            raise ValueError(f"forgery needs a forger attack, one of {list(FORGERS)}")
    elif exp in NEEDS_ATTACK and attack_kind in FORGERS:
        objs.attack = adv.forger_as_attack(objs.attack, scheme.auth_space)
    if exp == "security" and resolved.get("simulator", "basis") not in ("basis", "oblivious"):
        raise ValueError("simulator must be 'basis' or 'oblivious'")
    if exp in ("total_auth", "concentration") and not isinstance(scheme, UnitaryDesignScheme):
        raise ValueError(f"{exp} needs the unitary_design scheme")
    if exp == "concentration" and (objs.attack.discard or objs.attack.projector is not None):
        raise ValueError("concentration needs a unitary attack")
    if exp == "keyleak" and not isinstance(scheme, AuthQFTAuthScheme):
        raise ValueError("keyleak needs the auth_qft_auth scheme")
    if exp == "lifting" and not isinstance(scheme, PauliComposedScheme):
        raise ValueError("lifting needs the pauli_composed scheme")
    if exp == "counterexample" and scheme.name != "append_random_bit":
        raise ValueError("counterexample needs the append_random_bit scheme")
    if exp == "encryption":
        if "state_alt" not in resolved:
            raise ValueError("encryption needs 'state_alt'")
        objs.state_alt = build_state(resolved["state_alt"], scheme.message_space, master)
    if exp == "qkd":
        if not isinstance(scheme, UnitaryDesignScheme) or scheme.message_dim != 2:
            raise ValueError("qkd needs the unitary_design scheme with message_dim 2")
        if opts["eavesdropper"] not in EAVESDROPPERS:
            raise ValueError(f"eavesdropper must be one of {list(EAVESDROPPERS)}")
        if not 1 <= opts["pairs"] <= 6 or not 0 <= opts["target"] < opts["pairs"] or opts["runs"] < 1:
            raise ValueError("qkd needs 1 <= pairs <= 6, 0 <= target < pairs and runs >= 1")
    for name in ("batches", "outer_samples", "samples"):
        if name in opts and (not isinstance(opts[name], int) or opts[name] < 1):
            raise ValueError(f"options.{name} must be a positive integer")
    return objs


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def _keys(resolved: dict, scheme, rng):
    keys = resolved["keys"]
    return select_keys(scheme, rng, samples=int(keys.get("samples", 1024)), policy=keys.get("policy", "auto"))


def _report(exp, objs, eps, sigma=0.0, acceptance=None, bound=None, num_keys=0, exhaustive=True, extra=None):
    return games.SecurityReport(
        exp,
        objs.scheme.describe(),
        objs.attack.describe() if objs.attack is not None else None,
        float(eps),
        float(sigma),
        None if acceptance is None else float(acceptance),
        None if bound is None else float(bound),
        num_keys,
        exhaustive,
        None,
        extra or {},
    )


def _run_experiment(resolved: dict, objs: PointObjects, rng: np.random.Generator) -> games.SecurityReport:
    exp = resolved["experiment"]
    opts = resolved["options"]
    scheme, state, attack = objs.scheme, objs.state, objs.attack
    if exp == "completeness":
        keys = _keys(resolved, scheme, rng)
        worst, weights = 0.0, []
        for key, _ in keys:
            out = scheme.ver_filter(key, authenticate(scheme, key, state))
            worst = max(worst, trace_distance(out, state))
            weights.append(out.weight)
        return _report(exp, objs, worst, acceptance=min(weights), bound=0.0, num_keys=len(keys), exhaustive=keys.exhaustive)
    if exp == "security":
        keys = _keys(resolved, scheme, rng)
        bound = games.wegman_carter_bound(scheme.num_messages, scheme.num_tags) if isinstance(scheme, WegmanCarterScheme) else None
        return games.security_game(scheme, attack, state, keys, resolved.get("simulator", "basis"), bound)
    if exp == "total_auth":
        return games.total_auth_game(scheme, attack, state, _keys(resolved, scheme, rng))
    if exp == "forgery":
        keys = _keys(resolved, scheme, rng)
        prob, sigma = games.forgery_probability(scheme, attack, state, keys)
        return _report(exp, objs, prob, sigma, bound=1.0 / scheme.num_tags, num_keys=len(keys), exhaustive=keys.exhaustive,
                       extra={"quantity": "forgery_probability"})
    if exp == "indist_from_measured":
        keys = _keys(resolved, scheme, rng)
        value, sigma = games.indist_from_measured(scheme, state, keys, opts["batches"])
        return _report(exp, objs, value, sigma, num_keys=len(keys), exhaustive=keys.exhaustive)
    if exp == "encryption":
        keys = _keys(resolved, scheme, rng)
        res = games.encryption_game(scheme, state, objs.state_alt, keys, opts["batches"])
        return _report(exp, objs, res.distance, res.sigma, num_keys=len(keys), exhaustive=keys.exhaustive,
                       extra={"side_distance": res.side_distance})
    if exp == "keyleak":
        inner = select_keys(scheme.inner, policy="exhaustive")
        outer = [scheme.outer.sample_key(rng) for _ in range(opts["outer_samples"])]
        per_h = keyleak_sq_distance_fast(scheme, attack, state, inner, outer)
        sigma = per_h.std(ddof=1) / math.sqrt(len(per_h)) if len(per_h) > 1 else 0.0
        nm, nt = scheme.inner.num_messages, scheme.inner.num_tags
        return _report(exp, objs, per_h.mean(), sigma, num_keys=len(inner) * len(outer), exhaustive=False,
                       extra={"quantity": "mean_squared_distance", "calibration": nm ** 1.5 / nt})
    if exp == "lifting":
        rep = lifting_hybrid_check(scheme, attack, state)
        return _report(exp, objs, rep.lifted_epsilon, bound=rep.entangled_epsilon, extra={
            "real_vs_teleport": rep.real_vs_teleport,
            "teleport_vs_deferred_correction": rep.teleport_vs_deferred_correction,
            "deferred_correction_vs_deferred_measurement": rep.deferred_correction_vs_deferred_measurement,
            "pauli_merge_error": rep.pauli_merge_error,
        })
    if exp == "counterexample":
        res = games.counterexample_keyed_vs_averaged(scheme, state)
        return _report(exp, objs, res.averaged_epsilon, bound=res.keyed_lower_bound,
                       extra={"keyed_epsilon": res.keyed_epsilon})
    if exp == "qkd":
        sub_seed = int(rng.integers(2**63))
        summary = qkd_batch(scheme, opts["pairs"], opts["runs"], sub_seed, opts["eavesdropper"], opts["target"])
        return _report(exp, objs, float(np.mean([r.eve_correlation for r in summary.runs])),
                       acceptance=summary.mean_accept_probability_target, extra={
                           "quantity": "eavesdropper_correlation_proxy",
                           "agreement": summary.agreement,
                           "honest_agreement": summary.honest_agreement,
                           "target_excluded_fraction": summary.target_excluded_fraction,
                       })
    if exp == "concentration":
        res = haar_concentration(attack, scheme.auth_space, state, scheme.message_space.labels[0], scheme.tag_qubits,
                                 opts["samples"], rng, opts["delta"])
        return _report(exp, objs, res.mean, res.sigma, bound=res.mean_bound,
                       extra={"tail_fraction": res.tail_fraction, "threshold": res.threshold, "delta": res.delta})
    raise AssertionError(exp)


def _finite(value) -> bool:
    if isinstance(value, float):
        return math.isfinite(value)
    if isinstance(value, dict):
        return all(_finite(v) for v in value.values())
    if isinstance(value, (list, tuple)):
        return all(_finite(v) for v in value)
    return True


def run_point(task: tuple[int, dict, dict]) -> tuple[str, Any]:
    """Run one grid point; returns ``("ok", record)`` or ``(kind, message)``."""
    index, resolved, params = task
    seed = point_seed(resolved["seed"], index)
    try:
        objs = validate_point(resolved)
    except Exception as exc:  # noqa: BLE001 - any construction failure is a validation error
        return "validation", f"{type(exc).__name__}: {exc}"
    try:
        with np.errstate(invalid="raise", divide="raise", over="raise"):
            report = _run_experiment(resolved, objs, np.random.default_rng(seed))
    except Exception as exc:  # noqa: BLE001
        return "runtime", f"{type(exc).__name__}: {exc}"
    report.seed = seed
    record = {"point": index, "params": params, "config": resolved, "report": report.to_dict()}
    if not _finite(record["report"]):
        return "runtime", "non-finite value in report"
    return "ok", record


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def render_outputs(records: list[dict], param_names: list[str]) -> tuple[str, str]:
    jsonl = "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in records)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(CSV_FIXED) + param_names + list(CSV_TAIL))
    for r in records:
        rep = r["report"]
        attack = rep["attack"]["name"] if rep["attack"] else ""
        row = [rep["experiment"], rep["scheme"]["name"], attack]
        row += [_fmt(r["params"][p]) for p in param_names]
        row += [_fmt(rep[c]) for c in CSV_TAIL]
        writer.writerow(row)
    return jsonl, buf.getvalue()


def summary_line(record: dict) -> str:
    rep = record["report"]
    params = " ".join(f"{k}={_fmt(v)}" for k, v in record["params"].items())
    parts = [f"point {record['point']}", rep["experiment"], rep["scheme"]["name"]]
    if rep["attack"]:
        parts.append(rep["attack"]["name"])
    if params:
        parts.append(params)
    parts.append(f"epsilon={rep['epsilon']:.6g}")
    if rep["sigma"]:
        parts.append(f"sigma={rep['sigma']:.3g}")
    if rep["acceptance"] is not None:
        parts.append(f"acceptance={rep['acceptance']:.6g}")
    if rep["bound"] is not None:
        parts.append(f"bound={rep['bound']:.6g}")
    return " ".join(parts)


def run_config(
    text: str,
    out_dir: str | None = None,
    seed: int | None = None,
    jobs: int = 1,
    echo: Callable[[str], None] = print,
) -> int:
    """Parse, validate and run a configuration; returns the exit code."""
    try:
        cfg = parse_config(text)
        if seed is not None:
            if not 0 <= seed < 2**64:
                raise ConfigError(EXIT_PARSE, "--seed must be in [0, 2^64)")
            cfg["seed"] = seed
        points = expand_grid(cfg)
        for index, (resolved, _) in enumerate(points):
            try:
                _check_structure(text, resolved)
            except ConfigError as exc:
                exc.point = index
                raise
    except ConfigError as exc:
        echo(f"error: {exc}")
        return exc.code
    for index, (resolved, params) in enumerate(points):
        try:
            validate_point(resolved)
        except Exception as exc:  # noqa: BLE001
            echo(f"error: grid point {index} {_fmt(params)}: {type(exc).__name__}: {exc}")
            return EXIT_VALIDATION
    tasks = [(i, resolved, params) for i, (resolved, params) in enumerate(points)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_point, tasks))
    else:
        results = [run_point(t) for t in tasks]
    records = []
    for (i, _, params), (status, payload) in zip(tasks, results):
        if status != "ok":
            code = EXIT_VALIDATION if status == "validation" else EXIT_RUNTIME
            echo(f"error: grid point {i} {_fmt(params)}: {payload}")
            return code
        records.append(payload)
        echo(summary_line(payload))
    out_dir = out_dir or cfg.get("output") or "results"
    os.makedirs(out_dir, exist_ok=True)
    jsonl, csv_text = render_outputs(records, list(cfg.get("grid", {})))
    with open(os.path.join(out_dir, "reports.jsonl"), "w", encoding="utf-8", newline="") as fh:
        fh.write(jsonl)
    with open(os.path.join(out_dir, "reports.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text)
    return EXIT_OK
