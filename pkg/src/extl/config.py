"""Run configuration: JSON schema, validation, and law construction.

One JSON document configures a run; unknown keys are rejected and every
value is type- and range-checked with a dotted-path error message.  Light
ad-hoc variation goes through ``--set`` dotted-path overrides.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable

from .mc import SimConfig
from .profiles import (
    ConstantRate,
    Dirac,
    DurationLaw,
    Exponential,
    ExposedConstantRate,
    InfectivityLaw,
    TriangularRamp,
    Uniform,
)
from .quadrature import QuadratureSpec

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Configuration file is unreadable or violates the schema."""


@dataclass(frozen=True)
class _Field:
    kind: type | tuple[type, ...]
    default: Any = None
    required: bool = False
    check: Callable[[Any], bool] | None = None
    hint: str = ""


def _positive(x) -> bool:
    return x > 0


def _nonneg(x) -> bool:
    return x >= 0


_NUM = (int, float)

_DURATION_PARAMS = {
    "dirac": {"value": _Field(_NUM, required=True, check=_nonneg, hint=">= 0")},
    "exponential": {"rate": _Field(_NUM, required=True, check=_positive, hint="> 0")},
    "uniform": {
        "lo": _Field(_NUM, required=True, check=_nonneg, hint=">= 0"),
        "hi": _Field(_NUM, required=True, check=_positive, hint="> 0"),
    },
}

_SCHEMA: dict[str, dict[str, _Field]] = {
    "model": {
        "family": _Field(
            str,
            required=True,
            check=lambda s: s in ("constant_rate", "exposed_constant_rate", "triangular_ramp"),
            hint="one of constant_rate | exposed_constant_rate | triangular_ramp",
        ),
        "lambda": _Field(_NUM, check=_nonneg, hint=">= 0"),
        "peak_a": _Field(_NUM, check=_nonneg, hint=">= 0"),
        "ramp": _Field(_NUM, default=1.5, check=_positive, hint="> 0"),
        "s_bar": _Field(_NUM, default=1.0, check=lambda x: 0 < x <= 1, hint="in (0, 1]"),
        "tau": _Field(dict),
        "eta": _Field(dict),
        "xi": _Field(dict),
    },
    "solver": {
        "n": _Field(int, default=32, check=_positive, hint=">= 1"),
        "horizon": _Field(_NUM, default=400.0, check=_positive, hint="> 0"),
        "lambda_cutoff": _Field(_NUM, default=300.0, check=_positive, hint="> 0"),
        "interp": _Field(
            str, default="linear", check=lambda s: s in ("step", "linear"),
            hint="step | linear",
        ),
        "quad": _Field(dict, default=None),
    },
    "ancestors": {
        "M": _Field(int, default=1, check=_positive, hint=">= 1"),
        "tilted": _Field(bool, default=False),
    },
    "sim": {
        "replicates": _Field(int, default=10_000, check=_positive, hint=">= 1"),
        "seed": _Field(int, default=20200626),
        "max_population": _Field(int, default=1_000_000, check=_positive, hint=">= 1"),
        "max_time": _Field(_NUM, default=10_000.0, check=_positive, hint="> 0"),
        "grid_points": _Field(int, default=200, check=_positive, hint=">= 1"),
    },
    "lln": {
        "i0": _Field(_NUM, default=0.01, check=lambda x: 0 <= x <= 1, hint="in [0, 1]"),
        "r0": _Field(_NUM, default=0.0, check=lambda x: 0 <= x <= 1, hint="in [0, 1]"),
        "step_h": _Field(_NUM, default=0.01, check=_positive, hint="> 0"),
        "horizon": _Field(_NUM, default=100.0, check=_positive, hint="> 0"),
        "tilted_initial": _Field(bool, default=True),
    },
}

_QUAD_SCHEMA = {
    "m_tau": _Field(int, default=8, check=_positive, hint=">= 1"),
    "m_eta": _Field(int, default=16, check=_positive, hint=">= 1"),
    "m_u": _Field(int, default=16, check=_positive, hint=">= 1"),
    "rule": _Field(
        str, default="gauss", check=lambda s: s in ("gauss", "midpoint"),
        hint="gauss | midpoint",
    ),
}


def _typename(kind) -> str:
    if kind == _NUM:
        return "number"
    return {int: "integer", str: "string", bool: "boolean", dict: "object"}.get(kind, str(kind))


def _validate_section(obj: dict, schema: dict[str, _Field], path: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = set(obj) - set(schema)
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}")
    out = {}
    for key, fld in schema.items():
        where = f"{path}.{key}" if path else key
        if key not in obj:
            if fld.required:
                raise ConfigError(f"{where}: required")
            out[key] = fld.default
            continue
        val = obj[key]
        if fld.kind is int and isinstance(val, bool):
            raise ConfigError(f"{where}: expected integer, got boolean")
        if fld.kind == _NUM and isinstance(val, bool):
            raise ConfigError(f"{where}: expected number, got boolean")
        if not isinstance(val, fld.kind):
            raise ConfigError(f"{where}: expected {_typename(fld.kind)}")
        if fld.check is not None and not fld.check(val):
            raise ConfigError(f"{where}: must be {fld.hint}, got {val!r}")
        out[key] = val
    return out


def _build_duration(obj: Any, path: str) -> DurationLaw:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object with a 'kind' key")
    kind = obj.get("kind")
    if kind not in _DURATION_PARAMS:
        raise ConfigError(f"{path}.kind: one of dirac | exponential | uniform")
    params = _validate_section(
        {k: v for k, v in obj.items() if k != "kind"}, _DURATION_PARAMS[kind], path
    )
    try:
        if kind == "dirac":
            return Dirac(float(params["value"]))
        if kind == "exponential":
            return Exponential(float(params["rate"]))
        return Uniform(float(params["lo"]), float(params["hi"]))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _build_law(model: dict) -> InfectivityLaw:
    family = model["family"]
    s_bar = float(model["s_bar"])

    def need(key: str) -> Any:
        if model.get(key) is None:
            raise ConfigError(f"model.{key}: required for family {family!r}")
        return model[key]

    try:
        if family == "constant_rate":
            return ConstantRate(
                lam=float(need("lambda")),
                eta=_build_duration(need("eta"), "model.eta"),
                susceptible_fraction=s_bar,
            )
        if family == "exposed_constant_rate":
            return ExposedConstantRate(
                lam=float(need("lambda")),
                xi=_build_duration(need("xi"), "model.xi"),
                eta=_build_duration(need("eta"), "model.eta"),
                susceptible_fraction=s_bar,
            )
        return TriangularRamp(
            peak_a=float(need("peak_a")),
            tau=_build_duration(need("tau"), "model.tau"),
            eta=_build_duration(need("eta"), "model.eta"),
            ramp=float(model["ramp"]),
            susceptible_fraction=s_bar,
        )
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration."""

    law: InfectivityLaw
    quad: QuadratureSpec
    n: int
    horizon: float
    lambda_cutoff: float
    interp: str
    ancestors: int
    tilted: bool
    replicates: int
    sim: SimConfig
    sim_grid_points: int
    lln_i0: float
    lln_r0: float
    lln_step_h: float
    lln_horizon: float
    lln_tilted_initial: bool


def parse_config(doc: Any) -> RunConfig:
    """Validate a decoded JSON document and build the typed configuration."""
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected an object")
    unknown = set(doc) - set(_SCHEMA)
    if unknown:
        raise ConfigError(f"top level: unknown section(s) {sorted(unknown)}")
    if "model" not in doc:
        raise ConfigError("model: required")
    sections = {
        name: _validate_section(doc.get(name, {}), schema, name)
        for name, schema in _SCHEMA.items()
    }
    solver = sections["solver"]
    quad_doc = solver["quad"] if solver["quad"] is not None else {}
    quad = _validate_section(quad_doc, _QUAD_SCHEMA, "solver.quad")
    anc, sim, lln = sections["ancestors"], sections["sim"], sections["lln"]
    if solver["lambda_cutoff"] > solver["horizon"]:
        raise ConfigError("solver.lambda_cutoff: must not exceed solver.horizon")
    return RunConfig(
        law=_build_law(sections["model"]),
        quad=QuadratureSpec(**quad),
        n=solver["n"],
        horizon=float(solver["horizon"]),
        lambda_cutoff=float(solver["lambda_cutoff"]),
        interp=solver["interp"],
        ancestors=anc["M"],
        tilted=anc["tilted"],
        replicates=sim["replicates"],
        sim=SimConfig(
            seed=sim["seed"],
            max_population=sim["max_population"],
            max_time=float(sim["max_time"]),
        ),
        sim_grid_points=sim["grid_points"],
        lln_i0=float(lln["i0"]),
        lln_r0=float(lln["r0"]),
        lln_step_h=float(lln["step_h"]),
        lln_horizon=float(lln["horizon"]),
        lln_tilted_initial=lln["tilted_initial"],
    )


def _apply_override(doc: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ConfigError(f"--set needs key=value, got {assignment!r}")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = doc
    parts = key.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set {key}: {part} is not an object")
    node[parts[-1]] = value


def load_config(path: str, overrides: list[str] | None = None) -> RunConfig:
    """Read, override, and validate a configuration file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    for assignment in overrides or []:
        _apply_override(doc, assignment)
    return parse_config(doc)
