"""YAML experiment configs: parsing with line-aware errors, validation, canonical dump."""
from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Any

import yaml

from .dynamics import ModelParams, StepperConfig
from .errors import InvalidParameter, ParseError, ValidationError
from .experiments import CurveSpec, DataSpec, ExperimentConfig, Thresholds, _SCENARIO_SYSTEM

_SECTIONS = {"model": ModelParams, "stepper": StepperConfig, "data": DataSpec,
             "curve": CurveSpec, "thresholds": Thresholds}
_TOP = {"scenario", "model", "grid", "stepper", "data", "epsilon", "interval", "curve", "seed",
        "t0", "weight_lambda", "samples", "thresholds"}
_GRID = {"half_length", "num_points"}


def _lines(node, prefix: str = "", out: dict | None = None) -> dict:
    """Map dotted key paths to 1-based source lines."""
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = f"{prefix}{k.value}"
            out[key] = k.start_mark.line + 1
            _lines(v, key + ".", out)
    return out


def _coerce(value: Any, kind: type, field: str):
    if kind is bool:
        if isinstance(value, bool):
            return value
        raise ValidationError(field, "expected true or false")
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise ValidationError(field, "expected an integer")
        try:
            f = float(value)
        except ValueError:
            raise ValidationError(field, "expected an integer") from None
        if f != int(f):
            raise ValidationError(field, "expected an integer")
        return int(f)
    if kind is float:
        if isinstance(value, bool):
            raise ValidationError(field, "expected a number")
        try:
            # YAML 1.1 reads 1e-3 as a string, so accept numeric strings
            return float(value)
        except (TypeError, ValueError):
            raise ValidationError(field, "expected a number") from None
    if kind is str:
        if not isinstance(value, str):
            raise ValidationError(field, "expected a string")
        return value
    return value


def _types(cls) -> dict:
    hints = {"float": float, "int": int, "str": str, "bool": bool, "Optional[float]": float}
    return {f.name: hints.get(str(f.type), None) for f in dataclasses.fields(cls)}


def _section(cls, raw: Any, name: str, lines: dict):
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ValidationError(name, "expected a mapping")
    types = _types(cls)
    kwargs = {}
    for key, value in raw.items():
        if key not in types:
            line = lines.get(f"{name}.{key}", 0)
            raise ValidationError(f"{name}.{key}", f"unknown key (line {line})")
        kind = types[key]
        kwargs[key] = None if value is None and key == "h1" else _coerce(value, kind, f"{name}.{key}") if kind else value
    return kwargs


def _build(cls, kwargs: dict, name: str):
    try:
        return cls(**kwargs)
    except ValidationError:
        raise
    except InvalidParameter as exc:
        msg = str(exc)
        field = next((k for k in kwargs if msg.startswith(k)), None)
        raise ValidationError(f"{name}.{field}" if field else name, msg) from None


def config_from_mapping(raw: Any, lines: dict | None = None) -> ExperimentConfig:
    lines = lines or {}
    if not isinstance(raw, dict):
        raise ValidationError("<root>", "config must be a mapping")
    for key in raw:
        if key not in _TOP:
            raise ValidationError(str(key), f"unknown key (line {lines.get(str(key), 0)})")
    if "scenario" not in raw:
        raise ValidationError("scenario", "required")
    scenario = _coerce(raw["scenario"], str, "scenario")

    data_kw = _section(DataSpec, raw.get("data"), "data", lines)
    model_kw = _section(ModelParams, raw.get("model"), "model", lines)
    if "system" not in model_kw:
        if scenario in _SCENARIO_SYSTEM:
            model_kw["system"] = _SCENARIO_SYSTEM[scenario]
        elif data_kw.get("kind") == "chen":
            model_kw["system"] = "kgz"
    model = _build(ModelParams, model_kw, "model")
    data = _build(DataSpec, data_kw, "data")

    step_kw = _section(StepperConfig, raw.get("stepper"), "stepper", lines)
    if "dt" in step_kw and not step_kw["dt"] > 0:
        raise ValidationError("dt", "must be positive")
    step_defaults = {"dt": 1e-3, "t_final": 50.0, "record_every": 100}
    stepper = _build(StepperConfig, {**step_defaults, **step_kw}, "stepper")

    grid = raw.get("grid") or {}
    if not isinstance(grid, dict):
        raise ValidationError("grid", "expected a mapping")
    for key in grid:
        if key not in _GRID:
            raise ValidationError(f"grid.{key}", f"unknown key (line {lines.get(f'grid.{key}', 0)})")
    kw: dict = {"scenario": scenario, "model": model, "stepper": stepper, "data": data}
    if "half_length" in grid:
        kw["half_length"] = _coerce(grid["half_length"], float, "grid.half_length")
        if not kw["half_length"] > 0:
            raise ValidationError("grid.half_length", "must be positive")
    if "num_points" in grid:
        n = _coerce(grid["num_points"], int, "grid.num_points")
        if n < 16 or n & (n - 1):
            raise ValidationError("grid.num_points", "must be a power of two >= 16")
        kw["num_points"] = n
    for key, kind in (("epsilon", float), ("seed", int), ("t0", float), ("weight_lambda", float), ("samples", int)):
        if key in raw:
            kw[key] = _coerce(raw[key], kind, key)
    if "interval" in raw:
        iv = raw["interval"]
        if not isinstance(iv, list) or len(iv) != 2:
            raise ValidationError("interval", "expected [a, b]")
        kw["interval"] = (_coerce(iv[0], float, "interval"), _coerce(iv[1], float, "interval"))
    if raw.get("curve") is not None:
        kw["curve"] = _build(CurveSpec, _section(CurveSpec, raw["curve"], "curve", lines), "curve")
    if "thresholds" in raw:
        kw["thresholds"] = _build(Thresholds, _section(Thresholds, raw["thresholds"], "thresholds", lines),
                                  "thresholds")
    if scenario.startswith("farfield") and "t0" not in kw:
        kw["t0"] = 2.0
    try:
        cfg = ExperimentConfig(**kw)
    except InvalidParameter as exc:
        raise ValidationError("config", str(exc)) from None
    if cfg.weight_lambda <= 0:
        raise ValidationError("weight_lambda", "must be positive")
    return cfg


def parse_text(text: str) -> ExperimentConfig:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        raw = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ParseError(mark.line + 1 if mark else 0, str(exc.problem or exc)) from None
    except yaml.YAMLError as exc:
        raise ParseError(0, str(exc)) from None
    return config_from_mapping(raw, _lines(node) if node is not None else {})


def parse_config(path) -> ExperimentConfig:
    return parse_text(Path(path).read_text(encoding="utf-8"))


def config_to_mapping(cfg: ExperimentConfig) -> dict:
    """Plain nested dict with every field spelled out; parses back to an equal config."""
    out: dict = {"scenario": cfg.scenario}
    for name in ("model", "stepper", "data"):
        out[name] = dataclasses.asdict(getattr(cfg, name))
    out["grid"] = {"half_length": cfg.half_length, "num_points": cfg.num_points}
    out.update({"epsilon": cfg.epsilon, "interval": list(cfg.interval), "seed": cfg.seed, "t0": cfg.t0,
                "weight_lambda": cfg.weight_lambda, "samples": cfg.samples})
    if cfg.curve is not None:
        out["curve"] = dataclasses.asdict(cfg.curve)
    out["thresholds"] = dataclasses.asdict(cfg.thresholds)
    return out


def dump_config(cfg: ExperimentConfig) -> str:
    """Canonical YAML text (sorted keys, round-trip floats)."""
    return yaml.safe_dump(config_to_mapping(cfg), sort_keys=True, default_flow_style=False)

