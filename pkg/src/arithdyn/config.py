"""Run configuration: a single YAML document validated against a JSON schema."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema
import yaml

from .fields import parse_rational


class ConfigError(ValueError):
    """Invalid configuration; `pointer` names the offending field."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer}: {message}" if pointer else message)
        self.pointer = pointer


def load_schema(name: str) -> dict:
    text = resources.files("arithdyn").joinpath("schemas", name).read_text()
    return json.loads(text)


@dataclass
class RunConfig:
    mode: str | None = None
    map: str | None = None
    points: list = field(default_factory=list)
    place: str | None = None
    eps: Fraction | None = None
    delta: Fraction | None = None
    level: int | None = None
    tol: float | None = None
    cap: int | None = None
    limit: int | None = None
    quads: list = field(default_factory=list)
    m: list = field(default_factory=list)
    alpha: str | None = None
    out: str | None = None
    csv: str | None = None
    strict: bool = False
    seed: int | None = None
    sweep: dict | None = None

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        validator = jsonschema.Draft202012Validator(load_schema("config.schema.json"))
        errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
        if errors:
            err = errors[0]
            pointer = "/" + "/".join(str(p) for p in err.absolute_path)
            raise ConfigError(err.message, pointer)
        data = dict(data)
        if isinstance(data.get("map"), list):
            data["map"] = ",".join(str(c) for c in data["map"])
        for key in ("eps", "delta"):
            if key in data:
                data[key] = _rational(data[key], f"/{key}")
        for key in ("points", "m"):
            if key in data:
                data[key] = [str(x) for x in data[key]]
        if "alpha" in data:
            data["alpha"] = str(data["alpha"])
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            docs = list(yaml.safe_load_all(Path(path).read_text()))
        except yaml.YAMLError as exc:
            raise ConfigError(f"not valid YAML: {exc}") from exc
        if len(docs) != 1:
            raise ConfigError(f"expected a single document, found {len(docs)}")
        data = docs[0] or {}
        if not isinstance(data, dict):
            raise ConfigError("top level must be a mapping")
        return cls.from_mapping(data)

    def merged(self, **overrides) -> "RunConfig":
        """A copy with every non-empty override applied (command-line flags win)."""
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        for key, val in overrides.items():
            if key not in values:
                raise ConfigError(f"unknown option {key}")
            if val is None or val == () or val == [] or val is False:
                continue
            values[key] = list(val) if isinstance(val, tuple) else val
        return RunConfig(**values)

    def sweep_values(self) -> list:
        if not self.sweep:
            raise ConfigError("sweep section missing", "/sweep")
        vals = [_rational(c, "/sweep/c") for c in self.sweep.get("c", [])]
        grid = self.sweep.get("grid")
        if grid:
            start, stop, step = (_rational(grid[k], f"/sweep/grid/{k}") for k in ("start", "stop", "step"))
            if step <= 0:
                raise ConfigError("step must be positive", "/sweep/grid/step")
            x = start
            while x <= stop:
                vals.append(x)
                x += step
        if not vals:
            raise ConfigError("no parameter values", "/sweep")
        return list(dict.fromkeys(vals))


def _rational(x, pointer: str) -> Fraction:
    try:
        return parse_rational(str(x))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not an exact rational: {x!r}", pointer) from exc
