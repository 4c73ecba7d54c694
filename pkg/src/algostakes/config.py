"""JSON scenario configuration files."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .designer import archetype
from .distributions import distribution_from_config
from .exceptions import ConfigError, InvalidInputError
from .model import DesignerPayoffs, Scenario, check_phi

SCHEMA_VERSION = 1
_PAYOFF_KEYS = ("a1", "a0", "b1", "b0")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated contents of a scenario file.

    ``designer`` is either explicit cell payoffs ``{a1, a0, b1, b0}`` or
    ``{"archetype": name}`` with ``w`` for the moral-hazard archetype.
    ``options`` holds mode settings such as a default ``reward``.
    """

    distribution: dict[str, Any]
    phi: float
    t: float
    designer: dict[str, Any]
    options: dict[str, Any] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        # builds every object once so invalid files fail before any solving
        self.to_scenario()

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "ScenarioConfig":
        if not isinstance(raw, dict):
            raise ConfigError("scenario config must be a JSON object")
        version = raw.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
        missing = [k for k in ("distribution", "phi", "t", "designer") if k not in raw]
        if missing:
            raise ConfigError(f"config is missing required field(s): {', '.join(missing)}")
        known = {"schema_version", "distribution", "phi", "t", "designer", "options"}
        extra = sorted(set(raw) - known)
        if extra:
            raise ConfigError(f"unknown config field(s): {', '.join(extra)}")
        try:
            return cls(
                distribution=dict(raw["distribution"]),
                phi=_number("phi", raw["phi"]),
                t=_number("t", raw["t"]),
                designer=dict(raw["designer"]),
                options=dict(raw.get("options", {})),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "schema_version": self.schema_version,
            "distribution": dict(self.distribution),
            "phi": self.phi,
            "t": self.t,
            "designer": dict(self.designer),
        }
        if self.options:
            out["options"] = dict(self.options)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def designer_payoffs(self) -> DesignerPayoffs:
        d = self.designer
        try:
            if "archetype" in d:
                return archetype(str(d["archetype"]), d.get("w"))
            return DesignerPayoffs(*(_number(k, d[k]) for k in _PAYOFF_KEYS))
        except KeyError as exc:
            raise ConfigError(
                f"designer needs 'archetype' or all of {', '.join(_PAYOFF_KEYS)}; missing {exc}"
            ) from exc
        except InvalidInputError as exc:
            raise ConfigError(str(exc)) from exc

    def to_scenario(self) -> Scenario:
        dist = distribution_from_config(self.distribution)
        try:
            check_phi(self.phi)
            return Scenario(dist, self.t, self.phi, self.designer_payoffs())
        except InvalidInputError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc


def _number(name: str, v: Any) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(f"{name} must be finite, got {v!r}")
    return v
