"""Run configuration: flat ``key = value`` files plus environment overrides.

Resolution order (later wins): noise preset, config file, ``GHZSIM_<KEY>``
environment variables, command-line flags. Example file::

    # GHZ-4 with the calibrated noise model
    ghz_n = 4
    noise = calibrated
    shots = 500
    seed = 7
    sigma_collective = 0.03

Recognized keys are the :class:`RunConfig` fields below plus every
:class:`~ghzsim.noise.NoiseSpec` field.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .exceptions import GhzSimError, ValidationError
from .noise import NoiseSpec

__all__ = ["ConfigError", "RunConfig", "NOISE_PRESETS", "ENV_PREFIX", "parse_config_text", "resolve_config", "format_noise_config"]

ENV_PREFIX = "GHZSIM_"


class ConfigError(GhzSimError):
    """Unreadable or inconsistent run configuration."""


def _presets() -> dict[str, NoiseSpec]:
    from .experiments import CALIBRATED_NOISE

    return {
        "ideal": NoiseSpec.ideal(),
        "benchmarked": NoiseSpec.benchmarked(),
        "calibrated": CALIBRATED_NOISE,
    }


NOISE_PRESETS = ("ideal", "benchmarked", "calibrated")
_NOISE_FIELDS = {f.name for f in dataclasses.fields(NoiseSpec)}


@dataclass(frozen=True)
class RunConfig:
    ghz_n: int | None = None
    circuit: Path | None = None
    include_dd: bool = True
    noise_preset: str = "calibrated"
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    shots: int = 200
    seed: int = 0
    phase_points: int | None = None
    spam_correct: bool = True
    out: Path = Path("results")
    table: Path | None = None

    def validate(self, need_target: bool = True) -> "RunConfig":
        if need_target and (self.ghz_n is None) == (self.circuit is None):
            raise ConfigError("exactly one of ghz_n / circuit must be set")
        if self.ghz_n is not None and not 2 <= self.ghz_n <= 10:
            raise ConfigError(f"ghz_n must be in 2..10, got {self.ghz_n}")
        if self.shots < 0:
            raise ConfigError("shots must be >= 0 (0 = exact)")
        if self.phase_points is not None and self.phase_points < 3:
            raise ConfigError("phase_points must be >= 3")
        return self

    def as_dict(self) -> dict:
        return {
            "ghz_n": self.ghz_n,
            "circuit": str(self.circuit) if self.circuit else None,
            "include_dd": self.include_dd,
            "noise_preset": self.noise_preset,
            "noise": self.noise.as_dict(),
            "shots": self.shots,
            "seed": self.seed,
            "phase_points": self.phase_points,
            "spam_correct": self.spam_correct,
        }

    def digest(self) -> str:
        """SHA-256 of the physics-relevant settings (output location excluded)."""
        payload = json.dumps(self.as_dict(), sort_keys=True, default=repr)
        return hashlib.sha256(payload.encode()).hexdigest()


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int_or_none(text: str) -> int | None:
    t = text.strip().lower()
    return None if t in ("", "none", "auto") else int(t)


def _parse_path_or_none(text: str) -> Path | None:
    t = text.strip()
    return None if t.lower() in ("", "none") else Path(t)


_RUN_PARSERS = {
    "ghz_n": _parse_int_or_none,
    "circuit": _parse_path_or_none,
    "include_dd": _parse_bool,
    "noise": str,
    "shots": int,
    "seed": int,
    "phase_points": _parse_int_or_none,
    "spam_correct": _parse_bool,
    "out": Path,
    "table": _parse_path_or_none,
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        if key not in _RUN_PARSERS and key not in _NOISE_FIELDS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _env_values(env: Mapping[str, str]) -> dict[str, str]:
    out = {}
    for name, value in env.items():
        if name.startswith(ENV_PREFIX):
            key = name[len(ENV_PREFIX):].lower()
            if key in _RUN_PARSERS or key in _NOISE_FIELDS:
                out[key] = value
    return out


def resolve_config(
    path: str | Path | None = None,
    overrides: Mapping[str, object] | None = None,
    env: Mapping[str, str] | None = None,
) -> RunConfig:
    """Merge preset, file, environment and explicit overrides into a RunConfig.

    ``overrides`` holds already-typed values (from the command line); ``None``
    entries are ignored.
    """
    raw: dict[str, str] = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        raw.update(parse_config_text(text, str(path)))
    raw.update(_env_values(os.environ if env is None else env))

    typed: dict[str, object] = {}
    try:
        for key, value in raw.items():
            if key in _RUN_PARSERS:
                typed[key] = _RUN_PARSERS[key](value)
            else:
                typed[key] = float(value)
    except ValueError as exc:
        raise ConfigError(f"bad value: {exc}") from None
    for key, value in (overrides or {}).items():
        if value is not None:
            typed[key] = value
    # an explicit target on one layer replaces the other kind of target
    if overrides:
        if overrides.get("ghz_n") is not None:
            typed["circuit"] = None
        elif overrides.get("circuit") is not None:
            typed["ghz_n"] = None

    preset = str(typed.pop("noise", "calibrated")).lower()
    presets = _presets()
    if preset not in presets:
        raise ConfigError(f"unknown noise preset {preset!r} (choose from {', '.join(NOISE_PRESETS)})")
    noise_fields = {k: typed.pop(k) for k in list(typed) if k in _NOISE_FIELDS}
    try:
        noise = presets[preset].replace(**noise_fields)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None
    if not math.isfinite(noise.p1 + noise.p2):
        raise ConfigError("noise probabilities must be finite")
    return RunConfig(noise_preset=preset, noise=noise, **typed)


def format_noise_config(noise: NoiseSpec, header: str = "") -> str:
    """``key = value`` text for a NoiseSpec, loadable via ``--config``."""
    lines = [f"# {line}" for line in header.splitlines()] if header else []
    lines.append("noise = ideal")
    for key, value in noise.as_dict().items():
        lines.append(f"{key} = {value!r}")
    return "\n".join(lines) + "\n"
