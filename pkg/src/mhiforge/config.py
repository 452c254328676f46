"""Shared defaults, optionally overridden by a UTF-8 ``key=value`` file."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from .errors import FileNotFound, InvalidWeights, MhiError


class ConfigError(MhiError, ValueError):
    pass


@dataclass(frozen=True)
class Config:
    target_frames: int = 32
    max_skip: int = 10
    shift_limit: int = 16
    resize: int = 224
    w1: float = 0.6
    w2: float = 0.4
    seed: int = 42
    jobs: int = 1

    def __post_init__(self):
        for name in ("target_frames", "resize", "jobs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("max_skip", "shift_limit"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.w1 < 0 or self.w2 < 0 or self.w1 + self.w2 <= 0:
            raise InvalidWeights(f"fusion weights ({self.w1}, {self.w2}) are invalid")

    def override(self, **values) -> "Config":
        """Copy with every non-None value applied."""
        return replace(self, **{k: v for k, v in values.items() if v is not None})


def parse_config(text: str, base: Config = Config()) -> Config:
    types = {f.name: f.type for f in fields(Config)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        key = key.replace("-", "_")
        if not sep or key not in types:
            raise ConfigError(f"line {lineno}: expected one of {sorted(types)} as key=value, got {raw!r}")
        cast = float if types[key] in (float, "float") else int
        try:
            values[key] = cast(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value {value!r} for {key}") from None
    return base.override(**values)


def load_config(path: str | os.PathLike | None) -> Config:
    if path is None:
        return Config()
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except FileNotFoundError:
        raise FileNotFound(f"{path}: no such file") from None


def env_jobs() -> int | None:
    raw = os.environ.get("MHIFORGE_JOBS")
    if raw is None or not raw.strip():
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"MHIFORGE_JOBS={raw!r} is not an integer") from None
