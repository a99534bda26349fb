"""Run configuration.

A single frozen dataclass carries every tunable of a run. It can be read
from a TOML or JSON file and then layered with command-line overrides.
"""

from __future__ import annotations

import dataclasses
import json
import tomllib
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

from slowdet.error import SlowdetError


@dataclass(frozen=True)
class RunConfig:
    """Configuration for a slowdet run."""

    precision: int = 128  # Working precision in bits
    seed: int = 0  # Seed for randomized audits
    threads: int = 1  # Worker count for scans and covering
    zeta_bezout_constant: float = 1.0  # Non-explicit constant of the zeta Bezout bound
    gamma_bezout_constant: float = 1.0  # Non-explicit constant of the Gamma Bezout bound
    epsilon_factor: int = 8  # Detection tolerance is 1/(epsilon_factor * T^2)
    sup_safety: float = 2.0  # Multiplier on grid-estimated derivative sups
    compact_grid: int = 9  # Grid points per block in compact mode
    p_max: int = 12  # Highest derivative order checked by certify
    grid_points: int = 20  # Sample points for certify
    max_covering_steps: int = 1_000_000  # Cap on explicit covering iterations
    timings: bool = False  # Record wall-clock timings (breaks byte-identical reports)

    def __post_init__(self) -> None:
        if self.precision < 53:
            msg = f"precision must be at least 53 bits, got {self.precision}"
            raise SlowdetError.invalid_input(msg)
        if self.threads < 1:
            msg = f"threads must be positive, got {self.threads}"
            raise SlowdetError.invalid_input(msg)
        if self.epsilon_factor <= 4:
            msg = "epsilon_factor must exceed 4 so that detection stays unique"
            raise SlowdetError.invalid_input(msg)
        if self.zeta_bezout_constant <= 0 or self.gamma_bezout_constant <= 0:
            msg = "Bezout constants must be positive"
            raise SlowdetError.invalid_input(msg)

    def with_overrides(self, **overrides: Any) -> RunConfig:
        """Return a copy with the non-None overrides applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        """Configuration echo for reports."""
        return dataclasses.asdict(self)


def load_config(path: str | Path) -> RunConfig:
    """Load a RunConfig from a TOML or JSON file.

    Args:
        path: File whose suffix selects the format (.toml or .json)

    Returns:
        The parsed configuration

    Raises:
        SlowdetError: If the file is unreadable, malformed, or has unknown keys
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        msg = f"Cannot read config file {path}: {e}"
        raise SlowdetError.invalid_input(msg) from e

    try:
        if path.suffix == ".toml":
            data = tomllib.loads(text)
        else:
            data = json.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        msg = f"Malformed config file {path}: {e}"
        raise SlowdetError.invalid_input(msg) from e

    if not isinstance(data, dict):
        msg = f"Config file {path} must hold a table of settings"
        raise SlowdetError.invalid_input(msg)

    # Allow the settings to live under a [slowdet] table
    data = data.get("slowdet", data)
    return config_from_dict(data)


def config_from_dict(data: dict[str, Any]) -> RunConfig:
    """Build a RunConfig from a plain mapping, checking keys and types."""
    known = {f.name: f for f in fields(RunConfig)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        msg = f"Unknown config keys: {', '.join(unknown)}"
        raise SlowdetError.invalid_input(msg)

    values: dict[str, Any] = {}
    for key, value in data.items():
        default = getattr(RunConfig(), key)
        if isinstance(default, bool):
            ok = isinstance(value, bool)
        elif isinstance(default, int):
            ok = isinstance(value, int) and not isinstance(value, bool)
        else:
            ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if not ok:
            msg = f"Config key {key!r} expects {type(default).__name__}, got {value!r}"
            raise SlowdetError.invalid_input(msg)
        values[key] = float(value) if isinstance(default, float) else value
    return RunConfig(**values)
