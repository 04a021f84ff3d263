"""Engine configuration: defaults < config file < command-line flags.

The config file is flat ``key = value`` text ('#' starts a comment) with
the same keys as the CLI flags. A file can be named with --config or the
NHFAIR_CONFIG environment variable. Everything is validated up front so
a bad configuration aborts before any computation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .metrics import EQODD_VARIANTS
from .stats import METRIC_NAMES

ENV_CONFIG = "NHFAIR_CONFIG"
FORMATS = ("csv", "json", "md")
UNITS = ("fraction", "percent")

_FLOAT_KEYS = ("tolerance", "alpha")
_INT_KEYS = ("jobs",)
_BOOL_KEYS = ("tie_corrected",)
_STR_KEYS = ("eqodd", "units", "format", "metric", "out", "svg", "baseline")
_ALL_KEYS = _FLOAT_KEYS + _INT_KEYS + _BOOL_KEYS + _STR_KEYS


@dataclass
class EngineConfig:
    tolerance: float = 0.0
    eqodd: str = "diagonal"
    alpha: float = 0.05
    units: str = "percent"
    format: str = "csv"
    metric: str | None = None
    out: str | None = None
    svg: str | None = None
    baseline: str | None = None
    jobs: int = 1
    tie_corrected: bool = False
    inputs: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if self.tolerance < 0:
            raise ConfigError(f"tolerance must be >= 0, got {self.tolerance}")
        if self.eqodd not in EQODD_VARIANTS:
            raise ConfigError(f"eqodd must be one of {EQODD_VARIANTS}, got {self.eqodd!r}")
        if self.alpha not in (0.05, 0.10):
            raise ConfigError(f"alpha must be 0.05 or 0.10, got {self.alpha}")
        if self.units not in UNITS:
            raise ConfigError(f"units must be one of {UNITS}, got {self.units!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.metric is not None and self.metric not in METRIC_NAMES:
            raise ConfigError(f"metric must be one of {METRIC_NAMES}, got {self.metric!r}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")


def _parse_config_file(path: Path) -> dict[str, str]:
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {line_no}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"{path}: line {line_no}: unknown key {key!r}")
        values[key] = value
    return values


def build_config(cli_values: dict[str, object], inputs: list[str]) -> EngineConfig:
    """Merge defaults, the config file (flag or env), and CLI overrides."""
    config = EngineConfig(inputs=list(inputs))

    config_path = cli_values.get("config") or os.environ.get(ENV_CONFIG)
    if config_path:
        raw = _parse_config_file(Path(str(config_path)))
        for key, text in raw.items():
            try:
                if key in _FLOAT_KEYS:
                    setattr(config, key, float(text))
                elif key in _INT_KEYS:
                    setattr(config, key, int(text))
                elif key in _BOOL_KEYS:
                    if text.lower() not in ("true", "false", "0", "1"):
                        raise ValueError(text)
                    setattr(config, key, text.lower() in ("true", "1"))
                else:
                    setattr(config, key, text)
            except ValueError:
                raise ConfigError(f"config key {key!r}: bad value {text!r}") from None

    for key in _ALL_KEYS:
        value = cli_values.get(key)
        if value is not None:
            setattr(config, key, value)

    config.validate()
    return config
