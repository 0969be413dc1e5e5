"""Scenario configuration: a flat ``key = value`` file merged with
command-line overrides (command line wins)."""

from __future__ import annotations

from dataclasses import dataclass

SCENARIOS = ("subpoisson", "anticorrelation", "hom", "squeezing", "wigner-negativity", "separability-suite")
FORMATS = ("json", "csv")

# state and numerics keys each scenario understands, on top of COMMON_KEYS
SCENARIO_KEYS = {
    "subpoisson": ("m",),
    "anticorrelation": ("T", "phase"),
    "hom": ("phase",),
    "squeezing": ("r", "theta"),
    "wigner-negativity": ("m", "beta", "grid_half_width", "grid_step", "field_out"),
    "separability-suite": ("trials",),
}
COMMON_KEYS = ("dim", "seed", "out", "format")


class ConfigError(ValueError):
    """Invalid or unknown configuration entry."""


def _parse_complex(text):
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"cannot read complex number from {text!r}") from exc


_CASTS = {
    "dim": int,
    "seed": int,
    "trials": int,
    "m": int,
    "out": str,
    "format": str,
    "field_out": str,
    "T": float,
    "phase": float,
    "r": float,
    "theta": float,
    "grid_half_width": float,
    "grid_step": float,
    "beta": _parse_complex,
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    dim: int | None = None
    seed: int = 0
    out: str | None = None
    format: str = "json"
    m: int = 1
    T: float = 0.5
    phase: float = 0.0
    r: float = 0.5
    theta: float = 0.0
    beta: complex = 1 + 0j
    trials: int = 100
    grid_half_width: float = 6.0
    grid_step: float = 0.05
    field_out: str | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}; choose from {', '.join(FORMATS)}")
        if self.dim is not None and self.dim < 2:
            raise ConfigError("dim must be at least 2")
        if self.m < 0:
            raise ConfigError("m must be nonnegative")
        if not 0.0 <= self.T <= 1.0:
            raise ConfigError("T must lie in [0, 1]")
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        if self.grid_half_width <= 0 or self.grid_step <= 0:
            raise ConfigError("grid sizes must be positive")

    def inputs(self):
        """Keys relevant to this scenario, as plain JSON-friendly values."""
        keys = ("scenario",) + COMMON_KEYS[:2] + SCENARIO_KEYS[self.scenario]
        out = {}
        for key in keys:
            if key == "field_out":
                continue
            value = getattr(self, key)
            out[key] = [value.real, value.imag] if isinstance(value, complex) else value
        return out


def allowed_keys(scenario):
    return set(COMMON_KEYS) | set(SCENARIO_KEYS.get(scenario, ()))


def read_config_file(path):
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            entries[key] = value
    return entries


def build_config(scenario, file_entries=None, overrides=None):
    """Merge defaults, file entries and overrides; reject keys the scenario
    does not use."""
    merged = {}
    for source in (file_entries or {}, overrides or {}):
        for key, value in source.items():
            if value is None:
                continue
            if key == "scenario":
                if value != scenario:
                    raise ConfigError(f"config names scenario {value!r} but {scenario!r} was requested")
                continue
            if key not in allowed_keys(scenario):
                raise ConfigError(f"unknown key {key!r} for scenario {scenario!r}")
            try:
                merged[key] = _CASTS[key](value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    return ScenarioConfig(scenario=scenario, **merged)

