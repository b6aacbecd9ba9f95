"""Run configuration: flat ``key=value`` files with documented defaults.

A configuration file holds one ``key=value`` pair per line; blank lines
and ``#`` comments are ignored.  Every key has a default (below); unknown
keys are rejected.  Command-line flags override file values, which
override the defaults.

Keys and defaults:

    lambda_b=1.0              BS intensity (points/m^2)
    lambda_u=10.0             UE intensity (points/m^2)
    e=4.0                     path-loss exponent (> 2; closed forms need 4)
    rate=1e4                  target rate R (bits/s)
    gamma=1.0                 SINR service threshold, linear
    gamma_db=                 threshold in dB; when set, overrides `gamma`
    gamma_tx=inf              Tx-SNR; `inf` = interference-limited
    window_radius_factor=8.0  sampling-window radius in units of 1/sqrt(lambda_b)
    n_rep=20000               Monte Carlo replications
    seed=1                    master seed
    mode=closed               evaluator: closed | approx | mc
    identity=all              verify-identity selection
    figure=1                  figure number (1 | 2)
    rates=1e3,1e4,1e5         figure rate sweep (bits/s, comma-separated)
    ratio=10.0                figure lambda_u / lambda_b
    gamma_grid_db=-20:1:30    figure dB grid, start:step:stop or comma list
    with_mc=false             figure: add Monte Carlo columns
    intensity=1.0             sample-ppp intensity
    window_radius=5.0         sample-ppp disk radius (m)
    out=                      output path; empty = stdout
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .netsim import NetworkScenario

__all__ = [
    "ConfigError",
    "DEFAULTS",
    "RunConfig",
    "parse_config_file",
    "parse_float",
    "parse_int",
    "parse_bool",
    "parse_float_list",
    "parse_db_grid",
    "db_to_linear",
    "scenario_from_values",
    "make_run_config",
]


class ConfigError(ValueError):
    """Bad configuration key or value."""


DEFAULTS: dict[str, str] = {
    "lambda_b": "1.0",
    "lambda_u": "10.0",
    "e": "4.0",
    "rate": "1e4",
    "gamma": "1.0",
    "gamma_db": "",
    "gamma_tx": "inf",
    "window_radius_factor": "8.0",
    "n_rep": "20000",
    "seed": "1",
    "mode": "closed",
    "identity": "all",
    "figure": "1",
    "rates": "1e3,1e4,1e5",
    "ratio": "10.0",
    "gamma_grid_db": "-20:1:30",
    "with_mc": "false",
    "intensity": "1.0",
    "window_radius": "5.0",
    "out": "",
}


def parse_config_file(path: str) -> dict[str, str]:
    """Read a key=value file; keys must be known, later lines win."""
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in DEFAULTS:
                raise ConfigError(f"{path}:{lineno}: unknown configuration key {key!r}")
            values[key] = value.strip()
    return values


def parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from None


def parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from None


def parse_bool(key: str, raw) -> bool:
    if isinstance(raw, bool):
        return raw
    low = str(raw).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"invalid value for {key}: {raw!r} (expected true/false)")


def parse_float_list(key: str, raw: str) -> tuple[float, ...]:
    items = [s for s in (part.strip() for part in raw.split(",")) if s]
    if not items:
        raise ConfigError(f"{key} must list at least one value")
    return tuple(parse_float(key, s) for s in items)


def parse_db_grid(key: str, raw: str) -> tuple[float, ...]:
    """A dB grid, either `start:step:stop` (inclusive) or a comma list."""
    raw = raw.strip()
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key} range must be start:step:stop, got {raw!r}")
        start, step, stop = (parse_float(key, p) for p in parts)
        if step <= 0:
            raise ConfigError(f"{key} step must be positive, got {step}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        if n < 1:
            raise ConfigError(f"{key} range {raw!r} is empty")
        return tuple(start + k * step for k in range(n))
    return parse_float_list(key, raw)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _resolve_gamma(values: Mapping[str, str]) -> float:
    raw_db = str(values.get("gamma_db", "")).strip()
    if raw_db:
        return db_to_linear(parse_float("gamma_db", raw_db))
    return parse_float("gamma", str(values["gamma"]))


def scenario_from_values(values: Mapping[str, str]) -> NetworkScenario:
    """Build the scenario described by resolved configuration values."""
    try:
        return NetworkScenario(
            lambda_b=parse_float("lambda_b", str(values["lambda_b"])),
            lambda_u=parse_float("lambda_u", str(values["lambda_u"])),
            e=parse_float("e", str(values["e"])),
            R=parse_float("rate", str(values["rate"])),
            gamma=_resolve_gamma(values),
            gamma_tx=parse_float("gamma_tx", str(values["gamma_tx"])),
            window_radius_factor=parse_float(
                "window_radius_factor", str(values["window_radius_factor"])),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


@dataclass(frozen=True)
class RunConfig:
    """Everything one command execution needs."""

    scenario: NetworkScenario
    n_rep: int
    seed: int
    gamma_grid: tuple[float, ...]
    r_list: tuple[float, ...]
    output_path: str

    def __post_init__(self):
        if self.n_rep < 1:
            raise ConfigError(f"n_rep must be >= 1, got {self.n_rep}")


def make_run_config(values: Mapping[str, str]) -> RunConfig:
    """Assemble a RunConfig from resolved (defaults + file + flags) values."""
    grid_db = parse_db_grid("gamma_grid_db", str(values["gamma_grid_db"]))
    return RunConfig(
        scenario=scenario_from_values(values),
        n_rep=parse_int("n_rep", str(values["n_rep"])),
        seed=parse_int("seed", str(values["seed"])),
        gamma_grid=tuple(db_to_linear(db) for db in grid_db),
        r_list=parse_float_list("rates", str(values["rates"])),
        output_path=str(values.get("out", "")),
    )
