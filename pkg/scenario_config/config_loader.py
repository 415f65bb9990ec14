#!/usr/bin/env python3
"""
Scenario Config Loader
Reads scenario files and turns them into validated parameter bundles.

A scenario is a JSON object with flat dotted keys, for example

    {
        "source.mu": 0.1,
        "channel.alpha": 0.1,
        "detector.eta": 0.5,
        "security.m": 1e7
    }

Features:
1. Defaults for every optional key (module-level DEFAULTS)
2. --key=value overrides that win over the file
3. Unknown keys and invariant violations raise ConfigError with the line
   number of the offending key
4. QKDBUDGET_THREADS environment variable for the worker count
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from link_budget.errors import BudgetError, DomainError
from link_budget.parameters import (
    ChannelModel,
    DetectorModel,
    ErrorCorrectionModel,
    EveCapability,
    EveClass,
    LinkParameters,
    Medium,
    SecurityParameters,
    SourceModel,
)
from mc_oracle.pulse_simulator import MAX_PULSES
from optimizer.feasibility import MuPolicy
from optimizer.intensity_search import MIN_GRID_POINTS
from optimizer.sweep_runner import SweepSpec

# Global configuration
SCENARIO_DIR = Path(__file__).parent / "scenarios"
THREADS_ENV = "QKDBUDGET_THREADS"
OVERRIDE_ORIGIN = "<override>"

REQUIRED_KEYS = ("source.mu", "channel.alpha", "detector.eta", "security.m")

DEFAULTS: Dict[str, Any] = {
    "source.tau": 1e-9,
    "channel.r_c": 0.0,
    "channel.medium": Medium.FIBER.value,
    "detector.r_d": 0.0,
    "error_correction.x": 1.0,
    "eve.capability": EveClass.LOSSLESS_REPLACEMENT.value,
    "eve.y_override": None,
    "security.epsilon": 1.0,
    "security.g_pa": 0.0,
    "security.g_auth": 0.0,
    "security.g_ec": 0.0,
    "security.g_tilde_ec": 0.0,
    "optimizer.mu_lo": 1e-4,
    "optimizer.mu_hi": 10.0,
    "optimizer.grid_points": 96,
    "optimizer.alpha_policy": MuPolicy.FIXED.value,
    "sweep.axis": None,
    "sweep.grid": None,
    "sweep.start": None,
    "sweep.stop": None,
    "sweep.points": None,
    "sweep.spacing": "linear",
    "sweep.optimize_mu": False,
    "validate.m": 1e6,
    "validate.seed": 0,
}

KNOWN_KEYS = frozenset(REQUIRED_KEYS) | frozenset(DEFAULTS)

# Keys whose values must be real numbers (None allowed where the default is None)
NUMERIC_KEYS = frozenset({
    "source.mu", "source.tau", "channel.alpha", "channel.r_c", "detector.eta", "detector.r_d",
    "error_correction.x", "eve.y_override", "security.m", "security.epsilon", "security.g_pa",
    "security.g_auth", "security.g_ec", "security.g_tilde_ec", "optimizer.mu_lo", "optimizer.mu_hi",
    "optimizer.grid_points", "sweep.start", "sweep.stop", "sweep.points", "validate.m", "validate.seed",
})


class ConfigError(BudgetError):
    """A scenario file or override that cannot be turned into valid parameters."""

    def __init__(self, message: str, origin: str = "", line: Optional[int] = None):
        self.origin = origin
        self.line = line
        location = origin
        if line is not None:
            location = f"{origin}:{line}"
        super().__init__(f"{location}: {message}" if location else message)


@dataclass(frozen=True)
class OptimizerSettings:
    mu_bounds: Tuple[float, float]
    grid_points: int
    alpha_policy: MuPolicy


@dataclass(frozen=True)
class ValidateSettings:
    m: int
    seed: int


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully validated scenario: link, security and the optional sections."""
    link: LinkParameters
    security: SecurityParameters
    optimizer: OptimizerSettings
    validate: ValidateSettings
    sweep: Optional[SweepSpec] = None
    values: Dict[str, Any] = field(default_factory=dict)
    origin: str = ""


def resolve_worker_count() -> int:
    """
    Worker threads for sweeps and Monte Carlo shards.

    Returns:
        int: QKDBUDGET_THREADS if set (capped at the CPU count), otherwise the CPU count
    """
    cpus = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return cpus
    try:
        requested = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer (got {raw!r})", origin="environment")
    if requested < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer (got {raw!r})", origin="environment")
    return min(requested, cpus)


def _key_lines(text: str, keys: Iterable[str]) -> Dict[str, int]:
    # First line on which each quoted key appears
    keys = list(keys)
    lines = {}
    for number, line in enumerate(text.splitlines(), start=1):
        for key in keys:
            if key not in lines and f'"{key}"' in line:
                lines[key] = number
    return lines


def parse_overrides(tokens: Iterable[str]) -> Dict[str, Any]:
    """
    Parse --key=value (or --key value) tokens left over by argparse.

    Values are JSON-decoded when possible, so numbers, booleans, null and lists
    keep their types; anything else is kept as a string.

    Returns:
        dict: Dotted key -> value
    """
    tokens = list(tokens)
    overrides = {}
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if not token.startswith("--") or len(token) == 2:
            raise ConfigError(f"unexpected argument {token!r}; overrides look like --key=value",
                              origin=OVERRIDE_ORIGIN)
        body = token[2:]
        if "=" in body:
            key, raw = body.split("=", 1)
        elif i + 1 < len(tokens) and not tokens[i + 1].startswith("--"):
            key, raw = body, tokens[i + 1]
            i += 1
        else:
            raise ConfigError(f"override {token!r} has no value", origin=OVERRIDE_ORIGIN)
        try:
            overrides[key] = json.loads(raw)
        except json.JSONDecodeError:
            overrides[key] = raw
        i += 1
    return overrides


def read_scenario_file(path: str | Path) -> Tuple[Dict[str, Any], Dict[str, int]]:
    """
    Load the raw key/value mapping of a scenario file.

    Returns:
        tuple: (values, key -> line number)
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read scenario file: {e}", origin=str(path))
    try:
        values = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", origin=str(path), line=e.lineno)
    if not isinstance(values, dict):
        raise ConfigError("scenario must be a JSON object of dotted keys", origin=str(path), line=1)
    return values, _key_lines(text, values.keys())


class _Locator:
    """Maps a key to where its value came from, for error messages."""

    def __init__(self, origin: str, lines: Dict[str, int], overridden: Iterable[str]):
        self.origin = origin
        self.lines = lines
        self.overridden = set(overridden)

    def error(self, key: str, message: str) -> ConfigError:
        if key in self.overridden:
            return ConfigError(f"{key}: {message}", origin=OVERRIDE_ORIGIN)
        return ConfigError(f"{key}: {message}", origin=self.origin, line=self.lines.get(key))

    def from_domain_error(self, error: DomainError, keys: Iterable[str]) -> ConfigError:
        text = str(error)
        for key in keys:
            if text.startswith(key):
                return self.error(key, text)
        return ConfigError(text, origin=self.origin)


def _check_types(values: Dict[str, Any], locator: _Locator) -> None:
    for key in values:
        if key not in KNOWN_KEYS:
            raise locator.error(key, "unknown key")
    for key in REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}", origin=locator.origin)
    for key in NUMERIC_KEYS:
        value = values.get(key, DEFAULTS.get(key))
        if value is None and DEFAULTS.get(key, 0) is None:
            continue
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise locator.error(key, f"must be a number (got {value!r})")


def _build(values: Dict[str, Any], keys: Tuple[str, ...], locator: _Locator, factory):
    try:
        return factory()
    except DomainError as e:
        raise locator.from_domain_error(e, keys)
    except ValueError as e:
        raise locator.error(keys[0], str(e))


def _sweep_grid(merged: Dict[str, Any], locator: _Locator) -> Tuple[float, ...]:
    if merged["sweep.grid"] is not None:
        grid = merged["sweep.grid"]
        if not isinstance(grid, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in grid):
            raise locator.error("sweep.grid", "must be a list of numbers")
        return tuple(float(v) for v in grid)

    start, stop, points = merged["sweep.start"], merged["sweep.stop"], merged["sweep.points"]
    if start is None or stop is None or points is None:
        raise locator.error("sweep.axis", "needs sweep.grid or sweep.start, sweep.stop and sweep.points")
    if int(points) != points or points < 1:
        raise locator.error("sweep.points", f"must be a positive integer (got {points})")
    spacing = merged["sweep.spacing"]
    if spacing == "linear":
        grid = np.linspace(start, stop, int(points))
    elif spacing == "log":
        if start <= 0 or stop <= 0:
            raise locator.error("sweep.spacing", "log spacing needs sweep.start > 0 and sweep.stop > 0")
        grid = np.geomspace(start, stop, int(points))
    else:
        raise locator.error("sweep.spacing", f"must be 'linear' or 'log' (got {spacing!r})")
    return tuple(float(v) for v in grid)


def build_scenario(values: Dict[str, Any], origin: str = "", lines: Optional[Dict[str, int]] = None,
                   overridden: Iterable[str] = ()) -> ScenarioConfig:
    """
    Validate a flat key/value mapping and build the parameter bundles.

    Args:
        values: Dotted keys from the file with overrides already applied
        origin: File name used in error messages
        lines: Line number of each key in the file
        overridden: Keys whose value came from an override

    Returns:
        ScenarioConfig: Validated scenario
    """
    locator = _Locator(origin, lines or {}, overridden)
    _check_types(values, locator)
    merged = {**DEFAULTS, **values}

    source = _build(merged, ("source.mu", "source.tau"), locator,
                    lambda: SourceModel(mu=merged["source.mu"], tau=merged["source.tau"]))
    channel = _build(merged, ("channel.medium", "channel.alpha", "channel.r_c"), locator,
                     lambda: ChannelModel(alpha=merged["channel.alpha"], r_c=merged["channel.r_c"],
                                          medium=merged["channel.medium"]))
    detector = _build(merged, ("detector.eta", "detector.r_d"), locator,
                      lambda: DetectorModel(eta=merged["detector.eta"], r_d=merged["detector.r_d"]))
    error_correction = _build(merged, ("error_correction.x",), locator,
                              lambda: ErrorCorrectionModel(x=merged["error_correction.x"]))
    eve = _build(merged, ("eve.capability", "eve.y_override"), locator,
                 lambda: EveCapability(eve_class=merged["eve.capability"], y_override=merged["eve.y_override"]))
    link = LinkParameters(source=source, channel=channel, detector=detector,
                          error_correction=error_correction, eve=eve)
    security_keys = ("security.m", "security.epsilon", "security.g_pa",
                     "security.g_auth", "security.g_ec", "security.g_tilde_ec")
    security = _build(merged, security_keys, locator, lambda: SecurityParameters(
        m=merged["security.m"], epsilon=merged["security.epsilon"], g_pa=merged["security.g_pa"],
        g_auth=merged["security.g_auth"], g_ec=merged["security.g_ec"],
        g_tilde_ec=merged["security.g_tilde_ec"]))
    try:
        y = link.y
    except DomainError as e:
        raise locator.error("eve.capability", str(e))
    if not 0 < y <= 1:
        raise locator.error("eve.capability", f"derived y must satisfy 0 < y <= 1 (got {y})")

    mu_lo, mu_hi = merged["optimizer.mu_lo"], merged["optimizer.mu_hi"]
    if not 0 < mu_lo < mu_hi:
        raise locator.error("optimizer.mu_lo", f"must satisfy 0 < mu_lo < mu_hi (got {mu_lo}, {mu_hi})")
    grid_points = merged["optimizer.grid_points"]
    if int(grid_points) != grid_points or grid_points < MIN_GRID_POINTS:
        raise locator.error("optimizer.grid_points", f"must be an integer >= {MIN_GRID_POINTS} (got {grid_points})")
    policy = _build(merged, ("optimizer.alpha_policy",), locator, lambda: MuPolicy(merged["optimizer.alpha_policy"]))
    optimizer = OptimizerSettings(mu_bounds=(float(mu_lo), float(mu_hi)), grid_points=int(grid_points),
                                  alpha_policy=policy)

    validate_m, seed = merged["validate.m"], merged["validate.seed"]
    if int(validate_m) != validate_m or not 1 <= validate_m <= MAX_PULSES:
        raise locator.error("validate.m", f"must be an integer in [1, {MAX_PULSES}] (got {validate_m})")
    if int(seed) != seed or not 0 <= seed < 2 ** 64:
        raise locator.error("validate.seed", f"must be a 64-bit unsigned integer (got {seed})")
    validate = ValidateSettings(m=int(validate_m), seed=int(seed))

    sweep_spec = None
    if merged["sweep.axis"] is not None:
        if not isinstance(merged["sweep.optimize_mu"], bool):
            raise locator.error("sweep.optimize_mu", "must be true or false")
        grid = _sweep_grid(merged, locator)
        sweep_spec = _build(merged, ("sweep.axis", "sweep.grid", "sweep.optimize_mu"), locator,
                            lambda: SweepSpec(axis=merged["sweep.axis"], grid=grid,
                                              optimize_mu_per_point=merged["sweep.optimize_mu"],
                                              mu_bounds=optimizer.mu_bounds,
                                              grid_points=optimizer.grid_points))

    return ScenarioConfig(link=link, security=security, optimizer=optimizer, validate=validate,
                          sweep=sweep_spec, values=merged, origin=origin)


def load_scenario(path: str | Path, overrides: Optional[Dict[str, Any]] = None) -> ScenarioConfig:
    """
    Load, merge and validate a scenario file.

    Args:
        path: Scenario JSON file; the file is only read
        overrides: Values that replace file values key by key

    Returns:
        ScenarioConfig: Validated scenario
    """
    values, lines = read_scenario_file(path)
    overrides = overrides or {}
    return build_scenario({**values, **overrides}, origin=str(path), lines=lines, overridden=overrides)


def bundled_scenarios() -> List[Path]:
    """Scenario files shipped with the package."""
    return sorted(SCENARIO_DIR.glob("*.json"))


__all__ = [
    "ConfigError", "ScenarioConfig", "OptimizerSettings", "ValidateSettings",
    "DEFAULTS", "REQUIRED_KEYS", "KNOWN_KEYS", "SCENARIO_DIR",
    "load_scenario", "build_scenario", "read_scenario_file", "parse_overrides",
    "resolve_worker_count", "bundled_scenarios",
]
