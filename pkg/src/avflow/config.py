"""Run configuration: flat INI-style key = value sections, with overrides."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .evolve import RunConfig
from .scenarios import Scenario
from .spectral import Grid

__all__ = ["OutputManifest", "RunSettings", "load_settings"]

_SECTIONS = {"grid", "time", "holder", "chart", "ic", "output", "mode", "picard"}
_MODES = ("direct", "picard", "oracle_compare")


@dataclass
class OutputManifest:
    csv_path: str = "diagnostics.csv"
    snapshot_dir: str = "snapshots"
    cadence: int = 10
    snapshot_cadence: int = 0  # 0 disables periodic dumps; final state always dumped
    fields: tuple = ("u", "delta")

    def __post_init__(self):
        if self.cadence < 1:
            raise ConfigError(f"output cadence must be >= 1, got {self.cadence}")
        if self.snapshot_cadence < 0:
            raise ConfigError("snapshot_cadence must be >= 0")


@dataclass
class RunSettings:
    grid: Grid
    run: RunConfig
    scenario: Scenario
    output: OutputManifest
    mode: str = "direct"


def _get(cp, section, key, cast, default):
    try:
        raw = cp.get(section, key, fallback=None)
        if raw is None:
            return default
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except (ValueError, configparser.Error) as exc:
        raise ConfigError(f"bad value for [{section}] {key}: {exc}") from exc


def load_settings(path, overrides=()) -> RunSettings:
    cp = configparser.ConfigParser()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    for ov in overrides:
        if "=" not in ov or "." not in ov.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {ov!r}")
        key, value = ov.split("=", 1)
        section, name = key.split(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section.strip(), name.strip(), value.strip())

    unknown = set(cp.sections()) - _SECTIONS
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    try:
        grid = Grid(n=_get(cp, "grid", "n", int, 32),
                    length=_get(cp, "grid", "length", float, 6.283185307179586))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    try:
        run = RunConfig(
            t_end=_get(cp, "time", "t_end", float, 0.5),
            dt_max=_get(cp, "time", "dt_max", float, 1e-2),
            cfl=_get(cp, "time", "cfl", float, 0.5),
            mu=_get(cp, "holder", "mu", float, 0.5),
            epsilon_reset=_get(cp, "chart", "epsilon_reset", float, 0.25),
            reset_norm=_get(cp, "chart", "reset_norm", str, "holder"),
            picard_tol=_get(cp, "picard", "tol", float, 1e-9),
            picard_max_iter=_get(cp, "picard", "max_iter", int, 40),
            picard_safety_c=_get(cp, "picard", "safety_c", float, 0.1),
            interp_scheme=_get(cp, "time", "interp_scheme", str, "spline"),
            interp_factor=_get(cp, "time", "interp_factor", int, 4),
            interp_order=_get(cp, "time", "interp_order", int, 5),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    name = _get(cp, "ic", "scenario", str, "abc")
    params = {}
    if cp.has_section("ic"):
        for key, raw in cp.items("ic"):
            if key == "scenario":
                continue
            params[key] = _parse_scalar(raw)
    try:
        scenario = Scenario(name=name, parameters=params)
    except Exception as exc:
        raise ConfigError(str(exc)) from exc

    fields_raw = _get(cp, "output", "fields", str, "u,delta")
    output = OutputManifest(
        csv_path=_get(cp, "output", "csv", str, "diagnostics.csv"),
        snapshot_dir=_get(cp, "output", "snapshot_dir", str, "snapshots"),
        cadence=_get(cp, "output", "cadence", int, 10),
        snapshot_cadence=_get(cp, "output", "snapshot_cadence", int, 0),
        fields=tuple(s.strip() for s in fields_raw.split(",") if s.strip()),
    )

    mode = _get(cp, "mode", "mode", str, "direct")
    if mode not in _MODES:
        raise ConfigError(f"mode must be one of {_MODES}, got {mode!r}")

    return RunSettings(grid=grid, run=run, scenario=scenario, output=output, mode=mode)


def _parse_scalar(raw: str):
    raw = raw.strip()
    low = raw.lower()
    if low in ("true", "false", "yes", "no", "on", "off"):
        return low in ("true", "yes", "on")
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw
