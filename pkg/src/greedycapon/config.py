"""Experiment configuration files and shipped presets."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .array import ArraySpec, SteeringGrid, build_grid_deg
from .beamformers import METHODS
from .montecarlo import Scenario
from .simulate import NoiseSpec, SourceSet, calibrate_powers

SWEEP_AXES = ("snr_db", "snapshots", "separation_deg")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message starts with the field path."""


def _schema():
    text = resources.files("greedycapon").joinpath("config.schema.json").read_text()
    return json.loads(text)


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _describe(err) -> str:
    if err.validator == "additionalProperties":
        msg = f"unknown field(s): {err.message}"
    elif err.validator == "enum" and "methods" in err.absolute_path:
        msg = f"unknown method {err.instance!r}; available: {sorted(METHODS)}"
    else:
        msg = err.message
    return f"{_path(err.absolute_path)}: {msg}"


@dataclass(frozen=True)
class ExperimentConfig:
    n_sensors: int
    spacing_ratio: float
    grid_min_deg: float
    grid_max_deg: float
    grid_size: int
    doas_deg: tuple
    relative_db: tuple
    model: str
    phase_links: tuple
    amplitude: str
    noise_variance: float
    sweep_axis: str
    sweep_values: tuple
    methods: tuple
    snr_db: float | None = None
    snapshots: int | None = None
    trials: int = 200
    seed: int = 0
    exact_covariance: bool = False
    name: str = ""
    description: str = ""

    @property
    def K(self) -> int:
        return len(self.relative_db)

    def array_spec(self) -> ArraySpec:
        return ArraySpec(self.n_sensors, self.spacing_ratio)

    def grid(self) -> SteeringGrid:
        return build_grid_deg(self.array_spec(), self.grid_min_deg, self.grid_max_deg, self.grid_size)

    def scenario(self, sweep_value, grid: SteeringGrid | None = None) -> Scenario:
        """Scenario at one point of the sweep."""
        snr, L, doas = self.snr_db, self.snapshots, list(self.doas_deg)
        if self.sweep_axis == "snr_db":
            snr = float(sweep_value)
        elif self.sweep_axis == "snapshots":
            L = int(sweep_value)
        else:
            doas = [doas[0], doas[0] + float(sweep_value)]
        spec = self.array_spec()
        sources = SourceSet(
            np.deg2rad(doas),
            calibrate_powers(snr, self.relative_db, self.noise_variance),
            model=self.model,
            phase_links=tuple(tuple(i - 1 for i in g) for g in self.phase_links),
            amplitude=self.amplitude,
        )
        return Scenario(spec, grid if grid is not None else self.grid(), sources,
                        NoiseSpec(self.noise_variance), L, self.exact_covariance)

    def with_overrides(self, **changes) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a decoded config document and build an :class:`ExperimentConfig`.

    Raises:
        ConfigError: naming the offending field, e.g. ``sources.model: ...``.
    """
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError("; ".join(_describe(e) for e in errors))

    src = raw["sources"]
    sweep = raw["sweep"]
    axis = sweep["axis"]
    doas, rel = src["doas_deg"], src["relative_db"]
    links = [tuple(g) for g in src.get("phase_links", [])]
    model = src.get("model", "gaussian")

    if axis == "separation_deg":
        if len(rel) != 2 or len(doas) != 1:
            raise ConfigError("sources: a separation sweep needs relative_db for two sources "
                              "and doas_deg holding only the first DOA")
    elif len(doas) != len(rel):
        raise ConfigError(f"sources.relative_db: expected {len(doas)} offsets to match doas_deg, got {len(rel)}")
    for i, group in enumerate(links):
        if any(n > len(rel) for n in group):
            raise ConfigError(f"sources.phase_links[{i}]: source number out of range 1..{len(rel)}")
    if links and model != "constant-modulus":
        raise ConfigError("sources.phase_links: only valid with the constant-modulus model")
    for fixed in ("snr_db", "snapshots"):
        if axis != fixed and fixed not in raw:
            raise ConfigError(f"{fixed}: required when the sweep axis is {axis!r}")
    if axis == "snapshots" and any(v != int(v) or v < 1 for v in sweep["values"]):
        raise ConfigError("sweep.values: snapshot counts must be positive integers")
    grid = raw["grid"]
    gmin, gmax = grid.get("theta_min_deg", -90.0), grid.get("theta_max_deg", 90.0)
    if not gmin < gmax:
        raise ConfigError("grid: theta_min_deg must be smaller than theta_max_deg")
    if "music" in raw["methods"] and len(rel) >= raw["array"]["n_sensors"]:
        raise ConfigError("methods: music needs fewer sources than sensors")

    values = tuple(int(v) if axis == "snapshots" else float(v) for v in sweep["values"])
    return ExperimentConfig(
        n_sensors=raw["array"]["n_sensors"],
        spacing_ratio=raw["array"].get("spacing_ratio", 0.5),
        grid_min_deg=gmin,
        grid_max_deg=gmax,
        grid_size=grid["size"],
        doas_deg=tuple(doas),
        relative_db=tuple(rel),
        model=model,
        phase_links=tuple(links),
        amplitude=src.get("amplitude", "power"),
        noise_variance=raw.get("noise_variance", 1.0),
        sweep_axis=axis,
        sweep_values=values,
        methods=tuple(raw["methods"]),
        snr_db=raw.get("snr_db"),
        snapshots=raw.get("snapshots"),
        trials=raw.get("trials", 200),
        seed=raw.get("seed", 0),
        exact_covariance=raw.get("exact_covariance", False),
        name=raw.get("name", ""),
        description=raw.get("description", ""),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return parse_config(raw)


def _preset_dir():
    return resources.files("greedycapon").joinpath("presets")


def list_presets() -> dict[str, str]:
    """Preset name -> description."""
    out = {}
    for entry in sorted(_preset_dir().iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".json"):
            out[entry.name[:-5]] = json.loads(entry.read_text()).get("description", "")
    return out


def load_preset(name: str) -> ExperimentConfig:
    entry = _preset_dir().joinpath(f"{name}.json")
    if not entry.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return parse_config(json.loads(entry.read_text()))
