"""YAML experiment configuration: parsing, defaults, validation, hashing.

A config file holds up to four core sections (sde, material, grid, run)
plus optional per-mode sections (convergence, accuracy, ensemble,
sde_path, rmsd) that the CLI merges with its own defaults.  Parsing is
strict: unknown keys in the core sections are rejected so typos fail
fast, and all module validators run before anything is computed.

The grid's dt is snapped to the nearest value that divides t_max into a
whole number of steps (the requested and snapped values may differ by at
most 5%); the snapped value is what enters the resolved config and its
hash, so artifacts are reproducible from (config, seed) alone.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any

import yaml

from . import lamperti, pearson
from .errors import ConfigParseError
from .heat import Grid1D
from .lamperti import LampertiDrift
from .pearson import PearsonParams
from .sulphation import MaterialParams, check_conditions, validate_material

MODES = ("sde-path", "sde-convergence", "simulate", "ensemble", "accuracy", "rmsd")

CORE_SECTIONS = ("sde", "material", "grid", "run")
MODE_SECTIONS = ("sde_path", "convergence", "ensemble", "accuracy", "rmsd", "simulate")

DEFAULT_SDE = {"alpha": 7.0, "gamma": 1.0, "eta": 1.5, "sigma": 1.0,
               "k": 0.22, "psi0": 0.0}
DEFAULT_MATERIAL = {"phi1": 0.2, "phi2": -0.01, "lambda": 1.0,
                    "s0_bar": 0.0, "c0_bar": 10.0}
DEFAULT_RUN = {"mode": None, "seed": 0, "threads": 1, "out": "out",
               "time_stride": 1, "space_stride": 1,
               "quantities": ["s", "c", "rho"], "right_bc": "mirror"}

_DT_SNAP_LIMIT = 0.05


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration plus the resolved dict it hashes to."""

    resolved: dict
    params: PearsonParams
    coeffs: LampertiDrift
    material: MaterialParams | None
    grid: Grid1D | None
    mode: str | None
    seed: int
    threads: int
    out_dir: str
    psi0: float
    k: float

    def section(self, name: str) -> dict:
        """Per-mode option block; empty when absent from the file."""
        return dict(self.resolved.get(name, {}))

    def hash(self) -> str:
        # out and threads never influence artifact content, so two runs of
        # the same experiment hash identically wherever they are written
        resolved = dict(self.resolved)
        resolved["run"] = {k: v for k, v in resolved["run"].items()
                           if k not in ("out", "threads")}
        return config_hash(resolved)


def config_hash(resolved: dict) -> str:
    """sha256 of the canonical JSON form of the resolved config."""
    canon = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _number(section: str, key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigParseError(f"{section}.{key} must be a number, got {value!r}")
    return float(value)


def _merge_section(data: dict, name: str, defaults: dict) -> dict:
    block = data.get(name, {})
    if block is None:
        block = {}
    if not isinstance(block, dict):
        raise ConfigParseError(f"section {name!r} must be a mapping")
    unknown = set(block) - set(defaults)
    if unknown:
        raise ConfigParseError(
            f"unknown key(s) in section {name!r}: {', '.join(sorted(unknown))}"
        )
    merged = dict(defaults)
    merged.update(block)
    return merged


def _snap_dt(t_max: float, dt: float) -> float:
    n = round(t_max / dt)
    if n < 1:
        raise ConfigParseError(f"grid.dt = {dt} exceeds grid.t_max = {t_max}")
    snapped = t_max / n
    if abs(snapped - dt) > _DT_SNAP_LIMIT * dt:
        raise ConfigParseError(
            f"grid.dt = {dt} is not within {_DT_SNAP_LIMIT:.0%} of any step "
            f"that divides t_max = {t_max} evenly"
        )
    return snapped


def load_config(path: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse, default-fill, validate, and freeze a config file.

    overrides (seed/threads/out/mode) take precedence over the file's
    run section; they enter the resolved dict before hashing.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"invalid YAML in {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigParseError(f"top level of {path} must be a mapping")
    unknown = set(data) - set(CORE_SECTIONS) - set(MODE_SECTIONS)
    if unknown:
        raise ConfigParseError(f"unknown section(s): {', '.join(sorted(unknown))}")

    sde = _merge_section(data, "sde", DEFAULT_SDE)
    run = _merge_section(data, "run", DEFAULT_RUN)
    if overrides:
        for key, value in overrides.items():
            if value is not None:
                run[key] = value

    if run["mode"] is not None and run["mode"] not in MODES:
        raise ConfigParseError(f"run.mode must be one of {MODES}, got {run['mode']!r}")
    if not isinstance(run["seed"], int) or isinstance(run["seed"], bool) or run["seed"] < 0:
        raise ConfigParseError(f"run.seed must be a nonnegative integer, got {run['seed']!r}")
    if not isinstance(run["threads"], int) or run["threads"] < 1:
        raise ConfigParseError(f"run.threads must be a positive integer, got {run['threads']!r}")
    for key in ("time_stride", "space_stride"):
        if not isinstance(run[key], int) or isinstance(run[key], bool) or run[key] < 1:
            raise ConfigParseError(f"run.{key} must be a positive integer, got {run[key]!r}")
    if run["right_bc"] not in ("mirror", "onesided"):
        raise ConfigParseError(
            f"run.right_bc must be 'mirror' or 'onesided', got {run['right_bc']!r}"
        )
    if (not isinstance(run["quantities"], list)
            or not set(run["quantities"]) <= {"u", "v", "s", "c", "rho"}):
        raise ConfigParseError(
            f"run.quantities must be a list drawn from u, v, s, c, rho, "
            f"got {run['quantities']!r}"
        )

    params = pearson.validate(
        _number("sde", "alpha", sde["alpha"]), _number("sde", "gamma", sde["gamma"]),
        _number("sde", "sigma", sde["sigma"]), _number("sde", "eta", sde["eta"]),
    )
    coeffs = lamperti.coefficients(params)
    k = _number("sde", "k", sde["k"])
    if not 0.0 < k < 1.0:
        raise ConfigParseError(f"sde.k must lie in (0, 1), got {k}")
    psi0 = _number("sde", "psi0", sde["psi0"])
    if not 0.0 <= psi0 <= params.eta:
        raise ConfigParseError(f"sde.psi0 must lie in [0, eta], got {psi0}")

    material = None
    if "material" in data:
        m = _merge_section(data, "material", DEFAULT_MATERIAL)
        material = validate_material(
            _number("material", "phi1", m["phi1"]), _number("material", "phi2", m["phi2"]),
            _number("material", "lambda", m["lambda"]),
            _number("material", "s0_bar", m["s0_bar"]),
            _number("material", "c0_bar", m["c0_bar"]),
            params.eta,
        )
        data = {**data, "material": m}

    grid = None
    if "grid" in data:
        g = dict(data["grid"] or {})
        for key in ("x_max", "t_max", "dx", "dt"):
            if key not in g:
                raise ConfigParseError(f"grid.{key} is required")
            g[key] = _number("grid", key, g[key])
        unknown = set(g) - {"x_max", "t_max", "dx", "dt"}
        if unknown:
            raise ConfigParseError(
                f"unknown key(s) in section 'grid': {', '.join(sorted(unknown))}"
            )
        g["dt"] = _snap_dt(g["t_max"], g["dt"])
        try:
            grid = Grid1D(g["x_max"], g["t_max"], g["dx"], g["dt"])
        except ValueError as exc:
            raise ConfigParseError(str(exc)) from exc
        data = {**data, "grid": g}
        if material is not None:
            check_conditions(grid, material)

    resolved: dict = {"sde": sde, "run": run}
    for name in ("material", "grid"):
        if name in data:
            resolved[name] = data[name]
    for name in MODE_SECTIONS:
        if name in data:
            block = data[name]
            if not isinstance(block, dict):
                raise ConfigParseError(f"section {name!r} must be a mapping")
            resolved[name] = block

    return ExperimentConfig(
        resolved=resolved,
        params=params,
        coeffs=coeffs,
        material=material,
        grid=grid,
        mode=run["mode"],
        seed=run["seed"],
        threads=run["threads"],
        out_dir=str(run["out"]),
        psi0=psi0,
        k=k,
    )
