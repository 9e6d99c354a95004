"""Command-line entry point.

Each subcommand reads one YAML config, runs one experiment, and writes
CSV artifacts plus a manifest.json into the output directory.  Artifacts
are a pure function of (config, seed): same inputs, byte-identical
outputs.  See config.py for the file format.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import lamperti, lsst, pearson
from .config import ExperimentConfig, load_config
from .ensemble import run_ensemble, rmsd, spatial_accuracy, strong_errors
from .errors import ConfigParseError, SimulationError
from .output import (
    write_accuracy,
    write_convergence,
    write_fields,
    write_manifest,
    write_rmsd,
    write_sde_path,
    write_statistics,
)
from .sulphation import solve_system

_SECTION_KEYS = {
    "sde_path": {"t_final", "n_steps"},
    "convergence": {"t_final", "delta_ref", "ratios", "n_paths", "chunk_size"},
    "ensemble": {"n_paths", "chunk_size"},
    "accuracy": {"x_max", "t_final", "dt", "dxs", "seeds", "right_bc"},
    "rmsd": {"n_paths", "chunk_size"},
}


def _section(cfg: ExperimentConfig, name: str) -> dict:
    sec = cfg.section(name)
    unknown = set(sec) - _SECTION_KEYS[name]
    if unknown:
        raise ConfigParseError(
            f"unknown key(s) in section {name!r}: {', '.join(sorted(unknown))}"
        )
    return sec


def _require(cfg: ExperimentConfig, mode: str, grid: bool, material: bool) -> None:
    if grid and cfg.grid is None:
        raise ConfigParseError(f"mode {mode} requires a 'grid' section")
    if material and cfg.material is None:
        raise ConfigParseError(f"mode {mode} requires a 'material' section")


def cmd_sde_path(cfg: ExperimentConfig) -> None:
    sec = _section(cfg, "sde_path")
    t_final = float(sec.get("t_final", cfg.grid.t_max if cfg.grid else 1.5))
    n_steps = int(sec.get("n_steps", cfg.grid.n_steps if cfg.grid else 75377))
    path = lsst.sample_path(cfg.params, cfg.coeffs, t_final, n_steps,
                            cfg.seed, cfg.psi0, cfg.k)
    write_sde_path(os.path.join(cfg.out_dir, "path.csv"), path)


def cmd_sde_convergence(cfg: ExperimentConfig) -> None:
    sec = _section(cfg, "convergence")
    study = strong_errors(
        cfg.params, cfg.coeffs,
        t_final=float(sec.get("t_final", 1.0)),
        delta_ref=float(sec.get("delta_ref", 2.0**-15)),
        ratios=tuple(sec.get("ratios", (16, 32, 64, 128, 256))),
        n_paths=int(sec.get("n_paths", 2000)),
        seed=cfg.seed, psi0=cfg.psi0, k=cfg.k,
        chunk_size=int(sec.get("chunk_size", 250)),
        threads=cfg.threads,
    )
    write_convergence(cfg.out_dir, study)


def cmd_simulate(cfg: ExperimentConfig) -> None:
    _require(cfg, "simulate", grid=True, material=True)
    run = cfg.resolved["run"]
    path = lsst.sample_path(cfg.params, cfg.coeffs, cfg.grid.t_max,
                            cfg.grid.n_steps, cfg.seed, cfg.psi0, cfg.k)
    fields = solve_system(cfg.grid, cfg.material, path,
                          right_bc=run["right_bc"], time_stride=run["time_stride"])
    write_fields(os.path.join(cfg.out_dir, "fields.csv"), fields, run["space_stride"])


def cmd_ensemble(cfg: ExperimentConfig) -> None:
    _require(cfg, "ensemble", grid=True, material=True)
    sec = _section(cfg, "ensemble")
    run = cfg.resolved["run"]
    result = run_ensemble(
        cfg.params, cfg.coeffs, cfg.grid, cfg.material,
        n_paths=int(sec.get("n_paths", 200)),
        seed=cfg.seed,
        time_stride=run["time_stride"],
        quantities=tuple(run["quantities"]),
        right_bc=run["right_bc"],
        psi0=cfg.psi0, k=cfg.k,
        chunk_size=int(sec.get("chunk_size", 32)),
        threads=cfg.threads,
    )
    write_statistics(cfg.out_dir, result, run["space_stride"])


def cmd_accuracy(cfg: ExperimentConfig) -> None:
    _require(cfg, "accuracy", grid=False, material=True)
    sec = _section(cfg, "accuracy")
    study = spatial_accuracy(
        cfg.params, cfg.coeffs, cfg.material,
        x_max=float(sec.get("x_max", 1.5)),
        t_final=float(sec.get("t_final", 1.0)),
        dt=float(sec.get("dt", 2.0**-19)),
        dxs=tuple(sec.get("dxs", (0.125, 0.0625, 0.03125))),
        seeds=tuple(sec.get("seeds", (5, 10, 14))),
        right_bc=str(sec.get("right_bc", "onesided")),
        psi0=cfg.psi0, k=cfg.k,
        threads=cfg.threads,
    )
    write_accuracy(cfg.out_dir, study)


def cmd_rmsd(cfg: ExperimentConfig) -> None:
    _require(cfg, "rmsd", grid=True, material=True)
    sec = _section(cfg, "rmsd")
    run = cfg.resolved["run"]
    quantities = tuple(run["quantities"])
    result = run_ensemble(
        cfg.params, cfg.coeffs, cfg.grid, cfg.material,
        n_paths=int(sec.get("n_paths", 200)),
        seed=cfg.seed,
        time_stride=run["time_stride"],
        quantities=quantities,
        right_bc=run["right_bc"],
        psi0=cfg.psi0, k=cfg.k,
        chunk_size=int(sec.get("chunk_size", 32)),
        threads=cfg.threads,
    )
    params0 = pearson.validate(cfg.params.alpha, cfg.params.gamma, 0.0, cfg.params.eta)
    coeffs0 = lamperti.coefficients(params0)
    baseline_path = lsst.sample_path(params0, coeffs0, cfg.grid.t_max,
                                     cfg.grid.n_steps, None, cfg.psi0, cfg.k)
    baseline = solve_system(cfg.grid, cfg.material, baseline_path,
                            right_bc=run["right_bc"], time_stride=run["time_stride"])
    fields = rmsd(result, baseline, quantities)
    write_rmsd(cfg.out_dir, result.times, result.x, fields, run["space_stride"])


_DISPATCH = {
    "sde-path": cmd_sde_path,
    "sde-convergence": cmd_sde_convergence,
    "simulate": cmd_simulate,
    "ensemble": cmd_ensemble,
    "accuracy": cmd_accuracy,
    "rmsd": cmd_rmsd,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sulfsim",
        description="Stochastic sulphation simulations: SDE boundary paths, "
                    "coupled PDE solves, and Monte Carlo statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "sde-path": "sample one boundary path and write (t, y, psi)",
        "sde-convergence": "strong-error ladder and fitted orders",
        "simulate": "one coupled solve; wide field table (t, x, u, v, s, c, rho)",
        "ensemble": "per-node mean/std/quartiles over many paths",
        "accuracy": "pathwise spatial orders on a nested dx ladder",
        "rmsd": "root-mean-square difference against the noise-free run",
    }
    for name, desc in descriptions.items():
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", required=True, help="YAML config file")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument("--threads", type=int, default=None, help="override run.threads")
        p.add_argument("--out", default=None, help="override run.out directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, overrides={
            "seed": args.seed, "threads": args.threads,
            "out": args.out, "mode": args.command,
        })
        os.makedirs(cfg.out_dir, exist_ok=True)
        _DISPATCH[args.command](cfg)
        write_manifest(os.path.join(cfg.out_dir, "manifest.json"), cfg.hash(), cfg.seed)
    except (SimulationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
