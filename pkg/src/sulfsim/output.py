"""CSV and manifest artifact writers.

All numeric output uses Python's shortest round-trip float formatting,
so rerunning with the same (config, seed) reproduces artifacts byte for
byte.  Manifests carry the config hash, seed, code version, and compute
backend; deliberately no timestamps or host details.
"""

from __future__ import annotations

import json
import os
from typing import Iterable

import numpy as np

from . import __version__
from ._backend import backend_name
from .ensemble import AccuracyStudy, ConvergenceStudy, EnsembleResult
from .lsst import SdePath
from .sulphation import SolutionFields

STAT_NAMES = ("mean", "std", "p25", "p50", "p75")


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def write_csv(path: str, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_manifest(path: str, cfg_hash: str, seed: int) -> None:
    payload = {
        "config_sha256": cfg_hash,
        "seed": int(seed),
        "version": __version__,
        "backend": backend_name(),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_sde_path(path: str, sde_path: SdePath) -> None:
    write_csv(path, ("t", "y", "psi"),
              zip(sde_path.times, sde_path.y, sde_path.psi))


def write_convergence(out_dir: str, study: ConvergenceStudy) -> None:
    write_csv(
        os.path.join(out_dir, "errors.csv"),
        ("delta", "e_final", "e_uniform"),
        zip(study.deltas, study.errors_final, study.errors_uniform),
    )
    write_csv(
        os.path.join(out_dir, "fit.csv"),
        ("estimator", "q", "C"),
        [("final", study.slope_final, study.c_final),
         ("uniform", study.slope_uniform, study.c_uniform)],
    )


def write_fields(path: str, fields: SolutionFields, space_stride: int = 1) -> None:
    """Wide per-node table with headers t, x, u, v, s, c, rho."""
    x = fields.x[::space_stride]
    cols = [fields.u, fields.v, fields.s, fields.c, fields.rho]

    def rows():
        for i, t in enumerate(fields.times):
            for j, xv in enumerate(x):
                yield (t, xv) + tuple(col[i, j * space_stride] for col in cols)

    write_csv(path, ("t", "x", "u", "v", "s", "c", "rho"), rows())


def write_statistics(out_dir: str, result: EnsembleResult, space_stride: int = 1) -> None:
    """One long-format file per quantity: rows (t, x, stat, value)."""
    x_idx = range(0, result.x.size, space_stride)
    for quantity, stats in result.stats.items():
        arrays = [getattr(stats, name) for name in STAT_NAMES]

        def rows():
            for i, t in enumerate(result.times):
                for j in x_idx:
                    for name, arr in zip(STAT_NAMES, arrays):
                        yield (t, result.x[j], name, arr[i, j])

        path = os.path.join(out_dir, f"stats_{quantity}.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,x,stat,value\n")
            for t, xv, name, value in rows():
                fh.write(f"{_fmt(t)},{_fmt(xv)},{name},{_fmt(value)}\n")


def write_rmsd(out_dir: str, times, x, rmsd_fields: dict, space_stride: int = 1) -> None:
    """One file per quantity: rows (t, x, value)."""
    for quantity, field in rmsd_fields.items():
        def rows():
            for i, t in enumerate(times):
                for j in range(0, len(x), space_stride):
                    yield (t, x[j], field[i, j])

        write_csv(os.path.join(out_dir, f"rmsd_{quantity}.csv"), ("t", "x", "value"), rows())


def write_accuracy(out_dir: str, study: AccuracyStudy) -> None:
    write_csv(
        os.path.join(out_dir, "accuracy_orders.csv"),
        ("seed", "level", "dx_coarse", "p_rho", "p_c"),
        ((seed, lvl + 1, study.dxs[lvl], study.p_rho[si, lvl], study.p_c[si, lvl])
         for si, seed in enumerate(study.seeds)
         for lvl in range(study.p_rho.shape[1])),
    )
    write_csv(
        os.path.join(out_dir, "accuracy_norms.csv"),
        ("seed", "pair", "dx_coarse", "norm_rho", "norm_c"),
        ((seed, pj + 1, study.dxs[pj], study.diff_norms_rho[si, pj], study.diff_norms_c[si, pj])
         for si, seed in enumerate(study.seeds)
         for pj in range(study.diff_norms_rho.shape[1])),
    )
