"""File formats: functional documents, check reports and CSV dumps.

A functional document is JSON::

    {"grid": {"S": 1, "T": 1, "ns": 64, "nt": 64},
     "atoms": [{"weight_re": 1.0, "weight_im": 0.0, "atom": "s*t"},
               {"weight_re": 0.0, "weight_im": 0.5, "atom": [0.1, 0.2, ...]}]}

An atom is either an expression over ``s, t`` or an inline array of the
``ns * nt`` midpoint values in row-major ``[i, j]`` order. The ``grid`` entry
is optional when a grid is supplied by the caller.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

import numpy as np

from .algebra import CylinderFunctional
from .checks import CheckReport
from .feynman import MCEstimate, checkpoints, yeh_wiener_samples
from .grid import GridFunction, GridSpec, make_grid, sample_function
from .kernels import expression_function
from .sheet import RngStream, SheetPath

__all__ = [
    "functional_from_dict",
    "functional_to_dict",
    "load_functional",
    "save_functional",
    "write_reports",
    "summary_document",
    "write_path_csv",
    "emit_convergence_csv",
]


def _grid_from(doc, grid):
    if grid is not None:
        return grid
    if "grid" not in doc:
        raise ValueError("functional document has no grid and none was given")
    g = doc["grid"]
    return make_grid(g["S"], g["T"], g["ns"], g["nt"])


def functional_from_dict(doc: dict, grid: GridSpec | None = None) -> CylinderFunctional:
    grid = _grid_from(doc, grid)
    pairs = []
    for entry in doc.get("atoms", []):
        weight = complex(entry.get("weight_re", 0.0), entry.get("weight_im", 0.0))
        atom = entry["atom"]
        if isinstance(atom, str):
            u = sample_function(expression_function(atom, grid.S, grid.T), grid)
        else:
            u = GridFunction(grid, np.asarray(atom, dtype=float))
        pairs.append((weight, u))
    return CylinderFunctional.from_pairs(pairs, grid)


def functional_to_dict(F: CylinderFunctional, expressions: Iterable[str] | None = None) -> dict:
    """Serialise ``F``; atoms are written inline unless ``expressions`` are given."""
    g = F.grid
    exprs = list(expressions) if expressions is not None else [None] * len(F)
    atoms = []
    for (c, u), expr in zip(F.measure, exprs):
        atoms.append({
            "weight_re": c.real,
            "weight_im": c.imag,
            "atom": expr if expr is not None else u.values.ravel().tolist(),
        })
    return {"grid": {"S": g.S, "T": g.T, "ns": g.ns, "nt": g.nt}, "atoms": atoms}


def load_functional(path, grid: GridSpec | None = None) -> CylinderFunctional:
    with open(path) as fh:
        return functional_from_dict(json.load(fh), grid)


def save_functional(F: CylinderFunctional, path, expressions=None) -> None:
    with open(path, "w") as fh:
        json.dump(functional_to_dict(F, expressions), fh)


def summary_document(reports: list[CheckReport], config: dict | None = None) -> dict:
    return {
        "passed": all(r.passed for r in reports),
        "n_checks": len(reports),
        "n_failed": sum(not r.passed for r in reports),
        "checks": {r.name: r.summary() for r in reports},
        "config": config or {},
    }


def write_reports(reports: list[CheckReport], path, config: dict | None = None) -> Path:
    """Write one JSON line per report to ``path`` and a summary to ``<path>.summary.json``."""
    path = Path(path)
    path.write_text("".join(r.to_line() + "\n" for r in reports))
    summary = path.with_name(path.name + ".summary.json")
    summary.write_text(json.dumps(summary_document(reports, config), indent=2, sort_keys=True) + "\n")
    return summary


def write_path_csv(path_obj: SheetPath, out) -> None:
    """Node values of a path as ``s, t, value`` rows, axes included."""
    grid = path_obj.grid
    vals = path_obj.node_values()
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "t", "value"])
        for i, s in enumerate(grid.s_nodes):
            for j, t in enumerate(grid.t_nodes):
                w.writerow([repr(float(s)), repr(float(t)), repr(float(vals[i, j]))])


def emit_convergence_csv(
    F: CylinderFunctional, h: GridFunction, lam: float, n: int, rng: RngStream, path, workers: int = 1
) -> list[MCEstimate]:
    """Running Monte Carlo estimates at power-of-two checkpoints, written as CSV.

    Uses the same sheets as :func:`yeh_wiener_mc` with this stream, so the last
    row reproduces its estimate.
    """
    values = yeh_wiener_samples([(F, h, lam)], n, rng, workers)[:, 0]
    rows = [MCEstimate.from_samples(values[:k], rng.seed) for k in checkpoints(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "mean_re", "mean_im", "se_re", "se_im"])
        for est in rows:
            w.writerow([est.n, repr(est.mean.real), repr(est.mean.imag), repr(est.se_re), repr(est.se_im)])
    return rows
