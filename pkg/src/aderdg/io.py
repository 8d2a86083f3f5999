"""Plain-text outputs: CSV tables, legacy-VTK rectilinear grids and JSON summaries."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .euler import cons_to_prim
from .grid import CartesianGrid


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                        for v in row])
    return path


def write_line(path, x, W, exact=None) -> Path:
    """1D cut: x, rho, velocity components, p and optionally the exact primitives."""
    d = W.shape[0] - 2
    names = ["rho"] + ["u", "v"][:d] + ["p"]
    header = ["x"] + names
    cols = [x] + list(W)
    if exact is not None:
        header += [f"{n}_exact" for n in names]
        cols += list(exact)
    return write_csv(path, header, zip(*cols))


def write_beta(path, beta) -> Path:
    """Troubled-cell map as rows of 0/1 (first grid index runs down the rows)."""
    b = np.atleast_2d(np.asarray(beta, dtype=int))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, b, fmt="%d", delimiter=",")
    return path


def write_vtk(path, grid: CartesianGrid, means: np.ndarray, beta, gamma: float = 1.4) -> Path:
    """Cell data on a legacy-VTK RECTILINEAR_GRID (1D grids get a unit y extent)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    W = cons_to_prim(means, gamma)
    xs = grid.faces(0)
    ys = grid.faces(1) if grid.d > 1 else np.array([0.0, 1.0])
    nx, ny = len(xs) - 1, len(ys) - 1
    names = ["density", "velocity_x"] + (["velocity_y"] if grid.d > 1 else []) + ["pressure"]

    def flat(a):
        a = np.asarray(a, dtype=float).reshape(nx, ny)
        return a.T.ravel()  # x runs fastest

    lines = ["# vtk DataFile Version 3.0", "aderdg cell data", "ASCII", "DATASET RECTILINEAR_GRID",
             f"DIMENSIONS {nx + 1} {ny + 1} 1"]
    lines.append(f"X_COORDINATES {nx + 1} double")
    lines.append(" ".join(repr(float(v)) for v in xs))
    lines.append(f"Y_COORDINATES {ny + 1} double")
    lines.append(" ".join(repr(float(v)) for v in ys))
    lines.append("Z_COORDINATES 1 double")
    lines.append("0.0")
    lines.append(f"CELL_DATA {nx * ny}")
    for name, arr in zip(names, W):
        lines.append(f"SCALARS {name} double 1")
        lines.append("LOOKUP_TABLE default")
        lines.append(" ".join(repr(float(v)) for v in flat(arr)))
    lines.append("SCALARS troubled int 1")
    lines.append("LOOKUP_TABLE default")
    lines.append(" ".join(str(int(v)) for v in flat(np.asarray(beta, dtype=float))))
    path.write_text("\n".join(lines) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def write_summary(path, summary: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(summary), indent=2) + "\n")
    return path


def write_frames(path, frames) -> Path:
    """One row per frame: time, step, troubled count and conserved totals."""
    rows = []
    header = None
    for fr in frames:
        nt = len(fr.totals)
        if header is None:
            header = ["t", "step", "troubled"] + [f"total_{k}" for k in range(nt)]
        rows.append([fr.t, fr.step, int(np.count_nonzero(fr.beta))] + list(fr.totals))
    return write_csv(path, header or ["t", "step", "troubled"], rows)


def write_convergence(path, rows) -> Path:
    header = ["cells", "L1", "L2", "Linf", "order_L1", "order_L2", "order_Linf"]
    return write_csv(path, header, [[r[k] for k in header] for r in rows])
