"""Run orchestration from a :class:`RunConfig`: solve, then write tables and figures."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io, plotting
from .config import RunConfig, dump_config
from .scenarios import get_scenario
from .solver import Solver


def build_solver(cfg: RunConfig) -> Solver:
    scn = get_scenario(cfg.scenario, ny=cfg.ny if cfg.scenario in ("sod", "lax") else None)
    shape = list(scn.default_cells)
    if cfg.nx is not None:
        shape[0] = cfg.nx
    if scn.d > 1 and cfg.ny is not None:
        shape[1] = cfg.ny
    elif scn.d > 1 and cfg.nx is not None:
        # keep the cells square
        aspect = (scn.upper[1] - scn.lower[1]) / (scn.upper[0] - scn.lower[0])
        shape[1] = max(1, round(cfg.nx * aspect))
    return Solver(scn, cfg.N, tuple(shape), cfl=cfg.cfl, flux=cfg.flux, Ns=cfg.Ns, dmp_eps=cfg.dmp_eps,
                  dmp_floor=cfg.dmp_floor, weno=cfg.weno, ic_mode=cfg.ic_mode, limiter=cfg.limiter,
                  force_fraction=cfg.force_fraction, seed=cfg.seed, t_final=cfg.t_final)


@dataclass
class RunResult:
    solver: Solver
    summary: dict
    files: list


def run(cfg: RunConfig, write: bool = True) -> RunResult:
    """Run one configuration to its final time and write its outputs to ``cfg.out``."""
    solver = build_solver(cfg)
    solver.run(frame_every=cfg.frame_every)
    summary = solver.summary()
    summary["config"] = cfg.as_dict()
    if solver.scenario.exact is not None:
        l1, l2, linf = solver.error_norms()
        summary["density_error"] = {"L1": l1, "L2": l2, "Linf": linf}
    files = write_outputs(solver, cfg, summary) if write else []
    return RunResult(solver, summary, files)


def write_outputs(solver: Solver, cfg: RunConfig, summary: dict) -> list:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    files = [out / "config.txt"]
    (out / "config.txt").write_text(dump_config(cfg))
    files.append(io.write_summary(out / "summary.json", summary))
    x, W = solver.line_sample(cfg.line_points)
    exact = None
    scn = solver.scenario
    if scn.exact is not None:
        y = np.full_like(x, 0.5 * (scn.lower[1] + scn.upper[1])) if solver.d > 1 else None
        exact = scn.exact(x, y, solver.t)
    files.append(io.write_line(out / "line.csv", x, W, exact))
    files.append(plotting.plot_line(out / "line.png", x, W, exact, title=f"{scn.name}, t={solver.t:.4g}"))
    means = solver.cell_means()
    beta = solver.state.beta
    files.append(io.write_beta(out / "beta.csv", beta))
    files.append(io.write_vtk(out / "field.vtk", solver.grid, means, beta, solver.gamma))
    files.append(plotting.plot_troubled_history(out / "troubled.png", solver.diag.troubled, solver.grid.n_cells))
    if solver.d > 1:
        files.append(plotting.plot_field(out / "field.png", solver.grid, means, beta, solver.gamma,
                                         title=f"{scn.name} density, t={solver.t:.4g}"))
    if solver.frames:
        files.append(io.write_frames(out / "frames.csv", solver.frames))
    return files


def observed_orders(rows, key):
    """log(e1/e2)/log(h1/h2) between successive rows; ``None`` when undefined."""
    orders = [None]
    for a, b in zip(rows[:-1], rows[1:]):
        ea, eb = a[key], b[key]
        ratio = b["cells"] / a["cells"]
        if ratio == 1 or ea <= 0 or eb <= 0:
            orders.append(None)
        else:
            orders.append(math.log(ea / eb) / math.log(ratio))
    return orders


def convergence_study(N: int, grids, scenario: str = "vortex", cfl: float = 0.9, flux: str | None = None,
                      out=None, progress=None) -> list:
    """Errors and observed orders for a sequence of square grids of a smooth scenario."""
    rows = []
    for n in grids:
        cfg = RunConfig(scenario=scenario, N=N, nx=n, ny=n, cfl=cfl, flux=flux).validate()
        solver = build_solver(cfg)
        solver.run()
        l1, l2, linf = solver.error_norms()
        rows.append({"cells": n, "L1": l1, "L2": l2, "Linf": linf,
                     "troubled_max": max(solver.diag.troubled), "steps": solver.step_count})
        if progress is not None:
            progress(rows[-1])
    for key in ("L1", "L2", "Linf"):
        for row, o in zip(rows, observed_orders(rows, key)):
            row[f"order_{key}"] = o
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        io.write_convergence(out / "convergence.csv", rows)
        plotting.plot_convergence(out / "convergence.png", rows, N)
    return rows
