"""Time loop: ADER-DG candidate, a posteriori detection and subcell recomputation."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .basis import assemble_operator_tables, build_nodal_basis, gauss_legendre, lagrange_matrix
from .detector import DMP_EPS, DMP_FLOOR, LimiterState, detect, detect_initial_condition, \
    gather_neighborhood_extrema
from .dg import compute_time_step, correct_unlimited_neighbors, dg_corrector_step, override_faces
from .errors import ConfigError, NumericalFailure
from .euler import admissible, cons_to_prim, prim_to_cons
from .flux import get_flux, rusanov_flux
from .grid import fill_ghosts, pad_cells
from .predictor import predict
from .scenarios import Scenario
from .transfer import cell_mean, project, reconstruct
from .weno import GHOST, WenoParams, gather_windows, subcell_fv_step


@dataclass
class Frame:
    t: float
    step: int
    means: np.ndarray
    beta: np.ndarray
    totals: np.ndarray


@dataclass
class Diagnostics:
    troubled: list = field(default_factory=list)
    dt: list = field(default_factory=list)
    predictor_iterations: int = 0
    fv_fallbacks: int = 0
    pad_failures: int = 0
    min_subcell_density: float = math.inf
    min_subcell_pressure: float = math.inf
    max_subcell_density: float = -math.inf
    flux_stats: dict = field(default_factory=dict)


def commit_troubled_cell(v_new: np.ndarray, tables):
    """DG data ``R(v)`` of recomputed cells; the averages themselves are persisted by the caller."""
    return reconstruct(v_new, tables)


class Solver:
    """ADER-DG with a posteriori subcell finite-volume limiting on one scenario.

    ``force_fraction`` marks that share of the cells troubled on every step
    in addition to the detector's choice (used to stress the flux correction).
    """

    def __init__(self, scenario: Scenario, N: int, shape=None, cfl: float = 0.9, flux: str | None = None,
                 Ns: int | None = None, dmp_eps: float = DMP_EPS, dmp_floor: float = DMP_FLOOR,
                 weno: WenoParams = WenoParams(), ic_mode: str = "interpolate", limiter: bool = True,
                 force_fraction: float = 0.0, seed: int = 0, predictor_tol: float = 1e-12,
                 t_final: float | None = None):
        if not 0 <= int(N) <= 9:
            raise ConfigError(f"degree N must be in 0..9, got {N}")
        if not 0.0 < cfl <= 1.0:
            raise ConfigError(f"CFL safety factor must be in (0, 1], got {cfl}")
        if ic_mode not in ("interpolate", "l2"):
            raise ConfigError(f"unknown initial projection {ic_mode!r}")
        if not 0.0 <= force_fraction <= 1.0:
            raise ConfigError("forced limiting fraction must lie in [0, 1]")
        self.scenario = scenario
        self.N = int(N)
        self.grid = scenario.grid(shape)
        self.d = self.grid.d
        self.gamma = scenario.gamma
        self.tables = assemble_operator_tables(self.N, Ns, self.d)
        self.Ns = self.tables.Ns
        self.st = self.tables.st
        self.h = self.grid.h
        self.hs = tuple(h / self.Ns for h in self.h)
        self.cfl = float(cfl)
        flux = flux or scenario.flux
        self.flux_name = flux
        self.flux = get_flux(flux)
        self.dmp_eps = dmp_eps
        self.dmp_floor = dmp_floor
        self.weno = weno
        self.ic_mode = ic_mode
        self.limiter = limiter
        self.force_fraction = force_fraction
        self.rng = np.random.default_rng(seed)
        self.predictor_tol = predictor_tol
        self.t_final = scenario.t_final if t_final is None else float(t_final)
        if self.t_final < 0.0:
            raise ConfigError("final time must be non-negative")
        self.bc = scenario.boundary()
        self.sub_ghost = max(1, math.ceil(GHOST / self.Ns))
        self.t = 0.0
        self.step_count = 0
        self.diag = Diagnostics()
        self.frames: list = []
        self._dirichlet_cache: dict = {}
        self.initialize()

    # -- sampling helpers ----------------------------------------------------------------

    def _sample_cons(self, xi, ghosts, t=None, exact_bc=False):
        coords = self.grid.coordinates(xi, ghosts=ghosts)
        y = coords[1] if self.d > 1 else None
        if exact_bc:
            W = self.bc.state(coords[0], y, t)
        else:
            W = self.scenario.ic(coords[0], y)
        return prim_to_cons(W, self.gamma)

    def _exact_subcell_means(self, ghosts):
        """Subcell means of the initial data by Gauss quadrature inside every subcell."""
        rule = gauss_legendre(self.N + 2)
        m = len(rule.nodes)
        xi = ((np.arange(self.Ns)[:, None] + rule.nodes[None, :]) / self.Ns).ravel()
        Q = self._sample_cons(xi, ghosts)
        lead = Q.shape[: 1 + self.d]
        Q = Q.reshape(lead + sum(((self.Ns, m) for _ in range(self.d)), ()))
        for k in reversed(range(self.d)):
            Q = np.moveaxis(Q, 1 + self.d + 2 * k + 1, -1) @ rule.weights
        return Q

    def _dirichlet(self, kind, width):
        """Boundary data for ghost filling on an extended grid (nodal or subcell)."""
        if not self.bc.needs_dirichlet:
            return None
        key = (kind, width)
        timed = self.scenario.time_dependent_bc
        if timed or key not in self._dirichlet_cache:
            nodes = self.tables.basis.nodes
            coords = self.grid.coordinates(nodes, ghosts=width)
            y = coords[1] if self.d > 1 else None
            Q = prim_to_cons(self.bc.state(coords[0], y, self.t), self.gamma)
            if kind == "sub":
                Q = project(Q, self.tables)
            if timed:
                return Q
            self._dirichlet_cache[key] = Q
        return self._dirichlet_cache[key]

    # -- initial data --------------------------------------------------------------------

    def initialize(self):
        nodes = self.tables.basis.nodes
        if self.ic_mode == "interpolate":
            u = self._sample_cons(nodes, 0)
        else:
            rule = gauss_legendre(self.N + 3)
            Q = self._sample_cons(rule.nodes, 0)
            L = lagrange_matrix(nodes, rule.nodes)  # (m, n)
            A = (L * rule.weights[:, None]).T / self.tables.basis.weights[:, None]
            u = Q
            for k in range(self.d):
                u = np.moveaxis(np.moveaxis(u, 1 + self.d + k, -1) @ A.T, -1, 1 + self.d + k)
        gw = self.sub_ghost
        exact = self._exact_subcell_means(gw)
        if self.bc.needs_dirichlet:
            fill_ghosts(exact, self.bc, gw, dirichlet_source=exact.copy())
        else:
            fill_ghosts(exact, self.bc, gw)
        cells = self.grid.shape
        beta = np.zeros(cells, dtype=bool)
        persisted = np.zeros((self.d + 2,) + cells + (self.Ns,) * self.d)
        if self.limiter:
            beta = detect_initial_condition(project(u, self.tables), exact, self.d, gw, self.gamma,
                                            self.dmp_eps, self.dmp_floor)
            if np.any(beta):
                inner = exact[(slice(None),) + (slice(gw, -gw),) * self.d]
                persisted[:, beta] = inner[:, beta]
                u[:, beta] = reconstruct(inner[:, beta], self.tables)
        self.u = u
        self.state = LimiterState(beta=beta, persisted=persisted)
        self.initial_totals = self.totals()
        self.diag.troubled.append(int(np.count_nonzero(beta)))
        self._track_subcells(self.subcell_view())

    # -- views ------------------------------------------------------------------------------

    def subcell_view(self) -> np.ndarray:
        """Subcell averages of the current solution: persisted data in troubled cells, P(u) elsewhere."""
        view = project(self.u, self.tables)
        b = self.state.beta
        if np.any(b):
            view[:, b] = self.state.persisted[:, b]
        return view

    def totals(self) -> np.ndarray:
        return cell_mean(self.u, self.tables).reshape(self.d + 2, -1).sum(axis=1) * self.grid.cell_volume

    def cell_means(self) -> np.ndarray:
        return cell_mean(self.u, self.tables)

    def _track_subcells(self, view):
        with np.errstate(all="ignore"):
            W = cons_to_prim(view, self.gamma)
        rho, p = W[0], W[-1]
        self.diag.min_subcell_density = min(self.diag.min_subcell_density, float(np.nanmin(rho)))
        self.diag.max_subcell_density = max(self.diag.max_subcell_density, float(np.nanmax(rho)))
        self.diag.min_subcell_pressure = min(self.diag.min_subcell_pressure, float(np.nanmin(p)))
        bad = ~np.all(admissible(view, self.gamma), axis=tuple(range(-self.d, 0)))
        return bad

    # -- time stepping -------------------------------------------------------------------

    def time_step(self) -> float:
        b = self.state.beta
        states = [self.u[:, ~b], self.state.persisted[:, b]]
        dt = compute_time_step(states, self.h, self.N, self.gamma, self.cfl)
        return min(dt, self.t_final - self.t)

    def step(self, dt: float | None = None):
        d, gamma, st = self.d, self.gamma, self.st
        if dt is None:
            dt = self.time_step()
        u = self.u
        beta_n = self.state.beta
        stats = self.diag.flux_stats

        u_ext = fill_ghosts(pad_cells(u, d, 1), self.bc, 1, self._dirichlet("nodal", 1))
        q, iters, _ = predict(u_ext, dt, self.h, st, gamma, tol=self.predictor_tol)
        self.diag.predictor_iterations = max(self.diag.predictor_iterations, iters)
        u_star, faces = dg_corrector_step(u, q, dt, self.h, st, 1, self.flux, gamma, stats)
        node_axes = tuple(range(1 + d, 1 + 2 * d))
        nonfinite = ~np.all(np.isfinite(u_star), axis=(0,) + node_axes)

        gw = self.sub_ghost
        view_n = pad_cells(self.subcell_view(), d, gw)
        fill_ghosts(view_n, self.bc, gw, self._dirichlet("sub", gw))

        if self.limiter:
            vmin, vmax = gather_neighborhood_extrema(view_n, d, gw)
            with np.errstate(all="ignore"):
                cand = project(u_star, self.tables)
            beta = detect(cand, vmin, vmax, d, gamma, self.dmp_eps, self.dmp_floor, nonfinite)
            if self.force_fraction > 0.0:
                n = self.grid.n_cells
                pick = self.rng.choice(n, size=int(round(self.force_fraction * n)), replace=False)
                forced = np.zeros(n, dtype=bool)
                forced[pick] = True
                beta = beta | forced.reshape(beta.shape)
            self.state.vmin, self.state.vmax = vmin, vmax
        else:
            beta = np.zeros_like(beta_n)

        u_new = u_star
        persisted = self.state.persisted
        if np.any(beta):
            idx = np.nonzero(beta)
            windows = gather_windows(view_n, idx, self.Ns, gw, d)
            res = subcell_fv_step(windows, dt, self.hs, gamma, self.weno, flux=rusanov_flux)
            self.diag.fv_fallbacks += res.fallbacks
            if d == 1:
                left, right = res.left, res.right
            else:
                S = self.tables.subface
                left = [rec @ S.T for rec in res.left]
                right = [rec @ S.T for rec in res.right]
            faces_new = override_faces(faces, beta, left, right, self.bc)
            u_new = correct_unlimited_neighbors(u_star, beta, faces, faces_new, dt, self.h, st)
            u_new[:, beta] = commit_troubled_cell(res.v, self.tables)
            persisted = persisted.copy()
            persisted[:, beta] = res.v

        if not np.all(np.isfinite(u_new)):
            bad = np.argwhere(~np.all(np.isfinite(u_new), axis=(0,) + node_axes))
            raise NumericalFailure(
                f"non-finite solution after limiting at t={self.t:.6g} in cells {bad[:5].tolist()}",
                dump={"u": u_new, "beta": beta, "t": self.t, "dt": dt})

        self.u = u_new
        self.state.beta_prev = beta_n
        self.state.beta = beta
        self.state.persisted = persisted
        self.t = self.t_final if self.t + dt >= self.t_final - 1e-14 * max(1.0, self.t_final) else self.t + dt
        self.step_count += 1
        self.diag.dt.append(dt)
        self.diag.troubled.append(int(np.count_nonzero(beta)))
        bad = self._track_subcells(self.subcell_view())
        self.diag.pad_failures += int(np.count_nonzero(bad))
        return dt

    def run(self, frame_every: int = 0, callback=None, max_steps: int | None = None):
        start = time.perf_counter()
        if frame_every:
            self.frames.append(self.frame())
        while self.t < self.t_final:
            if max_steps is not None and self.step_count >= max_steps:
                break
            self.step()
            if frame_every and self.step_count % frame_every == 0:
                self.frames.append(self.frame())
            if callback is not None:
                callback(self)
        if frame_every and (not self.frames or self.frames[-1].step != self.step_count):
            self.frames.append(self.frame())
        self.wall_time = time.perf_counter() - start
        return self

    def frame(self) -> Frame:
        return Frame(t=self.t, step=self.step_count, means=self.cell_means(),
                     beta=self.state.beta.copy(), totals=self.totals())

    # -- evaluation ------------------------------------------------------------------------------

    def values_at(self, xi) -> np.ndarray:
        """Conserved values at reference points ``xi`` of every cell (tensor layout).

        Troubled cells report the average of the subcell containing each point.
        """
        xi = np.asarray(xi, dtype=float)
        L = lagrange_matrix(self.tables.basis.nodes, xi)
        d = self.d
        vals = self.u
        for k in range(d):
            vals = np.moveaxis(np.moveaxis(vals, 1 + d + k, -1) @ L.T, -1, 1 + d + k)
        b = self.state.beta
        if np.any(b):
            j = np.minimum((xi * self.Ns).astype(int), self.Ns - 1)
            v = self.state.persisted[:, b]
            if d == 1:
                vals[:, b] = v[:, :, j]
            else:
                vals[:, b] = v[:, :, j[:, None], j[None, :]]
        return vals

    def error_norms(self, exact=None, variable: int = 0, n_points: int | None = None):
        """L1, L2, max-norm errors against the exact solution at the current time."""
        exact = exact or self.scenario.exact
        if exact is None:
            raise ConfigError(f"scenario {self.scenario.name!r} has no exact solution")
        rule = gauss_legendre(n_points or self.N + 2)
        vals = self.values_at(rule.nodes)[variable]
        coords = self.grid.coordinates(rule.nodes)
        W = exact(coords[0], coords[1] if self.d > 1 else None, self.t)
        ref = W[0] if variable == 0 else prim_to_cons(W, self.gamma)[variable]
        err = np.abs(vals - ref)
        wq = rule.weights if self.d == 1 else np.outer(rule.weights, rule.weights)
        vol = self.grid.cell_volume
        return (float(np.sum(err * wq) * vol), float(np.sqrt(np.sum(err**2 * wq) * vol)), float(err.max()))

    def line_sample(self, n_points: int = 200, y: float | None = None):
        """Primitive values at equidistant points along x (the centre row in 2D)."""
        g = self.grid
        x = np.linspace(g.lower[0], g.upper[0], n_points + 2)[1:-1]
        i = np.minimum(((x - g.lower[0]) / g.h[0]).astype(int), g.shape[0] - 1)
        xi = (x - g.lower[0]) / g.h[0] - i
        basis = build_nodal_basis(self.N)
        Lx = lagrange_matrix(basis.nodes, xi)  # (P, n)
        jx = np.minimum((xi * self.Ns).astype(int), self.Ns - 1)
        if self.d == 1:
            poly = np.einsum("vpn,pn->vp", self.u[:, i], Lx)
            sub = self.state.persisted[:, i, jx]
            troubled = self.state.beta[i]
        else:
            yc = 0.5 * (g.lower[1] + g.upper[1]) if y is None else y
            jcell = min(int((yc - g.lower[1]) / g.h[1]), g.shape[1] - 1)
            eta = (yc - g.lower[1]) / g.h[1] - jcell
            Ly = lagrange_matrix(basis.nodes, [eta])[0]
            poly = np.einsum("vpnm,pn,m->vp", self.u[:, i, jcell], Lx, Ly)
            jy = min(int(eta * self.Ns), self.Ns - 1)
            sub = self.state.persisted[:, i, jcell][:, np.arange(len(x)), jx, jy]
            troubled = self.state.beta[i, jcell]
        Q = np.where(troubled[None], sub, poly)
        return x, cons_to_prim(Q, self.gamma)

    def subcell_profile(self):
        """Global 1D subcell averages and subcell centres (1D runs, or the centre row in 2D)."""
        view = self.subcell_view()
        g = self.grid
        if self.d == 2:
            j = g.shape[1] // 2
            view = view[:, :, j].mean(axis=-1)
        flat = view.reshape(self.d + 2, -1)
        xc = g.lower[0] + (np.arange(flat.shape[1]) + 0.5) * self.hs[0]
        return xc, flat

    def summary(self) -> dict:
        tr = self.diag.troubled
        n = self.grid.n_cells
        return {
            "scenario": self.scenario.name,
            "N": self.N,
            "Ns": self.Ns,
            "cells": list(self.grid.shape),
            "t": self.t,
            "t_final": self.t_final,
            "steps": self.step_count,
            "wall_time": getattr(self, "wall_time", None),
            "troubled_per_step": tr,
            "max_troubled": max(tr) if tr else 0,
            "final_troubled_fraction": (tr[-1] / n) if tr else 0.0,
            "fv_fallbacks": self.diag.fv_fallbacks,
            "pad_failures": self.diag.pad_failures,
            "min_subcell_density": self.diag.min_subcell_density,
            "max_subcell_density": self.diag.max_subcell_density,
            "min_subcell_pressure": self.diag.min_subcell_pressure,
            "max_predictor_iterations": self.diag.predictor_iterations,
            "flux": self.flux_name,
            "flux_stats": dict(self.diag.flux_stats),
            "cfl": self.cfl,
            "dmp_eps": self.dmp_eps,
            "dmp_floor": self.dmp_floor,
            "operator_digest": self.tables.digest,
            "initial_totals": self.initial_totals.tolist(),
            "final_totals": self.totals().tolist(),
        }
