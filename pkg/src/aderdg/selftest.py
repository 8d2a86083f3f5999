"""Fast in-process invariant checks, run by ``aderdg selftest``."""
from __future__ import annotations

import numpy as np

from .basis import assemble_operator_tables, gauss_legendre, spacetime_operators
from .detector import detect
from .dg import dg_corrector_step
from .euler import prim_to_cons
from .flux import rusanov_flux
from .grid import BoundarySpec, fill_ghosts, pad_cells
from .predictor import predict
from .scenarios import get_scenario
from .solver import Solver
from .transfer import cell_mean, project, reconstruct


def check_quadrature():
    worst = 0.0
    for n in range(1, 17):
        rule = gauss_legendre(n)
        for k in range(2 * n):
            worst = max(worst, abs(rule.integrate(lambda x: x**k) - 1.0 / (k + 1)))
    return worst <= 1e-13, f"max monomial error {worst:.2e}"


def check_transfer():
    rng = np.random.default_rng(1)
    worst = 0.0
    cons = 0.0
    for d in (1, 2):
        for N in range(6):
            T = assemble_operator_tables(N, None, d)
            x = rng.standard_normal((20,) + (N + 1,) * d)
            worst = max(worst, float(np.abs(reconstruct(project(x, T), T) - x).max()))
            v = rng.standard_normal((20,) + (T.Ns,) * d)
            mean_v = v.reshape(20, -1).mean(axis=1)
            cons = max(cons, float(np.abs(cell_mean(reconstruct(v, T), T) - mean_v).max()))
    return worst <= 1e-12 and cons <= 1e-12, f"R(P(x)) error {worst:.2e}, mean error {cons:.2e}"


def check_free_stream():
    worst = 0.0
    for d in (1, 2):
        for N in range(6):
            st = spacetime_operators(N)
            W = np.array([1.0, 0.3, -0.2, 1.0][: d + 1] + [1.0])
            Q = prim_to_cons(W)
            shape = (Q.size,) + (4,) * d + (N + 1,) * d
            u = np.broadcast_to(Q.reshape((-1,) + (1,) * (2 * d)), shape).copy()
            bc = BoundarySpec.uniform("periodic", d)
            ue = fill_ghosts(pad_cells(u, d, 1), bc, 1)
            h = (0.1,) * d
            q, _, _ = predict(ue, 1e-3, h, st)
            un, _ = dg_corrector_step(u, q, 1e-3, h, st)
            worst = max(worst, float(np.abs(un - u).max()))
    return worst <= 1e-12, f"max drift {worst:.2e}"


def check_first_order_equivalence():
    n, h, dt = 50, 1.0 / 50, 0.004
    x = (np.arange(n) + 0.5) * h
    W = np.where(x < 0.5, np.array([[1.0], [0.0], [1.0]]), np.array([[0.125], [0.0], [0.1]]))
    v = prim_to_cons(W)
    u = v[:, :, None].copy()
    st = spacetime_operators(0)
    bc = BoundarySpec.uniform("outflow", 1)
    for _ in range(10):
        ue = fill_ghosts(pad_cells(u, 1, 1), bc, 1)
        q, _, _ = predict(ue, dt, (h,), st)
        u, _ = dg_corrector_step(u, q, dt, (h,), st)
        ve = np.concatenate([v[:, :1], v, v[:, -1:]], axis=1)
        F = rusanov_flux(ve[:, :-1], ve[:, 1:], 0)
        v = v - dt / h * (F[:, 1:] - F[:, :-1])
    err = float(np.abs(u[..., 0] - v).max())
    return err <= 1e-13, f"max difference {err:.2e}"


def check_dmp_example():
    vmin = np.array([[0.125], [0.0], [2.5]])
    vmax = np.array([[1.0], [0.0], [2.5]])
    base = np.array([0.5, 0.0, 2.5])

    def flagged(rho):
        c = base.copy()
        c[0] = rho
        c[2] = 2.5 + 0.0 * rho
        return bool(detect(c.reshape(3, 1, 1), vmin, vmax, 1)[0])

    ok = (not flagged(1.00087)) and flagged(1.001) and not flagged(0.125 - 8.7e-4) and flagged(0.124)
    return ok, "delta = 8.75e-4 for extrema {0.125, 1.0}"


def check_conservation():
    scn = get_scenario("rp3")
    scn = type(scn)(scn.name, scn.lower, scn.upper, scn.t_final, scn.ic,
                    (("periodic", "periodic"), ("periodic", "periodic")), default_cells=(12, 12))
    s = Solver(scn, 2, force_fraction=0.1, seed=3)
    before = s.totals()
    s.run(max_steps=10)
    rel = float(np.max(np.abs(s.totals() - before) / np.maximum(np.abs(before), 1e-300)))
    return rel <= 1e-11, f"relative drift {rel:.2e} over 10 steps"


CHECKS = {
    "quadrature exactness": check_quadrature,
    "projection/reconstruction identity": check_transfer,
    "free-stream preservation": check_free_stream,
    "first-order FV equivalence": check_first_order_equivalence,
    "relaxed DMP example": check_dmp_example,
    "conservation with forced limiting": check_conservation,
}


def run_selftest(echo=print) -> bool:
    all_ok = True
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as exc:  # report and continue with the rest
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok &= ok
        echo(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return all_ok
