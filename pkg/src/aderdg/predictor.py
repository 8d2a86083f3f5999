"""Element-local space-time Galerkin predictor.

Arrays follow one layout throughout the package::

    u : (nu, *cells, n, ..., n)            d spatial node axes
    q : (nu, *cells, n, ..., n, n_t)       plus a trailing time-node axis

The predictor is purely cell-local, so ``cells`` may be any batch shape,
including empty for a single element.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import FlatOperators, SpaceTimeOperators, flat_operators, spacetime_operators
from .errors import PredictorFailure
from .euler import physical_fluxes


@dataclass
class SpaceTimePredictor:
    q: np.ndarray
    dt: float
    dx: tuple
    iterations: int


def _sweep(q, rhs, dt, dx, ops: FlatOperators, gamma):
    d = len(dx)
    shape = q.shape
    S = int(np.prod(shape[-(d + 1):]))
    fluxes = physical_fluxes(q, gamma)
    div = None
    for ax in range(d):
        term = fluxes[ax].reshape(-1, S) @ (ops.sweep[ax].T * (dt / dx[ax]))
        div = term if div is None else div + term
    return rhs - div.reshape(shape)


def predict(
    u: np.ndarray,
    dt: float,
    dx,
    st: SpaceTimeOperators,
    gamma: float = 1.4,
    tol: float = 1e-12,
    max_iter: int | None = None,
):
    """Picard iteration of the local space-time weak form for a batch of cells.

    Stops when the max-norm update over all finite cells drops below
    ``tol * (1 + max|q|)`` or after ``max_iter`` sweeps (default 2(N+1)).

    Returns
    -------
    q : ndarray
        Space-time nodal coefficients.
    iterations : int
    failed : ndarray of bool
        Cells (batch shape) whose coefficients are not finite.
    """
    dx = tuple(float(h) for h in dx)
    d = len(dx)
    if max_iter is None:
        max_iter = 2 * st.size
    ops = flat_operators(st.basis.degree, d)
    q = np.repeat(u[..., None], st.size, axis=-1)
    rhs = q.copy()
    iterations = 0
    with np.errstate(all="ignore"):
        for iterations in range(1, max_iter + 1):
            q_new = _sweep(q, rhs, dt, dx, ops, gamma)
            if tol > 0.0:
                change = float(np.max(np.abs(q_new - q)))
                scale = float(np.max(np.abs(q_new)))
                if not (np.isfinite(change) and np.isfinite(scale)):
                    finite = np.isfinite(q_new) & np.isfinite(q)
                    if not finite.any():
                        q = q_new
                        break
                    change = float(np.max(np.abs(np.where(finite, q_new - q, 0.0))))
                    scale = float(np.max(np.abs(np.where(finite, q_new, 0.0))))
                q = q_new
                if change <= tol * (1.0 + scale):
                    break
            else:
                q = q_new
    node_axes = tuple(range(q.ndim - 1 - d, q.ndim))
    failed = ~np.all(np.isfinite(q), axis=(0,) + node_axes)
    return q, iterations, failed


def fixed_point_residual(q, u, dt, dx, st, gamma=1.4) -> float:
    """Relative change produced by one more sweep; zero at the exact fixed point."""
    dx = tuple(float(h) for h in dx)
    rhs = np.repeat(u[..., None], st.size, axis=-1)
    q_next = _sweep(q, rhs, dt, dx, flat_operators(st.basis.degree, len(dx)), gamma)
    return float(np.max(np.abs(q_next - q)) / (1.0 + np.max(np.abs(q))))


def local_predictor(u_cell, dt: float, dx, N: int, gamma: float = 1.4, tol: float = 1e-12,
                    max_iter: int | None = None) -> SpaceTimePredictor:
    """Predictor for a single element (or a batch), raising on non-finite output."""
    st = spacetime_operators(N)
    u_cell = np.asarray(u_cell, dtype=float)
    if dt <= 0.0:
        raise ValueError("time step must be positive")
    q, iters, failed = predict(u_cell, dt, dx, st, gamma, tol=tol, max_iter=max_iter)
    if np.any(failed):
        raise PredictorFailure(np.argwhere(np.atleast_1d(failed)).tolist())
    return SpaceTimePredictor(q=q, dt=dt, dx=tuple(dx), iterations=iters)


def evaluate_in_time(q: np.ndarray, tau, st: SpaceTimeOperators) -> np.ndarray:
    """Space nodal values of the predictor at reference times ``tau``."""
    L = st.basis(np.atleast_1d(tau))
    return np.moveaxis(q @ L.T, -1, 0)
