"""Projection of DG polynomials onto subcell averages and the constrained reconstruction back."""
from __future__ import annotations

import numpy as np

from .basis import OperatorTables, apply_along


def project(u: np.ndarray, tables: OperatorTables) -> np.ndarray:
    """Subcell averages of nodal DG data; the last ``d`` axes are node axes."""
    d = tables.d
    out = u
    for k in range(d):
        out = apply_along(tables.P1, out, u.ndim - d + k)
    return out


def reconstruct(v: np.ndarray, tables: OperatorTables) -> np.ndarray:
    """Nodal DG data whose subcell averages best fit ``v`` in least squares with
    the cell mean preserved exactly."""
    d, n = tables.d, tables.N + 1
    lead = v.shape[: v.ndim - d]
    flat = v.reshape(lead + (tables.Ns**d,))
    return (flat @ tables.R.T).reshape(lead + (n,) * d)


def cell_mean(u: np.ndarray, tables: OperatorTables) -> np.ndarray:
    d = tables.d
    w = tables.basis.weights
    out = u
    for _ in range(d):
        out = out @ w
    return out


def subcell_mean(v: np.ndarray, d: int) -> np.ndarray:
    return v.mean(axis=tuple(range(v.ndim - d, v.ndim)))
