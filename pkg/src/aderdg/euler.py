"""Compressible Euler equations for a perfect gas.

States are arrays whose first axis holds the conserved components
(rho, rho*u[, rho*v], rho*E); the trailing axes are arbitrary. The spatial
dimension is inferred from the number of components (nu = d + 2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InadmissibleStateError


@dataclass(frozen=True)
class GasModel:
    gamma: float = 1.4

    def __post_init__(self):
        if not np.isfinite(self.gamma) or self.gamma <= 1.0:
            raise ConfigError(f"adiabatic index must exceed 1, got {self.gamma!r}")


def n_dims(Q) -> int:
    return np.shape(Q)[0] - 2


def _pressure(Q, gamma):
    kinetic = Q[1] * Q[1]
    for a in range(1, n_dims(Q)):
        kinetic = kinetic + Q[1 + a] * Q[1 + a]
    return (gamma - 1.0) * (Q[-1] - 0.5 * kinetic / Q[0])


def pressure(Q, gamma: float = 1.4):
    """p = (gamma - 1) (rho E - |rho v|^2 / (2 rho)).

    Raises InadmissibleStateError for non-positive density; callers on the
    detection path use :func:`admissible` instead, which never raises.
    """
    Q = np.asarray(Q, dtype=float)
    if np.any(~(Q[0] > 0.0)):
        raise InadmissibleStateError("non-positive or non-finite density")
    return _pressure(Q, gamma)


def prim_to_cons(W, gamma: float = 1.4) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    d = n_dims(W)
    rho, p = W[0], W[-1]
    Q = np.empty_like(W)
    Q[0] = rho
    kinetic = np.zeros_like(rho)
    for a in range(d):
        Q[1 + a] = rho * W[1 + a]
        kinetic = kinetic + W[1 + a] * W[1 + a]
    Q[-1] = p / (gamma - 1.0) + 0.5 * rho * kinetic
    return Q


def cons_to_prim(Q, gamma: float = 1.4) -> np.ndarray:
    Q = np.asarray(Q, dtype=float)
    W = np.empty_like(Q)
    W[0] = Q[0]
    for a in range(n_dims(Q)):
        W[1 + a] = Q[1 + a] / Q[0]
    W[-1] = _pressure(Q, gamma)
    return W


def physical_flux(Q, axis: int, gamma: float = 1.4) -> np.ndarray:
    """Analytic Euler flux in the direction of ``axis``."""
    Q = np.asarray(Q, dtype=float)
    d = n_dims(Q)
    un = Q[1 + axis] / Q[0]
    p = _pressure(Q, gamma)
    F = np.empty_like(Q)
    F[0] = Q[1 + axis]
    for a in range(d):
        F[1 + a] = Q[1 + a] * un
    F[1 + axis] = F[1 + axis] + p
    F[-1] = un * (Q[-1] + p)
    return F


def physical_fluxes(Q, gamma: float = 1.4) -> list:
    """Fluxes along every axis, sharing the pressure evaluation."""
    Q = np.asarray(Q, dtype=float)
    d = n_dims(Q)
    p = _pressure(Q, gamma)
    inv_rho = 1.0 / Q[0]
    out = []
    for axis in range(d):
        un = Q[1 + axis] * inv_rho
        F = np.empty_like(Q)
        F[0] = Q[1 + axis]
        for a in range(d):
            F[1 + a] = Q[1 + a] * un
        F[1 + axis] += p
        F[-1] = un * (Q[-1] + p)
        out.append(F)
    return out


def _signal_speed(Q, axis, gamma):
    p = _pressure(Q, gamma)
    return np.abs(Q[1 + axis] / Q[0]) + np.sqrt(gamma * p / Q[0])


def max_signal_speed(Q, axis: int, gamma: float = 1.4):
    """|u_n| + c, raising for inadmissible input."""
    Q = np.asarray(Q, dtype=float)
    if not np.all(admissible(Q, gamma)):
        raise InadmissibleStateError("signal speed requested for an inadmissible state")
    return _signal_speed(Q, axis, gamma)


def admissible(Q, gamma: float = 1.4):
    """rho > 0, p > 0 and all components finite; never raises."""
    Q = np.asarray(Q, dtype=float)
    with np.errstate(all="ignore"):
        finite = np.all(np.isfinite(Q), axis=0)
        rho_ok = Q[0] > 0.0
        p = _pressure(Q, gamma)
        out = finite & rho_ok & (p > 0.0) & np.isfinite(p)
    if out.ndim == 0:
        return bool(out)
    return out


def mirror(Q, axis: int) -> np.ndarray:
    """Flip the sign of the momentum component along ``axis``."""
    out = np.array(Q, dtype=float, copy=True)
    out[1 + axis] = -out[1 + axis]
    return out


def swap_xy(Q) -> np.ndarray:
    """Exchange the two momentum components of a 2D state."""
    Q = np.asarray(Q)
    return Q[[0, 2, 1, 3]]
