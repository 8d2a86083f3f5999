"""Exact solution of the one-dimensional Riemann problem for an ideal gas."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleStateError


@dataclass(frozen=True)
class StarState:
    p: float
    u: float
    rho_left: float
    rho_right: float
    iterations: int


def _wave_function(p, rho, pk, ck, gamma):
    """Velocity jump across a rarefaction or shock connecting pk to p, and its derivative."""
    if p > pk:
        A = 2.0 / ((gamma + 1.0) * rho)
        B = (gamma - 1.0) / (gamma + 1.0) * pk
        s = np.sqrt(A / (p + B))
        f = (p - pk) * s
        df = s * (1.0 - 0.5 * (p - pk) / (p + B))
    else:
        r = p / pk
        f = 2.0 * ck / (gamma - 1.0) * (r ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)
        df = r ** (-(gamma + 1.0) / (2.0 * gamma)) / (rho * ck)
    return f, df


def star_state(left, right, gamma: float = 1.4, tol: float = 1e-12, max_iter: int = 100) -> StarState:
    """Pressure and velocity between the nonlinear waves from primitive (rho, u, p) states."""
    rl, ul, pl = (float(x) for x in left)
    rr, ur, pr = (float(x) for x in right)
    if min(rl, rr, pl, pr) <= 0.0:
        raise InadmissibleStateError("Riemann data needs positive density and pressure")
    cl = np.sqrt(gamma * pl / rl)
    cr = np.sqrt(gamma * pr / rr)
    if 2.0 * (cl + cr) / (gamma - 1.0) <= ur - ul:
        raise InadmissibleStateError("Riemann data generates vacuum")
    # two-rarefaction guess, good for most data and never negative
    z = (gamma - 1.0) / (2.0 * gamma)
    p = ((cl + cr - 0.5 * (gamma - 1.0) * (ur - ul)) / (cl / pl**z + cr / pr**z)) ** (1.0 / z)
    p = max(p, 1e-12)
    it = 0
    for it in range(1, max_iter + 1):
        fl, dfl = _wave_function(p, rl, pl, cl, gamma)
        fr, dfr = _wave_function(p, rr, pr, cr, gamma)
        p_new = p - (fl + fr + ur - ul) / (dfl + dfr)
        if p_new <= 0.0:
            p_new = 0.5 * p
        change = 2.0 * abs(p_new - p) / (p_new + p)
        p = p_new
        if change < tol:
            break
    fl, _ = _wave_function(p, rl, pl, cl, gamma)
    fr, _ = _wave_function(p, rr, pr, cr, gamma)
    u = 0.5 * (ul + ur) + 0.5 * (fr - fl)
    g1 = (gamma - 1.0) / (gamma + 1.0)
    if p > pl:
        rho_l = rl * (p / pl + g1) / (g1 * p / pl + 1.0)
    else:
        rho_l = rl * (p / pl) ** (1.0 / gamma)
    if p > pr:
        rho_r = rr * (p / pr + g1) / (g1 * p / pr + 1.0)
    else:
        rho_r = rr * (p / pr) ** (1.0 / gamma)
    return StarState(p=p, u=u, rho_left=rho_l, rho_right=rho_r, iterations=it)


def sample(left, right, xi, gamma: float = 1.4, star: StarState | None = None) -> np.ndarray:
    """Primitive solution (rho, u, p) at similarity coordinates ``xi = x / t``.

    Returns an array of shape (3, *xi.shape).
    """
    rl, ul, pl = (float(x) for x in left)
    rr, ur, pr = (float(x) for x in right)
    s = star or star_state(left, right, gamma)
    xi = np.asarray(xi, dtype=float)
    cl = np.sqrt(gamma * pl / rl)
    cr = np.sqrt(gamma * pr / rr)
    out = np.empty((3,) + xi.shape)

    def fill(mask, rho, u, p):
        out[0][mask] = rho[mask] if np.ndim(rho) else rho
        out[1][mask] = u[mask] if np.ndim(u) else u
        out[2][mask] = p[mask] if np.ndim(p) else p

    left_side = xi <= s.u
    # left wave
    if s.p > pl:
        sl = ul - cl * np.sqrt((gamma + 1.0) / (2.0 * gamma) * s.p / pl + (gamma - 1.0) / (2.0 * gamma))
        fill(left_side & (xi <= sl), rl, ul, pl)
        fill(left_side & (xi > sl), s.rho_left, s.u, s.p)
    else:
        c_star = cl * (s.p / pl) ** ((gamma - 1.0) / (2.0 * gamma))
        head, tail = ul - cl, s.u - c_star
        fill(left_side & (xi <= head), rl, ul, pl)
        fan = left_side & (xi > head) & (xi < tail)
        xf = np.clip(xi, head, tail)  # keep the fan formulas in range off the fan
        c = 2.0 / (gamma + 1.0) * (cl + 0.5 * (gamma - 1.0) * (ul - xf))
        fill(fan, rl * (c / cl) ** (2.0 / (gamma - 1.0)), 2.0 / (gamma + 1.0) * (cl + 0.5 * (gamma - 1.0) * ul + xf),
             pl * (c / cl) ** (2.0 * gamma / (gamma - 1.0)))
        fill(left_side & (xi >= tail), s.rho_left, s.u, s.p)
    right_side = ~left_side
    if s.p > pr:
        sr = ur + cr * np.sqrt((gamma + 1.0) / (2.0 * gamma) * s.p / pr + (gamma - 1.0) / (2.0 * gamma))
        fill(right_side & (xi >= sr), rr, ur, pr)
        fill(right_side & (xi < sr), s.rho_right, s.u, s.p)
    else:
        c_star = cr * (s.p / pr) ** ((gamma - 1.0) / (2.0 * gamma))
        head, tail = ur + cr, s.u + c_star
        fill(right_side & (xi >= head), rr, ur, pr)
        fan = right_side & (xi < head) & (xi > tail)
        xf = np.clip(xi, tail, head)
        c = 2.0 / (gamma + 1.0) * (cr - 0.5 * (gamma - 1.0) * (ur - xf))
        fill(fan, rr * (c / cr) ** (2.0 / (gamma - 1.0)), 2.0 / (gamma + 1.0) * (-cr + 0.5 * (gamma - 1.0) * ur + xf),
             pr * (c / cr) ** (2.0 * gamma / (gamma - 1.0)))
        fill(right_side & (xi <= tail), s.rho_right, s.u, s.p)
    return out


def exact_riemann_1d(left, right, x, t: float, x0: float = 0.0, gamma: float = 1.4) -> np.ndarray:
    """Primitive exact solution at positions ``x`` and time ``t`` for a jump at ``x0``."""
    x = np.asarray(x, dtype=float)
    if t <= 0.0:
        L = np.asarray(left, dtype=float)[:, None]
        R = np.asarray(right, dtype=float)[:, None]
        flat = np.where(x.ravel()[None] < x0, L, R)
        return flat.reshape((3,) + x.shape)
    return sample(left, right, (x - x0) / t, gamma)
