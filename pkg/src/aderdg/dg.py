"""One-step ADER-DG corrector, time-step control and conservative flux correction.

Face flux arrays hold time-averaged numerical fluxes at the nodal points of
each face. For axis ``a`` the array has ``n_a + 1`` entries along cell axis
``a`` (face ``i`` is the low face of cell ``i``) and one trailing axis per
transverse node direction.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .basis import FlatOperators, SpaceTimeOperators, flat_operators, spacetime_operators
from .errors import NumericalFailure
from .euler import _signal_speed, physical_fluxes
from .flux import rusanov_flux
from .grid import BoundarySpec


def _amplification(N: int, c: float, theta: np.ndarray) -> np.ndarray:
    """Fourier symbols of one step for u_t + u_x = 0 with the upwind flux, unit cells."""
    st = spacetime_operators(N)
    ops = flat_operators(N, 1)
    n = N + 1
    # the predictor is linear here: q = (I + c S)^-1 (u repeated in time)
    Q = np.linalg.solve(np.eye(n * n) + c * ops.sweep[0], np.kron(np.eye(n), np.ones((n, 1))))
    g = st.basis.weights @ (ops.trace_right[0] @ Q)  # time-averaged right trace
    base = np.eye(n) + c * (ops.volume[0] @ Q) - c * np.outer(st.lift_right, g)
    return base[None] + c * np.exp(-1j * theta)[:, None, None] * np.outer(st.lift_left, g)[None]


@lru_cache(maxsize=None)
def courant_limit(N: int, growth_tol: float = 1e-3, n_theta: int = 181) -> float:
    """Von Neumann limit of the one-step scheme on linear advection.

    The first Courant number at which some Fourier mode grows by more than
    ``growth_tol`` per step. Below it the spectral radius only exceeds one by
    eigenvalue round-off.
    """
    theta = np.linspace(0.0, 2.0 * np.pi, n_theta)

    def unstable(c):
        return np.abs(np.linalg.eigvals(_amplification(N, c, theta))).max() > 1.0 + growth_tol

    top = 1.0 / (2 * N + 1)
    grid = top * np.linspace(0.025, 1.2, 48)
    lo, hi = 0.0, None
    for c in grid:
        if unstable(c):
            hi = c
            break
        lo = c
    if hi is None:
        return float(lo)
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if unstable(mid) else (mid, hi)
    return float(lo)


def compute_time_step(states, h, N: int, gamma: float = 1.4, safety: float = 0.9) -> float:
    """Largest stable step for degree N: safety * C_N / d * min_axis h_a / |lambda_a|.

    ``C_N`` is the smaller of 1/(2N+1) and the scheme's linear stability limit.

    ``states`` is an iterable of conserved-state arrays whose signal speeds
    bound the step (nodal values of unlimited cells, subcell averages of
    troubled ones).
    """
    h = tuple(h)
    d = len(h)
    bound = np.inf
    with np.errstate(all="ignore"):
        for Q in states:
            Q = np.asarray(Q)
            if Q.size == 0:
                continue
            for ax in range(d):
                lam = _signal_speed(Q, ax, gamma)
                if not np.all(np.isfinite(lam)):
                    bad = np.argwhere(~np.isfinite(lam))[:5].tolist()
                    raise NumericalFailure(f"non-finite signal speed at {bad}",
                                           dump={"states": Q})
                lam_max = float(np.max(lam))
                if lam_max > 0.0:
                    bound = min(bound, h[ax] / lam_max)
    if not np.isfinite(bound):
        raise NumericalFailure("no finite signal speed to bound the time step")
    return safety * min(1.0 / (2 * N + 1), courant_limit(N)) * bound / d


def face_traces(q, ops: FlatOperators, axis: int, d: int):
    """Left and right face traces along ``axis``; the normal node axis is dropped."""
    S = ops.trace_left[axis].shape[1]
    flat = q.reshape(-1, S)
    shape = q.shape[: q.ndim - d - 1] + q.shape[q.ndim - d:]
    return ((flat @ ops.trace_left[axis].T).reshape(shape),
            (flat @ ops.trace_right[axis].T).reshape(shape))


def face_fluxes(q_ext: np.ndarray, st: SpaceTimeOperators, axis: int, d: int, width: int = 1,
                flux=rusanov_flux, gamma: float = 1.4, stats=None, lead: int = 1) -> np.ndarray:
    """Time-averaged numerical fluxes on all faces along ``axis`` of the interior cells.

    ``q_ext`` is a space-time predictor on a grid with ``width`` ghost cells;
    its first ``lead`` axes (components, optional batch) are not cell axes.
    """
    left, right = face_traces(q_ext, flat_operators(st.basis.degree, d), axis, d)
    w = width
    sl_l = [slice(None)] * lead
    sl_r = [slice(None)] * lead
    for a in range(d):
        n = q_ext.shape[lead + a] - 2 * w
        if a == axis:
            sl_l.append(slice(w - 1, w + n))
            sl_r.append(slice(w, w + n + 1))
        else:
            sl_l.append(slice(w, w + n))
            sl_r.append(slice(w, w + n))
    qL = right[tuple(sl_l)]
    qR = left[tuple(sl_r)]
    if flux is rusanov_flux or stats is None:
        G = flux(qL, qR, axis, gamma)
    else:
        G = flux(qL, qR, axis, gamma, stats=stats)
    return G @ st.basis.weights


def _lift(G, vec, d, axis, low, lead=1):
    """Spread face data onto the node axis normal to the face."""
    n = G.shape[lead + axis] - 1
    sl = [slice(None)] * G.ndim
    sl[lead + axis] = slice(0, n) if low else slice(1, n + 1)
    g = np.expand_dims(G[tuple(sl)], lead + d + axis)
    shape = [1] * g.ndim
    shape[lead + d + axis] = len(vec)
    return g * vec.reshape(shape)


def surface_update(faces, dt, h, st: SpaceTimeOperators, d: int, lead: int = 1):
    du = None
    for ax in range(d):
        G = faces[ax]
        term = (_lift(G, st.lift_right, d, ax, False, lead)
                - _lift(G, st.lift_left, d, ax, True, lead))
        term = term * (-dt / h[ax])
        du = term if du is None else du + term
    return du


def dg_corrector_step(u: np.ndarray, q_ext: np.ndarray, dt: float, h, st: SpaceTimeOperators,
                      width: int = 1, flux=rusanov_flux, gamma: float = 1.4, stats=None):
    """Candidate solution of the one-step ADER-DG scheme.

    Returns the candidate field (``u`` is not modified) and the per-axis
    face flux arrays used, which the flux correction later needs.
    """
    d = len(h)
    w = width
    interior = (slice(None),) + (slice(w, -w),) * d
    q_int = q_ext[interior]
    ops = flat_operators(st.basis.degree, d)
    S = ops.volume[0].shape[1]
    with np.errstate(all="ignore"):
        faces = [face_fluxes(q_ext, st, ax, d, w, flux, gamma, stats) for ax in range(d)]
        du = surface_update(faces, dt, h, st, d)
        vol = None
        for ax, f in enumerate(physical_fluxes(q_int, gamma)):
            term = f.reshape(-1, S) @ (ops.volume[ax].T * (dt / h[ax]))
            vol = term if vol is None else vol + term
        return u + du + vol.reshape(u.shape), faces


def override_faces(faces, beta: np.ndarray, left_records, right_records, bc: BoundarySpec):
    """Replace the face fluxes of every troubled cell by its subcell FV fluxes.

    ``left_records[a]`` / ``right_records[a]`` have shape (nu, n_troubled,
    *transverse nodes) and follow the order of ``np.nonzero(beta)``.
    """
    idx = np.nonzero(beta)
    d = beta.ndim
    new = []
    for ax in range(d):
        G = faces[ax].copy()
        if len(idx[0]):
            lo = tuple(idx)
            hi = tuple(i + 1 if a == ax else i for a, i in enumerate(idx))
            G[(slice(None),) + lo] = left_records[ax]
            G[(slice(None),) + hi] = right_records[ax]
            if bc.periodic(ax):
                n = beta.shape[ax]
                first = np.take(beta, [0], axis=ax)
                last = np.take(beta, [n - 1], axis=ax)
                face0 = np.take(G, [0], axis=1 + ax)
                facen = np.take(G, [n], axis=1 + ax)
                m_first = np.expand_dims(first, 0)
                m_last = np.expand_dims(last, 0)
                for _ in range(G.ndim - 1 - d):
                    m_first = m_first[..., None]
                    m_last = m_last[..., None]
                new_n = np.where(m_first, face0, facen)
                new_0 = np.where(m_last, new_n, face0)
                sl0 = [slice(None)] * G.ndim
                sl0[1 + ax] = slice(0, 1)
                sln = [slice(None)] * G.ndim
                sln[1 + ax] = slice(n, n + 1)
                G[tuple(sl0)] = new_0
                G[tuple(sln)] = new_n
        new.append(G)
    return new


def correct_unlimited_neighbors(u: np.ndarray, beta: np.ndarray, faces_old, faces_new, dt, h,
                                st: SpaceTimeOperators) -> np.ndarray:
    """Swap the DG face contributions of unlimited cells for the new face fluxes.

    Subtracts the unlimited DG flux and adds the replacement on every face,
    so only faces that changed have any effect; troubled cells are untouched.
    """
    if not np.any(beta):
        return u
    d = beta.ndim
    delta = [new - old for new, old in zip(faces_new, faces_old)]
    du = surface_update(delta, dt, h, st, d)
    mask = ~beta
    out = u.copy()
    out[:, mask] = u[:, mask] + du[:, mask]
    return out
