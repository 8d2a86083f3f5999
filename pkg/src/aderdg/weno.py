"""Third-order WENO reconstruction and the ADER subcell finite-volume update.

Within a subcell the reconstruction is a quadratic written in the mean-free
basis ``{1, s, s^2 - 1/12}`` with ``s = xi - 1/2``. Its first coefficient is
the subcell average. The average of the third basis function over the
neighbour at offset ``m`` is ``m^2``, which keeps the stencil systems exact
and tiny.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import build_nodal_basis, flat_operators, spacetime_operators
from .dg import face_fluxes, face_traces
from .euler import admissible
from .flux import rusanov_flux
from .predictor import predict

GHOST = 3
STENCIL_OFFSETS = ((-2, -1, 0), (-1, 0, 1), (0, 1, 2))


@dataclass(frozen=True)
class WenoParams:
    lambda_central: float = 100.0
    lambda_side: float = 1.0
    epsilon: float = 1e-14
    power: int = 4

    @property
    def linear_weights(self) -> np.ndarray:
        return np.array([self.lambda_side, self.lambda_central, self.lambda_side])


def _stencil_inverses() -> np.ndarray:
    mats = [np.array([[1.0, m, m * m] for m in offs]) for offs in STENCIL_OFFSETS]
    return np.stack([np.linalg.inv(M) for M in mats])


_INV = _stencil_inverses()


def smoothness(coeffs: np.ndarray) -> np.ndarray:
    """Oscillation indicator of a quadratic given its coefficients on the last axis."""
    return coeffs[..., 1] ** 2 + (13.0 / 3.0) * coeffs[..., 2] ** 2


def weno3_coefficients(avg: np.ndarray, axis: int = -1, params: WenoParams = WenoParams()) -> np.ndarray:
    """Nonlinear quadratic per cell along ``axis``, for cells 2..L-3.

    The result keeps the cell axis in place (shortened by 4) and appends the
    three coefficients as a trailing axis.
    """
    v = np.moveaxis(np.asarray(avg, dtype=float), axis, -1)
    L = v.shape[-1]
    window = np.stack([v[..., k:L - 4 + k] for k in range(5)], axis=-1)  # (..., L-4, 5)
    lam = params.linear_weights
    num = None
    total = None
    for s in range(3):
        c = window[..., s:s + 3] @ _INV[s].T
        wgt = lam[s] / (smoothness(c) + params.epsilon) ** params.power
        num = c * wgt[..., None] if num is None else num + c * wgt[..., None]
        total = wgt if total is None else total + wgt
    out = num / total[..., None]
    # the mean is preserved exactly, whatever the weights
    out[..., 0] = window[..., 2]
    return np.moveaxis(out, -2, axis if axis >= 0 else axis - 1)


def evaluate_quadratic(coeffs: np.ndarray, xi) -> np.ndarray:
    """Values of the mean-free quadratics at reference points ``xi`` (appended axis)."""
    s = np.asarray(xi, dtype=float) - 0.5
    V = np.stack([np.ones_like(s), s, s * s - 1.0 / 12.0])  # (3, m)
    return coeffs @ V


def weno3_nodal(avg: np.ndarray, d: int, params: WenoParams = WenoParams()) -> np.ndarray:
    """Dimension-by-dimension reconstruction to 3-point Gauss-Legendre nodal values.

    ``avg`` has ``d`` trailing subcell axes; each shrinks by 4 and ``d``
    node axes are appended in axis order.
    """
    nodes = build_nodal_basis(2).nodes
    out = np.asarray(avg, dtype=float)
    first = out.ndim - d
    for k in range(d):
        coeffs = weno3_coefficients(out, axis=first + k, params=params)
        out = evaluate_quadratic(coeffs, nodes)
    return out


@dataclass
class SubcellUpdate:
    """Result of one subcell FV step on a batch of troubled cells.

    ``left[a]`` / ``right[a]`` hold the time-averaged fluxes on the subfaces
    of the low / high cell boundary along axis ``a``: shape (nu, B) in 1D and
    (nu, B, Ns * 3) in 2D, subface-major with three Gauss points each.
    """

    v: np.ndarray
    left: list
    right: list
    fallbacks: int


def _constant_fallback(nodal, avg_core, d, gamma):
    """Replace the reconstruction of inadmissible subcells by their average."""
    ok = np.all(admissible(nodal, gamma), axis=tuple(range(-d, 0)))
    bad = ~ok
    n_bad = int(np.count_nonzero(bad))
    if n_bad:
        const = np.broadcast_to(avg_core[(Ellipsis,) + (None,) * d], nodal.shape)
        mask = bad[(None, Ellipsis) + (None,) * d]
        nodal = np.where(mask, const, nodal)
    return nodal, bad, n_bad


def subcell_fv_step(window: np.ndarray, dt: float, hs, gamma: float = 1.4,
                    params: WenoParams = WenoParams(), flux=rusanov_flux) -> SubcellUpdate:
    """Advance the interior subcells of a batch of windows by one ADER-WENO3 step.

    ``window`` is (nu, B, *[Ns + 2*GHOST]*d) subcell averages around each
    troubled cell. The reconstruction covers the interior plus one layer,
    a degree-2 space-time predictor evolves it, and Rusanov fluxes at 3x3
    space-time Gauss points give the conservative update.
    """
    hs = tuple(float(h) for h in hs)
    d = len(hs)
    lead = 2
    g = GHOST
    Ns = [window.shape[lead + a] - 2 * g for a in range(d)]
    core = (slice(None), slice(None)) + tuple(slice(g - 1, g + n + 1) for n in Ns)
    avg_core = window[core]
    nodal = weno3_nodal(window, d, params)
    nodal, bad, n_fb = _constant_fallback(nodal, avg_core, d, gamma)

    st = spacetime_operators(2)
    with np.errstate(all="ignore"):
        q, _, failed = predict(nodal, dt, hs, st, gamma)
        # a predictor that blows up or leaves the admissible set on its
        # space-time nodes falls back to the frozen constant state
        traced_ok = np.all(admissible(q, gamma), axis=tuple(range(-(d + 1), 0)))
        # face traces extrapolate beyond the nodes and can lose positivity too
        ops = flat_operators(2, d)
        for ax in range(d):
            for tr in face_traces(q, ops, ax, d):
                traced_ok &= np.all(admissible(tr, gamma), axis=tuple(range(-d, 0)))
        redo = (failed | ~traced_ok) & ~bad
        if np.any(redo):
            n_fb += int(np.count_nonzero(redo))
            const = np.broadcast_to(avg_core[(Ellipsis,) + (None,) * (d + 1)], q.shape)
            q = np.where(redo[(None, Ellipsis) + (None,) * (d + 1)], const, q)
        faces = [face_fluxes(q, st, ax, d, 1, flux, gamma, None, lead=lead) for ax in range(d)]

    w3 = st.basis.weights
    interior = (slice(None), slice(None)) + tuple(slice(g, g + n) for n in Ns)
    v = window[interior].copy()
    left, right = [], []
    for ax in range(d):
        G = faces[ax]
        if d == 2:
            Gm = G @ w3  # integrate along the transverse subface
        else:
            Gm = G
        n = Ns[ax]
        hi = np.take(Gm, np.arange(1, n + 1), axis=lead + ax)
        lo = np.take(Gm, np.arange(0, n), axis=lead + ax)
        v -= (dt / hs[ax]) * (hi - lo)
        lrec = np.take(G, 0, axis=lead + ax)
        rrec = np.take(G, n, axis=lead + ax)
        if d == 2:
            lrec = lrec.reshape(lrec.shape[:2] + (-1,))
            rrec = rrec.reshape(rrec.shape[:2] + (-1,))
        left.append(lrec)
        right.append(rrec)
    return SubcellUpdate(v=v, left=left, right=right, fallbacks=n_fb)


def gather_windows(sub_ext: np.ndarray, cells, Ns: int, ghost_cells: int, d: int) -> np.ndarray:
    """Subcell windows of ``Ns + 2*GHOST`` per axis around the given cells.

    ``sub_ext`` is the global subcell view (nu, *ext_cells, Ns, ..., Ns) with
    ``ghost_cells`` ghost cells per side; ``cells`` is a tuple of interior
    index arrays as returned by ``np.nonzero``.
    """
    nu = sub_ext.shape[0]
    ext = sub_ext.shape[1:1 + d]
    # flatten to a global subcell grid
    if d == 1:
        flat = sub_ext.reshape(nu, ext[0] * Ns)
    else:
        flat = sub_ext.transpose(0, 1, 3, 2, 4).reshape(nu, ext[0] * Ns, ext[1] * Ns)
    L = Ns + 2 * GHOST
    r = np.arange(L)
    idx = []
    for a in range(d):
        start = (np.asarray(cells[a]) + ghost_cells) * Ns - GHOST
        idx.append(start[:, None] + r[None, :])  # (B, L)
    if d == 1:
        return flat[:, idx[0]]
    return flat[:, idx[0][:, :, None], idx[1][:, None, :]]


def fv_evolve_periodic(v: np.ndarray, dt: float, hs, gamma: float = 1.4,
                       params: WenoParams = WenoParams()) -> np.ndarray:
    """One subcell FV step on a fully periodic subcell grid (nu, *n)."""
    d = len(hs)
    pad = [(0, 0)] + [(GHOST, GHOST)] * d
    ext = np.pad(v, pad, mode="wrap")[:, None]
    return subcell_fv_step(ext, dt, hs, gamma, params).v[:, 0]
