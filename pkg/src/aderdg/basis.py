"""Gauss-Legendre quadrature, nodal Lagrange bases and cached operator tables.

Everything lives on the reference interval [0, 1]. Multi-dimensional
operators are tensor products of the 1D factors and are applied one axis at
a time with :func:`apply_along`, except for the subcell reconstruction matrix
which is assembled in full because its constrained least-squares problem does
not factor.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError

MAX_QUADRATURE_POINTS = 16
MAX_DEGREE = 9


@dataclass(frozen=True)
class QuadratureRule1D:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return len(self.nodes)

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def _legendre_with_derivative(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p0 = np.ones_like(x)
    p1 = x.copy()
    if n == 0:
        return p0, np.zeros_like(x)
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> QuadratureRule1D:
    """n-point Gauss-Legendre rule mapped to [0, 1].

    Roots of P_n are found by Newton iteration started from the Chebyshev
    nodes, which lie close enough to the Legendre roots for monotone
    convergence.
    """
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUADRATURE_POINTS:
        raise ConfigError(
            f"Gauss-Legendre rule needs 1 <= n <= {MAX_QUADRATURE_POINTS} points, got {n!r}"
        )
    n = int(n)
    k = np.arange(n)
    x = np.cos(np.pi * (2 * k + 1) / (2 * n))
    for _ in range(100):
        p, dp = _legendre_with_derivative(n, x)
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) < 1e-15:
            break
    _, dp = _legendre_with_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    # enforce exact mirror symmetry about the midpoint
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    nodes = 0.5 * (1.0 + x)
    weights = 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule1D(nodes, weights)


def lagrange_matrix(nodes: np.ndarray, points) -> np.ndarray:
    """Values of every Lagrange polynomial on ``nodes`` at ``points``.

    Returns an array of shape (len(points), len(nodes)).
    """
    points = np.atleast_1d(np.asarray(points, dtype=float))
    n = len(nodes)
    out = np.ones((len(points), n))
    for l in range(n):
        for m in range(n):
            if m != l:
                out[:, l] *= (points - nodes[m]) / (nodes[l] - nodes[m])
    return out


def _differentiation_matrix(nodes: np.ndarray) -> np.ndarray:
    n = len(nodes)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / np.prod(diff, axis=1)
    D = np.zeros((n, n))
    for k in range(n):
        for l in range(n):
            if k != l:
                D[k, l] = (bary[l] / bary[k]) / (nodes[k] - nodes[l])
        D[k, k] = -np.sum(D[k])
    return D


@dataclass(frozen=True)
class NodalBasis1D:
    """Lagrange basis through the N+1 Gauss-Legendre nodes of [0, 1]."""

    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    left: np.ndarray  # Phi_l(0)
    right: np.ndarray  # Phi_l(1)
    D: np.ndarray  # D[k, l] = Phi_l'(node_k)

    @property
    def size(self) -> int:
        return self.degree + 1

    def __call__(self, xi) -> np.ndarray:
        return lagrange_matrix(self.nodes, xi)


@lru_cache(maxsize=None)
def build_nodal_basis(N: int) -> NodalBasis1D:
    if not isinstance(N, (int, np.integer)) or not 0 <= N <= MAX_DEGREE:
        raise ConfigError(f"polynomial degree must satisfy 0 <= N <= {MAX_DEGREE}, got {N!r}")
    rule = gauss_legendre(int(N) + 1)
    nodes = np.array(rule.nodes)
    ends = lagrange_matrix(nodes, [0.0, 1.0])
    return NodalBasis1D(
        degree=int(N),
        nodes=nodes,
        weights=np.array(rule.weights),
        left=ends[0],
        right=ends[1],
        D=_differentiation_matrix(nodes),
    )


def apply_along(A: np.ndarray, arr: np.ndarray, axis: int) -> np.ndarray:
    """Contract matrix ``A`` with ``arr`` along ``axis``: out[..i..] = A[i, j] arr[..j..]."""
    return np.moveaxis(np.tensordot(A, arr, axes=(1, axis)), 0, axis)


@dataclass(frozen=True)
class SpaceTimeOperators:
    """1D factors of the space-time predictor and the one-step corrector.

    ``time_solve`` is (T)^-1 diag(w) where T = [theta, theta]^1 - <d_tau theta, theta>
    is the temporal block; the spatial mass factor cancels because the basis
    is nodal on the quadrature points. ``volume`` maps time-integrated nodal
    fluxes to the stiffness contribution divided by the diagonal mass.
    """

    basis: NodalBasis1D
    time_block: np.ndarray
    time_solve: np.ndarray
    time_init: np.ndarray  # T^-1 psi(0), identically one
    volume: np.ndarray
    lift_left: np.ndarray  # Phi(0) / w
    lift_right: np.ndarray  # Phi(1) / w
    stiffness: np.ndarray  # <Phi_k, Phi_l'>

    @property
    def size(self) -> int:
        return self.basis.size


@lru_cache(maxsize=None)
def spacetime_operators(N: int) -> SpaceTimeOperators:
    b = build_nodal_basis(N)
    w, D = b.weights, b.D
    upper = np.outer(b.right, b.right)
    dtau = w[None, :] * D.T  # <psi_k', psi_l> = w_l D[l, k]
    block = upper - dtau
    inv = np.linalg.inv(block)
    return SpaceTimeOperators(
        basis=b,
        time_block=block,
        time_solve=inv * w[None, :],
        time_init=inv @ b.left,
        volume=(w[None, :] * D.T) / w[:, None],
        lift_left=b.left / w,
        lift_right=b.right / w,
        stiffness=w[:, None] * D,
    )


def _kron_along(A: np.ndarray, axis: int, n: int, d: int) -> np.ndarray:
    """``A`` acting on one of ``d`` tensor axes of size ``n``, identity on the others."""
    out = np.ones((1, 1))
    for a in range(d):
        out = np.kron(out, A if a == axis else np.eye(n))
    return out


@dataclass(frozen=True)
class FlatOperators:
    """Space-time operators acting on flattened (space nodes..., time) trailing axes.

    Each is a single matrix so that applying it to a whole grid is one GEMM.
    ``sweep[a]`` is the predictor's time-solve times the derivative along
    axis ``a``; ``volume[a]`` integrates in time and applies the corrector's
    stiffness contraction; ``trace_left[a]`` / ``trace_right[a]`` evaluate
    the face traces, keeping the transverse nodes and time.
    """

    d: int
    sweep: tuple
    volume: tuple
    trace_left: tuple
    trace_right: tuple


@lru_cache(maxsize=None)
def flat_operators(N: int, d: int) -> FlatOperators:
    st = spacetime_operators(N)
    b = st.basis
    n = N + 1
    sweep, volume, tl, tr = [], [], [], []
    for ax in range(d):
        space = _kron_along(b.D, ax, n, d)
        sweep.append(np.kron(space, st.time_solve))
        volume.append(np.kron(_kron_along(st.volume, ax, n, d), b.weights[None, :]))
        tl.append(_kron_along(b.left[None, :], ax, n, d + 1))
        tr.append(_kron_along(b.right[None, :], ax, n, d + 1))
    return FlatOperators(d, tuple(sweep), tuple(volume), tuple(tl), tuple(tr))


@dataclass(frozen=True)
class OperatorTables:
    N: int
    Ns: int
    d: int
    st: SpaceTimeOperators
    P1: np.ndarray  # (Ns, N+1) subcell averages of each basis function
    P: np.ndarray  # full d-dimensional projection (Ns^d, (N+1)^d)
    R: np.ndarray  # constrained least-squares reconstruction ((N+1)^d, Ns^d)
    subface: np.ndarray  # (N+1, Ns*3) subedge GL flux samples -> nodal face flux
    weights_nd: np.ndarray  # tensor quadrature weights, flattened
    digest: str

    @property
    def basis(self) -> NodalBasis1D:
        return self.st.basis


def _kron_power(A: np.ndarray, d: int) -> np.ndarray:
    out = A
    for _ in range(d - 1):
        out = np.kron(out, A)
    return out


@lru_cache(maxsize=None)
def assemble_operator_tables(N: int, Ns: int | None = None, d: int = 1) -> OperatorTables:
    """Assemble and cache all matrices for degree N, Ns subcells per axis, dimension d."""
    st = spacetime_operators(N)
    if Ns is None:
        Ns = 2 * N + 1
    if d not in (1, 2):
        raise ConfigError(f"dimension must be 1 or 2, got {d!r}")
    if not isinstance(Ns, (int, np.integer)) or Ns < N + 1:
        raise ConfigError(
            f"subcell count Ns={Ns!r} is below N+1={N + 1}; the reconstruction is underdetermined"
        )
    Ns = int(Ns)
    basis = st.basis
    rule = gauss_legendre(N + 1)
    P1 = np.zeros((Ns, N + 1))
    for j in range(Ns):
        pts = (j + np.asarray(rule.nodes)) / Ns
        P1[j] = rule.weights @ basis(pts)
    P = _kron_power(P1, d)
    W = _kron_power(basis.weights[None, :], d)[0]
    n_dof = (N + 1) ** d
    n_sub = Ns**d
    # KKT system of: min |P x - v|^2  subject to  W.x = mean(v)
    kkt = np.zeros((n_dof + 1, n_dof + 1))
    kkt[:n_dof, :n_dof] = 2.0 * P.T @ P
    kkt[:n_dof, n_dof] = W
    kkt[n_dof, :n_dof] = W
    rhs = np.zeros((n_dof + 1, n_sub))
    rhs[:n_dof] = 2.0 * P.T
    rhs[n_dof] = 1.0 / n_sub
    R = np.linalg.solve(kkt, rhs)[:n_dof]

    fv_rule = gauss_legendre(3)
    sub_pts = ((np.arange(Ns)[:, None] + np.asarray(fv_rule.nodes)[None, :]) / Ns).ravel()
    sub_w = np.tile(np.asarray(fv_rule.weights), Ns) / Ns
    subface = (basis(sub_pts) * sub_w[:, None]).T / basis.weights[:, None]

    h = hashlib.sha256()
    for arr in (st.time_solve, st.volume, st.lift_left, st.lift_right, P, R, subface):
        h.update(np.ascontiguousarray(arr).tobytes())
    return OperatorTables(
        N=N, Ns=Ns, d=d, st=st, P1=P1, P=P, R=R, subface=subface,
        weights_nd=W, digest=h.hexdigest()[:16],
    )
