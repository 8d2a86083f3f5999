"""Initial data, boundary setups and reference solutions for the test cases."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import gauss_legendre, lagrange_matrix, build_nodal_basis
from .errors import ConfigError
from .grid import BoundarySpec, CartesianGrid
from .riemann_exact import exact_riemann_1d

GAMMA = 1.4


@dataclass(frozen=True)
class Scenario:
    """A named test case.

    ``ic(x, y)`` and ``exact(x, y, t)`` return primitive states shaped
    (d + 2, *x.shape); ``y`` is None for one-dimensional cases.
    """

    name: str
    lower: tuple
    upper: tuple
    t_final: float
    ic: Callable
    sides: tuple
    gamma: float = GAMMA
    exact: Callable | None = None
    default_cells: tuple = (50,)
    time_dependent_bc: bool = False
    flux: str = "rusanov"  # default numerical flux for this case

    @property
    def d(self) -> int:
        return len(self.lower)

    def grid(self, shape=None) -> CartesianGrid:
        shape = tuple(int(n) for n in (shape or self.default_cells))
        return CartesianGrid(tuple(self.lower), tuple(self.upper), shape)

    def boundary(self) -> BoundarySpec:
        needs = any("dirichlet" in s for s in self.sides)
        sampler = None
        if needs:
            if self.time_dependent_bc and self.exact is not None:
                sampler = self.exact
            else:
                ic = self.ic
                sampler = lambda x, y, t: ic(x, y)  # noqa: E731
        return BoundarySpec(tuple(self.sides), sampler)


# -- one-dimensional Riemann problems ------------------------------------------------

SHOCK_TUBES = {
    "sod": ((1.0, 0.0, 1.0), (0.125, 0.0, 0.1), 0.2),
    "lax": ((0.445, 0.698, 3.528), (0.5, 0.0, 0.571), 0.14),
}


def _shock_tube(name, left, right, t_final, x0=0.5, ny=None):
    L = np.asarray(left, dtype=float)
    R = np.asarray(right, dtype=float)

    def widen(W, y):
        if y is None:
            return W
        return np.stack([W[0], W[1], np.zeros_like(W[0]), W[2]])

    def ic(x, y=None):
        x = np.asarray(x, dtype=float)
        W = np.where(x[None] < x0, L.reshape(3, *([1] * x.ndim)), R.reshape(3, *([1] * x.ndim)))
        return widen(W, y)

    def exact(x, y=None, t=0.0):
        return widen(exact_riemann_1d(L, R, x, t, x0=x0), y)

    if ny is None:
        return Scenario(name, (0.0,), (1.0,), t_final, ic, (("dirichlet", "dirichlet"),), exact=exact,
                        default_cells=(50,))
    return Scenario(name, (0.0, -0.5), (1.0, 0.5), t_final, ic,
                    (("dirichlet", "dirichlet"), ("periodic", "periodic")), exact=exact,
                    default_cells=(50, ny))


def shu_osher() -> Scenario:
    left = np.array([3.857143, 2.629369, 10.33333])

    def ic(x, y=None):
        x = np.asarray(x, dtype=float)
        right = np.stack([1.0 + 0.2 * np.sin(5.0 * np.pi * x), np.zeros_like(x), np.ones_like(x)])
        return np.where(x[None] < -4.0, left.reshape(3, *([1] * x.ndim)), right)

    return Scenario("shu_osher", (-5.0,), (5.0,), 0.18, ic, (("dirichlet", "dirichlet"),),
                    default_cells=(200,), flux="osher")


# -- isentropic vortex -----------------------------------------------------------------

VORTEX_BETA = 5.0


def _vortex_state(x, y, gamma=GAMMA, beta=VORTEX_BETA):
    r2 = x * x + y * y
    amp = beta / (2.0 * np.pi) * np.exp(0.5 * (1.0 - r2))
    dT = -(gamma - 1.0) * beta * beta / (8.0 * gamma * np.pi**2) * np.exp(1.0 - r2)
    rho = (1.0 + dT) ** (1.0 / (gamma - 1.0))
    return np.stack([rho, 1.0 - y * amp, 1.0 + x * amp, rho**gamma])


def vortex_exact(x, y, t: float = 0.0, gamma: float = GAMMA, beta: float = VORTEX_BETA,
                 lower=(-5.0, -5.0), upper=(-5.0 + 10.0, -5.0 + 10.0)) -> np.ndarray:
    """Primitive vortex solution advected by the unit ambient flow, periodically wrapped."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    Lx = upper[0] - lower[0]
    Ly = upper[1] - lower[1]
    # signed distance to the nearest periodic image of the centre
    cx = 0.5 * (lower[0] + upper[0]) + t
    cy = 0.5 * (lower[1] + upper[1]) + t
    dx = (x - cx + 0.5 * Lx) % Lx - 0.5 * Lx
    dy = (y - cy + 0.5 * Ly) % Ly - 0.5 * Ly
    return _vortex_state(dx, dy, gamma, beta)


def isentropic_vortex() -> Scenario:
    return Scenario("isentropic_vortex", (-5.0, -5.0), (5.0, 5.0), 10.0,
                    lambda x, y: vortex_exact(x, y, 0.0),
                    (("periodic", "periodic"), ("periodic", "periodic")),
                    exact=lambda x, y, t: vortex_exact(x, y, t), default_cells=(25, 25), flux="osher")


# -- two-dimensional Riemann problems ------------------------------------------------------

# quadrant states (rho, u, v, p) in the order: x>0,y>0 | x<0,y>0 | x<0,y<0 | x>0,y<0
RIEMANN_2D = {
    "rp1": ([(1.5, 0.0, 0.0, 1.5), (0.5323, 1.206, 0.0, 0.3), (0.138, 1.206, 1.206, 0.029),
             (0.5323, 0.0, 1.206, 0.3)], 0.25),
    "rp2": ([(1.1, 0.0, 0.0, 1.1), (0.5065, 0.8939, 0.0, 0.35), (1.1, 0.8939, 0.8939, 1.1),
             (0.5065, 0.0, 0.8939, 0.35)], 0.25),
    "rp3": ([(1.0, 0.75, -0.5, 1.0), (2.0, 0.75, 0.5, 1.0), (1.0, -0.75, 0.5, 1.0),
             (3.0, -0.75, -0.5, 1.0)], 0.30),
    "rp4": ([(0.5197, 0.1, 0.1, 0.4), (1.0, -0.6259, 0.1, 1.0), (0.8, 0.1, 0.1, 1.0),
             (1.0, 0.1, -0.6259, 1.0)], 0.25),
    "rp5": ([(0.5313, 0.0, 0.0, 0.4), (1.0, 0.7276, 0.0, 1.0), (0.8, 0.0, 0.0, 1.0),
             (1.0, 0.0, 0.7276, 1.0)], 0.25),
}


def quadrant_ic(states):
    S = [np.asarray(s, dtype=float) for s in states]

    def ic(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shp = (4,) + (1,) * x.ndim
        east = x > 0.0
        north = y > 0.0
        out = np.where(north[None],
                       np.where(east[None], S[0].reshape(shp), S[1].reshape(shp)),
                       np.where(east[None], S[3].reshape(shp), S[2].reshape(shp)))
        return out

    return ic


def riemann_2d(name: str, sides=None) -> Scenario:
    states, t_final = RIEMANN_2D[name]
    sides = sides or (("outflow", "outflow"), ("outflow", "outflow"))
    return Scenario(name, (-0.5, -0.5), (0.5, 0.5), t_final, quadrant_ic(states), sides,
                    default_cells=(100, 100))


# -- shock-vortex interaction ----------------------------------------------------------------

def vortex_temperature(r, vm, a, b, gamma=GAMMA, T0=1.0):
    """Temperature of the compact vortex, integrating dT/dr = (gamma-1)/gamma v_phi^2 / r
    inward from T(b) = T0. The integrand is a rational function, so this is exact."""
    r = np.asarray(r, dtype=float)
    c = (gamma - 1.0) / gamma
    K = vm * a / (a * a - b * b)

    def outer(s):  # antiderivative of v^2/r on [a, b]
        return K * K * (0.5 * s * s - 2.0 * b * b * np.log(s) - 0.5 * b**4 / (s * s))

    def inner(s):  # antiderivative of v^2/r on [0, a]
        return 0.5 * (vm / a) ** 2 * s * s

    rb = np.minimum(r, b)
    T = T0 - c * (outer(b) - outer(np.maximum(rb, a)))
    T = np.where(r < a, T - c * (inner(a) - inner(r)), T)
    return T


def vortex_azimuthal_speed(r, vm, a, b):
    r = np.asarray(r, dtype=float)
    safe = np.maximum(r, 1e-300)
    mid = vm * a / (a * a - b * b) * (r - b * b / safe)
    return np.where(r <= a, vm * r / a, np.where(r <= b, mid, 0.0))


def post_shock_state(rho0, u0, p0, gamma=GAMMA):
    """Downstream state of a stationary normal shock from the Rankine-Hugoniot relations."""
    c0 = np.sqrt(gamma * p0 / rho0)
    M2 = (u0 / c0) ** 2
    rho1 = rho0 * (gamma + 1.0) * M2 / ((gamma - 1.0) * M2 + 2.0)
    p1 = p0 * (1.0 + 2.0 * gamma / (gamma + 1.0) * (M2 - 1.0))
    return rho1, u0 * rho0 / rho1, p1


def shock_vortex(Ms=1.5, Mv=0.7, a=0.075, b=0.175, gamma=GAMMA) -> Scenario:
    rho0, p0 = 1.0, 1.0
    c0 = np.sqrt(gamma * p0 / rho0)
    u0 = Ms * c0
    vm = Mv * c0
    rho1, u1, p1 = post_shock_state(rho0, u0, p0, gamma)
    xc, yc = 0.25, 0.5

    def ic(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        dx, dy = x - xc, y - yc
        r = np.hypot(dx, dy)
        vphi = vortex_azimuthal_speed(r, vm, a, b)
        safe = np.where(r > 0, r, 1.0)
        T = vortex_temperature(r, vm, a, b, gamma, T0=p0 / rho0)
        rho = rho0 * (T / (p0 / rho0)) ** (1.0 / (gamma - 1.0))
        p = p0 * (T / (p0 / rho0)) ** (gamma / (gamma - 1.0))
        up = np.stack([rho, u0 - vphi * dy / safe, vphi * dx / safe, p])
        down = np.stack([np.full_like(x, rho1), np.full_like(x, u1), np.zeros_like(x), np.full_like(x, p1)])
        return np.where(x[None] < 0.5, up, down)

    return Scenario("shock_vortex", (0.0, 0.0), (2.0, 1.0), 0.7, ic,
                    (("dirichlet", "outflow"), ("outflow", "outflow")), gamma=gamma,
                    default_cells=(200, 100))


# -- catalogue -------------------------------------------------------------------------------

def scenario_catalog() -> dict:
    """Factories for every named test case, keyed by their CLI names."""
    cat = {
        "sod": lambda ny=None: _shock_tube("sod", *SHOCK_TUBES["sod"], ny=ny),
        "lax": lambda ny=None: _shock_tube("lax", *SHOCK_TUBES["lax"], ny=ny),
        "shu_osher": lambda ny=None: shu_osher(),
        "isentropic_vortex": lambda ny=None: isentropic_vortex(),
        "shock_vortex": lambda ny=None: shock_vortex(),
    }
    cat["vortex"] = cat["isentropic_vortex"]
    for name in RIEMANN_2D:
        cat[name] = (lambda nm: (lambda ny=None: riemann_2d(nm)))(name)
    return cat


def get_scenario(name: str, ny: int | None = None) -> Scenario:
    cat = scenario_catalog()
    if name not in cat:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(cat)}")
    return cat[name](ny)


def sample_ic(scn: Scenario, coords) -> np.ndarray:
    """IC at the given coordinate arrays (one per axis)."""
    return scn.ic(coords[0], coords[1] if len(coords) > 1 else None)


# -- error norms -----------------------------------------------------------------------------

def error_norms(u: np.ndarray, grid: CartesianGrid, exact, t: float, N: int, variable: int = 0,
                gamma: float = GAMMA, n_points: int | None = None):
    """L1, L2 and max-norm of the error in one conserved variable.

    ``exact(x, y, t)`` returns primitive states; density (variable 0) is the
    same in both sets. The integral norms use ``N + 2`` Gauss points per
    axis in every cell; the max-norm is taken over the same points.
    """
    from .euler import prim_to_cons

    d = grid.d
    rule = gauss_legendre(n_points or N + 2)
    basis = build_nodal_basis(N)
    L = lagrange_matrix(basis.nodes, rule.nodes)
    vals = u[variable]
    for k in range(d):
        vals = np.moveaxis(np.moveaxis(vals, d + k, -1) @ L.T, -1, d + k)
    coords = grid.coordinates(rule.nodes)
    W = exact(coords[0], coords[1] if d > 1 else None, t)
    ref = W[0] if variable == 0 else prim_to_cons(W, gamma)[variable]
    err = np.abs(vals - ref)
    w = rule.weights
    wq = w
    if d == 2:
        wq = np.outer(w, w)
    vol = grid.cell_volume
    l1 = float(np.sum(err * wq) * vol)
    l2 = float(np.sqrt(np.sum(err**2 * wq) * vol))
    linf = float(err.max())
    return l1, l2, linf
