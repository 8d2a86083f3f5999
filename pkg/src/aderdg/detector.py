"""A posteriori troubled-cell detection: physical admissibility plus a relaxed
discrete maximum principle on subcell averages."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .euler import admissible

DMP_EPS = 1e-3
DMP_FLOOR = 1e-4


@dataclass
class LimiterState:
    """Troubled flags for the current and previous step plus persisted subcell data.

    ``persisted`` is stored densely over all cells but is only meaningful
    where ``beta`` is set.
    """

    beta: np.ndarray
    persisted: np.ndarray
    beta_prev: np.ndarray = None
    vmin: np.ndarray = None
    vmax: np.ndarray = None
    history: list = field(default_factory=list)

    def __post_init__(self):
        if self.beta_prev is None:
            self.beta_prev = np.zeros_like(self.beta)

    @property
    def n_troubled(self) -> int:
        return int(np.count_nonzero(self.beta))


def _neighbourhood_reduce(arr, d, width, reduce):
    """Reduce ``arr`` (nu, *ext_cells) over the 3^d node-neighbourhood of each interior cell."""
    n = [arr.shape[1 + a] - 2 * width for a in range(d)]
    out = None
    for offs in itertools.product((-1, 0, 1), repeat=d):
        sl = (slice(None),) + tuple(slice(width + o, width + o + n[a]) for a, o in enumerate(offs))
        out = arr[sl] if out is None else reduce(out, arr[sl])
    return out


def gather_neighborhood_extrema(sub_ext: np.ndarray, d: int, width: int = 1):
    """Componentwise min/max of subcell data over each cell's neighbourhood.

    ``sub_ext`` carries ``width >= 1`` ghost cells per side and ``d`` trailing
    subcell axes. Only the reduced extrema are returned.
    """
    sub_axes = tuple(range(sub_ext.ndim - d, sub_ext.ndim))
    cmin = sub_ext.min(axis=sub_axes)
    cmax = sub_ext.max(axis=sub_axes)
    return (_neighbourhood_reduce(cmin, d, width, np.minimum),
            _neighbourhood_reduce(cmax, d, width, np.maximum))


def dmp_tolerance(vmin, vmax, eps: float = DMP_EPS, floor: float = DMP_FLOOR):
    return np.maximum(eps * (vmax - vmin), floor)


def detect(candidate: np.ndarray, vmin: np.ndarray, vmax: np.ndarray, d: int, gamma: float = 1.4,
           eps: float = DMP_EPS, floor: float = DMP_FLOOR, nonfinite=None) -> np.ndarray:
    """Troubled flag per cell from candidate subcell averages.

    A cell is troubled if any candidate subcell average leaves the relaxed
    bounds ``[min - delta, max + delta]`` in any conserved variable, if any
    subcell state is physically inadmissible, or if ``nonfinite`` marks it.
    """
    delta = dmp_tolerance(vmin, vmax, eps, floor)
    expand = (Ellipsis,) + (None,) * d
    lo = (vmin - delta)[expand]
    hi = (vmax + delta)[expand]
    sub_axes = tuple(range(candidate.ndim - d, candidate.ndim))
    with np.errstate(invalid="ignore"):
        out_of_bounds = np.any((candidate < lo) | (candidate > hi), axis=(0,) + sub_axes)
    inadmissible = ~np.all(admissible(candidate, gamma), axis=tuple(range(-d, 0)))
    beta = out_of_bounds | inadmissible
    if nonfinite is not None:
        beta = beta | nonfinite
    return beta


def detect_initial_condition(projected: np.ndarray, exact_sub_ext: np.ndarray, d: int, width: int,
                             gamma: float = 1.4, eps: float = DMP_EPS, floor: float = DMP_FLOOR):
    """Flags for the initial data: the projected initial polynomial is checked
    against neighbourhood extrema of the exact initial subcell means."""
    vmin, vmax = gather_neighborhood_extrema(exact_sub_ext, d, width)
    return detect(projected, vmin, vmax, d, gamma, eps, floor)
