"""Uniform Cartesian grids, node-neighbourhoods and ghost-cell boundary conditions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError

BC_KINDS = ("periodic", "dirichlet", "reflective", "outflow")


@dataclass(frozen=True)
class CartesianGrid:
    lower: tuple
    upper: tuple
    shape: tuple

    def __post_init__(self):
        if not (len(self.lower) == len(self.upper) == len(self.shape)) or len(self.shape) not in (1, 2):
            raise ConfigError("grid must be 1D or 2D with matching extents and shape")
        if any(int(n) < 1 for n in self.shape):
            raise ConfigError(f"grid needs at least one cell per axis, got {self.shape}")
        if any(hi <= lo for lo, hi in zip(self.lower, self.upper)):
            raise ConfigError("grid extents must be increasing")

    @property
    def d(self) -> int:
        return len(self.shape)

    @property
    def h(self) -> tuple:
        return tuple((hi - lo) / n for lo, hi, n in zip(self.lower, self.upper, self.shape))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    def faces(self, axis: int) -> np.ndarray:
        return np.linspace(self.lower[axis], self.upper[axis], self.shape[axis] + 1)

    def centers(self, axis: int, ghosts: int = 0) -> np.ndarray:
        idx = np.arange(-ghosts, self.shape[axis] + ghosts)
        return self.lower[axis] + (idx + 0.5) * self.h[axis]

    def index(self, cell: int) -> tuple:
        return np.unravel_index(cell, self.shape)

    def cell_id(self, *ij) -> int:
        return int(np.ravel_multi_index(ij, self.shape))

    def coordinates(self, xi: np.ndarray, ghosts: int = 0) -> list:
        """Physical coordinates of reference points ``xi`` in every (extended) cell.

        Returns one array per axis, shaped (*ext_cells, len(xi), ..., len(xi)).
        """
        d = self.d
        xi = np.asarray(xi, dtype=float)
        out = []
        for ax in range(d):
            left = self.lower[ax] + np.arange(-ghosts, self.shape[ax] + ghosts) * self.h[ax]
            pts = left[:, None] + xi[None, :] * self.h[ax]  # (ncells_ax, m)
            shape = [1] * (2 * d)
            shape[ax] = pts.shape[0]
            shape[d + ax] = pts.shape[1]
            full = [self.shape[a] + 2 * ghosts for a in range(d)] + [len(xi)] * d
            out.append(np.broadcast_to(pts.reshape(shape), full))
        return out

    def neighborhood(self, cell: int, periodic: Sequence[bool] | None = None) -> list:
        """Cell ids sharing at least a node with ``cell``, the cell itself included."""
        periodic = periodic or [False] * self.d
        ij = self.index(cell)
        out = []
        for offs in itertools.product((-1, 0, 1), repeat=self.d):
            nb = []
            for a, o in enumerate(offs):
                k = ij[a] + o
                if periodic[a]:
                    k %= self.shape[a]
                elif not 0 <= k < self.shape[a]:
                    break
                nb.append(k)
            else:
                out.append(self.cell_id(*nb))
        return sorted(set(out))


@dataclass(frozen=True)
class BoundarySpec:
    """Boundary kind per side: ``sides[axis] = (low, high)``.

    ``state`` supplies primitive states ``state(x, y, t)`` (``y`` is None in
    1D) for Dirichlet sides.
    """

    sides: tuple
    state: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        for lo, hi in self.sides:
            for kind in (lo, hi):
                if kind not in BC_KINDS:
                    raise ConfigError(f"unknown boundary kind {kind!r}")
            if (lo == "periodic") != (hi == "periodic"):
                raise ConfigError("periodic boundaries must be paired on both sides of an axis")
        if self.state is None and any("dirichlet" in s for s in self.sides):
            raise ConfigError("dirichlet boundary needs a state sampler")

    @classmethod
    def uniform(cls, kind: str, d: int, state=None) -> "BoundarySpec":
        return cls(tuple((kind, kind) for _ in range(d)), state)

    def periodic(self, axis: int) -> bool:
        return self.sides[axis][0] == "periodic"

    @property
    def needs_dirichlet(self) -> bool:
        return any("dirichlet" in s for s in self.sides)


def _take(arr, axis, start, stop):
    sl = [slice(None)] * arr.ndim
    sl[axis] = slice(start, stop)
    return tuple(sl)


def fill_ghosts(arr: np.ndarray, bc: BoundarySpec, width: int, dirichlet_source: np.ndarray | None = None,
                inner: bool = True) -> np.ndarray:
    """Fill ``width`` ghost layers of ``arr`` in place and return it.

    ``arr`` has shape (nu, *ext_cells, *inner) with ``d`` inner axes when
    ``inner`` is true (nodes or subcells, flipped on mirror boundaries).
    Axes are processed in order so corner ghosts end up consistent.
    Reflective walls mirror the data and negate the normal momentum; outflow
    mirrors without the sign change (zero normal gradient at the face).
    """
    d = len(bc.sides)
    w = width
    for ax in range(d):
        cax = 1 + ax
        iax = 1 + d + ax
        n = arr.shape[cax] - 2 * w
        if n < 1:
            raise ConfigError("ghost fill needs at least one interior cell")
        for side, kind in enumerate(bc.sides[ax]):
            ghost = _take(arr, cax, 0, w) if side == 0 else _take(arr, cax, n + w, n + 2 * w)
            if kind == "periodic":
                if n < w:
                    reps = np.take(arr, (np.arange(w) - w) % n + w if side == 0 else np.arange(w) % n + w, axis=cax)
                    arr[ghost] = reps
                else:
                    src = _take(arr, cax, n, n + w) if side == 0 else _take(arr, cax, w, 2 * w)
                    arr[ghost] = arr[src]
            elif kind == "dirichlet":
                if dirichlet_source is None:
                    raise ConfigError("dirichlet boundary needs sampled boundary data")
                arr[ghost] = dirichlet_source[ghost]
            else:
                if n >= w:
                    src = _take(arr, cax, w, 2 * w) if side == 0 else _take(arr, cax, n, n + w)
                    data = np.flip(arr[src], axis=cax)
                else:
                    idx = np.clip(w - 1 - np.arange(w), 0, n - 1) + w if side == 0 else \
                        np.clip(n - 1 - np.arange(w), 0, n - 1) + w
                    data = np.take(arr, idx, axis=cax)
                if inner:
                    data = np.flip(data, axis=iax)
                if kind == "reflective":
                    data = data.copy()
                    data[1 + ax] = -data[1 + ax]
                arr[ghost] = data
    return arr


def pad_cells(arr: np.ndarray, d: int, width: int) -> np.ndarray:
    """Zero-padded copy with ``width`` ghost cells on each side of every cell axis."""
    pad = [(0, 0)] + [(width, width)] * d + [(0, 0)] * (arr.ndim - 1 - d)
    return np.pad(arr, pad)


def interior(arr: np.ndarray, d: int, width: int) -> np.ndarray:
    sl = (slice(None),) + (slice(width, -width if width else None),) * d
    return arr[sl]
