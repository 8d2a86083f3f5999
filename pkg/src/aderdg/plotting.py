"""Figures written to files with the non-interactive matplotlib backend."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .euler import cons_to_prim  # noqa: E402


def plot_line(path, x, W, exact=None, title=""):
    d = W.shape[0] - 2
    names = ["density", "velocity u", "pressure"]
    rows = [W[0], W[1], W[-1]]
    ref = None if exact is None else [exact[0], exact[1], exact[-1]]
    fig, axes = plt.subplots(3, 1, figsize=(6, 8), sharex=True)
    for k, ax in enumerate(axes):
        ax.plot(x, rows[k], "o", ms=3, mfc="none", label="numerical")
        if ref is not None:
            ax.plot(x, ref[k], "k-", lw=1, label="exact")
        ax.set_ylabel(names[k])
    axes[0].set_title(title or f"{d}D cut")
    axes[0].legend(loc="best", fontsize=8)
    axes[-1].set_xlabel("x")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return Path(path)


def plot_field(path, grid, means, beta, gamma=1.4, title=""):
    """Density of the cell means beside the troubled-cell map."""
    rho = cons_to_prim(means, gamma)[0]
    xs = grid.faces(0)
    ys = grid.faces(1) if grid.d > 1 else np.array([0.0, 1.0])
    rho = rho.reshape(len(xs) - 1, len(ys) - 1)
    b = np.asarray(beta, dtype=float).reshape(rho.shape)
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
    m = axes[0].pcolormesh(xs, ys, rho.T, shading="flat", cmap="viridis")
    fig.colorbar(m, ax=axes[0], label="density")
    axes[0].set_title(title or "density")
    axes[1].pcolormesh(xs, ys, b.T, shading="flat", cmap="coolwarm", vmin=0, vmax=1)
    axes[1].set_title("troubled cells (red)")
    for ax in axes:
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return Path(path)


def plot_troubled_history(path, troubled, n_cells):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    frac = np.asarray(troubled, dtype=float) / n_cells
    ax.plot(np.arange(len(frac)), 100.0 * frac)
    ax.set_xlabel("step")
    ax.set_ylabel("troubled cells [%]")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return Path(path)


def plot_convergence(path, rows, N):
    cells = np.array([r["cells"] for r in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    for key, marker in (("L1", "o"), ("L2", "s"), ("Linf", "^")):
        ax.loglog(cells, [r[key] for r in rows], marker + "-", label=key)
    e0 = rows[0]["L1"]
    ax.loglog(cells, e0 * (cells / cells[0]) ** (-(N + 1)), "k--", lw=1, label=f"slope {N + 1}")
    ax.set_xlabel("cells per axis")
    ax.set_ylabel("density error")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return Path(path)
