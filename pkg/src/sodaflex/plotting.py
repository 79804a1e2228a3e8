"""Report figures rendered alongside the delimited outputs.

All figures use the Agg backend and fixed sizes so repeated runs write
byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["save_tilt_figure", "save_spectrum_figure", "save_samples_figure"]

_DPI = 130


def save_tilt_figure(rows: list[dict], path) -> None:
    """Volume and symmetry residuals along a traced curve."""
    rho = [r["rho"] for r in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax1.plot(rho, [r["lattice_volume"] for r in rows], "-", color="tab:blue")
    ax1.set_xlabel("hexagon radius")
    ax1.set_ylabel("unit cell volume")
    ax1.set_title("cell volume along the tilt")
    ax2.plot(rho, [r["central_residual"] for r in rows], "-",
             color="tab:red", label="central symmetry")
    ax2.plot(rho, [max(r["d3_residual"], 1e-18) for r in rows], "-",
             color="tab:green", label="dihedral symmetry")
    ax2.set_yscale("log")
    ax2.set_xlabel("hexagon radius")
    ax2.set_ylabel("residual")
    ax2.set_title("symmetry residuals")
    ax2.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_spectrum_figure(singular_values, tol_line: float, path) -> None:
    """Singular value spectrum of the constraint Jacobian."""
    s = np.asarray(singular_values, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 3.6))
    ax.semilogy(np.arange(1, len(s) + 1), np.maximum(s, 1e-18), "o", ms=3)
    if len(s):
        ax.axhline(tol_line * s.max(), color="tab:red", lw=0.8,
                   label="rank cutoff")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("index")
    ax.set_ylabel("singular value")
    ax.set_title("constraint Jacobian spectrum")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_samples_figure(volumes, path) -> None:
    """Histogram of unit cell volumes over a parameter sample."""
    fig, ax = plt.subplots(figsize=(6, 3.6))
    ax.hist(np.asarray(volumes, dtype=float), bins=40, color="tab:blue")
    ax.set_xlabel("unit cell volume")
    ax.set_ylabel("samples")
    ax.set_title("cell volume across sampled placements")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
