"""Figure rendering for the report outputs.

Each function takes already-computed arrays and writes a single PNG next to
the delimited output it illustrates.  Numerical artifacts never depend on
this module; it is imported only when figure rendering is requested.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def save_curve(
    path: str | Path,
    x: np.ndarray,
    y: np.ndarray,
    xlabel: str,
    ylabel: str,
    title: str = "",
) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    ax.plot(x, y, marker="o", ms=3.5, lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def save_series(path: str | Path, times: np.ndarray, series: dict) -> None:
    """Conserved-quantity panel: mass, Hamiltonian and virial over time."""
    keys = [k for k in ("mass", "hamiltonian", "virial_K", "grad_norm") if k in series]
    fig, axes = plt.subplots(len(keys), 1, figsize=(5.5, 1.8 * len(keys)), sharex=True)
    if len(keys) == 1:
        axes = [axes]
    for ax, key in zip(axes, keys):
        ax.plot(times, series[key], lw=1.0)
        ax.set_ylabel(key)
        ax.grid(True, alpha=0.3)
    axes[-1].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def save_profile(path: str | Path, r: np.ndarray, values: np.ndarray) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    ax.plot(r, np.abs(values), lw=1.2)
    ax.set_xlabel("r")
    ax.set_ylabel("|u|")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def save_heatmap(
    path: str | Path,
    c_axis: np.ndarray,
    h_axis: np.ndarray,
    values: np.ndarray,
    cap: float | None = None,
) -> None:
    """Mass-energy map of the indicator; infinite entries rendered as the
    cap so the admissible region stands out."""
    z = np.array(values, dtype=float)
    finite = np.isfinite(z)
    if cap is None:
        cap = 2.0 * np.max(z[finite]) if np.any(finite) else 1.0
    z[~finite] = cap
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    im = ax.pcolormesh(c_axis, h_axis, z.T, shading="auto", vmax=cap)
    fig.colorbar(im, ax=ax, label="D")
    ax.set_xlabel("mass")
    ax.set_ylabel("energy")
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
