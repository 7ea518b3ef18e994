"""Optional matplotlib figures for curves and simulation checks.

The CLI only calls these behind ``--plot``; CSV stays the primary output.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_curve(x, y, path, label: str = "", ylabel: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, y, lw=1.5, label=label or None)
    ax.set_xlabel("x")
    ax.set_ylabel(ylabel)
    if label:
        ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_simulation(est, path, title: str = "") -> None:
    """Empirical survival with 3-SE bars against the quadrature curve."""
    fig, ax = plt.subplots(figsize=(6, 4))
    x = np.asarray(est.x)
    ax.plot(x, est.analytic, "-", lw=1.5, label="mixture (quadrature)")
    ax.errorbar(x, est.estimate, yerr=3 * np.asarray(est.stderr), fmt="o", ms=4, capsize=3, label="Monte Carlo, 3 SE")
    ax.set_xlabel("x")
    ax.set_ylabel("survival")
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
