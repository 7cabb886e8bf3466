"""Render the scaling-benchmark figure written next to the timings CSV."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_scaling_figure(rows, slope, path) -> None:
    """Log-log wall time vs n with fitted-slope and n log n references."""
    ns = np.array([r.n for r in rows], dtype=float)
    ts = np.array([max(r.seconds, 1e-9) for r in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    ax.loglog(ns, ts, "o-", color="tab:blue", label="measured fit time")
    if len(rows) >= 2:
        grid = np.geomspace(ns[0], ns[-1], 64)
        if slope is not None:
            ax.loglog(
                grid,
                ts[0] * (grid / ns[0]) ** slope,
                "--",
                color="tab:orange",
                label=f"fitted slope {slope:.2f}",
            )
        ref = grid * np.log(grid)
        ref *= ts[0] / ref[0]
        ax.loglog(grid, ref, ":", color="tab:gray", label="n log n reference")
    ax.set_xlabel("samples")
    ax.set_ylabel("wall time (s)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
