"""Scaling benchmark: fit wall time versus sample count on synthetic data.

The generated datasets keep the expected cluster size constant (one
cluster per 500 samples) with tight, well-separated blobs, so the local
neighborhood structure stays bounded as n grows.  That is the regime the
near-linearithmic runtime claim is about; crowding ever more samples
into a fixed number of overlapping clusters degrades any
nearest-neighbor search toward quadratic scanning.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .dataset import SyntheticSpec, generate_synthetic
from .errors import ValidationError
from .hierarchy import fit


@dataclass(frozen=True)
class BenchRow:
    n: int
    clusters: int
    seconds: float
    level_sizes: tuple[int, ...]


def bench_spec(n: int, seed: int = 1) -> SyntheticSpec:
    return SyntheticSpec(
        n=n,
        v=2,
        m_true=max(2, n // 500),
        dims=(16, 16),
        separation=1.0,
        noise=0.02,
        seed=seed,
    )


def fitted_slope(rows) -> float | None:
    """Least-squares slope of log(time) against log(n); None for < 2 rows."""
    if len(rows) < 2:
        return None
    x = np.log([r.n for r in rows])
    y = np.log([max(r.seconds, 1e-9) for r in rows])
    return float(np.polyfit(x, y, 1)[0])


def run_scaling_benchmark(sizes, *, backend: str = "tree", repeats: int = 2, seed: int = 1):
    """Best-of-``repeats`` fit time per size; returns (rows, slope)."""
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise ValidationError("no benchmark sizes given")
    if any(s < 2 for s in sizes):
        raise ValidationError("benchmark sizes must be at least 2")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValidationError("benchmark sizes must be strictly ascending")
    if repeats < 1:
        raise ValidationError("repeats must be at least 1")
    rows = []
    for offset, n in enumerate(sizes):
        spec = bench_spec(n, seed=seed + offset)
        dataset = generate_synthetic(spec)
        best = float("inf")
        hierarchy = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            hierarchy = fit(dataset, nn_backend=backend)
            best = min(best, time.perf_counter() - t0)
        rows.append(
            BenchRow(
                n=n,
                clusters=spec.m_true,
                seconds=best,
                level_sizes=hierarchy.level_sizes,
            )
        )
    return rows, fitted_slope(rows)


def rows_csv(rows) -> str:
    lines = ["n,clusters,fit_seconds,level_sizes"]
    for r in rows:
        sizes = " ".join(str(s) for s in r.level_sizes)
        lines.append(f"{r.n},{r.clusters},{repr(float(r.seconds))},{sizes}")
    return "\n".join(lines) + "\n"
