import numpy as np

from mhc import MultiViewDataset


def random_dataset(rng, n=None, v=None, max_n=200, max_dim=32) -> MultiViewDataset:
    """Random continuous dataset; Gaussian rows can never have zero norm."""
    if n is None:
        n = int(rng.integers(2, max_n + 1))
    if v is None:
        v = int(rng.integers(1, 4))
    views = tuple(
        rng.standard_normal((n, int(rng.integers(2, max_dim + 1)))) for _ in range(v)
    )
    return MultiViewDataset(views=views)


def dataset_with_duplicates(rng, n=None, v=None, max_n=200, max_dim=16) -> MultiViewDataset:
    """Dataset where whole samples repeat across all views (exact distance ties)."""
    if n is None:
        n = int(rng.integers(4, max_n + 1))
    if v is None:
        v = int(rng.integers(1, 4))
    base = max(2, n // 3)
    picks = rng.integers(0, base, size=n)  # many samples share a source row
    views = []
    for _ in range(v):
        pool = rng.standard_normal((base, int(rng.integers(2, max_dim + 1))))
        views.append(pool[picks])
    return MultiViewDataset(views=tuple(views))
