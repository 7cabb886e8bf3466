"""Acceptance gate: one test per shipped contract, with budgets.

Each test prints a PASS line carrying the measured quantity so the full
run reads as a checklist.  Budgets are wall-clock upper bounds chosen to
catch complexity regressions, not scheduler noise.
"""
import inspect
import itertools
import math
import time

import numpy as np
import pytest

from conftest import dataset_with_duplicates, random_dataset
from mhc import (
    SyntheticSpec,
    accuracy,
    build_graph,
    closest_level,
    connected_components,
    cut,
    f_measure,
    fit,
    generate_synthetic,
    integrate_distances,
    nearest_from_distance_matrix,
    nearest_neighbors_exact,
    nearest_neighbors_fast,
    nmi,
    optimal_assignment,
    view_distance_matrix,
)
from mhc.benchmark import run_scaling_benchmark


def test_orthogonal_invariance_of_integrated_distances():
    # Rotating every view by any orthonormal matrix must leave the
    # integrated distance matrix unchanged entrywise.
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(5, 201))
        views = [
            rng.standard_normal((n, int(rng.integers(2, 33))))
            for _ in range(int(rng.integers(1, 4)))
        ]
        rotated = []
        for x in views:
            dim = x.shape[1]
            q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
            rotated.append(x @ q)
        before = integrate_distances([view_distance_matrix(x) for x in views])
        after = integrate_distances([view_distance_matrix(x) for x in rotated])
        mask = ~np.eye(n, dtype=bool)
        worst = max(worst, float(np.abs(before[mask] - after[mask]).max()))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-9
    assert elapsed < 10.0
    print(f"PASS orthogonal invariance: 100 datasets, max deviation {worst:.2e}, "
          f"{elapsed:.1f}s")


def test_tree_backend_equals_exact_backend():
    # Elementwise agreement including tie-breaks on duplicate rows.
    rng = np.random.default_rng(2025)
    start = time.perf_counter()
    checked = 0
    for i in range(50):
        if i % 3 == 2:
            ds = dataset_with_duplicates(rng, max_n=400)
        elif i % 5 == 0:
            ds = random_dataset(rng, n=int(rng.integers(500, 2001)), max_dim=16)
        else:
            ds = random_dataset(rng, max_n=300)
        fast = nearest_neighbors_fast(ds)
        exact = nearest_neighbors_exact(ds)
        np.testing.assert_array_equal(fast, exact)
        checked += ds.n
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    print(f"PASS tree/exact equivalence: 50 datasets, {checked} rows, {elapsed:.1f}s")


def test_hierarchy_invariants_and_parameter_freedom():
    rng = np.random.default_rng(2026)
    datasets = [random_dataset(rng, max_n=150) for _ in range(12)]
    datasets += [dataset_with_duplicates(rng, max_n=120) for _ in range(6)]
    datasets += [
        generate_synthetic(
            SyntheticSpec(n=int(rng.integers(10, 200)), v=2, m_true=int(rng.integers(2, 6)),
                          dims=(8, 12), separation=float(rng.uniform(0.3, 4.0)),
                          noise=float(rng.uniform(0.0, 0.2)), seed=int(rng.integers(1000)))
        )
        for _ in range(6)
    ]
    datasets.append(random_dataset(rng, n=2, v=1))
    for ds in datasets:
        h = fit(ds)
        sizes = h.level_sizes
        assert all(a > b for a, b in zip(sizes, sizes[1:])), sizes
        assert sizes[-1] == 1
        for fine, coarse in zip(h.levels, h.levels[1:]):
            pairs = {(int(a), int(b)) for a, b in zip(fine.assignment, coarse.assignment)}
            assert len(pairs) == fine.num_clusters  # exact nesting
    params = list(inspect.signature(fit).parameters.values())
    positional = [p.name for p in params if p.kind is not p.KEYWORD_ONLY]
    assert positional == ["dataset"]  # nothing tunable in the API
    assert all(p.default is not p.empty for p in params if p.kind is p.KEYWORD_ONLY)
    sample = datasets[0]
    a = fit(sample, nn_backend="tree")
    b = fit(sample, nn_backend="exact")
    for pa, pb in zip(a.levels, b.levels):
        np.testing.assert_array_equal(pa.assignment, pb.assignment)
    print(f"PASS hierarchy invariants: {len(datasets)} datasets, "
          f"strict decrease to 1 + nesting + dataset-only fit signature")


def test_merge_pass_always_shrinks_and_never_leaves_singletons():
    rng = np.random.default_rng(2027)
    for _ in range(1000):
        k = int(rng.integers(2, 61))
        raw = rng.uniform(0.0, 1.0, size=(k, k))
        if rng.random() < 0.3:
            raw = np.round(raw, 1)  # coarse values force distance ties
        dist = raw + raw.T
        np.fill_diagonal(dist, np.inf)
        part = connected_components(build_graph(nearest_from_distance_matrix(dist)))
        assert part.num_clusters < k
        assert part.sizes().min() >= 2
    print("PASS merge guarantee: 1000 random distance configurations, "
          "all clusters >= 2 nodes, count always shrinks")


def test_end_to_end_quality_on_three_blob_dataset():
    spec = SyntheticSpec(n=300, v=2, m_true=3, dims=(16, 24),
                         separation=1.0, noise=0.05, seed=1)
    ds = generate_synthetic(spec)
    start = time.perf_counter()
    h = fit(ds)
    part = cut(h, ds, 3)
    elapsed = time.perf_counter() - start
    acc = accuracy(ds.labels, part.assignment)
    nmi_score = nmi(ds.labels, part.assignment)
    f_score = f_measure(ds.labels, part.assignment)
    assert acc >= 0.99
    assert nmi_score >= 0.95
    assert f_score >= 0.99
    assert elapsed < 1.0
    print(f"PASS end-to-end quality: ACC {acc:.4f} NMI {nmi_score:.4f} "
          f"F {f_score:.4f} in {elapsed * 1000:.0f}ms")


def test_refinement_reaches_every_requested_count():
    rng = np.random.default_rng(2028)
    hierarchies = 0
    cuts = 0
    for _ in range(200):
        ds = random_dataset(rng, max_n=60)
        h = fit(ds)
        hierarchies += 1
        for m in range(1, h.levels[0].num_clusters + 1):
            part = cut(h, ds, m)
            assert part.num_clusters == m
            cuts += 1
    print(f"PASS exact-k contract: {hierarchies} hierarchies, {cuts} cuts, "
          f"every request hit exactly")


def test_metric_golden_values():
    assert accuracy([0, 0, 1, 1, 2, 2], [2, 2, 0, 0, 1, 1]) == 1.0
    assert nmi([0, 1, 0, 1], [0, 0, 1, 1]) == 0.0
    assert abs(nmi([0, 0, 1, 1], [0, 1, 2, 3]) - 1.0 / math.sqrt(2.0)) <= 1e-4
    assert abs(f_measure([0, 0, 1, 1], [0, 0, 0, 1]) - 0.4) <= 1e-12
    rng = np.random.default_rng(2029)
    for _ in range(100):
        k = int(rng.integers(1, 8))
        cost = rng.uniform(-10.0, 10.0, size=(k, k))
        perm = optimal_assignment(cost)
        got = float(cost[np.arange(k), perm].sum())
        best = min(
            sum(cost[i, p[i]] for i in range(k))
            for p in itertools.permutations(range(k))
        )
        assert abs(got - best) <= 1e-9
    print("PASS metric goldens: ACC 1.0000, NMI 0.0000 / 0.7071, F 0.4000, "
          "assignment = exhaustive for k <= 7 over 100 matrices")


def test_scaling_slope_tree_backend():
    start = time.perf_counter()
    rows, slope = run_scaling_benchmark([10000, 20000, 40000], backend="tree", repeats=2)
    elapsed = time.perf_counter() - start
    times = ", ".join(f"{r.n}: {r.seconds:.2f}s" for r in rows)
    assert slope is not None and slope <= 1.5, (slope, times)
    assert elapsed < 300.0
    print(f"PASS scaling (tree): slope {slope:.2f} <= 1.5 [{times}], total {elapsed:.0f}s")


def test_scaling_slope_exact_backend_is_worse():
    # The blocked full scan should grow near-quadratically on the same
    # sizes, demonstrating the tree path is what buys the headroom.
    rows, slope = run_scaling_benchmark([10000, 20000, 40000], backend="exact", repeats=1)
    times = ", ".join(f"{r.n}: {r.seconds:.2f}s" for r in rows)
    assert slope is not None and slope >= 1.8, (slope, times)
    print(f"PASS scaling contrast (exact): slope {slope:.2f} >= 1.8 [{times}]")


def test_reference_corpus_levels():
    pytest.skip(
        "documentation-only check: no third-party reference corpus is bundled "
        "and its feature preprocessing is unspecified; on pre-extracted "
        "multi-view digit features, fit is expected to produce a level "
        "cascade resembling 464/109/27/9/4/1 and cut(k=10) NMI near 0.9 "
        "(see README, Behavior on real data)"
    )
