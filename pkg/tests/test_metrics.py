import itertools
import math

import numpy as np
import pytest

from mhc import ValidationError, accuracy, f_measure, nmi, optimal_assignment
from mhc.metrics import contingency_table


def test_contingency_counts():
    table = contingency_table([0, 0, 1, 1], [0, 1, 1, 1])
    np.testing.assert_array_equal(table, [[1, 1], [0, 2]])
    assert table.sum() == 4


def test_accuracy_identity_and_permutation():
    assert accuracy([0, 0, 1, 1], [0, 0, 1, 1]) == 1.0
    assert accuracy([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0
    assert accuracy([0, 0, 1, 1, 2, 2], [2, 2, 0, 0, 1, 1]) == 1.0


def test_accuracy_half_match():
    # both possible label mappings match exactly 2 of 4 samples
    assert accuracy([0, 0, 1, 1], [0, 1, 0, 1]) == 0.5


def test_accuracy_rectangular_padding():
    # 2 true vs 4 predicted clusters: best injective match covers 2 samples
    assert accuracy([0, 0, 1, 1], [0, 1, 2, 3]) == 0.5


def test_accuracy_single_predicted_cluster():
    truth = [0, 0, 0, 1, 1, 2]
    assert accuracy(truth, [5, 5, 5, 5, 5, 5]) == pytest.approx(3 / 6)


def test_nmi_identical():
    assert nmi([0, 1, 0, 1], [1, 0, 1, 0]) == pytest.approx(1.0, abs=1e-12)


def test_nmi_independent_is_zero():
    assert nmi([0, 1, 0, 1], [0, 0, 1, 1]) == 0.0


def test_nmi_refinement_case():
    # I = ln 2, H_true = ln 2, H_pred = ln 4 -> ln2 / sqrt(ln2 * ln4) = 1/sqrt(2)
    want = 1.0 / math.sqrt(2.0)
    assert nmi([0, 0, 1, 1], [0, 1, 2, 3]) == pytest.approx(want, abs=1e-12)


def test_nmi_degenerate_single_cluster_cases():
    assert nmi([0, 0, 0], [0, 0, 0]) == 1.0
    assert nmi([0, 0, 0], [0, 1, 2]) == 0.0
    assert nmi([0, 1, 2], [0, 0, 0]) == 0.0


def test_f_identical():
    assert f_measure([0, 1, 0, 1], [1, 0, 1, 0]) == 1.0


def test_f_pair_enumeration_case():
    # pairs: same-pred {01,02,12}=3, same-true {01,23}=2, both {01}=1
    # P=1/3, R=1/2, F=0.4
    assert f_measure([0, 0, 1, 1], [0, 0, 0, 1]) == pytest.approx(0.4, abs=1e-12)


def test_f_conventions():
    # all-singleton prediction: no same-pred pairs -> P=1, R=0, F=0
    assert f_measure([0, 0, 1, 1], [0, 1, 2, 3]) == 0.0
    # all-singleton truth: R=1 by convention, P=0 -> F=0
    assert f_measure([0, 1, 2, 3], [0, 0, 1, 1]) == 0.0
    # both all-singleton: P=R=1 -> F=1
    assert f_measure([0, 1, 2], [2, 1, 0]) == 1.0


def test_metrics_invariant_under_relabeling():
    rng = np.random.default_rng(97)
    truth = rng.integers(0, 5, size=60)
    pred = rng.integers(0, 4, size=60)
    relabel = rng.permutation(4)
    shuffled = relabel[pred]
    assert accuracy(truth, pred) == pytest.approx(accuracy(truth, shuffled), abs=1e-12)
    assert nmi(truth, pred) == pytest.approx(nmi(truth, shuffled), abs=1e-12)
    assert f_measure(truth, pred) == pytest.approx(f_measure(truth, shuffled), abs=1e-12)


def test_metrics_accept_non_contiguous_labels():
    assert accuracy([5, 5, 9, 9], [200, 200, 7, 7]) == 1.0
    assert nmi([5, 5, 9, 9], [200, 200, 7, 7]) == pytest.approx(1.0, abs=1e-12)
    assert f_measure([5, 5, 9, 9], [200, 200, 7, 7]) == 1.0


def test_metrics_bounds_random():
    rng = np.random.default_rng(101)
    for _ in range(25):
        n = int(rng.integers(2, 40))
        truth = rng.integers(0, int(rng.integers(1, 6)) + 1, size=n)
        pred = rng.integers(0, int(rng.integers(1, 6)) + 1, size=n)
        for score in (accuracy(truth, pred), nmi(truth, pred), f_measure(truth, pred)):
            assert 0.0 <= score <= 1.0


def test_length_mismatch_rejected():
    for fn in (accuracy, nmi, f_measure):
        with pytest.raises(ValidationError):
            fn([0, 1], [0, 1, 2])
        with pytest.raises(ValidationError):
            fn([], [])


def exhaustive_min_cost(cost):
    k = cost.shape[0]
    return min(
        sum(cost[i, p[i]] for i in range(k))
        for p in itertools.permutations(range(k))
    )


def test_assignment_small_cases():
    np.testing.assert_array_equal(optimal_assignment([[0.0, 1.0], [1.0, 0.0]]), [0, 1])
    np.testing.assert_array_equal(optimal_assignment([[1.0, 0.0], [0.0, 1.0]]), [1, 0])


def test_assignment_matches_exhaustive_search():
    rng = np.random.default_rng(103)
    for _ in range(20):
        k = int(rng.integers(1, 7))
        cost = rng.uniform(-5.0, 5.0, size=(k, k))
        perm = optimal_assignment(cost)
        assert sorted(perm) == list(range(k))
        total = float(cost[np.arange(k), perm].sum())
        assert total == pytest.approx(exhaustive_min_cost(cost), abs=1e-9)


def test_assignment_validation():
    with pytest.raises(ValidationError, match="square"):
        optimal_assignment(np.ones((2, 3)))
    with pytest.raises(ValidationError, match="finite"):
        optimal_assignment(np.array([[np.inf, 1.0], [1.0, 0.0]]))
