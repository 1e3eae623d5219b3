import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rbfscore import InputError, KmeansConfig, kmeans
from rbfscore.kmeans import kmeans_plus_plus, lloyd


def same_partition(a, b):
    a, b = np.asarray(a), np.asarray(b)
    pairs = set(zip(a.tolist(), b.tolist()))
    return len(pairs) == len(set(a.tolist())) == len(set(b.tolist()))


def exhaustive_two_means(x):
    """Smallest within-cluster sum of squares over all 2-partitions of 1-D points."""
    x = np.asarray(x, dtype=float)
    best = np.inf
    n = len(x)
    for mask in itertools.product([0, 1], repeat=n - 1):
        labels = np.array((0,) + mask)
        if labels.min() == labels.max():
            continue
        cost = sum(((x[labels == j] - x[labels == j].mean()) ** 2).sum() for j in (0, 1))
        best = min(best, cost)
    return best


def test_separated_pairs():
    res = kmeans([0.0, 0.1, 10.0, 10.1], KmeansConfig(k=2))
    assert same_partition(res.labels, [0, 0, 1, 1])
    assert res.inertia == pytest.approx(0.01)


def test_toy_feature_column():
    F = np.array([0.2692, 0.2467, 0.1861, 0.2072, -4.2802, -4.6704])
    assert same_partition(kmeans(F, KmeansConfig(k=2)).labels, [0, 0, 0, 0, 1, 1])


def test_small_instances_reach_optimum():
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = int(rng.integers(3, 9))
        x = rng.standard_normal(n)
        res = kmeans(x, KmeansConfig(k=2, restarts=10, seed=int(rng.integers(1 << 30))))
        assert res.inertia == pytest.approx(exhaustive_two_means(x), rel=1e-9, abs=1e-12)


def test_errors():
    with pytest.raises(InputError):
        kmeans([1.0, 2.0], KmeansConfig(k=3))
    with pytest.raises(InputError):
        kmeans([1.0, np.nan, 2.0], KmeansConfig(k=2))
    with pytest.raises(InputError):
        KmeansConfig(k=0)
    with pytest.raises(InputError):
        KmeansConfig(k=2, restarts=0)


def test_empty_cluster_is_repaired():
    X = np.array([[0.0], [0.1], [0.2], [5.0]])
    # both initial centroids far to the right: one cluster starts empty
    labels, C, _ = lloyd(X, np.array([[100.0], [101.0]]))
    assert set(labels.tolist()) == {0, 1}


def test_duplicate_points():
    X = np.zeros((5, 2))
    res = kmeans(X, KmeansConfig(k=2))
    assert res.inertia == 0.0


def test_plus_plus_picks_distinct_points():
    X = np.array([[0.0], [0.0], [1.0], [2.0]])
    C = kmeans_plus_plus(X, 3, np.random.default_rng(0))
    assert len({float(c) for c in C[:, 0]}) == 3


points = st.integers(0, 2**32 - 1).flatmap(
    lambda seed: st.just(np.random.default_rng(seed).standard_normal(
        (int(np.random.default_rng(seed).integers(4, 30)), 2))))


@given(points, st.integers(1, 4))
def test_inertia_non_increasing(X, k):
    rng = np.random.default_rng(0)
    C0 = kmeans_plus_plus(X, k, rng)
    _, _, history = lloyd(X, C0, max_iters=300, tol=0.0)
    assert all(b <= a + 1e-12 * max(a, 1) for a, b in zip(history, history[1:]))


@given(points, st.integers(1, 4), st.integers(0, 1000))
def test_deterministic(X, k, seed):
    cfg = KmeansConfig(k=k, seed=seed)
    a, b = kmeans(X, cfg), kmeans(X, cfg)
    assert np.array_equal(a.labels, b.labels) and a.inertia == b.inertia


@given(points, st.floats(-50, 50), st.floats(0.1, 10))
def test_translation_and_scaling(X, shift, scale):
    cfg = KmeansConfig(k=2, seed=3)
    base = kmeans(X, cfg).labels
    moved = kmeans(X * scale + shift, cfg).labels
    assert same_partition(base, moved)


@given(points)
def test_reflection(X):
    cfg = KmeansConfig(k=3, seed=11)
    flipped = X.copy()
    flipped[:, 0] *= -1
    assert same_partition(kmeans(X, cfg).labels, kmeans(flipped, cfg).labels)
