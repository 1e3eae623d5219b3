import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rbfscore import (Graph, InputError, KatzConfig, NumericalError, PipelineConfig,
                      RbfChoice, Variant, classify_signal, detect, nmi, permute_nodes,
                      ratio_features, regularized_laplacian)

VARIANTS = list(Variant)


def two_cliques(size=5, bridge=True):
    edges = [(a, b) for a, b in itertools.combinations(range(size), 2)]
    edges += [(a + size, b + size) for a, b in edges]
    if bridge:
        edges.append((size - 1, size))
    truth = {str(i): int(i >= size) for i in range(2 * size)}
    return Graph.from_edges([(str(u), str(v)) for u, v in edges], ground_truth=truth)


# --------------------------------------------------------------------------
# regularised normalisation

def test_laplacian_matches_definition(rng):
    K = np.abs(rng.standard_normal((7, 7)))
    K = (K + K.T) / 2
    L = regularized_laplacian(K, 0.1)
    d = K.sum(axis=1)
    D = np.diag(1 / np.sqrt(d + 0.1 * d.max()))
    assert np.allclose(L, D @ K @ D, atol=1e-15)


def test_laplacian_spectrum_bounded(rng):
    # with non-negative K the spectrum of L lies in [-1, 1]
    for _ in range(20):
        K = np.abs(rng.standard_normal((10, 10)))
        K = (K + K.T) / 2
        values = np.linalg.eigvalsh(regularized_laplacian(K, 0.1))
        assert np.all(np.abs(values) <= 1 + 1e-12)


def test_laplacian_sigma_zero_with_isolated_node():
    K = np.zeros((3, 3))
    K[0, 1] = K[1, 0] = 1.0
    with pytest.raises(NumericalError) as info:
        regularized_laplacian(K, 0.0)
    assert info.value.stage == "laplacian"
    L = regularized_laplacian(K, 0.1)
    assert not np.any(L[2])


def test_laplacian_rejects_non_finite():
    with pytest.raises(NumericalError):
        regularized_laplacian(np.array([[0, np.inf], [np.inf, 0]]))


# --------------------------------------------------------------------------
# weak/strong signal test

def test_weak_example():
    rep = classify_signal([0.9, 0.5, 0.47, 0.1], k=2, t=0.1)
    assert rep.weak and rep.k_prime == 3
    assert rep.ratio == pytest.approx(0.94)
    assert rep.gaps[0] == pytest.approx(0.06)


def test_strong_example():
    rep = classify_signal([0.9, 0.5, 0.2, 0.1], k=2, t=0.1)
    assert not rep.weak and rep.k_prime == 2
    assert rep.gaps[0] == pytest.approx(0.6)


def test_negative_third_is_strong():
    rep = classify_signal([0.8783, 0.8111, -0.8497], k=2, t=0.1)
    assert rep.classification == "strong"
    # a large negative eigenvalue in the selection pushes the gap past 1
    assert rep.gaps[0] > 1


def test_gaps_are_nested():
    rep = classify_signal([1.0, 0.9, 0.85, 0.3, -0.6], k=2, t=0.1)
    assert len(rep.gaps) == 3
    assert rep.gaps[0] == pytest.approx(1 - 0.85 / 0.9)
    # the four largest in magnitude skip 0.3
    assert rep.gaps[1] == pytest.approx(1 - (-0.6) / 0.85)
    assert rep.gaps[2] == pytest.approx(1 - (-0.6) / 0.3)


def test_signal_needs_enough_values():
    with pytest.raises(InputError):
        classify_signal([1.0, 0.5], k=2)


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=6),
       st.floats(0.01, 0.99))
def test_gap_agrees_with_ratio_test(values, t):
    values = sorted(values, reverse=True)
    rep = classify_signal(values, k=2, t=t)
    assert rep.k_prime == (3 if rep.weak else 2)
    if rep.weak:
        assert rep.gaps[0] <= t + 1e-12


# --------------------------------------------------------------------------
# ratio features

def test_raw_ratio():
    vecs = np.array([[1.0, 2.0], [2.0, -1.0], [4.0, 4.0]])
    assert np.allclose(ratio_features([1.0, 0.5], vecs), [[2.0], [-0.5], [1.0]])


def test_weighted_ratio():
    vecs = np.array([[1.0, 2.0], [2.0, -1.0]])
    F = ratio_features([2.0, -0.5], vecs, mode="weighted")
    assert np.allclose(F, [[2.0 * -0.25], [-0.5 * -0.25]])


def test_denominator_floor_keeps_sign():
    vecs = np.array([[0.0, 1.0], [-1e-12, 1.0], [1e-12, 1.0]])
    F = ratio_features([1.0, 0.5], vecs)
    assert np.allclose(F[:, 0], [1e8, -1e8, 1e8])
    assert np.all(np.isfinite(F))


def test_clamp():
    vecs = np.array([[1e-3, 1.0], [1.0, 1.0]])
    F = ratio_features([1.0, 0.5], vecs, clamp=10.0)
    assert F.max() == 10.0


def test_ratio_needs_two_vectors():
    with pytest.raises(InputError):
        ratio_features([1.0], np.ones((3, 1)))


# --------------------------------------------------------------------------
# full pipeline

@pytest.mark.parametrize("variant", VARIANTS)
def test_two_cliques_recovered(variant):
    g = two_cliques()
    res = detect(g, PipelineConfig(variant=variant, k=2, rbf=RbfChoice("gaussian", 1.0)))
    assert nmi(g.ground_truth, res.labels) == pytest.approx(1.0)


@pytest.mark.parametrize("variant", ["sc", "scoreh+"])
def test_toy_recovered(variant, toy):
    # on the plain toy adjacency the second-largest eigenvalue in magnitude is
    # negative, so SCORE and SCORE+ split it along the bipartite-like mode
    res = detect(toy, PipelineConfig(variant=variant, k=2, rbf=RbfChoice("gaussian", 0.2)))
    assert nmi([0, 0, 0, 0, 1, 1], res.labels) == pytest.approx(1.0)


def test_signal_presence(toy):
    for variant in VARIANTS:
        res = detect(toy, PipelineConfig(variant=variant, k=2))
        needs_signal = variant in (Variant.SCORE_PLUS, Variant.SCOREH_PLUS)
        assert (res.signal is not None) == needs_signal


def test_stages_kept(toy):
    res = detect(toy, PipelineConfig(k=2, rbf=RbfChoice("gaussian", 0.2)), keep_stages=True)
    assert set(res.stages) == {"A", "W", "K", "L", "eigenvalues", "eigenvectors",
                               "features"}
    assert res.stages["features"].shape == (6, res.k_prime - 1)
    assert set(res.condition_numbers) == {"A", "W", "K", "L"}


def test_diagnostics_off(toy):
    res = detect(toy, PipelineConfig(k=2, diagnostics=False))
    assert res.condition_numbers == {}


def test_auto_c_records_choice(toy):
    cfg = PipelineConfig(k=2, auto_c=True, c_grid=(0.1, 0.2, 0.5))
    res = detect(toy, cfg)
    assert res.rbf.c in (0.1, 0.2, 0.5)


def test_deterministic(toy):
    cfg = PipelineConfig(k=2, seed=17)
    a, b = detect(toy, cfg), detect(toy, cfg)
    assert np.array_equal(a.labels, b.labels) and a.inertia == b.inertia


def test_jacobi_matches_lapack(toy):
    a = detect(toy, PipelineConfig(k=2, eig_method="lapack"), keep_stages=True)
    b = detect(toy, PipelineConfig(k=2, eig_method="jacobi"), keep_stages=True)
    assert np.allclose(a.stages["features"], b.stages["features"], atol=1e-8)
    assert np.array_equal(a.labels, b.labels)


def test_large_c_small_beta_approaches_score_plus():
    # a flat kernel and a tiny decay leave K proportional to A, which L_sigma
    # normalises away, so SCOREH+ and SCORE+ see the same eigenvectors
    g = two_cliques(6)
    flat = PipelineConfig(k=2, rbf=RbfChoice("gaussian", 1e4), katz=KatzConfig(1e-9))
    a = detect(g, flat, keep_stages=True)
    b = detect(g, PipelineConfig(variant="score+", k=2), keep_stages=True)
    assert np.allclose(a.stages["L"], b.stages["L"], atol=1e-6)
    assert np.allclose(np.abs(a.stages["features"]), np.abs(b.stages["features"]),
                       atol=1e-4)


@given(st.floats(0.01, 0.2))
def test_threshold_only_moves_k_prime(t):
    g = two_cliques()
    res = detect(g, PipelineConfig(variant="score+", k=2, t=t))
    ratio = res.signal.ratio
    assert res.k_prime == (3 if ratio >= 1 - t else 2)


def test_relabelling_nodes_keeps_score_plus_partition(toy):
    # the plain-adjacency variants do not depend on node order
    order = [5, 3, 1, 0, 2, 4]
    moved = permute_nodes(toy, order)
    for variant in ("sc", "score", "score+"):
        a = detect(toy, PipelineConfig(variant=variant, k=2)).labels
        b = detect(moved, PipelineConfig(variant=variant, k=2)).labels
        back = np.empty_like(b)
        back[order] = b
        assert nmi(a, back) == pytest.approx(1.0)


def test_errors(toy):
    with pytest.raises(InputError):
        PipelineConfig(k=1)
    with pytest.raises(InputError):
        PipelineConfig(t=1.0)
    with pytest.raises(InputError):
        PipelineConfig(variant="louvain")
    with pytest.raises(InputError):
        detect(toy, PipelineConfig(k=7))
    with pytest.raises(InputError):
        detect(toy, PipelineConfig(k=6))


def test_katz_divergence_named(toy):
    from rbfscore import KatzDivergenceError
    with pytest.raises(KatzDivergenceError):
        detect(toy, PipelineConfig(k=2, rbf=RbfChoice("mq", 5.0), katz=KatzConfig(0.5)))


def test_config_round_trip():
    cfg = PipelineConfig(variant="sc", k=3, rbf=RbfChoice("imq", 0.03),
                         katz=KatzConfig(0.001), c_grid=(0.1, 0.2))
    assert PipelineConfig.from_dict(cfg.to_dict()) == cfg


def test_variant_aliases():
    assert Variant.parse("SCOREH_PLUS") is Variant.SCOREH_PLUS
    assert Variant.parse("scoreplus") is Variant.SCORE_PLUS


def test_component_denominator_connected_is_identity(toy):
    from rbfscore.spectral import component_leading_vector
    A = np.zeros((6, 6))
    for u, v in toy.edges:
        A[u, v] = A[v, u] = 1
    lead = np.linspace(1, 2, 6)
    assert np.array_equal(component_leading_vector(A, lead), lead)


def test_component_denominator_disconnected():
    from rbfscore.spectral import component_leading_vector
    g = two_cliques(4, bridge=False)
    A = np.zeros((8, 8))
    for u, v in g.edges:
        A[u, v] = A[v, u] = 1
    d = component_leading_vector(A, np.zeros(8))
    # each clique's Perron vector is flat with unit norm
    assert np.allclose(d, 0.5)


@pytest.mark.parametrize("variant", VARIANTS)
def test_disconnected_cliques_recovered(variant):
    g = two_cliques(5, bridge=False)
    res = detect(g, PipelineConfig(variant=variant, k=2, rbf=RbfChoice("gaussian", 1.0)))
    assert nmi(g.ground_truth, res.labels) == pytest.approx(1.0)
