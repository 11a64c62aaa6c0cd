import numpy as np
import pytest

from emolex import (EmotionSet, LabelMatrix, PropagationParams, SeedLexicon,
                    TransitionMatrix, Vocabulary, expand,
                    propagate_closed_form, propagate_iterative)
from emolex.graph import build_transition

from conftest import make_store, two_cluster_seed, two_cluster_store


def two_node_instance():
    tm = TransitionMatrix(np.array([[0.5, 0.5], [0.5, 0.5]]), 1, [0, 1])
    lm = LabelMatrix(np.array([[1.0, 0.0], [0.5, 0.5]]), [True, False])
    return tm, lm


def random_instance(rng, n, n_labeled, m=6, epsilon=0.01):
    store = make_store(rng.normal(size=(n, 8)))
    mask = np.zeros(n, dtype=bool)
    mask[rng.choice(n, size=n_labeled, replace=False)] = True
    params = PropagationParams(alpha=float(rng.uniform(0.5, 6.0)),
                               b=float(rng.uniform(-2, 1)), epsilon=epsilon)
    tm = build_transition(store, params, mask)
    rows = rng.dirichlet(np.ones(m), size=n)
    rows[~mask] = 1.0 / m
    return tm, LabelMatrix(rows, mask)


class TestIterative:
    def test_geometric_convergence(self):
        tm, lm = two_node_instance()
        solved, report = propagate_iterative(tm, lm, tol=1e-12, max_iter=500)
        assert np.allclose(solved.rows[1], [1.0, 0.0], atol=1e-10)
        assert report.converged
        assert report.residual < 1e-10

    def test_labeled_rows_bit_equal(self):
        tm, lm = two_node_instance()
        solved, _ = propagate_iterative(tm, lm)
        assert np.array_equal(solved.rows[0], lm.rows[0])

    def test_fixed_point_single_sweep(self):
        tm = TransitionMatrix(np.array([[0.5, 0.5], [0.5, 0.5]]), 1, [0, 1])
        lm = LabelMatrix(np.array([[1.0, 0.0], [1.0, 0.0]]), [True, False])
        _, report = propagate_iterative(tm, lm, tol=1e-9)
        assert report.iterations == 1
        assert report.final_delta < 1e-9

    def test_near_uniform_transition_gives_label_mean(self):
        rng = np.random.default_rng(0)
        store = make_store(rng.normal(size=(6, 4)))
        mask = np.array([True, True, False, False, False, False])
        params = PropagationParams(alpha=1.0, b=0.0, epsilon=1 - 1e-12)
        tm = build_transition(store, params, mask)
        rows = np.full((6, 3), 1 / 3)
        rows[0] = [1, 0, 0]
        rows[1] = [0, 1, 0]
        lm = LabelMatrix(rows, mask)
        solved, _ = propagate_iterative(tm, lm, tol=1e-12, max_iter=2000)
        # uniform transition mixes each unlabeled row toward the global mean;
        # with clamping the fixed point weights labeled rows equally
        expected = np.array([0.5, 0.5, 0.0])
        assert np.allclose(solved.rows[2:], expected, atol=1e-6)

    def test_non_convergence_flagged(self):
        tm, lm = two_node_instance()
        _, report = propagate_iterative(tm, lm, tol=1e-15, max_iter=3)
        assert not report.converged
        assert report.iterations == 3

    def test_bad_tol(self):
        tm, lm = two_node_instance()
        with pytest.raises(ValueError):
            propagate_iterative(tm, lm, tol=0.0)


class TestClosedForm:
    def test_two_node_exact(self):
        tm, lm = two_node_instance()
        solved, report = propagate_closed_form(tm, lm)
        assert np.allclose(solved.rows[1], [1.0, 0.0], atol=1e-14)
        assert report.residual < 1e-14

    def test_agrees_with_iterative(self):
        rng = np.random.default_rng(1)
        for trial in range(5):
            n = int(rng.integers(8, 24))
            tm, lm = random_instance(rng, n, max(2, n // 5))
            closed, _ = propagate_closed_form(tm, lm)
            iterative, _ = propagate_iterative(tm, lm, tol=1e-13, max_iter=20000)
            assert np.max(np.abs(closed.rows - iterative.rows)) < 1e-8

    def test_rows_stochastic(self):
        rng = np.random.default_rng(2)
        tm, lm = random_instance(rng, 15, 4)
        solved, _ = propagate_closed_form(tm, lm)
        assert np.allclose(solved.rows.sum(axis=1), 1.0, atol=1e-8)


class TestPermutationInvariance:
    def test_unlabeled_order_permutes_output(self):
        rng = np.random.default_rng(3)
        vectors = rng.normal(size=(8, 4))
        words = ["w%d" % i for i in range(8)]
        emotions = EmotionSet(("a", "b"))
        entries = {"w0": [1, 0], "w1": [0, 1]}
        seed = SeedLexicon(entries, emotions)
        params = PropagationParams(alpha=2.0, b=-0.5, epsilon=0.05)

        base = expand(make_store(vectors, words), seed, emotions, params,
                      solver="closed")
        perm = [0, 1, 5, 7, 2, 6, 3, 4]  # labeled rows stay in front
        store2 = make_store(vectors[perm], [words[p] for p in perm])
        permuted = expand(store2, seed, emotions, params, solver="closed")
        for w in words:
            assert np.allclose(base.distribution(w), permuted.distribution(w),
                               atol=1e-12)


class TestMonotoneEpsilon:
    def test_larger_epsilon_moves_toward_label_mean(self):
        store = make_store([[1.0, 0.1], [0.1, 1.0], [0.8, 0.6]])
        emotions = EmotionSet(("a", "b"))
        seed = SeedLexicon({"w0": [1, 0], "w1": [0, 1]}, emotions)
        label_mean = np.array([0.5, 0.5])
        tv_prev = None
        for eps in (0.0, 0.3, 0.6, 0.9):
            params = PropagationParams(alpha=4.0, b=0.0, epsilon=eps)
            result = expand(store, seed, emotions, params, solver="closed")
            tv = 0.5 * np.abs(result.distribution("w2") - label_mean).sum()
            if tv_prev is not None:
                assert tv <= tv_prev + 1e-12
            tv_prev = tv


class TestExpand:
    def test_two_cluster_argmax(self, ekman):
        store = two_cluster_store(10, dim=6, separation=5.0, seed=4)
        seed = two_cluster_seed(store, ekman, 2)
        params = PropagationParams(alpha=10.0, b=-5.0, epsilon=0.01)
        result = expand(store, seed, ekman, params, solver="closed")
        for i in range(10):
            assert result.argmax_label("c0_%d" % i) == "joy"
            assert result.argmax_label("c1_%d" % i) == "anger"

    def test_empty_unlabeled_passthrough(self):
        emotions = EmotionSet(("a", "b"))
        store = make_store([[1.0, 0.0], [0.0, 1.0]], ["x", "y"])
        seed = SeedLexicon({"x": [1, 0], "y": [0, 1]}, emotions)
        params = PropagationParams(alpha=1.0, b=0.0)
        result = expand(store, seed, emotions, params)
        assert np.array_equal(result.distributions, [[1, 0], [0, 1]])
        assert result.report.method == "closed-form"

    def test_identical_embeddings_give_label_average(self):
        emotions = EmotionSet(("a", "b"))
        vectors = np.tile([0.3, 0.4], (5, 1)) * np.arange(1, 6)[:, None]
        store = make_store(vectors)
        seed = SeedLexicon({"w0": [1, 0], "w1": [0, 1]}, emotions)
        params = PropagationParams(alpha=2.0, b=0.0, epsilon=0.0)
        result = expand(store, seed, emotions, params, solver="closed")
        assert np.allclose(result.distributions[2:], 0.5, atol=1e-9)

    def test_no_seed_in_vocab_is_error(self):
        emotions = EmotionSet(("a", "b"))
        store = make_store([[1.0, 0.0]], ["x"])
        seed = SeedLexicon({"zzz": [1, 0]}, emotions)
        with pytest.raises(ValueError, match="no seed token"):
            expand(store, seed, emotions, PropagationParams(alpha=1.0, b=0.0))

    def test_sidecar_contents(self):
        emotions = EmotionSet(("a", "b"))
        store = make_store([[1.0, 0.0], [0.5, 0.5]], ["x", "y"])
        seed = SeedLexicon({"x": [1, 0]}, emotions)
        params = PropagationParams(alpha=1.0, b=0.0, epsilon=0.1)
        result = expand(store, seed, emotions, params, solver="iterative")
        sidecar = result.sidecar()
        assert sidecar["solve"]["method"] == "iterative"
        assert sidecar["params"]["epsilon"] == 0.1
