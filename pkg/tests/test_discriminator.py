import math

import numpy as np
import pytest

from plainscore.discriminator import (
    DiscriminatorModel,
    accuracy,
    cross_validate,
    load_model,
    logistic_gradient,
    logistic_loss,
    predict_proba,
    roc_auc,
    save_model,
    top_tokens,
    train,
)
from plainscore.errors import SingleClassData, VocabMismatch
from plainscore.textstats import TokenVocab

SEPARABLE = [
    ({0: 1.0}, 0),
    ({0: 0.8, 1: 0.2}, 0),
    ({1: 1.0}, 1),
    ({1: 0.7, 0: 0.3}, 1),
]


def pairwise_auc(scores):
    """Independent oracle: fraction of correctly ordered (pos, neg) pairs, ties half."""
    pos = [s for s, label in scores if label == 1]
    neg = [s for s, label in scores if label == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


class TestTrain:
    def test_separable_toy_set_reaches_full_accuracy(self):
        model = train(SEPARABLE, vocab_size=2)
        assert accuracy(model, SEPARABLE) == 1.0

    def test_zero_model_predicts_half(self):
        model = DiscriminatorModel(weights=np.zeros(3), bias=0.0, vocab_ref="v")
        assert predict_proba(model, {0: 1.0}) == 0.5
        assert predict_proba(model, {2: 0.4, 1: 0.6}) == 0.5

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassData):
            train([({0: 1.0}, 0), ({1: 1.0}, 0)], vocab_size=2)

    def test_training_is_deterministic(self):
        a = train(SEPARABLE, vocab_size=2, max_iter=200)
        b = train(SEPARABLE, vocab_size=2, max_iter=200)
        assert np.array_equal(a.weights, b.weights)
        assert a.bias == b.bias

    def test_metadata_reports_convergence_state(self):
        model = train(SEPARABLE, vocab_size=2, max_iter=3)
        assert model.training_meta["iterations"] == 3
        assert model.training_meta["converged"] is False

    def test_regularization_shrinks_weights(self):
        small = train(SEPARABLE, vocab_size=2, lam=1e-4, max_iter=300)
        large = train(SEPARABLE, vocab_size=2, lam=1.0, max_iter=300)
        assert np.abs(large.weights).max() < np.abs(small.weights).max()

    def test_analytic_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            n, v = 6, 4
            examples = []
            for i in range(n):
                vec = {j: float(rng.uniform(0, 1)) for j in range(v) if rng.random() < 0.7}
                vec = vec or {0: 1.0}
                examples.append((vec, int(rng.integers(0, 2))))
            w = rng.normal(size=v)
            b = float(rng.normal())
            lam = 0.01
            grad_w, grad_b = logistic_gradient(examples, w, b, lam, v)
            step = 1e-5
            numeric = np.zeros(v)
            for j in range(v):
                bumped = w.copy()
                bumped[j] += step
                up = logistic_loss(examples, bumped, b, lam, v)
                bumped[j] -= 2 * step
                down = logistic_loss(examples, bumped, b, lam, v)
                numeric[j] = (up - down) / (2 * step)
            up = logistic_loss(examples, w, b + step, lam, v)
            down = logistic_loss(examples, w, b - step, lam, v)
            numeric_b = (up - down) / (2 * step)
            ga = np.concatenate([grad_w, [grad_b]])
            gf = np.concatenate([numeric, [numeric_b]])
            rel = np.linalg.norm(ga - gf) / max(np.linalg.norm(ga), np.linalg.norm(gf))
            assert rel < 1e-4


class TestPredict:
    def test_sigmoid_two(self):
        model = DiscriminatorModel(weights=np.array([2.0]), bias=0.0, vocab_ref="v")
        assert predict_proba(model, {0: 1.0}) == pytest.approx(0.8808, abs=1e-4)

    def test_sigmoid_minus_two(self):
        model = DiscriminatorModel(weights=np.array([-2.0]), bias=0.0, vocab_ref="v")
        assert predict_proba(model, {0: 1.0}) == pytest.approx(0.1192, abs=1e-4)

    def test_negation_symmetry(self):
        rng = np.random.default_rng(3)
        model = DiscriminatorModel(weights=rng.normal(size=5), bias=0.7, vocab_ref="v")
        negated = DiscriminatorModel(weights=-model.weights, bias=-model.bias, vocab_ref="v")
        for _ in range(20):
            vec = {int(i): float(rng.uniform(0, 1)) for i in rng.choice(5, size=3, replace=False)}
            total = predict_proba(model, vec) + predict_proba(negated, vec)
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_vocab_mismatch(self):
        model = DiscriminatorModel(weights=np.zeros(2), bias=0.0, vocab_ref="v")
        with pytest.raises(VocabMismatch):
            predict_proba(model, {5: 1.0})


class TestTopTokens:
    def test_table_of_published_weights(self):
        tokens = {
            "0": -7.262, ".": -6.126, "%": -5.379, "CI": -4.986, ";": -4.821,
            "95": -4.593, "significant": -4.273, "R": -3.726, "1": -3.685,
            "There": -3.477, "bias": -3.303, "people": 4.681, "review": 4.551,
            "We": 4.461, "This": 3.413, "that": 2.943, "The": 2.836,
            "side": 2.722, "who": 2.671, "blood": 2.515, "found": 2.514,
        }
        vocab = TokenVocab(list(tokens))
        weights = np.array([tokens[t] for t in vocab.id_to_token])
        model = DiscriminatorModel(weights=weights, bias=0.0, vocab_ref="table")
        negatives, positives = top_tokens(model, 3, vocab)
        assert negatives[0] == ("0", pytest.approx(-7.262))
        assert positives[0] == ("people", pytest.approx(4.681))

    def test_all_zero_ties_break_by_id(self):
        model = DiscriminatorModel(weights=np.zeros(4), bias=0.0, vocab_ref="v")
        negatives, positives = top_tokens(model, 1)
        assert negatives == [(0, 0.0)]
        assert positives == [(0, 0.0)]

    def test_positive_means_largest_regardless_of_sign(self):
        model = DiscriminatorModel(
            weights=np.array([-1.0, 2.0, -3.0]), bias=0.0, vocab_ref="v"
        )
        negatives, positives = top_tokens(model, 2)
        assert [i for i, _ in negatives] == [2, 0]
        assert [i for i, _ in positives] == [1, 0]

    def test_k_too_large(self):
        model = DiscriminatorModel(weights=np.zeros(2), bias=0.0, vocab_ref="v")
        with pytest.raises(ValueError):
            top_tokens(model, 3)


class TestRocAuc:
    def test_perfect_separation(self):
        curve = roc_auc([(0.9, 1), (0.8, 1), (0.1, 0), (0.2, 0)])
        assert curve.auc == 1.0

    def test_half_ordered(self):
        curve = roc_auc([(0.8, 1), (0.2, 1), (0.6, 0), (0.4, 0)])
        assert curve.auc == 0.5

    def test_all_ties(self):
        curve = roc_auc([(0.5, 1), (0.5, 0), (0.5, 1), (0.5, 0)])
        assert curve.auc == 0.5

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassData):
            roc_auc([(0.5, 1), (0.6, 1)])

    def test_curve_shape(self):
        rng = np.random.default_rng(5)
        scores = [(float(rng.normal()), int(rng.integers(0, 2))) for _ in range(50)]
        scores += [(0.1, 0), (0.2, 1)]  # both labels guaranteed
        curve = roc_auc(scores)
        assert curve.points[0] == (0.0, 0.0)
        assert curve.points[-1] == (1.0, 1.0)
        xs = [p[0] for p in curve.points]
        ys = [p[1] for p in curve.points]
        assert xs == sorted(xs)
        assert ys == sorted(ys)

    def test_trapezoid_equals_pairwise_on_random_instances(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            n = int(rng.integers(4, 40))
            scores = [
                (float(rng.choice([0.1, 0.25, 0.5, 0.5, 0.9]) + rng.normal(0, 0.2)), int(label))
                for label in rng.integers(0, 2, size=n)
            ]
            labels = {label for _, label in scores}
            if labels != {0, 1}:
                scores += [(0.0, 0), (1.0, 1)]
            assert roc_auc(scores).auc == pytest.approx(pairwise_auc(scores), abs=1e-9)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(8)
        scores = [(float(rng.normal()), int(rng.integers(0, 2))) for _ in range(40)]
        scores += [(2.0, 1), (-2.0, 0)]
        base = roc_auc(scores).auc
        transformed = [(math.exp(0.5 * s) + 3, label) for s, label in scores]
        assert roc_auc(transformed).auc == pytest.approx(base, abs=1e-12)

    def test_label_flip_maps_auc(self):
        rng = np.random.default_rng(9)
        scores = [(float(rng.normal()), int(rng.integers(0, 2))) for _ in range(30)]
        scores += [(2.0, 1), (-2.0, 0)]
        flipped = [(s, 1 - label) for s, label in scores]
        assert roc_auc(flipped).auc == pytest.approx(1.0 - roc_auc(scores).auc, abs=1e-9)

    def test_lower_scores_positive_orientation(self):
        scores = [(0.1, 1), (0.2, 1), (0.8, 0), (0.9, 0)]
        assert roc_auc(scores, higher_means_positive=False).auc == 1.0


class TestCrossValidation:
    def test_fold_count_and_determinism(self):
        examples = SEPARABLE * 5
        a = cross_validate(examples, vocab_size=2, folds=5, seed=1, max_iter=200)
        b = cross_validate(examples, vocab_size=2, folds=5, seed=1, max_iter=200)
        assert len(a) == 5
        assert a == b

    def test_separable_folds_score_high(self):
        examples = SEPARABLE * 5
        accs = cross_validate(examples, vocab_size=2, folds=5, seed=0, max_iter=300)
        assert min(accs) == 1.0


class TestModelFile:
    def test_round_trip(self, tmp_path):
        model = train(SEPARABLE, vocab_size=2, vocab_ref="toy")
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert np.allclose(loaded.weights, model.weights)
        assert loaded.bias == pytest.approx(model.bias)
        assert loaded.vocab_ref == "toy"
        assert loaded.training_meta["iterations"] == model.training_meta["iterations"]

    def test_sparse_sorted_by_id(self, tmp_path):
        import json

        model = DiscriminatorModel(
            weights=np.array([0.0, -1.5, 0.0, 2.5]), bias=0.1, vocab_ref="v"
        )
        path = tmp_path / "model.json"
        save_model(model, path)
        payload = json.loads(path.read_text())
        assert payload["weights"] == [[1, -1.5], [3, 2.5]]
