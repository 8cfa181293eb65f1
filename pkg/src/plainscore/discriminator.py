"""Bag-of-words logistic regression and ROC analysis.

The classifier separates technical text (label 0) from plain language
(label 1) over L1-normalized bag-of-words features. Training is
deterministic full-batch gradient descent with backtracking line search so
the learned weights, and anything derived from them (token rankings,
penalty sets), are stable across runs.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.special import expit

from .errors import SingleClassData, VocabMismatch
from .files import atomic_write_text
from .textstats import BowVector, TokenVocab

GRAD_TOL = 1e-6


@dataclass
class DiscriminatorModel:
    weights: np.ndarray  # dense, indexed by token id
    bias: float
    vocab_ref: str
    training_meta: dict = field(default_factory=dict)

    @property
    def vocab_size(self) -> int:
        return int(self.weights.shape[0])

    def content_hash(self) -> str:
        payload = json.dumps(
            {
                "vocab": self.vocab_ref,
                "bias": self.bias,
                "weights": [[int(i), float(w)] for i, w in _nonzero(self.weights)],
            },
            ensure_ascii=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _nonzero(weights: np.ndarray):
    for idx in np.flatnonzero(weights):
        yield int(idx), float(weights[idx])


def _as_weight_dict(vector) -> Mapping[int, float]:
    if isinstance(vector, BowVector):
        return vector.weights
    return vector


def _to_csr(examples: Sequence[tuple], vocab_size: int) -> tuple[sparse.csr_matrix, np.ndarray]:
    data, indices, indptr = [], [], [0]
    labels = []
    for vector, label in examples:
        weights = _as_weight_dict(vector)
        for idx, value in weights.items():
            if not 0 <= idx < vocab_size:
                raise VocabMismatch(f"feature id {idx} outside vocab of size {vocab_size}")
            indices.append(idx)
            data.append(value)
        indptr.append(len(indices))
        labels.append(int(label))
    X = sparse.csr_matrix(
        (np.asarray(data, dtype=float), np.asarray(indices), np.asarray(indptr)),
        shape=(len(examples), vocab_size),
    )
    return X, np.asarray(labels, dtype=float)


def _loss_grad(X, y, w, b, lam):
    z = X @ w + b
    # log(1 + e^z) - y*z, computed stably
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + 0.5 * lam * float(w @ w)
    residual = expit(z) - y
    grad_w = X.T @ residual / X.shape[0] + lam * w
    grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


def logistic_loss(examples: Sequence[tuple], weights, bias: float, lam: float, vocab_size: int) -> float:
    """Regularized mean logistic loss of arbitrary parameters (for checks)."""
    X, y = _to_csr(examples, vocab_size)
    loss, _, _ = _loss_grad(X, y, np.asarray(weights, dtype=float), bias, lam)
    return loss


def logistic_gradient(examples: Sequence[tuple], weights, bias: float, lam: float, vocab_size: int):
    """Analytic gradient of the training loss w.r.t. (weights, bias)."""
    X, y = _to_csr(examples, vocab_size)
    _, grad_w, grad_b = _loss_grad(X, y, np.asarray(weights, dtype=float), bias, lam)
    return np.asarray(grad_w), grad_b


def train(
    examples: Sequence[tuple],
    vocab_size: int,
    *,
    lam: float = 1e-4,
    seed: int = 0,
    max_iter: int = 500,
    vocab_ref: str = "",
) -> DiscriminatorModel:
    """Fit the classifier by full-batch gradient descent with backtracking.

    Starts from zero parameters (so an untrained model predicts 0.5
    everywhere) and stops when the gradient infinity-norm drops below 1e-6
    or after max_iter steps; the outcome is recorded in training_meta.
    Requires both labels to be present.
    """
    labels = {int(label) for _, label in examples}
    if labels != {0, 1}:
        raise SingleClassData(f"need labels {{0, 1}}, got {sorted(labels)}")
    X, y = _to_csr(examples, vocab_size)
    w = np.zeros(vocab_size)
    b = 0.0
    step = 1.0
    iterations = 0
    loss, grad_w, grad_b = _loss_grad(X, y, w, b, lam)

    def grad_norm() -> float:
        return max(float(np.max(np.abs(grad_w))), abs(grad_b))

    while iterations < max_iter and grad_norm() >= GRAD_TOL:
        grad_sq = float(grad_w @ grad_w) + grad_b * grad_b
        t = step
        for _ in range(60):
            new_w = w - t * grad_w
            new_b = b - t * grad_b
            new_loss, new_grad_w, new_grad_b = _loss_grad(X, y, new_w, new_b, lam)
            if new_loss <= loss - 1e-4 * t * grad_sq:
                break
            t *= 0.5
        w, b = new_w, new_b
        loss, grad_w, grad_b = new_loss, new_grad_w, new_grad_b
        step = min(t * 2.0, 1e6)
        iterations += 1
    converged = grad_norm() < GRAD_TOL
    final_grad_norm = grad_norm()
    return DiscriminatorModel(
        weights=w,
        bias=b,
        vocab_ref=vocab_ref,
        training_meta={
            "seed": seed,
            "lambda": lam,
            "max_iter": max_iter,
            "iterations": iterations,
            "converged": converged,
            "final_grad_norm": final_grad_norm,
            "final_loss": loss,
            "n_examples": len(examples),
        },
    )


def predict_proba(model: DiscriminatorModel, vector) -> float:
    """P(label = 1) = sigmoid(w . x + b) for a sparse feature vector."""
    weights = _as_weight_dict(vector)
    z = model.bias
    for idx, value in weights.items():
        if not 0 <= idx < model.vocab_size:
            raise VocabMismatch(
                f"feature id {idx} outside model vocab of size {model.vocab_size}"
            )
        z += model.weights[idx] * value
    return float(expit(z))


def accuracy(model: DiscriminatorModel, examples: Sequence[tuple]) -> float:
    correct = sum(
        1
        for vector, label in examples
        if (predict_proba(model, vector) >= 0.5) == bool(label)
    )
    return correct / len(examples)


def top_tokens(
    model: DiscriminatorModel, k: int, vocab: TokenVocab | None = None
) -> tuple[list[tuple], list[tuple]]:
    """The k most negative and k most positive weights, with their tokens.

    "Most positive" means largest weights regardless of sign (and vice
    versa); ties break by ascending token id. Entries are (token, weight)
    when a vocabulary is supplied, else (id, weight).
    """
    if k > model.vocab_size:
        raise ValueError(f"k={k} exceeds vocab size {model.vocab_size}")
    ids = list(range(model.vocab_size))
    ascending = sorted(ids, key=lambda i: (model.weights[i], i))
    descending = sorted(ids, key=lambda i: (-model.weights[i], i))

    def entry(i):
        token = vocab.id_to_token[i] if vocab is not None else i
        return (token, float(model.weights[i]))

    return [entry(i) for i in ascending[:k]], [entry(i) for i in descending[:k]]


@dataclass
class RocCurve:
    points: list[tuple[float, float]]  # (false positive rate, true positive rate)
    auc: float


def roc_auc(
    scores: Sequence[tuple[float, int]], higher_means_positive: bool = True
) -> RocCurve:
    """ROC curve and AUC by threshold sweep with tie grouping.

    The trapezoidal area under the curve equals the Mann-Whitney statistic
    (fraction of correctly ordered positive/negative pairs, ties half),
    because tied scores are swept as one group and traced diagonally.
    """
    labels = {int(label) for _, label in scores}
    if labels != {0, 1}:
        raise SingleClassData(f"need labels {{0, 1}}, got {sorted(labels)}")
    n_pos = sum(1 for _, label in scores if label == 1)
    n_neg = len(scores) - n_pos
    oriented = [
        (score if higher_means_positive else -score, int(label))
        for score, label in scores
    ]
    oriented.sort(key=lambda item: -item[0])
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < len(oriented):
        j = i
        while j < len(oriented) and oriented[j][0] == oriented[i][0]:
            tp += oriented[j][1]
            fp += 1 - oriented[j][1]
            j += 1
        points.append((fp / n_neg, tp / n_pos))
        i = j
    auc = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        auc += (x1 - x0) * (y0 + y1) / 2.0
    return RocCurve(points=points, auc=auc)


def cross_validate(
    examples: Sequence[tuple],
    vocab_size: int,
    *,
    folds: int = 5,
    lam: float = 1e-4,
    seed: int = 0,
    max_iter: int = 500,
    vocab_ref: str = "",
) -> list[float]:
    """Per-fold held-out accuracies; folds come from a seeded shuffle."""
    if folds < 2 or folds > len(examples):
        raise ValueError(f"cannot make {folds} folds from {len(examples)} examples")
    order = list(range(len(examples)))
    random.Random(seed).shuffle(order)
    fold_sizes = [len(examples) // folds] * folds
    for i in range(len(examples) % folds):
        fold_sizes[i] += 1
    accuracies = []
    start = 0
    for size in fold_sizes:
        held = set(order[start : start + size])
        start += size
        train_set = [examples[i] for i in order if i not in held]
        test_set = [examples[i] for i in sorted(held)]
        model = train(
            train_set, vocab_size, lam=lam, seed=seed, max_iter=max_iter, vocab_ref=vocab_ref
        )
        accuracies.append(accuracy(model, test_set))
    return accuracies


def save_model(model: DiscriminatorModel, path: str | Path) -> None:
    """Write the sparse JSON model file (nonzero weights sorted by id)."""
    payload = {
        "vocab": model.vocab_ref,
        "bias": float(model.bias),
        "weights": [[i, w] for i, w in _nonzero(model.weights)],
        "meta": {**model.training_meta, "vocab_size": model.vocab_size},
    }
    atomic_write_text(path, json.dumps(payload, ensure_ascii=True, indent=2) + "\n")


def load_model(path: str | Path) -> DiscriminatorModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    meta = dict(payload.get("meta", {}))
    vocab_size = int(meta.pop("vocab_size"))
    weights = np.zeros(vocab_size)
    for idx, value in payload["weights"]:
        weights[int(idx)] = float(value)
    return DiscriminatorModel(
        weights=weights,
        bias=float(payload["bias"]),
        vocab_ref=payload.get("vocab", ""),
        training_meta=meta,
    )
