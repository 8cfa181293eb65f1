"""Unlikelihood and combined losses over explicit probability matrices.

The losses take per-step probability distributions directly, so the
training math can be verified with plain arrays and no neural model. All
losses are sums over decoding steps (per-token normalization is available
as an option, flagged by the callers that report it).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import (
    InvalidDistribution,
    MissingTargets,
    TieDetected,
    VocabMismatch,
)
from .penalties import PenaltySet

ROW_SUM_TOL = 1e-6
# A penalized probability this close to 1 would make log(1-p) blow up.
PROB_CLAMP = 1.0 - 1e-12


@dataclass
class StepDistributions:
    """One probability vector over the vocabulary per decoding step."""

    rows: np.ndarray  # (n_steps, vocab_size)
    targets: np.ndarray | None = None  # (n_steps,) token ids

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2:
            raise InvalidDistribution(f"rows must be 2-D, got shape {self.rows.shape}")
        if np.any(self.rows < 0):
            raise InvalidDistribution("negative probability entry")
        sums = self.rows.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
        if bad.size:
            raise InvalidDistribution(
                f"row {bad[0]} sums to {sums[bad[0]]!r}, expected 1 +/- {ROW_SUM_TOL}"
            )
        if self.targets is not None:
            self.targets = np.asarray(self.targets, dtype=int)
            if self.targets.shape != (self.rows.shape[0],):
                raise InvalidDistribution(
                    f"{self.targets.shape[0]} targets for {self.rows.shape[0]} steps"
                )
            if np.any(self.targets < 0) or np.any(self.targets >= self.rows.shape[1]):
                raise InvalidDistribution("target id outside vocabulary")

    @property
    def n_steps(self) -> int:
        return int(self.rows.shape[0])

    @property
    def vocab_size(self) -> int:
        return int(self.rows.shape[1])


def _penalty_arrays(penalties: PenaltySet, vocab_size: int):
    if not penalties.entries:
        return np.empty(0, dtype=int), np.empty(0)
    ids = np.fromiter(penalties.entries.keys(), dtype=int)
    if ids.min() < 0 or ids.max() >= vocab_size:
        raise VocabMismatch(
            f"penalty token id {ids.max()} outside vocabulary of size {vocab_size}"
        )
    weights = np.fromiter((penalties.entries[int(i)] for i in ids), dtype=float)
    return ids, weights


def ul_loss(dists: StepDistributions, penalties: PenaltySet) -> float:
    """Gated unlikelihood loss.

    At each step, a penalized token contributes -w' * log(1 - p) only when
    it is the argmax of that step's distribution (ties go to the lowest
    token id, which np.argmax already does). Probabilities are clamped to
    1 - 1e-12 before the log.
    """
    ids, weights = _penalty_arrays(penalties, dists.vocab_size)
    if ids.size == 0:
        return 0.0
    lookup = {int(i): float(w) for i, w in zip(ids, weights)}
    total = 0.0
    for row in dists.rows:
        top = int(np.argmax(row))
        w = lookup.get(top)
        if w is not None:
            p = min(float(row[top]), PROB_CLAMP)
            total -= w * np.log1p(-p)
    return float(total)


def ul_loss_ungated(dists: StepDistributions, penalties: PenaltySet) -> float:
    """Plain unlikelihood term: every penalized token at every step.

    This is the pre-gating objective kept for ablation; it upper-bounds
    ul_loss because gating only removes nonnegative contributions.
    """
    ids, weights = _penalty_arrays(penalties, dists.vocab_size)
    if ids.size == 0:
        return 0.0
    probs = np.minimum(dists.rows[:, ids], PROB_CLAMP)
    return float(-(np.log1p(-probs) * weights).sum())


class CombinedLoss(NamedTuple):
    nll: float
    ul: float
    total: float


def combined_loss(
    dists: StepDistributions, penalties: PenaltySet, alpha: float
) -> CombinedLoss:
    """Negative log-likelihood of the targets plus alpha times the gated UL term."""
    if dists.targets is None:
        raise MissingTargets("combined loss needs a target sequence")
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    target_probs = dists.rows[np.arange(dists.n_steps), dists.targets]
    with np.errstate(divide="ignore"):
        nll = float(-np.log(target_probs).sum())
    ul = ul_loss(dists, penalties)
    return CombinedLoss(nll=nll, ul=ul, total=nll + alpha * ul)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=1, keepdims=True)


def _loss_from_logits(loss_kind, logits, penalties, alpha, targets):
    dists = StepDistributions(rows=_softmax(np.asarray(logits, dtype=float)), targets=targets)
    if loss_kind == "ul":
        return ul_loss(dists, penalties)
    if loss_kind == "ul_ungated":
        return ul_loss_ungated(dists, penalties)
    if loss_kind == "nll":
        return combined_loss(dists, penalties, 0.0).nll
    if loss_kind == "combined":
        return combined_loss(dists, penalties, alpha).total
    raise ValueError(f"unknown loss kind {loss_kind!r}")


def _analytic_logit_gradient(loss_kind, logits, penalties, alpha, targets):
    logits = np.asarray(logits, dtype=float)
    p = _softmax(logits)
    n_steps, vocab = p.shape
    grad = np.zeros_like(p)
    need_nll = loss_kind in ("nll", "combined")
    need_gated = loss_kind in ("ul", "combined")
    need_ungated = loss_kind == "ul_ungated"
    ul_scale = alpha if loss_kind == "combined" else 1.0
    if need_nll:
        if targets is None:
            raise MissingTargets("nll gradient needs targets")
        grad += p
        grad[np.arange(n_steps), np.asarray(targets, dtype=int)] -= 1.0
    if need_gated or need_ungated:
        ids, weights = _penalty_arrays(penalties, vocab)
        lookup = {int(i): float(w) for i, w in zip(ids, weights)}
        for t in range(n_steps):
            row = p[t]
            if need_gated:
                top = int(np.argmax(row))
                w = lookup.get(top)
                if w is None:
                    continue
                # d/dz of -w*log(1-p_top) with the argmax gate held fixed
                coef = ul_scale * w * row[top] / (1.0 - row[top])
                grad[t] -= coef * row
                grad[t, top] += coef
            else:
                coefs = weights * row[ids] / (1.0 - row[ids])
                grad[t] -= coefs.sum() * row
                grad[t, ids] += coefs
    return grad


def grad_check(
    loss_kind: str,
    logits,
    penalties: PenaltySet,
    alpha: float = 0.0,
    targets=None,
    *,
    fd_step: float = 1e-5,
    tie_gap: float = 1e-3,
) -> float:
    """Relative error between analytic and central-finite-difference gradients.

    The argmax gate is treated as piecewise constant, so the check refuses
    points where any step's top two probabilities are within ``tie_gap``
    (TieDetected); callers resample. Error = ||ga - gf||2 / max(||ga||2,
    ||gf||2).
    """
    logits = np.asarray(logits, dtype=float)
    if not np.all(np.isfinite(logits)):
        raise ValueError("logits must be finite")
    p = _softmax(logits)
    if loss_kind in ("ul", "combined"):
        for t in range(p.shape[0]):
            top2 = np.partition(p[t], -2)[-2:]
            if top2[1] - top2[0] < tie_gap:
                raise TieDetected(f"step {t}: argmax gap {top2[1] - top2[0]:.2e}")
    analytic = _analytic_logit_gradient(loss_kind, logits, penalties, alpha, targets)
    numeric = np.zeros_like(logits)
    for t in range(logits.shape[0]):
        for v in range(logits.shape[1]):
            bumped = logits.copy()
            bumped[t, v] += fd_step
            up = _loss_from_logits(loss_kind, bumped, penalties, alpha, targets)
            bumped[t, v] -= 2 * fd_step
            down = _loss_from_logits(loss_kind, bumped, penalties, alpha, targets)
            numeric[t, v] = (up - down) / (2 * fd_step)
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / scale)


def nucleus_filter(dist, top_p: float) -> np.ndarray:
    """Keep the smallest probability prefix reaching top_p; renormalize.

    Tokens are ranked by probability descending with ties broken by id
    ascending; everything outside the prefix is zeroed. Surviving
    probabilities keep their relative order.
    """
    if not 0.0 < top_p <= 1.0:
        raise ValueError(f"top_p must be in (0, 1], got {top_p}")
    dist = np.asarray(dist, dtype=float)
    if dist.ndim != 1:
        raise InvalidDistribution(f"expected a vector, got shape {dist.shape}")
    if np.any(dist < 0):
        raise InvalidDistribution("negative probability entry")
    if abs(float(dist.sum()) - 1.0) > ROW_SUM_TOL:
        raise InvalidDistribution(f"probabilities sum to {dist.sum()!r}")
    order = np.lexsort((np.arange(dist.size), -dist))
    cumulative = np.cumsum(dist[order])
    keep = int(np.searchsorted(cumulative, top_p - 1e-12)) + 1
    keep = min(keep, dist.size)
    kept_ids = order[:keep]
    out = np.zeros_like(dist)
    out[kept_ids] = dist[kept_ids]
    return out / out.sum()


def load_step_distributions(path: str | Path) -> StepDistributions:
    """Read a distribution matrix from .json ({"vocab_size", "rows", "targets"})
    or from a NumPy .npz/.npy file (arrays "rows" and optional "targets")."""
    path = Path(path)
    if path.suffix == ".json":
        payload = json.loads(path.read_text(encoding="utf-8"))
        rows = np.asarray(payload["rows"], dtype=float)
        if "vocab_size" in payload and rows.shape[1] != int(payload["vocab_size"]):
            raise InvalidDistribution(
                f"rows have width {rows.shape[1]}, header says {payload['vocab_size']}"
            )
        targets = payload.get("targets")
        return StepDistributions(rows=rows, targets=targets)
    if path.suffix == ".npz":
        data = np.load(path)
        targets = data["targets"] if "targets" in data.files else None
        return StepDistributions(rows=data["rows"], targets=targets)
    if path.suffix == ".npy":
        return StepDistributions(rows=np.load(path))
    raise ValueError(f"unsupported distribution file type: {path.name}")
