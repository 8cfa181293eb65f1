"""Unlikelihood penalty sets: jargon tokens with temperature-softmaxed weights.

Tokens with negative discriminator weights (indicative of technical text
when plain language is labeled 1) form the penalty set; each gets weight
exp(|w|/T) normalized over the set, so the most technical tokens carry the
most penalty mass and T flattens or sharpens the distribution.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import discriminator
from .discriminator import DiscriminatorModel
from .errors import EmptyPenaltySet, VocabMismatch
from .files import atomic_write_text
from .textstats import TokenVocab, bow_vector

DEFAULT_TEMPERATURE = 2.0


@dataclass
class PenaltySet:
    entries: dict[int, float]  # token id -> normalized weight, all > 0
    temperature: float
    source: str  # "cochrane" | "newsela" | "both"
    vocab_ref: str = ""
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)


def build_penalty_set(
    model: DiscriminatorModel,
    temperature: float = DEFAULT_TEMPERATURE,
    source: str | None = None,
) -> PenaltySet:
    """Softmax of |w|/T over all negative-weight tokens of a model.

    The bias never participates. Computed with max subtraction so very
    negative weights (large |w|/T) cannot overflow.
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    ids = [int(i) for i in np.flatnonzero(model.weights < 0)]
    if not ids:
        raise EmptyPenaltySet(f"model {model.vocab_ref!r} has no negative weights")
    scaled = [abs(float(model.weights[i])) / temperature for i in ids]
    peak = max(scaled)
    exps = [math.exp(s - peak) for s in scaled]
    total = math.fsum(exps)
    entries = {i: e / total for i, e in zip(ids, exps)}
    if source is None:
        source = model.training_meta.get("source", "cochrane")
    return PenaltySet(
        entries=entries,
        temperature=temperature,
        source=source,
        vocab_ref=model.vocab_ref,
        provenance={"model_hash": model.content_hash()},
    )


def combine_models(
    model_a: DiscriminatorModel, model_b: DiscriminatorModel
) -> DiscriminatorModel:
    """Elementwise weight (and bias) sum of two models over one vocabulary.

    A token absent from one model simply contributes its zero weight, so a
    sparse single-source weight survives into the combination unchanged.
    """
    if (
        model_a.vocab_size != model_b.vocab_size
        or model_a.vocab_ref != model_b.vocab_ref
    ):
        raise VocabMismatch(
            f"cannot combine models over {model_a.vocab_ref!r}/{model_a.vocab_size} "
            f"and {model_b.vocab_ref!r}/{model_b.vocab_size}"
        )
    return DiscriminatorModel(
        weights=model_a.weights + model_b.weights,
        bias=model_a.bias + model_b.bias,
        vocab_ref=model_a.vocab_ref,
        training_meta={
            "source": "both",
            "combined_from": [model_a.content_hash(), model_b.content_hash()],
        },
    )


def newsela_level_model(
    docs: Sequence[tuple[str, int]],
    vocab: TokenVocab,
    *,
    lam: float = 1e-4,
    seed: int = 0,
    max_iter: int = 500,
) -> DiscriminatorModel:
    """Reading-level discriminator: level-0 text is complex (y=0), level-3 simple (y=1)."""
    examples = []
    for text, level in docs:
        if level not in (0, 3):
            raise ValueError(f"expected reading level 0 or 3, got {level}")
        examples.append((bow_vector(text, vocab), 1 if level == 3 else 0))
    model = discriminator.train(
        examples,
        len(vocab),
        lam=lam,
        seed=seed,
        max_iter=max_iter,
        vocab_ref=vocab.name,
    )
    model.training_meta["source"] = "newsela"
    return model


def save_penalty_set(penalties: PenaltySet, path: str | Path) -> None:
    """JSON penalty file, entries sorted by descending weight (ties by id)."""
    ordered = sorted(penalties.entries.items(), key=lambda kv: (-kv[1], kv[0]))
    payload = {
        "temperature": penalties.temperature,
        "source": penalties.source,
        "entries": [[i, w] for i, w in ordered],
        "vocab": penalties.vocab_ref,
        "provenance": penalties.provenance,
    }
    atomic_write_text(path, json.dumps(payload, ensure_ascii=True, indent=2) + "\n")


def load_penalty_set(path: str | Path) -> PenaltySet:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return PenaltySet(
        entries={int(i): float(w) for i, w in payload["entries"]},
        temperature=float(payload["temperature"]),
        source=payload["source"],
        vocab_ref=payload.get("vocab", ""),
        provenance=payload.get("provenance", {}),
    )
