"""Masked-token probability score for whole documents.

A document is split into sentences; each sentence is tokenized and, over a
number of rounds, a fraction of its token positions is masked and the
scorer is asked for the probability of each original token. All collected
probabilities go into one pooled list whose mean is the document score:
higher means the scorer finds the text more predictable, so under a
science-trained model technical text scores higher than plain language.
"""

from __future__ import annotations

import hashlib
import math
import random
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

from .corpus import DocumentPair
from .scorers import MaskedLMScorer
from .textstats import split_sentences


@dataclass
class TechnicalityScore:
    doc_id: str
    mean_prob: float
    n_probs: int
    per_sentence_counts: list[int] = field(default_factory=list)


@dataclass
class ScoredDocument:
    doc_id: str
    role: str  # "abstract" | "pls" | "generated"
    label: int  # technical = 0, plain-language = 1
    score: TechnicalityScore

    def to_record(self) -> dict:
        return {
            "id": self.doc_id,
            "role": self.role,
            "mean_prob": self.score.mean_prob,
            "n_probs": self.score.n_probs,
        }


def _document_rng(seed: int, doc_id: str) -> random.Random:
    # Stable across processes and runs, unlike hash() on strings.
    digest = hashlib.blake2b(
        f"{seed}\x1f{doc_id}".encode("utf-8"), digest_size=8
    ).digest()
    return random.Random(int.from_bytes(digest, "big"))


def mask_count(n_tokens: int, mask_frac: float) -> int:
    """Masked positions per round for a sentence of n maskable tokens."""
    return max(1, round(mask_frac * n_tokens))


def _chunk(ids: list[int], limit: int) -> list[list[int]]:
    if limit <= 0 or len(ids) <= limit:
        return [ids]
    return [ids[i : i + limit] for i in range(0, len(ids), limit)]


def masked_prob(
    document: str,
    scorer: MaskedLMScorer,
    *,
    rounds: int = 10,
    mask_frac: float = 0.15,
    seed: int = 0,
    doc_id: str = "",
) -> TechnicalityScore:
    """Pooled mean masked-token probability of a document under a scorer.

    Every sentence contributes ``rounds`` independent mask draws of
    max(1, round(mask_frac * n)) positions sampled without replacement; the
    returned mean pools every collected probability (not sentence means).
    Sentences longer than the scorer's sequence limit are split into
    limit-sized chunks, each scored as its own sentence. Sampling is driven
    by an RNG derived from (seed, doc_id), so distinct documents can be
    scored concurrently with identical results.
    """
    if not document.strip():
        raise ValueError("cannot score an empty document")
    if not 0.0 < mask_frac < 1.0:
        raise ValueError(f"mask_frac must be in (0, 1), got {mask_frac}")
    rng = _document_rng(seed, doc_id)
    pooled: list[float] = []
    per_sentence_counts: list[int] = []
    for sentence in split_sentences(document):
        ids = scorer.tokenize(sentence)
        if not ids:
            continue
        for chunk in _chunk(ids, scorer.max_sequence_length):
            n = len(chunk)
            k = mask_count(n, mask_frac)
            collected = 0
            for _ in range(rounds):
                positions = sorted(rng.sample(range(n), k))
                probs = scorer.fill(chunk, positions)
                if len(probs) != len(positions):
                    raise ValueError(
                        f"scorer returned {len(probs)} probs for {len(positions)} positions"
                    )
                pooled.extend(probs)
                collected += len(positions)
            per_sentence_counts.append(collected)
    if not pooled:
        raise ValueError(f"document {doc_id!r} produced no maskable tokens")
    return TechnicalityScore(
        doc_id=doc_id,
        mean_prob=math.fsum(pooled) / len(pooled),
        n_probs=len(pooled),
        per_sentence_counts=per_sentence_counts,
    )


def score_corpus(
    pairs: Iterable[DocumentPair],
    scorer: MaskedLMScorer,
    seed: int = 0,
    *,
    rounds: int = 10,
    mask_frac: float = 0.15,
    max_workers: int = 1,
) -> list[ScoredDocument]:
    """Score every abstract (label 0) and summary (label 1) of a pair list.

    Each document is seeded by its own id, so scoring with max_workers > 1
    returns exactly the serial result in the same (input) order. A scorer
    must be safe for concurrent calls before raising max_workers.
    """
    jobs = []
    for pair in pairs:
        jobs.append((f"{pair.id}:abstract", "abstract", 0, pair.abstract_text))
        jobs.append((f"{pair.id}:pls", "pls", 1, pair.pls_text))
    return _run_jobs(jobs, scorer, seed, rounds, mask_frac, max_workers)


def score_documents(
    docs: Iterable[tuple[str, str, str]],
    scorer: MaskedLMScorer,
    seed: int = 0,
    *,
    rounds: int = 10,
    mask_frac: float = 0.15,
    max_workers: int = 1,
) -> list[ScoredDocument]:
    """Score (doc_id, role, text) triples; role "pls" is labeled 1, others 0."""
    jobs = [
        (doc_id, role, 1 if role == "pls" else 0, text) for doc_id, role, text in docs
    ]
    return _run_jobs(jobs, scorer, seed, rounds, mask_frac, max_workers)


class _SerializedScorer:
    """Queues tokenize/fill calls of a scorer that is not concurrency-safe."""

    def __init__(self, scorer: MaskedLMScorer):
        self._scorer = scorer
        self._lock = threading.Lock()
        self.vocab_size = scorer.vocab_size
        self.mask_token_id = scorer.mask_token_id

    @property
    def max_sequence_length(self) -> int:
        return self._scorer.max_sequence_length

    def tokenize(self, sentence: str) -> list[int]:
        with self._lock:
            return self._scorer.tokenize(sentence)

    def fill(self, token_ids, masked_positions) -> list[float]:
        with self._lock:
            return self._scorer.fill(token_ids, masked_positions)


def _run_jobs(jobs, scorer, seed, rounds, mask_frac, max_workers) -> list[ScoredDocument]:
    if max_workers > 1 and not getattr(scorer, "concurrent_safe", False):
        scorer = _SerializedScorer(scorer)

    def run(job):
        doc_id, role, label, text = job
        score = masked_prob(
            text, scorer, rounds=rounds, mask_frac=mask_frac, seed=seed, doc_id=doc_id
        )
        return ScoredDocument(doc_id=doc_id, role=role, label=label, score=score)

    if max_workers <= 1:
        return [run(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(run, jobs))
