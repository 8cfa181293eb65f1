"""Simplification evaluation battery: ROUGE, BLEU, SARI, overlap, lengths.

All metrics work on lowercased word tokens, so they are insensitive to
case and repeated whitespace. Conventions that differ between published
implementations (BLEU smoothing, SARI's empty-set handling and
precision-only deletion score) are fixed here and echoed in the report
metadata.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from scipy import stats as scipy_stats

from .errors import EmptyText, TooShort
from .textstats import ari, flesch_kincaid, split_sentences, text_stats, tokenize_words

METRIC_CONVENTIONS = {
    "tokens": "lowercased word tokens, hyphenated words kept whole",
    "bleu_smoothing": "add-one applied only at orders with zero matches",
    "bleu_missing_orders": "orders with no candidate n-gram are skipped",
    "sari_delete": "precision only",
    "sari_empty_sets": "a component is 1.0 when nothing was performed and nothing was required",
    "rouge_l": "LCS over whole texts",
}


def _tokens(text: str) -> list[str]:
    return [t.lower() for t in tokenize_words(text)]


def _ngrams(tokens: Sequence[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def _require(text: str, name: str) -> list[str]:
    tokens = _tokens(text)
    if not tokens:
        raise EmptyText(f"{name} text has no word tokens")
    return tokens


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _lcs_length(a: Sequence, b: Sequence) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                curr.append(prev[j - 1] + 1)
            else:
                curr.append(max(prev[j], curr[-1]))
        prev = curr
    return prev[-1]


def rouge_f1(candidate: str, reference: str, variant) -> float:
    """ROUGE F1 for variant 1, 2, or "L" (balanced F, beta = 1)."""
    cand = _require(candidate, "candidate")
    ref = _require(reference, "reference")
    if variant in (1, 2, "1", "2"):
        n = int(variant)
        cand_ngrams = _ngrams(cand, n)
        ref_ngrams = _ngrams(ref, n)
        if not cand_ngrams or not ref_ngrams:
            return 0.0
        overlap = sum((Counter(cand_ngrams) & Counter(ref_ngrams)).values())
        return _f1(overlap / len(cand_ngrams), overlap / len(ref_ngrams))
    if variant in ("L", "l"):
        lcs = _lcs_length(cand, ref)
        return _f1(lcs / len(cand), lcs / len(ref))
    raise ValueError(f"unknown ROUGE variant {variant!r}")


@dataclass
class BleuResult:
    value: float
    smoothed: bool
    orders_used: int


def bleu_with_details(candidate: str, reference: str, max_n: int = 4) -> BleuResult:
    cand = _require(candidate, "candidate")
    ref = _require(reference, "reference")
    log_precisions = []
    smoothed = False
    for n in range(1, max_n + 1):
        cand_ngrams = _ngrams(cand, n)
        if not cand_ngrams:
            continue
        ref_counts = Counter(_ngrams(ref, n))
        matches = sum((Counter(cand_ngrams) & ref_counts).values())
        if matches == 0:
            precision = 1.0 / (len(cand_ngrams) + 1)
            smoothed = True
        else:
            precision = matches / len(cand_ngrams)
        log_precisions.append(math.log(precision))
    geo_mean = math.exp(sum(log_precisions) / len(log_precisions))
    brevity = 1.0 if len(cand) >= len(ref) else math.exp(1.0 - len(ref) / len(cand))
    return BleuResult(
        value=brevity * geo_mean, smoothed=smoothed, orders_used=len(log_precisions)
    )


def bleu(candidate: str, reference: str, max_n: int = 4) -> float:
    """Geometric mean of clipped n-gram precisions with a brevity penalty.

    Orders with no candidate n-gram are skipped; an order with zero matches
    gets add-one smoothing ((m+1)/(h+1)).
    """
    return bleu_with_details(candidate, reference, max_n=max_n).value


def _ratio_sum(good: Counter, base: Counter) -> float:
    return sum(good[g] / base[g] for g in good)


def _sari_components(
    src: Counter, cand: Counter, refs: list[Counter], n_refs: int
) -> tuple[float, float, float]:
    ref_all = Counter()
    for r in refs:
        ref_all.update(r)
    src_rep = Counter({g: c * n_refs for g, c in src.items()})
    cand_rep = Counter({g: c * n_refs for g, c in cand.items()})

    def ratio(numerator_good: Counter, base: Counter, counterpart: Counter) -> float:
        # Per-type fraction averaged over the base's types; vacuously perfect
        # when neither side has anything, a miss when only the base is empty.
        if base:
            return _ratio_sum(numerator_good, base) / len(base)
        return 1.0 if not counterpart else 0.0

    kept = src_rep & cand_rep
    kept_good = kept & ref_all
    keep_required = src_rep & ref_all
    keep_p = ratio(kept_good, kept, keep_required)
    keep_r = ratio(kept_good, keep_required, kept)
    f1_keep = _f1(keep_p, keep_r) if (kept or keep_required) else 1.0

    deleted = src_rep - cand_rep
    deleted_good = deleted - ref_all
    delete_required = src_rep - ref_all
    p_del = ratio(deleted_good, deleted, delete_required)

    added = set(cand) - set(src)
    added_good = added & set(ref_all)
    add_required = set(ref_all) - set(src)
    add_p = (len(added_good) / len(added)) if added else (1.0 if not add_required else 0.0)
    add_r = (len(added_good) / len(add_required)) if add_required else (1.0 if not added else 0.0)
    f1_add = _f1(add_p, add_r) if (added or add_required) else 1.0

    return f1_keep, f1_add, p_del


def sari(source: str, candidate: str, references: Sequence[str]) -> float:
    """Edit-based simplification score against source and reference(s).

    Mean over n = 1..4 of (keep F1 + add F1 + delete precision) / 3, with
    source/candidate counts replicated by the number of references. A
    component where nothing was performed and nothing was required scores
    1.0 (vacuous success), so an already-perfect candidate scores 1.0.
    """
    if not references:
        raise ValueError("sari needs at least one reference")
    src = _require(source, "source")
    cand = _require(candidate, "candidate")
    ref_tokens = [_require(r, "reference") for r in references]
    per_n = []
    for n in range(1, 5):
        f1_keep, f1_add, p_del = _sari_components(
            Counter(_ngrams(src, n)),
            Counter(_ngrams(cand, n)),
            [Counter(_ngrams(r, n)) for r in ref_tokens],
            len(ref_tokens),
        )
        per_n.append((f1_keep + f1_add + p_del) / 3.0)
    return sum(per_n) / len(per_n)


def ngram_overlap(candidate: str, source_abstract: str, n: int) -> float:
    """Fraction of the candidate's distinct n-grams that appear in the abstract."""
    cand = _require(candidate, "candidate")
    if len(cand) < n:
        raise TooShort(f"candidate has {len(cand)} tokens, needs {n}")
    cand_set = set(_ngrams(cand, n))
    source_set = set(_ngrams(_tokens(source_abstract), n))
    return len(cand_set & source_set) / len(cand_set)


def length_stats(text: str) -> tuple[int, int]:
    """(word tokens, sentences) of a text; empty text gives (0, 0)."""
    return len(tokenize_words(text)), len(split_sentences(text))


@dataclass
class EvalRecord:
    doc_id: str
    source: str
    reference: str
    candidate: str

    def __post_init__(self):
        for name in ("source", "reference", "candidate"):
            if not getattr(self, name).strip():
                raise EmptyText(f"record {self.doc_id}: empty {name}")


def evaluate_record(record: EvalRecord, max_overlap_n: int = 4) -> dict:
    """All per-document metrics for one (source, reference, candidate) triple."""
    result: dict = {"id": record.doc_id}
    result["rouge1"] = rouge_f1(record.candidate, record.reference, 1)
    result["rouge2"] = rouge_f1(record.candidate, record.reference, 2)
    result["rougeL"] = rouge_f1(record.candidate, record.reference, "L")
    bleu_details = bleu_with_details(record.candidate, record.reference)
    result["bleu"] = bleu_details.value
    result["bleu_smoothed"] = bleu_details.smoothed
    result["sari"] = sari(record.source, record.candidate, [record.reference])
    for who, text in (("candidate", record.candidate), ("reference", record.reference)):
        overlap = {}
        for n in range(1, max_overlap_n + 1):
            try:
                overlap[str(n)] = ngram_overlap(text, record.source, n)
            except TooShort:
                overlap[str(n)] = None
        result[f"overlap_{who}"] = overlap
    for who, text in (
        ("candidate", record.candidate),
        ("reference", record.reference),
        ("source", record.source),
    ):
        n_tokens, n_sentences = length_stats(text)
        result[f"{who}_tokens"] = n_tokens
        result[f"{who}_sentences"] = n_sentences
        stats = text_stats(text)
        result[f"{who}_fk"] = flesch_kincaid(stats)
        result[f"{who}_ari"] = ari(stats)
    return result


def _mean(values: Iterable[float]) -> float | None:
    values = [v for v in values if v is not None]
    if not values:
        return None
    return math.fsum(values) / len(values)


def _paired_test(candidate_values, reference_values) -> dict:
    pairs = [
        (c, r)
        for c, r in zip(candidate_values, reference_values)
        if c is not None and r is not None
    ]
    entry: dict = {
        "mean_candidate": _mean(c for c, _ in pairs),
        "mean_reference": _mean(r for _, r in pairs),
        "n": len(pairs),
    }
    if len(pairs) >= 2:
        c, r = zip(*pairs)
        if any(x != y for x, y in pairs):
            t_stat, p_value = scipy_stats.ttest_rel(c, r)
            entry["t"] = float(t_stat)
            entry["p"] = float(p_value)
            entry["significant_at_0.01"] = bool(p_value < 0.01)
            return entry
    entry["t"] = None
    entry["p"] = None
    entry["significant_at_0.01"] = False
    return entry


def evaluate_corpus(records: Sequence[EvalRecord]) -> dict:
    """Per-document metrics, corpus means, and candidate-vs-reference tests.

    The paired two-sided t-test (threshold 0.01) compares candidate against
    reference on every quantity defined for both sides: readability grades,
    lengths, and abstract-overlap at each n.
    """
    if not records:
        raise ValueError("no evaluation records")
    per_doc = [evaluate_record(rec) for rec in records]
    means: dict = {}
    for key in ("rouge1", "rouge2", "rougeL", "bleu", "sari"):
        means[key] = _mean(doc[key] for doc in per_doc)
    for who in ("candidate", "reference"):
        means[f"overlap_{who}"] = {
            str(n): _mean(doc[f"overlap_{who}"][str(n)] for doc in per_doc)
            for n in range(1, 5)
        }
        means[f"{who}_tokens"] = _mean(doc[f"{who}_tokens"] for doc in per_doc)
        means[f"{who}_sentences"] = _mean(doc[f"{who}_sentences"] for doc in per_doc)
        means[f"{who}_fk"] = _mean(doc[f"{who}_fk"] for doc in per_doc)
        means[f"{who}_ari"] = _mean(doc[f"{who}_ari"] for doc in per_doc)
    means["source_tokens"] = _mean(doc["source_tokens"] for doc in per_doc)
    means["source_sentences"] = _mean(doc["source_sentences"] for doc in per_doc)
    means["source_fk"] = _mean(doc["source_fk"] for doc in per_doc)
    means["source_ari"] = _mean(doc["source_ari"] for doc in per_doc)

    comparisons: dict = {}
    for key in ("fk", "ari", "tokens", "sentences"):
        comparisons[key] = _paired_test(
            [doc[f"candidate_{key}"] for doc in per_doc],
            [doc[f"reference_{key}"] for doc in per_doc],
        )
    for n in range(1, 5):
        comparisons[f"overlap_{n}"] = _paired_test(
            [doc["overlap_candidate"][str(n)] for doc in per_doc],
            [doc["overlap_reference"][str(n)] for doc in per_doc],
        )
    return {
        "metadata": dict(METRIC_CONVENTIONS),
        "n_documents": len(records),
        "corpus_means": means,
        "candidate_vs_reference": comparisons,
        "per_document": per_doc,
    }
