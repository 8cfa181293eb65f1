"""Alignment heuristics turning raw paired review documents into text pairs.

Raw reviews arrive as structured records (sectioned abstract, sectioned or
long-form summary). The extraction rules keep the portion of each side that
describes studies and results; the filter enforces a token cap and a length
ratio band. Inputs that fail a cut rule are kept whole and flagged rather
than dropped, so they can be inspected downstream.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import EmptyAbstract, EmptySummary
from .textstats import TokenVocab, count_tokens, split_sentences

ABSTRACT_CUT_HEADING = "main results"
PLS_HEADING_SUBSTRINGS = ("find", "found", "evidence", "tell us", "study characteristic")
PLS_LONGFORM_KEYWORDS = ("journal", "study", "studies", "trial")
# "within the first couple sentences", read literally as the first two.
PLS_LONGFORM_SENTENCE_WINDOW = 2

_LONGFORM_KEYWORD_RE = re.compile(
    r"\b(?:%s)\b" % "|".join(PLS_LONGFORM_KEYWORDS), re.IGNORECASE
)


def _collapse_ws(text: str) -> str:
    return " ".join(text.split())


@dataclass
class Section:
    heading: str
    body: str


@dataclass
class RawReview:
    id: str
    abstract_sections: list[Section]
    pls_kind: str  # "sectioned" | "longform"
    pls_sections: list[Section] | None = None
    pls_paragraphs: list[str] | None = None


@dataclass
class Extraction:
    """Extracted text plus a flag set when the cut rule found no anchor."""

    text: str
    flagged: bool


@dataclass
class DocumentPair:
    id: str
    abstract_text: str
    pls_text: str
    abstract_token_count: int
    pls_token_count: int
    flagged: bool = False


@dataclass
class Rejection:
    id: str
    reason: str  # "too_long" | "ratio_low" | "ratio_high"


def parse_review(record: dict) -> RawReview:
    """Build a RawReview from one reviews.jsonl record, dropping empty bodies."""
    review_id = str(record["id"])
    abstract = [
        Section(heading=str(s.get("heading", "")), body=str(s["text"]))
        for s in record.get("abstract", [])
        if _collapse_ws(str(s.get("text", "")))
    ]
    kind = record.get("pls_kind")
    if kind == "sectioned":
        sections = [
            Section(heading=str(s.get("heading", "")), body=str(s["text"]))
            for s in record.get("pls", [])
            if _collapse_ws(str(s.get("text", "")))
        ]
        return RawReview(review_id, abstract, "sectioned", pls_sections=sections)
    if kind == "longform":
        paragraphs: list[str] = []
        for item in record.get("pls", []):
            if isinstance(item, dict):
                item = item.get("text", "")
            # A single string may itself hold blank-line separated paragraphs.
            for para in re.split(r"\n\s*\n", str(item)):
                if _collapse_ws(para):
                    paragraphs.append(para.strip())
        return RawReview(review_id, abstract, "longform", pls_paragraphs=paragraphs)
    raise ValueError(f"review {review_id}: unknown pls_kind {kind!r}")


def extract_abstract(review: RawReview) -> Extraction:
    """Keep abstract sections from the first "Main Results" heading onward.

    Headings match case-insensitively by substring after whitespace
    collapsing. Without a match the full abstract is returned flagged.
    """
    if not review.abstract_sections:
        raise EmptyAbstract(f"review {review.id}: no abstract sections")
    cut = None
    for i, section in enumerate(review.abstract_sections):
        if ABSTRACT_CUT_HEADING in _collapse_ws(section.heading).lower():
            cut = i
            break
    sections = review.abstract_sections if cut is None else review.abstract_sections[cut:]
    text = "\n\n".join(s.body.strip() for s in sections)
    return Extraction(text=text, flagged=cut is None)


def extract_pls_sectioned(review: RawReview) -> Extraction:
    """Keep summary sections from the first results-like heading onward."""
    sections = review.pls_sections or []
    if not sections:
        raise EmptySummary(f"review {review.id}: no summary sections")
    cut = None
    for i, section in enumerate(sections):
        heading = _collapse_ws(section.heading).lower()
        if any(sub in heading for sub in PLS_HEADING_SUBSTRINGS):
            cut = i
            break
    kept = sections if cut is None else sections[cut:]
    text = "\n\n".join(s.body.strip() for s in kept)
    return Extraction(text=text, flagged=cut is None)


def extract_pls_longform(review: RawReview) -> Extraction:
    """Keep long-form summary paragraphs from the first study-mentioning one.

    A paragraph anchors the cut when any of the keywords appears as a whole
    word in its first two sentences. One-paragraph summaries are kept whole.
    Without a match the full summary is returned flagged.
    """
    paragraphs = review.pls_paragraphs or []
    if not paragraphs:
        raise EmptySummary(f"review {review.id}: no summary paragraphs")
    if len(paragraphs) == 1:
        return Extraction(text=paragraphs[0].strip(), flagged=False)
    cut = None
    for i, para in enumerate(paragraphs):
        head = " ".join(split_sentences(para)[:PLS_LONGFORM_SENTENCE_WINDOW])
        if _LONGFORM_KEYWORD_RE.search(head):
            cut = i
            break
    kept = paragraphs if cut is None else paragraphs[cut:]
    text = "\n\n".join(p.strip() for p in kept)
    return Extraction(text=text, flagged=cut is None)


def extract_pls(review: RawReview) -> Extraction:
    if review.pls_kind == "sectioned":
        return extract_pls_sectioned(review)
    if review.pls_kind == "longform":
        return extract_pls_longform(review)
    raise ValueError(f"review {review.id}: unknown pls_kind {review.pls_kind!r}")


def filter_pair(
    review_id: str,
    abstract_text: str,
    pls_text: str,
    vocab: TokenVocab | None = None,
    cap: int = 1024,
    ratio_low: float = 0.2,
    ratio_high: float = 1.3,
    flagged: bool = False,
) -> DocumentPair | Rejection:
    """Accept a pair iff both sides fit the cap and the length ratio band.

    Rejections carry exactly one reason; the cap is checked before the
    ratio so an over-long document is always reported as too_long.
    """
    if not abstract_text.strip() or not pls_text.strip():
        raise ValueError(f"review {review_id}: empty text reached filter_pair")
    abstract_tokens = count_tokens(abstract_text, vocab)
    pls_tokens = count_tokens(pls_text, vocab)
    if abstract_tokens > cap or pls_tokens > cap:
        return Rejection(id=review_id, reason="too_long")
    ratio = pls_tokens / abstract_tokens
    if ratio < ratio_low:
        return Rejection(id=review_id, reason="ratio_low")
    if ratio > ratio_high:
        return Rejection(id=review_id, reason="ratio_high")
    return DocumentPair(
        id=review_id,
        abstract_text=abstract_text,
        pls_text=pls_text,
        abstract_token_count=abstract_tokens,
        pls_token_count=pls_tokens,
        flagged=flagged,
    )


def process_reviews(
    reviews: Iterable[RawReview],
    vocab: TokenVocab | None = None,
    cap: int = 1024,
    ratio_low: float = 0.2,
    ratio_high: float = 1.3,
) -> tuple[list[DocumentPair], list[Rejection]]:
    """Run extraction plus filtering over a review stream, keeping input order."""
    pairs: list[DocumentPair] = []
    rejects: list[Rejection] = []
    for review in reviews:
        abstract = extract_abstract(review)
        pls = extract_pls(review)
        result = filter_pair(
            review.id,
            abstract.text,
            pls.text,
            vocab=vocab,
            cap=cap,
            ratio_low=ratio_low,
            ratio_high=ratio_high,
            flagged=abstract.flagged or pls.flagged,
        )
        if isinstance(result, Rejection):
            rejects.append(result)
        else:
            pairs.append(result)
    return pairs, rejects


def split_dataset(
    pairs: Sequence[DocumentPair],
    seed: int,
    fractions: tuple[float, float, float] = (0.8, 0.092, 0.108),
) -> tuple[list[DocumentPair], list[DocumentPair], list[DocumentPair]]:
    """Deterministic seeded shuffle, then contiguous train/valid/test slices.

    Train and valid sizes are ceil(fraction * n) so the default fractions
    reproduce a 3568/411/480 split of 4459 pairs; test takes the remainder.
    """
    if not pairs:
        raise ValueError("cannot split an empty pair list")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got {fractions}")
    order = list(range(len(pairs)))
    random.Random(seed).shuffle(order)
    n = len(pairs)
    n_train = min(n, math.ceil(fractions[0] * n - 1e-9))
    n_valid = min(n - n_train, math.ceil(fractions[1] * n - 1e-9))
    shuffled = [pairs[i] for i in order]
    return (
        shuffled[:n_train],
        shuffled[n_train : n_train + n_valid],
        shuffled[n_train + n_valid :],
    )


def validate_pair(
    pair: DocumentPair,
    vocab: TokenVocab | None = None,
    cap: int = 1024,
    ratio_low: float = 0.2,
    ratio_high: float = 1.3,
) -> None:
    """Post-hoc check of the DocumentPair invariants; raises ValueError."""
    problems = []
    if count_tokens(pair.abstract_text, vocab) != pair.abstract_token_count:
        problems.append("abstract token count does not match tokenizer output")
    if count_tokens(pair.pls_text, vocab) != pair.pls_token_count:
        problems.append("summary token count does not match tokenizer output")
    if pair.abstract_token_count > cap or pair.pls_token_count > cap:
        problems.append(f"token count exceeds cap {cap}")
    ratio = pair.pls_token_count / pair.abstract_token_count
    if not ratio_low <= ratio <= ratio_high:
        problems.append(f"length ratio {ratio:.3f} outside [{ratio_low}, {ratio_high}]")
    if problems:
        raise ValueError(f"pair {pair.id}: " + "; ".join(problems))


def pair_to_record(pair: DocumentPair) -> dict:
    return {
        "id": pair.id,
        "abstract": pair.abstract_text,
        "pls": pair.pls_text,
        "abstract_tokens": pair.abstract_token_count,
        "pls_tokens": pair.pls_token_count,
        "flagged": pair.flagged,
    }


def record_to_pair(record: dict) -> DocumentPair:
    return DocumentPair(
        id=str(record["id"]),
        abstract_text=record["abstract"],
        pls_text=record["pls"],
        abstract_token_count=int(record["abstract_tokens"]),
        pls_token_count=int(record["pls_tokens"]),
        flagged=bool(record.get("flagged", False)),
    )


def rejection_to_record(rejection: Rejection) -> dict:
    return {"id": rejection.id, "reason": rejection.reason}


def iter_reviews(records: Iterable[dict]) -> Iterator[RawReview]:
    for record in records:
        yield parse_review(record)
