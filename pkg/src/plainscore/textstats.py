"""Deterministic tokenization, sentence splitting, and readability formulas.

Everything here is pure string processing with no data dependencies, so the
same input always yields the same counts on any machine.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import AllOOV, DegenerateText

# Word = run of alphanumerics, with internal hyphens kept ("lay-audience" is
# one word). Underscore is folded in by \w; it never occurs in prose inputs.
_WORD_RE = re.compile(r"\w+(?:-\w+)*", re.UNICODE)

_BOUNDARY_RE = re.compile(r"[.?!]+")

# Tokens whose trailing period never ends a sentence. Matched against the
# whole whitespace-delimited token preceding the candidate boundary, so
# "e.g." is covered as a unit. Decimal numbers need no entry: a digit right
# after the period already fails the whitespace-then-capital test.
_ABBREVIATIONS = frozenset(
    {
        "e.g.", "i.e.", "etc.", "vs.", "cf.", "ca.", "al.", "approx.",
        "fig.", "figs.", "no.", "nos.", "dr.", "mr.", "mrs.", "ms.",
        "prof.", "st.", "resp.",
    }
)


def tokenize_words(text: str) -> list[str]:
    """Split text into word tokens (case preserved, hyphenated words intact)."""
    return _WORD_RE.findall(text)


def split_sentences(document: str) -> list[str]:
    """Split a document into sentences.

    A boundary is a run of ``.?!`` followed by whitespace and a capital
    letter or digit, unless the token it terminates is a known abbreviation.
    The returned sentences are stripped slices of the input, so joining them
    reconstructs the document modulo whitespace. Empty input gives [].
    """
    sentences: list[str] = []
    start = 0
    for match in _BOUNDARY_RE.finditer(document):
        end = match.end()
        tail = document[end:]
        if not tail:
            break
        if not tail[0].isspace():
            continue
        nxt = tail.lstrip()
        if not nxt or not (nxt[0].isupper() or nxt[0].isdigit()):
            continue
        token_match = re.search(r"\S+$", document[:end])
        if token_match and token_match.group(0).lower() in _ABBREVIATIONS:
            continue
        piece = document[start:end].strip()
        if piece:
            sentences.append(piece)
        start = end
    last = document[start:].strip()
    if last:
        sentences.append(last)
    return sentences


_VOWEL_GROUP_RE = re.compile(r"[aeiouy]+")


def count_syllables(word: str) -> int:
    """Heuristic syllable count for a single word.

    Counts maximal vowel groups (y included), subtracts one for a terminal
    silent "e" unless the word ends in consonant+"le", floor of 1. Accurate
    to about one syllable on irregular words, which is fine for grade-level
    formulas averaged over documents.
    """
    w = word.lower()
    count = len(_VOWEL_GROUP_RE.findall(w))
    ends_consonant_le = len(w) >= 3 and w.endswith("le") and w[-3] not in "aeiouy"
    if w.endswith("e") and not ends_consonant_le:
        count -= 1
    return max(count, 1)


@dataclass
class TextStats:
    """Surface counts feeding the readability formulas."""

    n_sentences: int
    n_words: int
    n_syllables: int
    n_chars: int

    def to_dict(self) -> dict:
        return {
            "n_sentences": self.n_sentences,
            "n_words": self.n_words,
            "n_syllables": self.n_syllables,
            "n_chars": self.n_chars,
        }


def text_stats(document: str) -> TextStats:
    words = tokenize_words(document)
    return TextStats(
        n_sentences=len(split_sentences(document)),
        n_words=len(words),
        n_syllables=sum(count_syllables(w) for w in words),
        n_chars=sum(1 for ch in document if ch.isalnum()),
    )


def flesch_kincaid(stats: TextStats) -> float:
    """Flesch-Kincaid grade: 0.39 * words/sentence + 11.8 * syllables/word - 15.59."""
    if stats.n_sentences <= 0 or stats.n_words <= 0:
        raise DegenerateText(f"need words and sentences, got {stats}")
    return (
        0.39 * (stats.n_words / stats.n_sentences)
        + 11.8 * (stats.n_syllables / stats.n_words)
        - 15.59
    )


def ari(stats: TextStats) -> float:
    """Automated readability index: 4.71 * chars/word + 0.5 * words/sentence - 21.43.

    Characters are alphanumeric only; punctuation and whitespace do not count.
    """
    if stats.n_sentences <= 0 or stats.n_words <= 0:
        raise DegenerateText(f"need words and sentences, got {stats}")
    return (
        4.71 * (stats.n_chars / stats.n_words)
        + 0.5 * (stats.n_words / stats.n_sentences)
        - 21.43
    )


class TokenVocab:
    """Bijective token <-> dense integer id mapping.

    Vocabularies are loaded from plain files with one token per line (line
    number = id); the toolkit never embeds a pretrained vocabulary.
    """

    def __init__(self, tokens: Iterable[str], name: str = ""):
        self.id_to_token: list[str] = list(tokens)
        self.token_to_id: dict[str, int] = {}
        for idx, tok in enumerate(self.id_to_token):
            if tok in self.token_to_id:
                raise ValueError(f"duplicate vocabulary token {tok!r} at id {idx}")
            self.token_to_id[tok] = idx
        self.name = name
        self._max_token_len = max((len(t) for t in self.id_to_token), default=0)

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    @classmethod
    def from_file(cls, path: str | Path) -> "TokenVocab":
        path = Path(path)
        lines = path.read_text(encoding="utf-8").splitlines()
        return cls(lines, name=path.name)

    def save(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.id_to_token) + "\n", encoding="utf-8")


@dataclass
class BowVector:
    """L1-normalized bag-of-words frequencies over a vocabulary (sparse)."""

    weights: dict[int, float]
    oov_rate: float
    n_tokens: int = 0


def bow_vector(text: str, vocab: TokenVocab) -> BowVector:
    """Normalized bag-of-words frequency vector of ``text`` over ``vocab``.

    Out-of-vocabulary tokens are dropped; their fraction is reported as
    ``oov_rate``. Raises AllOOV when nothing maps into the vocabulary.
    """
    if len(vocab) == 0:
        raise ValueError("empty vocabulary")
    tokens = tokenize_words(text)
    counts: dict[int, int] = {}
    n_oov = 0
    for tok in tokens:
        idx = vocab.token_to_id.get(tok)
        if idx is None:
            n_oov += 1
        else:
            counts[idx] = counts.get(idx, 0) + 1
    total = sum(counts.values())
    if total == 0:
        raise AllOOV(f"no token of a {len(tokens)}-token text is in vocab {vocab.name!r}")
    weights = {idx: c / total for idx, c in sorted(counts.items())}
    oov_rate = n_oov / len(tokens) if tokens else 0.0
    return BowVector(weights=weights, oov_rate=oov_rate, n_tokens=len(tokens))


def count_tokens(text: str, vocab: TokenVocab | None = None) -> int:
    """Token count used for length caps and ratios.

    Without a vocabulary this is the word-token count. With one, each
    whitespace chunk is consumed by greedy longest-prefix matching against
    the vocabulary (an unmatched character counts as one token), which
    approximates subword tokenization for any supplied subword list.
    """
    if vocab is None:
        return len(tokenize_words(text))
    max_len = vocab._max_token_len
    if max_len == 0:
        raise ValueError("empty vocabulary")
    n = 0
    for chunk in text.split():
        i = 0
        while i < len(chunk):
            step = 1
            for length in range(min(max_len, len(chunk) - i), 0, -1):
                if chunk[i : i + length] in vocab.token_to_id:
                    step = length
                    break
            n += 1
            i += step
    return n


def stats_report(document: str) -> dict:
    """Per-document readability report: {"fk": ..., "ari": ..., "stats": {...}}."""
    stats = text_stats(document)
    return {
        "fk": flesch_kincaid(stats),
        "ari": ari(stats),
        "stats": stats.to_dict(),
    }


def build_word_vocab(texts: Iterable[str], name: str = "corpus-words") -> TokenVocab:
    """Word vocabulary over a corpus, ordered by (count desc, token asc)."""
    counts: dict[str, int] = {}
    for text in texts:
        for tok in tokenize_words(text):
            counts[tok] = counts.get(tok, 0) + 1
    ordered = sorted(counts, key=lambda t: (-counts[t], t))
    return TokenVocab(ordered, name=name)
