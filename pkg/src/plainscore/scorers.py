"""Masked-LM scorer interface, offline stub scorers, and the HTTP client.

A scorer exposes three capabilities (vocab_size, max_sequence_length,
mask_token_id) and two operations: ``tokenize`` maps a sentence to token
ids with no boundary specials, and ``fill`` returns, for each masked
position, the probability the model assigns to the ORIGINAL token there.
The stubs exist so the document scoring path can be tested and exercised
completely offline; the HTTP client speaks the scoring-service wire
protocol (GET /info, POST /tokenize, POST /fill).
"""

from __future__ import annotations

import re
from typing import Protocol, Sequence, runtime_checkable

import requests

from .errors import ScorerUnavailable


@runtime_checkable
class MaskedLMScorer(Protocol):
    vocab_size: int
    max_sequence_length: int
    mask_token_id: int

    def tokenize(self, sentence: str) -> list[int]: ...

    def fill(self, token_ids: Sequence[int], masked_positions: Sequence[int]) -> list[float]: ...


_STUB_WORD_RE = re.compile(r"\w+(?:-\w+)*", re.UNICODE)


class UniformScorer:
    """Stub returning 1/vocab_size at every masked position."""

    def __init__(self, vocab_size: int = 100, max_sequence_length: int = 10_000):
        self.vocab_size = vocab_size
        self.max_sequence_length = max_sequence_length
        self.mask_token_id = 0
        self._ids: dict[str, int] = {}

    def tokenize(self, sentence: str) -> list[int]:
        ids = []
        for word in _STUB_WORD_RE.findall(sentence):
            if word not in self._ids:
                self._ids[word] = len(self._ids) % self.vocab_size
            ids.append(self._ids[word])
        return ids

    def fill(self, token_ids, masked_positions) -> list[float]:
        return [1.0 / self.vocab_size for _ in masked_positions]


class ConstantScorer:
    """Stub returning one fixed probability per sentence.

    ``prob_for_sentence`` is a callable mapping the sentence text to the
    probability every masked token of that sentence receives. Token ids are
    allocated per occurrence so occurrences in different sentences never
    collide.
    """

    def __init__(self, prob_for_sentence, max_sequence_length: int = 10_000):
        self.prob_for_sentence = prob_for_sentence
        self.max_sequence_length = max_sequence_length
        self.mask_token_id = 0
        self._prob_by_id: list[float] = []

    @property
    def vocab_size(self) -> int:
        return max(len(self._prob_by_id), 1)

    def tokenize(self, sentence: str) -> list[int]:
        prob = float(self.prob_for_sentence(sentence))
        words = _STUB_WORD_RE.findall(sentence)
        start = len(self._prob_by_id)
        self._prob_by_id.extend(prob for _ in words)
        return list(range(start, start + len(words)))

    def fill(self, token_ids, masked_positions) -> list[float]:
        return [self._prob_by_id[token_ids[pos]] for pos in masked_positions]


class UnigramScorer:
    """Frequency-based scorer trained on supplied text.

    The fill probability of a token is its add-one-smoothed unigram
    frequency in the training corpus, independent of position. Useful for
    offline discrimination smoke tests: text sharing the training corpus's
    vocabulary profile scores higher.
    """

    concurrent_safe = True  # tokenize/fill are read-only after construction

    def __init__(self, training_texts: Sequence[str], max_sequence_length: int = 10_000):
        counts: dict[str, int] = {}
        for text in training_texts:
            for word in _STUB_WORD_RE.findall(text):
                counts[word] = counts.get(word, 0) + 1
        self._token_ids = {w: i + 1 for i, w in enumerate(sorted(counts))}
        self._unk_id = 0
        self.vocab_size = len(self._token_ids) + 1
        self.max_sequence_length = max_sequence_length
        self.mask_token_id = 0
        total = sum(counts.values())
        denom = total + self.vocab_size
        self._prob = {self._token_ids[w]: (c + 1) / denom for w, c in counts.items()}
        self._unk_prob = 1.0 / denom

    def tokenize(self, sentence: str) -> list[int]:
        return [
            self._token_ids.get(word, self._unk_id)
            for word in _STUB_WORD_RE.findall(sentence)
        ]

    def fill(self, token_ids, masked_positions) -> list[float]:
        return [
            self._prob.get(token_ids[pos], self._unk_prob) for pos in masked_positions
        ]


class HttpScorer:
    """Client for a masked-LM scoring service.

    Wire protocol: GET /info -> {model_name, vocab_size, max_sequence_length,
    mask_token_id}; POST /tokenize {"text": ...} -> {"ids": [...], "tokens":
    [...]}; POST /fill {"ids": [...], "masked_positions": [...]} ->
    {"probs": [...]}. Any transport or server failure surfaces as
    ScorerUnavailable.
    """

    concurrent_safe = True  # one service request per call, no client state

    def __init__(self, base_url: str, timeout: float = 120.0, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = session or requests.Session()
        info = self._get("/info")
        self.model_name = info.get("model_name", "")
        self.vocab_size = int(info["vocab_size"])
        self.max_sequence_length = int(info["max_sequence_length"])
        self.mask_token_id = int(info["mask_token_id"])

    def _get(self, path: str) -> dict:
        try:
            resp = self._session.get(self.base_url + path, timeout=self.timeout)
            resp.raise_for_status()
            return resp.json()
        except requests.RequestException as exc:
            raise ScorerUnavailable(f"GET {path} against {self.base_url}: {exc}") from exc

    def _post(self, path: str, payload: dict) -> dict:
        try:
            resp = self._session.post(
                self.base_url + path, json=payload, timeout=self.timeout
            )
            resp.raise_for_status()
            return resp.json()
        except requests.RequestException as exc:
            raise ScorerUnavailable(f"POST {path} against {self.base_url}: {exc}") from exc

    def tokenize(self, sentence: str) -> list[int]:
        return [int(i) for i in self._post("/tokenize", {"text": sentence})["ids"]]

    def fill(self, token_ids, masked_positions) -> list[float]:
        payload = {
            "ids": [int(i) for i in token_ids],
            "masked_positions": [int(p) for p in masked_positions],
        }
        return [float(p) for p in self._post("/fill", payload)["probs"]]
