"""Model backend: wraps a local masked-LM checkpoint for tokenize/fill.

Any checkpoint loadable by AutoModelForMaskedLM works; the service never
hardcodes a particular pretrained model. Inference runs in eval mode with
gradients off, so identical requests produce identical probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from transformers import AutoModelForMaskedLM, AutoTokenizer

# tokenizers report a huge sentinel when no max length is configured
_LENGTH_SENTINEL = 10**9


@dataclass
class ScorerInfo:
    model_name: str
    vocab_size: int
    max_sequence_length: int
    mask_token_id: int


class HFMaskedLM:
    """Tokenizer + masked-LM pair behind the scoring endpoints.

    ``max_sequence_length`` counts content ids only; the boundary specials
    the model needs are added internally at fill time, and the driver never
    sees or masks them.
    """

    def __init__(self, model_dir: str, device: str = "cpu"):
        self.model_name = str(model_dir)
        self.device = torch.device(device)
        self.tokenizer = AutoTokenizer.from_pretrained(model_dir)
        self.model = AutoModelForMaskedLM.from_pretrained(model_dir).to(self.device)
        self.model.eval()
        if self.tokenizer.mask_token_id is None:
            raise ValueError(f"checkpoint {model_dir} has no mask token")
        self.mask_token_id = int(self.tokenizer.mask_token_id)
        self.vocab_size = int(self.model.config.vocab_size)
        self._prefix, self._suffix = self._specials_template()
        self.max_sequence_length = self._position_budget() - len(self._prefix) - len(self._suffix)

    def _specials_template(self) -> tuple[list[int], list[int]]:
        # Recover the special-token template by tokenizing a probe with and
        # without specials and locating the content ids inside the full form.
        probe = self.tokenizer("a", add_special_tokens=False)["input_ids"]
        full = self.tokenizer("a", add_special_tokens=True)["input_ids"]
        if not probe:
            return [], []
        for offset in range(len(full) - len(probe) + 1):
            if full[offset : offset + len(probe)] == probe:
                return full[:offset], full[offset + len(probe) :]
        return [], []

    def _position_budget(self) -> int:
        budget = getattr(self.model.config, "max_position_embeddings", _LENGTH_SENTINEL)
        tokenizer_max = getattr(self.tokenizer, "model_max_length", _LENGTH_SENTINEL)
        if tokenizer_max and tokenizer_max < _LENGTH_SENTINEL:
            budget = min(budget, tokenizer_max)
        return int(budget)

    def info(self) -> ScorerInfo:
        return ScorerInfo(
            model_name=self.model_name,
            vocab_size=self.vocab_size,
            max_sequence_length=self.max_sequence_length,
            mask_token_id=self.mask_token_id,
        )

    def tokenize(self, text: str) -> tuple[list[int], list[str]]:
        ids = self.tokenizer(text, add_special_tokens=False)["input_ids"]
        tokens = self.tokenizer.convert_ids_to_tokens(ids)
        return [int(i) for i in ids], [str(t) for t in tokens]

    def _masked_input(self, ids: list[int], positions: list[int]) -> tuple[list[int], int]:
        full = list(self._prefix) + list(ids) + list(self._suffix)
        offset = len(self._prefix)
        for pos in positions:
            full[offset + pos] = self.mask_token_id
        return full, offset

    def fill(self, ids: list[int], positions: list[int]) -> list[float]:
        """Probability of each original token with all positions masked at once."""
        if not positions:
            return []
        full, offset = self._masked_input(ids, positions)
        with torch.inference_mode():
            logits = self.model(
                input_ids=torch.tensor([full], dtype=torch.long, device=self.device)
            ).logits[0]
        return self._gather(logits, ids, positions, offset)

    def fill_batch(self, requests: list[tuple[list[int], list[int]]]) -> list[list[float]]:
        """Independent fills computed in one padded forward pass."""
        live = [(i, ids, pos) for i, (ids, pos) in enumerate(requests) if pos]
        results: list[list[float]] = [[] for _ in requests]
        if not live:
            return results
        inputs = [self._masked_input(ids, pos) for _, ids, pos in live]
        width = max(len(full) for full, _ in inputs)
        pad_id = self.tokenizer.pad_token_id or 0
        batch = torch.full((len(inputs), width), pad_id, dtype=torch.long, device=self.device)
        attention = torch.zeros((len(inputs), width), dtype=torch.long, device=self.device)
        for row, (full, _) in enumerate(inputs):
            batch[row, : len(full)] = torch.tensor(full, dtype=torch.long)
            attention[row, : len(full)] = 1
        with torch.inference_mode():
            logits = self.model(input_ids=batch, attention_mask=attention).logits
        for row, (index, ids, positions) in enumerate(live):
            offset = inputs[row][1]
            results[index] = self._gather(logits[row], ids, positions, offset)
        return results

    def _gather(self, logits, ids, positions, offset) -> list[float]:
        rows = logits[[offset + p for p in positions]]
        probs = torch.softmax(rows.float(), dim=-1)
        return [float(probs[k, ids[p]]) for k, p in enumerate(positions)]
