import pytest
import torch
from transformers import BertConfig, BertForMaskedLM, BertTokenizer

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "cat", "sat", "on", "mat", "dog", "ran", "fast",
    "a", "and", "big", "small", "we", "found", "trial", "study",
    "##s", "##ing", "people", "felt", "better",
]
MAX_POSITIONS = 32


@pytest.fixture(scope="session")
def checkpoint_dir(tmp_path_factory):
    """Tiny randomly initialized BERT checkpoint saved to disk."""
    target = tmp_path_factory.mktemp("tiny-bert")
    tokenizer = BertTokenizer(
        vocab={token: i for i, token in enumerate(VOCAB)}, do_lower_case=True
    )
    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=37,
        max_position_embeddings=MAX_POSITIONS,
    )
    model = BertForMaskedLM(config)
    model.save_pretrained(target)
    tokenizer.save_pretrained(target)
    return str(target)


@pytest.fixture(scope="session")
def backend(checkpoint_dir):
    from mlm_service.backend import HFMaskedLM

    return HFMaskedLM(checkpoint_dir)


@pytest.fixture(scope="session")
def client(backend):
    from fastapi.testclient import TestClient

    from mlm_service.app import create_app

    with TestClient(create_app(backend=backend)) as test_client:
        yield test_client
