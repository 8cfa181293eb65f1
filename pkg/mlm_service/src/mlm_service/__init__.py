"""Masked-LM scoring service: tokenize and masked-fill over HTTP."""

from .app import create_app
from .backend import HFMaskedLM, ScorerInfo

__version__ = "0.1.0"
