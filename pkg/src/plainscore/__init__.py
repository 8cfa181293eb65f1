"""Toolkit for measuring what separates technical from plain-language medical text."""

from .corpus import (
    DocumentPair,
    RawReview,
    Rejection,
    Section,
    extract_abstract,
    extract_pls_longform,
    extract_pls_sectioned,
    filter_pair,
    process_reviews,
    split_dataset,
)
from .discriminator import (
    DiscriminatorModel,
    RocCurve,
    cross_validate,
    predict_proba,
    roc_auc,
    top_tokens,
    train,
)
from .metrics import (
    EvalRecord,
    bleu,
    evaluate_corpus,
    length_stats,
    ngram_overlap,
    rouge_f1,
    sari,
)
from .objectives import (
    StepDistributions,
    combined_loss,
    grad_check,
    nucleus_filter,
    ul_loss,
    ul_loss_ungated,
)
from .penalties import PenaltySet, build_penalty_set, combine_models, newsela_level_model
from .scorers import HttpScorer, MaskedLMScorer, UniformScorer, UnigramScorer
from .technicality import TechnicalityScore, masked_prob, score_corpus
from .textstats import (
    TextStats,
    TokenVocab,
    ari,
    bow_vector,
    count_syllables,
    flesch_kincaid,
    split_sentences,
    text_stats,
    tokenize_words,
)

__version__ = "0.1.0"
