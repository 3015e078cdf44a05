"""exin: phrase-level explanations for black-box text predictors.

Mask words out of a sentence, re-predict, and compare: phrases whose
exclusion moves the output get signed percentage-change (EI) scores,
phrases whose removal does not hurt the loss are neutral. Works with any
batch predictor over token-index rows; ships analytic linear models for
exact verification and a wire protocol for external model processes.
"""

from .effect import (
    DegenerateBaselineError,
    EIScore,
    PhraseEffect,
    classify_effects,
    effect_scan_early_stop,
    effect_scan_exhaustive,
    ei_score,
    label_for,
)
from .importance import ImportanceMask, loss, mark_importance, skip_importance
from .perturbation import PerturbationBatch, build_gram_matrix, run_batch, sequential_oracle
from .pipeline import Record, RunConfig, explain_one, explain_text, ingest, make_predictor, run
from .predictors import CountingPredictor, LinearPredictor, ModelSpecError, Predictor, Task
from .protocol import ExternalPredictor, ProtocolError, RemoteModelError, TransportError
from .report import (
    ExplanationReport,
    compute_display_cover,
    parse_json,
    render_ansi,
    render_html,
    render_html_many,
    render_json,
)
from .vocab import TokenizedSentence, Vocabulary, VocabularyError, detokenize_span, tokenize

__version__ = "0.1.0"

__all__ = [
    "CountingPredictor",
    "DegenerateBaselineError",
    "EIScore",
    "ExplanationReport",
    "ExternalPredictor",
    "ImportanceMask",
    "LinearPredictor",
    "ModelSpecError",
    "PerturbationBatch",
    "PhraseEffect",
    "Predictor",
    "ProtocolError",
    "Record",
    "RemoteModelError",
    "RunConfig",
    "Task",
    "TokenizedSentence",
    "TransportError",
    "Vocabulary",
    "VocabularyError",
    "build_gram_matrix",
    "classify_effects",
    "compute_display_cover",
    "detokenize_span",
    "effect_scan_early_stop",
    "effect_scan_exhaustive",
    "ei_score",
    "explain_one",
    "explain_text",
    "ingest",
    "label_for",
    "loss",
    "make_predictor",
    "mark_importance",
    "parse_json",
    "render_ansi",
    "render_html",
    "render_html_many",
    "render_json",
    "run",
    "run_batch",
    "sequential_oracle",
    "skip_importance",
    "tokenize",
]
