"""Signed phrase effects (Part 2): exclusion-inclusion scores.

The EI score of a phrase is the percentage change of the model output
caused by excluding it from the importance-masked row:

    ei = (baseline - excluded) / baseline * 100

A positive score means the phrase pushes the output up (inclusion raises
it), negative means it drags the output down, and scores inside the
neutral threshold tau are neutral. For classification the score is
computed per class against that class's baseline probability.

Two scan strategies are provided: an exhaustive one that batches every
gram size into a single predictor call each, and an early-stopping one
for long sequences that grows each phrase only while the output keeps
moving in the same direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .importance import IMPORTANT, UNIMPORTANT, ImportanceMask, band_mask_outputs, skip_importance
from .perturbation import build_gram_matrix, run_batch
from .predictors import Predictor
from .vocab import TokenizedSentence

DEFAULT_TAU = 1e-9
DEFAULT_EPS = 1e-12

POSITIVE = "positive"
NEGATIVE = "negative"
NEUTRAL = "neutral"


class DegenerateBaselineError(ArithmeticError):
    """Baseline output too close to zero for a percentage change."""


def ei_score(baseline: float, excluded: float, *, eps: float = DEFAULT_EPS) -> float:
    """Percentage change of the output when a phrase is excluded."""
    if abs(baseline) < eps:
        raise DegenerateBaselineError(
            f"baseline {baseline!r} is within {eps} of zero; percentage change undefined"
        )
    return (baseline - excluded) / baseline * 100.0


def label_for(value: float, tau: float = DEFAULT_TAU) -> str:
    if value > tau:
        return POSITIVE
    if value < -tau:
        return NEGATIVE
    return NEUTRAL


@dataclass
class EIScore:
    """One exclusion-inclusion measurement for a span.

    ``value`` is the percentage change, or None when the baseline was
    degenerate (|baseline| < eps), in which case ``raw_change`` is the
    reported fallback and ``degenerate`` is set. ``class_index`` is None
    for regression.
    """

    value: float | None
    baseline: float
    excluded: float
    raw_change: float
    label: str
    degenerate: bool = False
    class_index: int | None = None


@dataclass
class PhraseEffect:
    """Contiguous span [start, end) with its label and per-class scores.

    Neutral spans that were never scored (unimportant regions, zero-change
    probes) carry an empty score list.
    """

    start: int
    end: int
    label: str
    scores: list[EIScore] = field(default_factory=list)


def score_span(
    baseline: float,
    excluded: float,
    *,
    tau: float = DEFAULT_TAU,
    eps: float = DEFAULT_EPS,
    class_index: int | None = None,
) -> EIScore:
    """Build an EIScore, falling back to the raw change on a degenerate baseline."""
    raw = baseline - excluded
    try:
        value = ei_score(baseline, excluded, eps=eps)
    except DegenerateBaselineError:
        return EIScore(
            value=None,
            baseline=baseline,
            excluded=excluded,
            raw_change=raw,
            label=label_for(raw, tau),
            degenerate=True,
            class_index=class_index,
        )
    return EIScore(
        value=value,
        baseline=baseline,
        excluded=excluded,
        raw_change=raw,
        label=label_for(value, tau),
        degenerate=False,
        class_index=class_index,
    )


def _scores_for_outputs(
    baseline, excluded_out, is_classification: bool, tau: float, eps: float
) -> list[EIScore]:
    if is_classification:
        return [
            score_span(float(baseline[c]), float(excluded_out[c]), tau=tau, eps=eps, class_index=c)
            for c in range(len(baseline))
        ]
    return [score_span(float(baseline), float(excluded_out), tau=tau, eps=eps)]


def _governing(scores: list[EIScore], focus_class: int | None) -> EIScore:
    if focus_class is None:
        return scores[0]
    return scores[focus_class]


def effect_scan_exhaustive(
    mask: ImportanceMask,
    predictor: Predictor,
    *,
    tau: float = DEFAULT_TAU,
    eps: float = DEFAULT_EPS,
    focus_class: int | None = None,
) -> list[PhraseEffect]:
    """Score every contiguous span of the masked row.

    One predictor invocation per gram size g = 1..n, each predicting the
    full (n-g+1)-row masking matrix. Spans lying entirely inside regions
    marked unimportant are emitted as neutral without scores; everything
    else gets an EI score (per class for classification). Effects are
    ordered by gram size, then start position.
    """
    row = mask.masked_row
    n = row.size
    is_cls = predictor.task.is_classification
    if is_cls and focus_class is None:
        focus_class = int(np.argmax(mask.y_imp))
    unimportant = np.array([m == UNIMPORTANT for m in mask.marks], dtype=bool)
    effects: list[PhraseEffect] = []
    for g in range(1, n + 1):
        outputs = run_batch(build_gram_matrix(row, g), predictor)
        for r in range(n - g + 1):
            start, end = r, r + g
            if unimportant[start:end].all():
                effects.append(PhraseEffect(start=start, end=end, label=NEUTRAL))
                continue
            scores = _scores_for_outputs(mask.y_imp, outputs[r], is_cls, tau, eps)
            effects.append(
                PhraseEffect(start=start, end=end, label=_governing(scores, focus_class).label, scores=scores)
            )
    return effects


def effect_scan_early_stop(
    mask: ImportanceMask,
    predictor: Predictor,
    *,
    max_gram: int = 64,
    tau: float = DEFAULT_TAU,
    eps: float = DEFAULT_EPS,
    focus_class: int | None = None,
) -> list[PhraseEffect]:
    """Greedy directional scan for long sequences.

    Walks each important region left to right. Omitting one word fixes the
    direction of the output change; the omission window then grows while
    the output keeps moving the same way (strictly), stopping at the first
    reversal, at ``max_gram``, or at the region edge. A probe whose change
    is inside tau yields a one-token neutral span and the scan advances.
    Unimportant regions pass through as unscored neutral spans, so the
    returned spans are disjoint and tile [0, n).
    """
    if max_gram < 1:
        raise ValueError("max_gram must be >= 1")
    row = mask.masked_row
    is_cls = predictor.task.is_classification
    if is_cls and focus_class is None:
        focus_class = int(np.argmax(mask.y_imp))
    baseline_scalar = float(mask.y_imp[focus_class]) if is_cls else float(mask.y_imp)
    effects: list[PhraseEffect] = []
    for a, b, mark in mask.phrases:
        if mark == UNIMPORTANT:
            effects.append(PhraseEffect(start=a, end=b, label=NEUTRAL))
            continue
        i = a
        while i < b:
            limit = min(b, i + max_gram)
            gen = band_mask_outputs(predictor, row, i, limit, first_chunk=8)
            _, y_probe = next(gen)
            probe_scalar = float(y_probe[focus_class]) if is_cls else float(y_probe)
            probe = score_span(baseline_scalar, probe_scalar, tau=tau, eps=eps)
            measured = probe.raw_change if probe.degenerate else probe.value
            if abs(measured) <= tau:
                effects.append(PhraseEffect(start=i, end=i + 1, label=NEUTRAL))
                i += 1
                continue
            # Extension tracks raw output movement; the EI percentage would
            # flip its sign under a negative baseline.
            direction = 1.0 if probe.raw_change > 0 else -1.0
            end = i
            prev_scalar = probe_scalar
            final_out = y_probe
            for j, y_j in gen:
                scalar = float(y_j[focus_class]) if is_cls else float(y_j)
                if direction > 0 and not scalar < prev_scalar:
                    break
                if direction < 0 and not scalar > prev_scalar:
                    break
                end = j
                prev_scalar = scalar
                final_out = y_j
            scores = _scores_for_outputs(mask.y_imp, final_out, is_cls, tau, eps)
            effects.append(
                PhraseEffect(start=i, end=end + 1, label=_governing(scores, focus_class).label, scores=scores)
            )
            i = end + 1
    return effects


def classify_effects(
    sentence: TokenizedSentence,
    predictor: Predictor,
    *,
    mode: str = "exhaustive",
    max_gram: int = 64,
    tau: float = DEFAULT_TAU,
    eps: float = DEFAULT_EPS,
) -> list[PhraseEffect]:
    """Per-class effects for a classification task.

    There is no importance step: the baseline is each class's probability
    on the full sentence, and every span gets one score per class. Labels
    on the returned effects follow the focus class, i.e. the predicted
    (argmax) class.
    """
    if not predictor.task.is_classification:
        raise ValueError("classify_effects requires a classification predictor")
    mask = skip_importance(sentence, predictor)
    if mode == "exhaustive":
        return effect_scan_exhaustive(mask, predictor, tau=tau, eps=eps)
    if mode == "early-stop":
        return effect_scan_early_stop(mask, predictor, max_gram=max_gram, tau=tau, eps=eps)
    raise ValueError(f"unknown mode {mode!r}")
