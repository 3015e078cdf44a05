"""Loss-pivot importance scan (Part 1) for regression explanations.

Walks the sentence left to right keeping a cumulative mask of removed
positions. A word whose removal does not increase the running loss is
dispensable; the span is greedily extended while removals keep the loss
non-increasing, then zeroed for good. Words whose removal raises the loss
are marked important and kept. Because only non-loss-increasing removals
are ever accepted, the loss on the final masked row can never exceed the
loss on the full row.

Classification has no loss pivot; ``skip_importance`` marks everything
important and only records the baseline prediction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .predictors import Predictor
from .vocab import TokenizedSentence

LOSS_KINDS = ("mae", "mse")

IMPORTANT = "important"
UNIMPORTANT = "unimportant"


def loss(prediction, target: float, kind: str = "mae"):
    """Pointwise regression loss: ``mae`` -> |y^ - y|, ``mse`` -> (y^ - y)^2.

    Accepts scalars or arrays and preserves shape.
    """
    if kind not in LOSS_KINDS:
        raise ValueError(f"unknown loss kind {kind!r}; expected one of {LOSS_KINDS}")
    diff = np.subtract(prediction, target)
    return np.abs(diff) if kind == "mae" else np.square(diff)


@dataclass
class ImportanceMask:
    """Outcome of the importance scan for one sentence.

    ``masked_row[k]`` is 0 exactly where ``marks[k]`` is unimportant;
    ``phrases`` are the maximal runs of equal marks tiling [0, n).
    ``y_all``/``y_imp`` are the predictions on the original and masked
    rows (scalars for regression, probability vectors otherwise).
    """

    marks: list[str]
    masked_row: np.ndarray = field(repr=False)
    phrases: list[tuple[int, int, str]]
    y_all: float | np.ndarray
    y_imp: float | np.ndarray
    loss_all: float | None
    loss_imp: float | None
    loss_kind: str | None
    skipped: bool = False

    @property
    def n(self) -> int:
        return len(self.marks)


def _phrases_from_marks(marks: list[str]) -> list[tuple[int, int, str]]:
    phrases: list[tuple[int, int, str]] = []
    start = 0
    for k in range(1, len(marks) + 1):
        if k == len(marks) or marks[k] != marks[start]:
            phrases.append((start, k, marks[start]))
            start = k
    return phrases


def band_mask_outputs(
    predictor: Predictor,
    row: np.ndarray,
    start: int,
    limit: int,
    *,
    first_chunk: int = 8,
    growth: int = 4,
    max_chunk: int = 1024,
    prepend_row: np.ndarray | None = None,
) -> Iterator[tuple[int | None, np.ndarray | float]]:
    """Yield predictions for copies of ``row`` with positions start..j zeroed.

    j runs from ``start`` to ``limit - 1``. Rows are predicted in growing
    chunks so that short spans cost one batch invocation while long ones
    stay cheap; callers that stop consuming early never pay for rows beyond
    the fetched chunk. If ``prepend_row`` is given it is predicted as part
    of the first chunk and yielded first with j = None.
    """
    n = row.size
    cols = np.arange(n)
    j0 = start
    chunk = max(1, first_chunk)
    first = True
    while j0 < limit:
        m = min(chunk, limit - j0)
        block = np.repeat(row[None, :], m, axis=0)
        ends = j0 + np.arange(m)
        band = (cols[None, :] >= start) & (cols[None, :] <= ends[:, None])
        block[band] = 0
        if first and prepend_row is not None:
            block = np.vstack([prepend_row[None, :], block])
        out = predictor.predict(block)
        if first and prepend_row is not None:
            yield None, out[0]
            out = out[1:]
        first = False
        for i in range(m):
            yield int(j0 + i), out[i]
        j0 += m
        chunk = min(chunk * growth, max_chunk)


def _span_first_chunk(n: int, remaining: int) -> int:
    # One batch per span for ordinary sentence lengths; chunked speculation
    # for very long rows, where whole-tail batches would be mostly wasted.
    return remaining if n <= 256 else 8


def mark_importance(
    sentence: TokenizedSentence,
    target: float,
    predictor: Predictor,
    loss_kind: str = "mae",
) -> ImportanceMask:
    """Mark maximal contiguous phrases important/unimportant by loss change.

    Regression only; requires the true target. The scan state is the
    cumulative mask M of removed positions and the loss of the current
    masked row. At each span start k the candidate losses for removing
    k..j (with M) are fetched as one batch; a span is unimportant when
    removing its first word does not increase the running loss, and is
    extended while further removals keep the loss non-increasing.
    Important spans extend while the loss keeps strictly increasing.
    """
    if predictor.task.is_classification:
        raise ValueError("importance marking is defined for regression tasks only")
    if target is None:
        raise ValueError("importance marking needs the true target; use skip_importance without one")
    base = np.asarray(sentence.indices, dtype=np.int64)
    n = base.size
    marks: list[str] = [IMPORTANT] * n
    cur = base.copy()
    any_masked = False
    y_all: float | None = None
    loss_all: float | None = None
    running_loss: float | None = None
    y_imp_last: float | None = None

    k = 0
    while k < n:
        gen = band_mask_outputs(
            predictor,
            cur,
            k,
            n,
            first_chunk=_span_first_chunk(n, n - k),
            prepend_row=base if k == 0 else None,
        )
        if k == 0:
            _, y0 = next(gen)
            y_all = float(y0)
            loss_all = float(loss(y_all, target, loss_kind))
            running_loss = loss_all

        _, y_k = next(gen)
        prev_loss = float(loss(float(y_k), target, loss_kind))
        dispensable = prev_loss <= running_loss
        prev_y = float(y_k)
        end = k  # inclusive end of the span
        for j, y_j in gen:
            next_loss = float(loss(float(y_j), target, loss_kind))
            if dispensable:
                if next_loss > prev_loss:
                    break
            else:
                if next_loss <= prev_loss:
                    break
            end = j
            prev_loss = next_loss
            prev_y = float(y_j)

        if dispensable:
            for p in range(k, end + 1):
                marks[p] = UNIMPORTANT
            cur[k : end + 1] = 0
            running_loss = prev_loss
            y_imp_last = prev_y
            any_masked = True
        k = end + 1

    y_imp = y_imp_last if any_masked else y_all
    return ImportanceMask(
        marks=marks,
        masked_row=cur,
        phrases=_phrases_from_marks(marks),
        y_all=y_all,
        y_imp=y_imp,
        loss_all=loss_all,
        loss_imp=float(running_loss),
        loss_kind=loss_kind,
        skipped=False,
    )


def skip_importance(sentence: TokenizedSentence, predictor: Predictor) -> ImportanceMask:
    """No-op mask for classification or target-less regression.

    Everything is marked important and the baseline prediction is taken on
    the original row.
    """
    base = np.asarray(sentence.indices, dtype=np.int64)
    n = base.size
    out = predictor.predict(base[None, :])
    y = np.array(out[0]) if predictor.task.is_classification else float(out[0])
    return ImportanceMask(
        marks=[IMPORTANT] * n,
        masked_row=base.copy(),
        phrases=[(0, n, IMPORTANT)],
        y_all=y,
        y_imp=y,
        loss_all=None,
        loss_imp=None,
        loss_kind=None,
        skipped=True,
    )
