"""Explanation reports and their renderings.

A report collects everything produced for one input: tokens, predictions,
importance marks, the full effect list, a non-overlapping display cover,
and predictor-call accounting. Renderings: machine-readable JSON (schema
"ei-report/1", lossless round trip), ANSI terminal text, and standalone
HTML. Highlight convention throughout: green for positive phrases, red
for negative, neutral left unstyled.
"""

from __future__ import annotations

import html
import json
from dataclasses import dataclass, field

from .effect import NEGATIVE, NEUTRAL, POSITIVE, EIScore, PhraseEffect

SCHEMA = "ei-report/1"

ANSI_GREEN = "\x1b[32m"
ANSI_RED = "\x1b[31m"
ANSI_RESET = "\x1b[0m"


@dataclass
class Accounting:
    """Predictor-call record for one report."""

    batch_invocations: int
    rows_predicted: int
    mode: str


@dataclass
class ExplanationReport:
    """Full explanation result for one input."""

    id: str | int
    text: str
    tokens: list[str]
    task_kind: str
    num_classes: int | None
    prediction: float | list[float] | None
    predicted_class: int | None
    target: float | None
    focus_class: int | None
    importance_skipped: bool
    loss_kind: str | None
    loss_all: float | None
    loss_imp: float | None
    y_imp: float | list[float] | None
    marks: list[str]
    importance_phrases: list[tuple[int, int, str]]
    effects: list[PhraseEffect]
    display_cover: list[tuple[int, int, str, float]]
    accounting: Accounting
    error: str | None = None


def _cover_magnitude(effect: PhraseEffect, focus_class: int | None) -> float:
    score = effect.scores[focus_class] if focus_class is not None else effect.scores[0]
    if score.degenerate or score.value is None:
        return abs(score.raw_change)
    return abs(score.value)


def compute_display_cover(
    effects: list[PhraseEffect], focus_class: int | None = None
) -> list[tuple[int, int, str, float]]:
    """Greedy non-overlapping selection of signed spans for display.

    Candidates are the scored positive/negative effects, ranked by
    descending |EI| of the governing score (ties broken by position, so
    the cover is deterministic). Returned sorted by start.
    """
    candidates = [e for e in effects if e.scores and e.label in (POSITIVE, NEGATIVE)]
    candidates.sort(key=lambda e: (-_cover_magnitude(e, focus_class), e.start, e.end))
    chosen: list[PhraseEffect] = []
    taken = set()
    for eff in candidates:
        span = range(eff.start, eff.end)
        if any(p in taken for p in span):
            continue
        taken.update(span)
        chosen.append(eff)
    chosen.sort(key=lambda e: e.start)
    return [(e.start, e.end, e.label, _cover_magnitude(e, focus_class)) for e in chosen]


# --- JSON -------------------------------------------------------------

def _score_to_dict(s: EIScore) -> dict:
    return {
        "class": s.class_index,
        "value": s.value,
        "baseline": s.baseline,
        "excluded": s.excluded,
        "raw_change": s.raw_change,
        "label": s.label,
        "degenerate": s.degenerate,
    }


def _score_from_dict(d: dict) -> EIScore:
    return EIScore(
        value=d["value"],
        baseline=d["baseline"],
        excluded=d["excluded"],
        raw_change=d["raw_change"],
        label=d["label"],
        degenerate=d["degenerate"],
        class_index=d["class"],
    )


def report_to_dict(r: ExplanationReport) -> dict:
    return {
        "schema": SCHEMA,
        "id": r.id,
        "text": r.text,
        "tokens": list(r.tokens),
        "task": {"kind": r.task_kind, "num_classes": r.num_classes},
        "prediction": r.prediction,
        "predicted_class": r.predicted_class,
        "target": r.target,
        "focus_class": r.focus_class,
        "importance": {
            "skipped": r.importance_skipped,
            "loss_kind": r.loss_kind,
            "loss_all": r.loss_all,
            "loss_imp": r.loss_imp,
            "y_imp": r.y_imp,
            "marks": list(r.marks),
            "phrases": [{"start": s, "end": e, "mark": m} for s, e, m in r.importance_phrases],
        },
        "effects": [
            {
                "start": e.start,
                "end": e.end,
                "label": e.label,
                "scores": [_score_to_dict(s) for s in e.scores],
            }
            for e in r.effects
        ],
        "display_cover": [
            {"start": s, "end": e, "label": lab, "magnitude": mag}
            for s, e, lab, mag in r.display_cover
        ],
        "accounting": {
            "batch_invocations": r.accounting.batch_invocations,
            "rows_predicted": r.accounting.rows_predicted,
            "mode": r.accounting.mode,
        },
        "error": r.error,
    }


def report_from_dict(d: dict) -> ExplanationReport:
    if d.get("schema") != SCHEMA:
        raise ValueError(f"unsupported report schema {d.get('schema')!r}")
    imp = d["importance"]
    acc = d["accounting"]
    return ExplanationReport(
        id=d["id"],
        text=d["text"],
        tokens=list(d["tokens"]),
        task_kind=d["task"]["kind"],
        num_classes=d["task"]["num_classes"],
        prediction=d["prediction"],
        predicted_class=d["predicted_class"],
        target=d["target"],
        focus_class=d["focus_class"],
        importance_skipped=imp["skipped"],
        loss_kind=imp["loss_kind"],
        loss_all=imp["loss_all"],
        loss_imp=imp["loss_imp"],
        y_imp=imp["y_imp"],
        marks=list(imp["marks"]),
        importance_phrases=[(p["start"], p["end"], p["mark"]) for p in imp["phrases"]],
        effects=[
            PhraseEffect(
                start=e["start"],
                end=e["end"],
                label=e["label"],
                scores=[_score_from_dict(s) for s in e["scores"]],
            )
            for e in d["effects"]
        ],
        display_cover=[
            (c["start"], c["end"], c["label"], c["magnitude"]) for c in d["display_cover"]
        ],
        accounting=Accounting(
            batch_invocations=acc["batch_invocations"],
            rows_predicted=acc["rows_predicted"],
            mode=acc["mode"],
        ),
        error=d["error"],
    )


def render_json(r: ExplanationReport) -> str:
    """Serialize with stable field order; ``parse_json`` restores it losslessly."""
    return json.dumps(report_to_dict(r), ensure_ascii=False, separators=(",", ":"))


def parse_json(text: str) -> ExplanationReport:
    return report_from_dict(json.loads(text))


# --- human-readable renderings ----------------------------------------

def _cover_by_start(r: ExplanationReport) -> dict[int, tuple[int, str]]:
    return {start: (end, label) for start, end, label, _ in r.display_cover}


def render_ansi(r: ExplanationReport, color: bool = True) -> str:
    """Sentence with positive spans green and negative spans red.

    With ``color=False`` the same text is emitted with bracket markers,
    ``[+...+]`` for positive and ``[-...-]`` for negative spans.
    """
    cover = _cover_by_start(r)
    pieces: list[str] = []
    k = 0
    n = len(r.tokens)
    while k < n:
        if k in cover:
            end, label = cover[k]
            phrase = " ".join(r.tokens[k:end])
            if color:
                code = ANSI_GREEN if label == POSITIVE else ANSI_RED
                pieces.append(f"{code}{phrase}{ANSI_RESET}")
            else:
                pieces.append(f"[+{phrase}+]" if label == POSITIVE else f"[-{phrase}-]")
            k = end
        else:
            pieces.append(r.tokens[k])
            k += 1
    return " ".join(pieces)


_HTML_STYLE = (
    "body{font-family:sans-serif;margin:2em;}"
    ".positive{background:#b6f0b6;}"
    ".negative{background:#f5b8b8;}"
    "span.phrase{padding:1px 2px;border-radius:2px;}"
    "dl{color:#444;font-size:0.9em;}dt{font-weight:bold;display:inline;}dd{display:inline;margin:0 1em 0 0.3em;}"
)


def _html_sentence(r: ExplanationReport) -> str:
    cover = _cover_by_start(r)
    ei_by_span = {
        (e.start, e.end): e.scores[r.focus_class if r.focus_class is not None else 0]
        for e in r.effects
        if e.scores
    }
    pieces: list[str] = []
    k = 0
    n = len(r.tokens)
    while k < n:
        if k in cover:
            end, label = cover[k]
            phrase = html.escape(" ".join(r.tokens[k:end]))
            score = ei_by_span.get((k, end))
            if score is not None and score.value is not None:
                tip = f"EI {score.value:+.2f}%"
            elif score is not None:
                tip = f"raw change {score.raw_change:+.2f} (degenerate baseline)"
            else:
                tip = label
            pieces.append(
                f'<span class="phrase {label}" title="{html.escape(tip)}">{phrase}</span>'
            )
            k = end
        else:
            pieces.append(html.escape(r.tokens[k]))
            k += 1
    return " ".join(pieces)


def _format_prediction(r: ExplanationReport) -> str:
    if r.prediction is None:
        return "n/a"
    if isinstance(r.prediction, list):
        probs = ", ".join(f"{p:.2f}" for p in r.prediction)
        return f"class {r.predicted_class} (p = [{probs}])"
    return f"{r.prediction:.2f}"


def _html_section(r: ExplanationReport) -> str:
    rows = [
        f"<section>",
        f"<h2>{html.escape(str(r.id))}</h2>",
        f'<p class="sentence">{_html_sentence(r)}</p>',
        "<dl>",
        f"<dt>task</dt><dd>{html.escape(r.task_kind)}</dd>",
        f"<dt>prediction</dt><dd>{html.escape(_format_prediction(r))}</dd>",
        f"<dt>mode</dt><dd>{html.escape(r.accounting.mode)}</dd>",
        f"<dt>batch invocations</dt><dd>{r.accounting.batch_invocations}</dd>",
    ]
    if r.error:
        rows.append(f"<dt>error</dt><dd>{html.escape(r.error)}</dd>")
    rows.append("</dl>")
    rows.append("</section>")
    return "\n".join(rows)


def render_html(r: ExplanationReport) -> str:
    """Self-contained HTML document for one report; no external resources."""
    return render_html_many([r])


def render_html_many(reports: list[ExplanationReport], title: str = "explanations") -> str:
    body = "\n".join(_html_section(r) for r in reports)
    return (
        "<!doctype html>\n<html><head><meta charset=\"utf-8\">"
        f"<title>{html.escape(title)}</title>"
        f"<style>{_HTML_STYLE}</style></head>\n<body>\n"
        f"<h1>{html.escape(title)}</h1>\n{body}\n</body></html>\n"
    )
