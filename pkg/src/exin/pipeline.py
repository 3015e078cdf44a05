"""End-to-end orchestration: ingest JSONL records, explain, emit reports.

A run loads a vocabulary and a predictor, streams input records, explains
each one, and writes reports in the configured format. Per-record
failures are captured in the report's error field and the run continues;
configuration and transport failures are fatal.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field
from typing import Iterator, TextIO

import numpy as np

from . import effect, importance, report as report_mod
from .predictors import CountingPredictor, LinearPredictor, Predictor, Task
from .protocol import ExternalPredictor, TransportError
from .vocab import Vocabulary, tokenize

EXHAUSTIVE = "exhaustive"
EARLY_STOP = "early-stop"
MODES = (EXHAUSTIVE, EARLY_STOP)
FORMATS = ("json", "ansi", "html")
LONG_SEQUENCE_THRESHOLD = 512


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    """Everything one batch run needs.

    ``mode=None`` means automatic: exhaustive, switching to early-stop
    with a warning for records longer than ``long_seq_threshold`` tokens.
    ``model`` is one of ``builtin:<spec.json>``, ``cmd:<argv>`` or
    ``tcp:<host>:<port>``.
    """

    task: Task
    vocab_path: str
    model: str
    input_path: str
    output_path: str | None = None
    mode: str | None = None
    loss_kind: str = "mae"
    max_gram: int = 64
    tau: float = effect.DEFAULT_TAU
    eps: float = effect.DEFAULT_EPS
    long_seq_threshold: int = LONG_SEQUENCE_THRESHOLD
    format: str = "json"
    per_record_html: bool = False
    color: bool = True
    focus_class: int | None = None

    def __post_init__(self) -> None:
        if self.mode is not None and self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.loss_kind not in importance.LOSS_KINDS:
            raise ConfigError(f"loss must be one of {importance.LOSS_KINDS}")
        if self.max_gram < 1:
            raise ConfigError("max-gram must be >= 1")
        if self.focus_class is not None:
            if not self.task.is_classification:
                raise ConfigError("focus-class only applies to classification")
            if not 0 <= self.focus_class < self.task.num_classes:
                raise ConfigError(
                    f"focus-class {self.focus_class} out of range for {self.task.num_classes} classes"
                )


@dataclass
class Record:
    id: str | int
    text: str
    target: float | None = None


def ingest(path: str, log: TextIO = sys.stderr) -> Iterator[Record]:
    """Stream records from a JSONL file of {"id"?, "text", "label"?}.

    Malformed lines are reported with their line number and skipped; the
    caller is responsible for treating zero valid records as fatal.
    """
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                print(f"{path}:{lineno}: skipping malformed JSON ({exc})", file=log)
                continue
            if not isinstance(obj, dict) or "text" not in obj or not isinstance(obj["text"], str):
                print(f"{path}:{lineno}: skipping record without a 'text' string", file=log)
                continue
            target = obj.get("label")
            if target is not None and not isinstance(target, (int, float)):
                print(f"{path}:{lineno}: skipping record with non-numeric 'label'", file=log)
                continue
            yield Record(
                id=obj.get("id", lineno),
                text=obj["text"],
                target=float(target) if target is not None else None,
            )


def make_predictor(model: str, task: Task) -> Predictor:
    """Build a predictor from a model source string."""
    if model.startswith("builtin:"):
        predictor = LinearPredictor.from_file(model[len("builtin:"):])
        if predictor.task != task:
            raise ConfigError(
                f"model spec is for {predictor.task.kind} but the run is {task.kind}"
                + (
                    f" with {task.num_classes} classes"
                    if task.is_classification and predictor.task.is_classification
                    else ""
                )
            )
        return predictor
    if model.startswith("cmd:"):
        return ExternalPredictor.from_command(model[len("cmd:"):], task)
    if model.startswith("tcp:"):
        rest = model[len("tcp:"):]
        host, sep, port = rest.rpartition(":")
        if not sep or not host:
            raise ConfigError(f"tcp model must be tcp:<host>:<port>, got {model!r}")
        try:
            port_num = int(port)
        except ValueError:
            raise ConfigError(f"invalid port in {model!r}") from None
        return ExternalPredictor.from_tcp(host, port_num, task)
    raise ConfigError(f"model must start with builtin:, cmd: or tcp:, got {model!r}")


def _resolve_mode(config: RunConfig, n: int, log: TextIO) -> str:
    if config.mode is not None:
        return config.mode
    if n > config.long_seq_threshold:
        print(
            f"warning: sequence of {n} tokens exceeds {config.long_seq_threshold}; "
            f"switching to early-stop mode (pass --mode to override)",
            file=log,
        )
        return EARLY_STOP
    return EXHAUSTIVE


def explain_one(
    record: Record,
    config: RunConfig,
    predictor: Predictor,
    vocab: Vocabulary,
    log: TextIO = sys.stderr,
) -> report_mod.ExplanationReport:
    """Run the full pipeline for one record.

    Tokenize, mark importance (or skip it), scan effects per the resolved
    mode, and assemble the report with exact predictor-call accounting.
    Per-record errors are captured in the report; transport errors
    propagate because the predictor is gone for every later record too.
    """
    counting = CountingPredictor(predictor)
    task = predictor.task
    mode = config.mode or EXHAUSTIVE
    try:
        sentence = tokenize(record.text, vocab)
        mode = _resolve_mode(config, len(sentence), log)

        if task.is_classification:
            mask = importance.skip_importance(sentence, counting)
        elif record.target is not None:
            mask = importance.mark_importance(
                sentence, record.target, counting, loss_kind=config.loss_kind
            )
        else:
            print(
                f"record {record.id!r}: no target label; skipping the importance step",
                file=log,
            )
            mask = importance.skip_importance(sentence, counting)

        if task.is_classification:
            focus_class = (
                config.focus_class if config.focus_class is not None else int(np.argmax(mask.y_imp))
            )
        else:
            focus_class = None
        if mode == EXHAUSTIVE:
            effects = effect.effect_scan_exhaustive(
                mask, counting, tau=config.tau, eps=config.eps, focus_class=focus_class
            )
        else:
            effects = effect.effect_scan_early_stop(
                mask,
                counting,
                max_gram=config.max_gram,
                tau=config.tau,
                eps=config.eps,
                focus_class=focus_class,
            )
        cover = report_mod.compute_display_cover(effects, focus_class)

        if task.is_classification:
            prediction = [float(p) for p in mask.y_all]
            predicted_class = int(np.argmax(mask.y_all))
            y_imp = [float(p) for p in mask.y_imp]
        else:
            prediction = float(mask.y_all)
            predicted_class = None
            y_imp = float(mask.y_imp)

        return report_mod.ExplanationReport(
            id=record.id,
            text=record.text,
            tokens=sentence.tokens,
            task_kind=task.kind,
            num_classes=task.num_classes,
            prediction=prediction,
            predicted_class=predicted_class,
            target=record.target,
            focus_class=focus_class,
            importance_skipped=mask.skipped,
            loss_kind=mask.loss_kind,
            loss_all=mask.loss_all,
            loss_imp=mask.loss_imp,
            y_imp=y_imp,
            marks=mask.marks,
            importance_phrases=mask.phrases,
            effects=effects,
            display_cover=cover,
            accounting=report_mod.Accounting(
                batch_invocations=counting.invocations,
                rows_predicted=counting.rows_predicted,
                mode=mode,
            ),
            error=None,
        )
    except TransportError:
        raise
    except Exception as exc:
        return report_mod.ExplanationReport(
            id=record.id,
            text=record.text,
            tokens=[],
            task_kind=task.kind,
            num_classes=task.num_classes,
            prediction=None,
            predicted_class=None,
            target=record.target,
            focus_class=None,
            importance_skipped=True,
            loss_kind=None,
            loss_all=None,
            loss_imp=None,
            y_imp=None,
            marks=[],
            importance_phrases=[],
            effects=[],
            display_cover=[],
            accounting=report_mod.Accounting(
                batch_invocations=counting.invocations,
                rows_predicted=counting.rows_predicted,
                mode=mode,
            ),
            error=f"{type(exc).__name__}: {exc}",
        )


def explain_text(
    text: str,
    predictor: Predictor,
    vocab: Vocabulary,
    *,
    record_id: str | int = "text",
    target: float | None = None,
    mode: str | None = None,
    loss_kind: str = "mae",
    max_gram: int = 64,
    tau: float = effect.DEFAULT_TAU,
    long_seq_threshold: int = LONG_SEQUENCE_THRESHOLD,
    focus_class: int | None = None,
    log: TextIO = sys.stderr,
) -> report_mod.ExplanationReport:
    """One-call explanation for in-process use (no files involved)."""
    config = RunConfig(
        task=predictor.task,
        vocab_path="",
        model="",
        input_path="",
        mode=mode,
        loss_kind=loss_kind,
        max_gram=max_gram,
        tau=tau,
        long_seq_threshold=long_seq_threshold,
        focus_class=focus_class,
    )
    return explain_one(Record(id=record_id, text=text, target=target), config, predictor, vocab, log=log)


def _label_counts(reports: list[report_mod.ExplanationReport]) -> dict[str, int]:
    counts = {effect.POSITIVE: 0, effect.NEGATIVE: 0, effect.NEUTRAL: 0}
    for r in reports:
        for e in r.effects:
            counts[e.label] += 1
    return counts


def run(config: RunConfig, log: TextIO = sys.stderr) -> int:
    """Execute a batch run; returns the process exit status."""
    try:
        vocab = Vocabulary.from_file(config.vocab_path)
    except (OSError, ValueError) as exc:
        print(f"fatal: could not load vocabulary: {exc}", file=log)
        return 1
    try:
        predictor = make_predictor(config.model, config.task)
    except (ConfigError, OSError, ValueError, RuntimeError) as exc:
        print(f"fatal: could not initialize predictor: {exc}", file=log)
        return 1

    out: TextIO | None = None
    close_out = False
    reports: list[report_mod.ExplanationReport] = []
    status = 0
    try:
        if config.format in ("json", "ansi"):
            if config.output_path:
                out = open(config.output_path, "w", encoding="utf-8")
                close_out = True
            else:
                out = sys.stdout

        records = 0
        try:
            for record in ingest(config.input_path, log=log):
                records += 1
                rep = explain_one(record, config, predictor, vocab, log=log)
                reports.append(rep)
                if config.format == "json":
                    out.write(report_mod.render_json(rep) + "\n")
                    out.flush()
                elif config.format == "ansi":
                    out.write(f"{rep.id}\t{report_mod.render_ansi(rep, color=config.color)}\n")
                    out.flush()
        except OSError as exc:
            print(f"fatal: could not read input: {exc}", file=log)
            return 1
        except TransportError as exc:
            print(f"fatal: external predictor failed: {exc}", file=log)
            status = 1

        if records == 0:
            print("fatal: no valid records in input", file=log)
            return 1

        if config.format == "html" and (status == 0 or reports):
            _write_html(config, reports, log)

        counts = _label_counts(reports)
        total_invocations = sum(r.accounting.batch_invocations for r in reports)
        print(
            f"processed {len(reports)}/{records} records: "
            f"{counts[effect.POSITIVE]} positive, {counts[effect.NEGATIVE]} negative, "
            f"{counts[effect.NEUTRAL]} neutral spans; {total_invocations} batch invocations",
            file=log,
        )
        return status
    finally:
        if close_out and out is not None:
            out.close()
        closer = getattr(predictor, "close", None)
        if closer is not None:
            try:
                closer()
            except TransportError:
                pass


def _write_html(config: RunConfig, reports: list[report_mod.ExplanationReport], log: TextIO) -> None:
    if config.per_record_html:
        outdir = config.output_path or "."
        os.makedirs(outdir, exist_ok=True)
        for rep in reports:
            path = os.path.join(outdir, f"{rep.id}.html")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(report_mod.render_html(rep))
    else:
        doc = report_mod.render_html_many(reports)
        if config.output_path:
            with open(config.output_path, "w", encoding="utf-8") as fh:
                fh.write(doc)
        else:
            sys.stdout.write(doc)
