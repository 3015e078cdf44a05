import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exin import (
    EIScore,
    ExplanationReport,
    PhraseEffect,
    compute_display_cover,
    parse_json,
    render_ansi,
    render_html,
    render_json,
)
from exin.report import ANSI_GREEN, ANSI_RED, ANSI_RESET, Accounting


def make_effect(start, end, value, label=None, baseline=1.0):
    label = label or ("positive" if value > 0 else "negative" if value < 0 else "neutral")
    return PhraseEffect(
        start=start,
        end=end,
        label=label,
        scores=[
            EIScore(
                value=value,
                baseline=baseline,
                excluded=baseline * (1 - value / 100),
                raw_change=baseline * value / 100,
                label=label,
            )
        ],
    )


def make_report(tokens, effects, cover=None, **overrides):
    fields = dict(
        id="r1",
        text=" ".join(tokens),
        tokens=list(tokens),
        task_kind="regression",
        num_classes=None,
        prediction=1.25,
        predicted_class=None,
        target=1.0,
        focus_class=None,
        importance_skipped=False,
        loss_kind="mae",
        loss_all=0.25,
        loss_imp=0.25,
        y_imp=1.25,
        marks=["important"] * len(tokens),
        importance_phrases=[(0, len(tokens), "important")],
        effects=effects,
        display_cover=cover if cover is not None else compute_display_cover(effects),
        accounting=Accounting(batch_invocations=3, rows_predicted=9, mode="exhaustive"),
        error=None,
    )
    fields.update(overrides)
    return ExplanationReport(**fields)


class TestDisplayCover:
    def test_greedy_by_magnitude(self):
        effects = [
            make_effect(0, 1, 10.0),
            make_effect(0, 2, 60.0),
            make_effect(1, 2, -40.0),
            make_effect(2, 3, 5.0),
        ]
        cover = compute_display_cover(effects)
        assert [(s, e) for s, e, _, _ in cover] == [(0, 2), (2, 3)]

    def test_neutral_and_unscored_excluded(self):
        effects = [
            PhraseEffect(start=0, end=1, label="neutral"),
            make_effect(1, 2, 0.0, label="neutral"),
            make_effect(2, 3, 30.0),
        ]
        cover = compute_display_cover(effects)
        assert [(s, e) for s, e, _, _ in cover] == [(2, 3)]

    def test_deterministic_tie_break(self):
        effects = [make_effect(2, 3, 50.0), make_effect(0, 1, 50.0)]
        assert compute_display_cover(effects) == compute_display_cover(list(reversed(effects)))
        assert compute_display_cover(effects)[0][0] == 0

    def test_disjoint(self):
        rng = np.random.default_rng(7)
        effects = []
        for _ in range(100):
            s = int(rng.integers(0, 20))
            e = s + int(rng.integers(1, 5))
            effects.append(make_effect(s, e, float(rng.normal()) * 10 or 1.0))
        cover = compute_display_cover(effects)
        seen = set()
        for s, e, _, _ in cover:
            span = set(range(s, e))
            assert not span & seen
            seen |= span


class TestJson:
    def test_positive_span_serialized(self):
        report = make_report(["good", "movie"], [make_effect(0, 1, 50.0)])
        doc = render_json(report)
        assert '"label":"positive"' in doc
        assert '"schema":"ei-report/1"' in doc

    def test_round_trip_simple(self):
        report = make_report(["good", "movie"], [make_effect(0, 1, 50.0), make_effect(1, 2, -25.0)])
        assert parse_json(render_json(report)) == report

    def test_accounting_present_without_spans(self):
        report = make_report(["x"], [])
        parsed = parse_json(render_json(report))
        assert parsed.accounting.batch_invocations == 3
        assert parsed.accounting.rows_predicted == 9

    def test_rejects_unknown_schema(self):
        report = make_report(["x"], [])
        doc = render_json(report).replace("ei-report/1", "ei-report/9")
        with pytest.raises(ValueError):
            parse_json(doc)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_round_trip_property(self, data):
        n = data.draw(st.integers(1, 8))
        tokens = [f"w{i}" for i in range(n)]
        effects = []
        for start in range(n):
            value = data.draw(
                st.floats(min_value=-500, max_value=500, allow_nan=False, allow_infinity=False)
            )
            end = data.draw(st.integers(start + 1, n))
            if data.draw(st.booleans()):
                effects.append(make_effect(start, end, value))
            else:
                effects.append(PhraseEffect(start=start, end=end, label="neutral"))
        target = data.draw(st.none() | st.floats(-10, 10, allow_nan=False))
        error = data.draw(st.none() | st.text(max_size=30))
        report = make_report(tokens, effects, target=target, error=error)
        assert parse_json(render_json(report)) == report

    def test_classification_fields_round_trip(self):
        eff = PhraseEffect(
            start=0,
            end=1,
            label="positive",
            scores=[
                EIScore(value=33.3, baseline=0.9, excluded=0.6, raw_change=0.3, label="positive", class_index=1),
                EIScore(value=-300.0, baseline=0.1, excluded=0.4, raw_change=-0.3, label="negative", class_index=0),
            ],
        )
        report = make_report(
            ["fun"],
            [eff],
            task_kind="classification",
            num_classes=2,
            prediction=[0.1, 0.9],
            predicted_class=1,
            focus_class=1,
            y_imp=[0.1, 0.9],
            importance_skipped=True,
            loss_kind=None,
            loss_all=None,
            loss_imp=None,
        )
        assert parse_json(render_json(report)) == report


class TestAnsi:
    def test_table_style_coloring(self):
        tokens = "a bad movie that happened to good actors".split()
        effects = [make_effect(0, 3, -80.0), make_effect(6, 8, 45.0)]
        report = make_report(tokens, effects)
        out = render_ansi(report, color=True)
        assert f"{ANSI_RED}a bad movie{ANSI_RESET}" in out
        assert f"{ANSI_GREEN}good actors{ANSI_RESET}" in out
        assert "that happened to" in out

    def test_all_neutral_is_plain_join(self):
        tokens = ["just", "words"]
        report = make_report(tokens, [PhraseEffect(start=0, end=2, label="neutral")])
        assert render_ansi(report, color=True) == "just words"

    def test_bracket_fallback(self):
        tokens = "a bad movie that happened to good actors".split()
        effects = [make_effect(0, 3, -80.0), make_effect(6, 8, 45.0)]
        report = make_report(tokens, effects)
        out = render_ansi(report, color=False)
        assert "[-a bad movie-]" in out
        assert "[+good actors+]" in out
        assert "\x1b" not in out

    def test_tokens_never_reordered_or_dropped(self):
        tokens = "one two three four five".split()
        effects = [make_effect(1, 3, 20.0), make_effect(3, 4, -10.0)]
        report = make_report(tokens, effects)
        plain = render_ansi(report, color=False)
        stripped = plain.replace("[+", "").replace("+]", "").replace("[-", "").replace("-]", "")
        assert stripped.split() == tokens


class TestHtml:
    def test_highlight_classes_and_tooltips(self):
        tokens = ["great", "essay"]
        effects = [make_effect(0, 1, 62.5), make_effect(1, 2, -12.5)]
        report = make_report(tokens, effects)
        doc = render_html(report)
        assert doc.startswith("<!doctype html>")
        assert 'class="phrase positive"' in doc
        assert 'class="phrase negative"' in doc
        assert "EI +62.50%" in doc
        assert "EI -12.50%" in doc

    def test_empty_effects_plain_text(self):
        report = make_report(["plain", "words"], [])
        doc = render_html(report)
        assert "plain words" in doc
        assert "phrase positive" not in doc

    def test_escapes_special_characters(self):
        tokens = ["<script>", "&stuff"]
        effects = [make_effect(0, 1, 30.0)]
        report = make_report(tokens, effects, text="<script> &stuff")
        doc = render_html(report)
        assert "<script>" not in doc
        assert "&lt;script&gt;" in doc
        assert "&amp;stuff" in doc

    def test_no_external_resources(self):
        report = make_report(["x"], [])
        doc = render_html(report)
        assert "http://" not in doc and "https://" not in doc
        assert "src=" not in doc
