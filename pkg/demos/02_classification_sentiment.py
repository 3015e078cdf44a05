"""Per-class phrase effects for a two-class sentiment model.

One sentence can carry phrases pulling toward both classes at once; the
per-class scores make that visible. Writes an HTML report next to this
script.
"""

from pathlib import Path

from exin import LinearPredictor, Vocabulary, explain_text, render_ansi, render_html_many

WORDS = (
    "a bad movie that happened to good actors fun ride visual hideousness "
    "sharp script and strong performances overcomes its with"
).split()
vocab = Vocabulary({w: i for i, w in enumerate(dict.fromkeys(WORDS), start=1)}, oov_index=99)

NEG, POS = 0, 1
negative_words = {"bad": 1.6, "hideousness": 1.3, "visual": 0.4}
positive_words = {"good": 1.1, "fun": 1.4, "ride": 0.5, "sharp": 0.9, "strong": 0.8,
                  "performances": 0.4, "script": 0.3, "overcomes": 0.6}
model = LinearPredictor.classification(
    class_biases=[0.0, 0.0],
    class_coefficients=[
        {vocab.token_to_index[w]: c for w, c in negative_words.items()},
        {vocab.token_to_index[w]: c for w, c in positive_words.items()},
    ],
)

sentences = [
    "a bad movie that happened to good actors",
    "a fun ride",
    "overcomes its visual hideousness with a sharp script and strong performances",
]

# Fix the focus on the positive-sentiment class so green always means
# "pulls toward positive" and red "pulls toward negative", whatever the
# predicted class is.
reports = []
for text in sentences:
    report = explain_text(text, model, vocab, record_id=text[:24], focus_class=POS)
    reports.append(report)
    probs = ", ".join(f"P(c{j}) = {p:.2f}" for j, p in enumerate(report.prediction))
    scored = sum(1 for e in report.effects if e.scores)
    print(f"\n{text!r}")
    print(f"  predicted class {report.predicted_class} ({probs}); {scored} spans scored")
    print(f"  {render_ansi(report)}")
    for start, end, label, _ in report.display_cover:
        phrase = " ".join(report.tokens[start:end])
        focus = next(
            s
            for e in report.effects
            if (e.start, e.end) == (start, end)
            for s in e.scores
            if s.class_index == report.focus_class
        )
        print(f"    {phrase!r}: EI {focus.value:+.1f}% toward class {report.focus_class} ({label})")

out = Path(__file__).with_name("sentiment_report.html")
out.write_text(render_html_many(reports, title="sentiment phrase effects"))
print(f"\nwrote {out}")
