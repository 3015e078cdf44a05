"""Walk through a regression explanation step by step.

A tiny linear model stands in for the black box so every number can be
checked by eye: the coefficient of each word IS its effect on the score.
"""

from exin import (
    CountingPredictor,
    LinearPredictor,
    Vocabulary,
    effect_scan_exhaustive,
    explain_text,
    mark_importance,
    render_ansi,
    tokenize,
)

vocab = Vocabulary(
    {"the": 1, "plot": 2, "was": 3, "brilliant": 4, "but": 5, "too": 6, "long": 7},
    oov_index=8,
)
model = LinearPredictor.regression(
    bias=3.0,
    coefficients={1: 0.0, 2: 0.1, 3: 0.0, 4: 1.2, 5: 0.0, 6: -0.4, 7: -0.6},
)

text = "The plot was brilliant but too long"
target = 3.3
sentence = tokenize(text, vocab)
print(f"text:    {text!r}")
print(f"indices: {sentence.indices.tolist()}")
print(f"target:  {target}, model output: {model.predict([sentence.indices])[0]:.2f}")

# Part 1: words whose removal does not increase the loss are dispensable
counting = CountingPredictor(model)
mask = mark_importance(sentence, target, counting, loss_kind="mae")
print("\nimportance marks:")
for token, mark in zip(sentence.tokens, mask.marks):
    print(f"  {token:10s} {mark}")
print(f"masked row: {mask.masked_row.tolist()}")
print(f"loss on full row {mask.loss_all:.3f} -> loss on masked row {mask.loss_imp:.3f}")

# Part 2: percentage change of the output when each surviving phrase is excluded
effects = effect_scan_exhaustive(mask, counting)
print("\nsingle-word effects (exclusion-inclusion scores):")
for e in effects:
    if e.end - e.start == 1 and e.scores:
        word = sentence.tokens[e.start]
        print(f"  {word:10s} {e.scores[0].value:+7.2f}%  {e.label}")

print(f"\npredictor cost: {counting.invocations} batch invocations "
      f"({counting.rows_predicted} rows) for n = {len(sentence)}")

report = explain_text(text, model, vocab, record_id="walkthrough", target=target)
print("\nhighlighted sentence (green = raises the score, red = lowers it):")
print(render_ansi(report))
