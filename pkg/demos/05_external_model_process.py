"""Attach an out-of-process model over the ei-predict/1 wire protocol.

The engine only ever sees batches of index rows and their outputs, so any
process that answers newline-delimited JSON on stdin/stdout can be the
model. Here the same linear spec is served two ways: in process, and by
the reference server under server/ (Node.js) if it has been built.
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

from exin import ExternalPredictor, LinearPredictor, Task, Vocabulary, explain_text, render_ansi

spec = {"bias": 1.0, "coefficients": {"1": 0.9, "2": -0.7, "3": 0.2}}
vocab = Vocabulary({"great": 1, "boring": 2, "soundtrack": 3}, oov_index=4)
text = "great soundtrack boring plot"

spec_path = Path(tempfile.mkdtemp()) / "model.json"
spec_path.write_text(json.dumps(spec))

builtin = LinearPredictor.from_file(str(spec_path))
report = explain_text(text, builtin, vocab, target=1.4)
print("in-process model:  ", render_ansi(report))

server_entry = Path(__file__).resolve().parent.parent / "server" / "dist" / "server.js"
if not server_entry.exists() or shutil.which("node") is None:
    print(f"reference server not built; run: cd {server_entry.parent.parent} && npm install && npm run build")
    sys.exit(0)

external = ExternalPredictor.from_command(
    f"node {server_entry} --model {spec_path} --task regression", Task.regression()
)
try:
    report2 = explain_text(text, external, vocab, target=1.4)
    print("node server model: ", render_ansi(report2))
    matches = [
        abs(a.scores[0].value - b.scores[0].value) < 1e-6
        for a, b in zip(report.effects, report2.effects)
        if a.scores and b.scores and a.scores[0].value is not None
    ]
    print(f"EI values agree across the language boundary: {all(matches)} ({len(matches)} spans)")
finally:
    external.close()
