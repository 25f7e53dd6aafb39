"""
End-to-end benchmark round trip
===============================

Build a small synthetic annotation corpus, materialize the six-direction QA
benchmark, answer it with a deliberately imperfect "model", and score the
predictions into the per-subtask report grid.
"""

import json
import random
import tempfile
from pathlib import Path

from chronusav import (
    build_benchmark,
    emit_report,
    evaluate,
    filter_corpus,
    save_qa,
)
from chronusav.annotations import SegmentAnnotation, VideoAnnotation
from chronusav.timeline import TimeInterval, round_half_up

rng = random.Random(0)
words = ("crowd cheers street performer juggles torches drums echo vendor "
         "calls traffic children laugh waves splash harbor gulls cry boats "
         "guitar drifts cafe speaker announces departure engine hums").split()


def caption():
    return " ".join(rng.sample(words, 7))


corpus = []
for i in range(30):
    duration = round_half_up(rng.uniform(40, 700), 1)  # some out of bounds
    n_seg = rng.randint(3, 12)
    bounds = [round_half_up(duration * k / n_seg, 1) for k in range(n_seg + 1)]
    segments = tuple(
        SegmentAnnotation(TimeInterval.from_seconds(a, b), caption(), caption())
        for a, b in zip(bounds, bounds[1:])
    )
    corpus.append(VideoAnnotation(f"clip{i:03d}", duration, segments))

kept = filter_corpus(corpus)
print(f"{len(kept)}/{len(corpus)} videos survive the duration/segment filters")

pairs = build_benchmark(kept, rng_seed=0)
print(f"{len(pairs)} QA pairs ({len(kept)} videos x 6 directions)")

workdir = Path(tempfile.mkdtemp())
qa_path = workdir / "qa.jsonl"
save_qa(pairs, qa_path)

# A sloppy model: perfect half the time, vague or silent otherwise.
preds_path = workdir / "preds.jsonl"
with open(preds_path, "w", encoding="utf-8") as f:
    for pair in pairs:
        roll = rng.random()
        if roll < 0.5:
            prediction = pair.answer
        elif roll < 0.8:
            prediction = "second{0.0}-second{1.0}" if pair.subtask.value in ("v2t", "a2t") \
                else "something happens"
        else:
            continue  # no answer at all
        f.write(json.dumps({"qa_id": pair.qa_id, "prediction": prediction}) + "\n")

report = evaluate(qa_path, preds_path, label="sloppy-model")
print()
print(emit_report(report, format="markdown"))
