"""Construct the six grounding subtasks and dense-caption targets from annotations.

Each annotation segment expands into one QA pair per direction:

* v2t / a2t - caption in the question, canonical interval string as answer
  (moment retrieval).
* t2v / t2a - interval in the question, caption as answer.
* v2a / a2v - caption of one modality in the question, the time-synchronized
  caption of the other modality as answer.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .annotations import VideoAnnotation
from .errors import EmptyAnnotation, SchemaError
from .timeline import TimeInterval, render_interval, round_half_up


class Subtask(str, enum.Enum):
    V2T = "v2t"
    T2V = "t2v"
    A2T = "a2t"
    T2A = "t2a"
    V2A = "v2a"
    A2V = "a2v"


GROUNDING_SUBTASKS = frozenset({Subtask.V2T, Subtask.A2T})
CAPTION_SUBTASKS = frozenset(
    {Subtask.T2V, Subtask.T2A, Subtask.V2A, Subtask.A2V}
)


@dataclass(frozen=True)
class QaPair:
    qa_id: str
    video_id: str
    subtask: Subtask
    question: str
    answer: str
    interval: TimeInterval


# Question templates per direction. Placeholders: {video_caption},
# {audio_caption}, {interval} (the rendered canonical interval string).
TEMPLATE_SETS: dict[str, dict[Subtask, str]] = {
    "default": {
        Subtask.V2T: (
            "When does the following visual event occur? {video_caption} "
            "Answer with second{{start}}-second{{end}}."
        ),
        Subtask.T2V: "Describe the visual content between {interval}.",
        Subtask.A2T: (
            "When does the following audio occur? {audio_caption} "
            "Answer with second{{start}}-second{{end}}."
        ),
        Subtask.T2A: "Describe the audio between {interval}.",
        Subtask.V2A: (
            "What can be heard while the following visual event is shown? "
            "{video_caption}"
        ),
        Subtask.A2V: (
            "What is shown on screen while the following audio is heard? "
            "{audio_caption}"
        ),
    }
}


def register_template_set(name: str, templates: dict[Subtask, str]) -> None:
    """Register an alternative question phrasing under its own identifier."""
    missing = [t.value for t in Subtask if t not in templates]
    if missing:
        raise ValueError(f"template set {name!r} missing subtasks: {missing}")
    TEMPLATE_SETS[name] = dict(templates)


def _grammar_interval(interval: TimeInterval) -> TimeInterval:
    """Snap an interval to the grammar's one-decimal resolution."""
    return TimeInterval.from_seconds(
        round_half_up(interval.start.seconds, 1),
        round_half_up(interval.end.seconds, 1),
    )


def build_qa(
    anno: VideoAnnotation,
    segment_index: int,
    template_set: str = "default",
) -> list[QaPair]:
    """Expand one segment into exactly six QA pairs, one per direction.

    Intervals are snapped to the timestamp grammar's resolution so every
    v2t/a2t answer parses back to the pair's interval exactly.
    """
    if not 0 <= segment_index < len(anno.segments):
        raise IndexError(
            f"segment index {segment_index} out of range for {len(anno.segments)} segments"
        )
    templates = TEMPLATE_SETS.get(template_set)
    if templates is None:
        raise KeyError(f"unknown template set {template_set!r}")

    segment = anno.segments[segment_index]
    interval = _grammar_interval(segment.interval)
    interval_text = render_interval(interval)
    fields = {
        "video_caption": segment.video_caption,
        "audio_caption": segment.audio_caption,
        "interval": interval_text,
    }
    answers = {
        Subtask.V2T: interval_text,
        Subtask.T2V: segment.video_caption,
        Subtask.A2T: interval_text,
        Subtask.T2A: segment.audio_caption,
        Subtask.V2A: segment.audio_caption,
        Subtask.A2V: segment.video_caption,
    }
    return [
        QaPair(
            qa_id=f"{anno.video_id}:{segment_index}:{subtask.value}",
            video_id=anno.video_id,
            subtask=subtask,
            question=templates[subtask].format(**fields),
            answer=answers[subtask],
            interval=interval,
        )
        for subtask in Subtask
    ]


def select_test_segment(anno: VideoAnnotation, rng_seed: int) -> int:
    """Uniformly pick one segment, deterministic per (video_id, seed).

    Hash-derived so the choice is stable across runs, platforms, and
    processing order.
    """
    if not anno.segments:
        raise EmptyAnnotation(f"video {anno.video_id!r} has no segments")
    digest = hashlib.sha256(f"{anno.video_id}:{rng_seed}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % len(anno.segments)


def build_benchmark(
    annotations: Sequence[VideoAnnotation],
    rng_seed: int = 0,
    template_set: str = "default",
) -> list[QaPair]:
    """One randomly selected segment per video, six QA pairs each."""
    pairs: list[QaPair] = []
    for anno in annotations:
        index = select_test_segment(anno, rng_seed)
        pairs.extend(build_qa(anno, index, template_set))
    return pairs


def build_dense_caption_target(anno: VideoAnnotation) -> str:
    """Dense-caption supervision string: one machine-parseable line per segment.

    ``second{start}-second{end} | V: <video caption> | A: <audio caption>``
    """
    lines = []
    for segment in anno.segments:
        interval_text = render_interval(_grammar_interval(segment.interval))
        lines.append(
            f"{interval_text} | V: {segment.video_caption} | A: {segment.audio_caption}"
        )
    return "\n".join(lines)


def qa_to_record(pair: QaPair) -> dict:
    return {
        "qa_id": pair.qa_id,
        "video_id": pair.video_id,
        "subtask": pair.subtask.value,
        "question": pair.question,
        "answer": pair.answer,
        "interval": [pair.interval.start.seconds, pair.interval.end.seconds],
    }


def save_qa(pairs: Iterable[QaPair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for pair in pairs:
            handle.write(json.dumps(qa_to_record(pair), ensure_ascii=False))
            handle.write("\n")


def load_qa(path: str | Path) -> list[QaPair]:
    """Load qa.jsonl; raises SchemaError with line numbers on malformed records."""
    pairs = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{Path(path).name}:{line_no}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{where}: invalid JSON ({exc.msg})") from exc
            try:
                interval = record["interval"]
                pairs.append(
                    QaPair(
                        qa_id=record["qa_id"],
                        video_id=record["video_id"],
                        subtask=Subtask(record["subtask"]),
                        question=record["question"],
                        answer=record["answer"],
                        interval=TimeInterval.from_seconds(interval[0], interval[1]),
                    )
                )
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                raise SchemaError(f"{where}: bad QA record ({exc})") from exc
    return pairs
