"""Annotation schema, JSONL ingestion, corpus filters, segment merging, agreement.

One annotation record per line::

    {"video_id": str, "duration_s": number, "domain": optional str,
     "segments": [{"start_s": number, "end_s": number,
                   "video_caption": str, "audio_caption": str}]}

Files are UTF-8 with LF line endings.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateAgreement,
    DimensionMismatch,
    SchemaError,
    ValidationError,
)
from .timeline import TimeInterval

logger = logging.getLogger(__name__)

# Float jitter tolerance on ingestion; larger overlaps are annotation bugs.
OVERLAP_TOLERANCE_S = 0.05

# Prompt constants handed to external caption providers for new annotation runs.
CAPTION_PROMPT_VIDEO = (
    "The user will input a video. Please provide a brief description of the "
    "main visual content of the video. Avoid specific timestamps and keep the "
    "content concise. Avoid using indicative phrases like 'in the video' and "
    "directly output the visual information."
)
CAPTION_PROMPT_AUDIO = (
    "The user will input a audio. Briefly describe the audio information, "
    "including the original text of the speech, audio events, etc. Avoid "
    "using indicative phrases like 'in the audio' and directly output the "
    "audio information. Do not interpret the meaning of the speech expressed "
    "in the audio; just record what you hear concisely. For audio events, "
    "only output those that you are very certain about, and disregard any "
    "uncertain sounds. Record speech and audio events in order, but avoid "
    "specific timestamps. ##For example: A train whistle blows followed by a "
    "character speaking in a crisp voice, 'Hello, my name is John. I would "
    "like to help you learn the numbers.' This is all accompanied by the "
    "sound of a train moving on its tracks."
)


@dataclass(frozen=True)
class SegmentAnnotation:
    """One (interval, video caption, audio caption) triplet."""

    interval: TimeInterval
    video_caption: str
    audio_caption: str


@dataclass(frozen=True)
class VideoAnnotation:
    """All segments of one untrimmed video, ordered by start time."""

    video_id: str
    duration_s: float
    segments: tuple[SegmentAnnotation, ...]
    domain: str | None = None


def _require(record: dict, key: str, kinds, where: str):
    if key not in record:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = record[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise SchemaError(f"{where}: field {key!r} has wrong type {type(value).__name__}")
    return value


def _parse_record(record: dict, where: str) -> VideoAnnotation:
    video_id = _require(record, "video_id", str, where)
    duration = float(_require(record, "duration_s", (int, float), where))
    raw_segments = _require(record, "segments", list, where)
    domain = record.get("domain")
    if domain is not None and not isinstance(domain, str):
        raise SchemaError(f"{where}: field 'domain' has wrong type")
    if duration <= 0:
        raise ValidationError(f"{where}: duration_s must be positive, got {duration}")

    segments = []
    for k, seg in enumerate(raw_segments):
        seg_where = f"{where} segment {k}"
        if not isinstance(seg, dict):
            raise SchemaError(f"{seg_where}: not an object")
        start = float(_require(seg, "start_s", (int, float), seg_where))
        end = float(_require(seg, "end_s", (int, float), seg_where))
        video_caption = _require(seg, "video_caption", str, seg_where)
        audio_caption = _require(seg, "audio_caption", str, seg_where)
        if end < start:
            raise ValidationError(f"{seg_where}: end_s {end} precedes start_s {start}")
        if not video_caption.strip() or not audio_caption.strip():
            raise ValidationError(f"{seg_where}: empty caption")
        if start < 0 or end > duration + OVERLAP_TOLERANCE_S:
            raise ValidationError(
                f"{seg_where}: [{start}, {end}] outside video span [0, {duration}]"
            )
        segments.append(
            SegmentAnnotation(TimeInterval.from_seconds(start, end), video_caption, audio_caption)
        )

    for prev, cur in zip(segments, segments[1:]):
        if cur.interval.start.seconds < prev.interval.start.seconds:
            raise ValidationError(f"{where}: segments not sorted by start time")
        overlap = prev.interval.end.seconds - cur.interval.start.seconds
        if overlap > OVERLAP_TOLERANCE_S:
            raise ValidationError(
                f"{where}: segments overlap by {overlap:.3f}s (tolerance {OVERLAP_TOLERANCE_S}s)"
            )
        if overlap > 0:
            logger.warning("%s: segments overlap by %.3fs (within tolerance)", where, overlap)
        elif overlap < 0:
            logger.warning("%s: gap of %.3fs between segments", where, -overlap)

    return VideoAnnotation(video_id, duration, tuple(segments), domain)


def load_annotations(path: str | Path) -> list[VideoAnnotation]:
    """Load and validate a JSONL annotation file.

    Raises:
        SchemaError: unparseable line, missing field, or wrong type; the
            message carries the 1-based line number.
        ValidationError: ordering/overlap/span violations, likewise located.
    """
    annotations = []
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
            if not isinstance(record, dict):
                raise SchemaError(f"{where}: line is not a JSON object")
            annotations.append(_parse_record(record, where))
    return annotations


def annotation_to_record(anno: VideoAnnotation) -> dict:
    record = {
        "video_id": anno.video_id,
        "duration_s": anno.duration_s,
        "segments": [
            {
                "start_s": seg.interval.start.seconds,
                "end_s": seg.interval.end.seconds,
                "video_caption": seg.video_caption,
                "audio_caption": seg.audio_caption,
            }
            for seg in anno.segments
        ],
    }
    if anno.domain is not None:
        record["domain"] = anno.domain
    return record


def save_annotations(annotations: Iterable[VideoAnnotation], path: str | Path) -> None:
    """Serialize annotations back to canonical JSONL (inverse of load)."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for anno in annotations:
            handle.write(json.dumps(annotation_to_record(anno), ensure_ascii=False))
            handle.write("\n")


def filter_corpus(
    annotations: Sequence[VideoAnnotation],
    min_dur: float = 60.0,
    max_dur: float = 600.0,
    min_seg: int = 5,
    max_seg: int = 30,
) -> list[VideoAnnotation]:
    """Keep videos within the duration and segment-count bounds (inclusive)."""
    return [
        anno
        for anno in annotations
        if min_dur <= anno.duration_s <= max_dur
        and min_seg <= len(anno.segments) <= max_seg
    ]


def merge_segments(
    boundaries: Sequence[float],
    adjacent_similarity: Sequence[float],
    threshold: float,
    max_segments: int,
) -> list[float]:
    """Greedily merge adjacent segments by externally supplied similarity.

    Repeatedly merges the adjacent pair with the highest similarity while a
    pair reaches ``threshold``, or while the segment count still exceeds
    ``max_segments``. Ties break toward the earlier pair. When two runs of
    original segments become adjacent, their similarity is the mean of the
    original adjacencies crossing the shared boundary (exactly one does, so
    the surviving boundary keeps its original score). Similarities come from
    the caller; no embeddings are computed here.
    """
    bounds = [float(b) for b in boundaries]
    if len(bounds) < 2:
        raise DimensionMismatch("need at least 2 boundaries (1 segment)")
    if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
        raise DimensionMismatch("boundaries must be strictly increasing")
    sims = [float(s) for s in adjacent_similarity]
    if len(sims) != len(bounds) - 2:
        raise DimensionMismatch(
            f"expected {len(bounds) - 2} adjacent similarities, got {len(sims)}"
        )
    if max_segments < 1:
        raise DimensionMismatch("max_segments must be >= 1")

    while sims:
        segment_count = len(bounds) - 1
        best = max(range(len(sims)), key=lambda i: (sims[i], -i))
        if segment_count > max_segments or sims[best] >= threshold:
            del bounds[best + 1]
            del sims[best]
        else:
            break
    return bounds


@dataclass(frozen=True)
class AgreementTable:
    """Items x categories matrix of annotator vote counts."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if counts.ndim != 2:
            raise ValidationError("agreement table must be 2-dimensional")
        if not np.issubdtype(counts.dtype, np.integer):
            if not np.all(counts == np.floor(counts)):
                raise ValidationError("vote counts must be integers")
            counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise ValidationError("vote counts must be non-negative")
        row_sums = counts.sum(axis=1)
        if row_sums.size == 0 or np.any(row_sums != row_sums[0]):
            raise ValidationError("every item must have the same number of raters")
        object.__setattr__(self, "counts", counts)

    @property
    def n_items(self) -> int:
        return self.counts.shape[0]

    @property
    def n_raters(self) -> int:
        return int(self.counts[0].sum())


def fleiss_kappa(table: AgreementTable | Sequence[Sequence[int]]) -> float:
    """Chance-corrected multi-rater agreement.

    kappa = (P_bar - Pe_bar) / (1 - Pe_bar), with per-item agreement
    P_i = (sum_j n_ij^2 - n) / (n (n - 1)) and chance agreement from the
    squared category proportions. Exactly 1.0 under universal unanimity.

    Raises:
        DegenerateAgreement: every vote in a single category (Pe_bar == 1).
        ValidationError: fewer than 2 items or 2 raters per item.
    """
    if not isinstance(table, AgreementTable):
        table = AgreementTable(np.asarray(table))
    counts = table.counts.astype(np.float64)
    n_items, _ = counts.shape
    n_raters = table.n_raters
    if n_items < 2:
        raise ValidationError("fleiss_kappa requires at least 2 items")
    if n_raters < 2:
        raise ValidationError("fleiss_kappa requires at least 2 raters per item")

    per_item = ((counts**2).sum(axis=1) - n_raters) / (n_raters * (n_raters - 1))
    p_bar = float(per_item.mean())
    category_share = counts.sum(axis=0) / (n_items * n_raters)
    pe_bar = float((category_share**2).sum())
    if 1.0 - pe_bar == 0.0:
        raise DegenerateAgreement(
            "all votes fall in one category; chance agreement is 1 and kappa is undefined"
        )
    return (p_bar - pe_bar) / (1.0 - pe_bar)
