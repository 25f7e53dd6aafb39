"""Moment-retrieval metrics: Recall@1 at IoU thresholds and mean IoU."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyResults
from .timeline import TimeInterval, iou


@dataclass(frozen=True)
class GroundingResult:
    """One scored query; ``pred`` is None when the model output did not parse."""

    qa_id: str
    pred: TimeInterval | None
    gt: TimeInterval

    @property
    def iou(self) -> float:
        if self.pred is None:
            return 0.0
        return iou(self.pred, self.gt)


def recall_at_iou(results: Sequence[GroundingResult], threshold: float) -> float:
    """Percentage of queries whose prediction reaches the IoU threshold.

    Parse failures count as misses, never as exclusions.
    """
    if not results:
        raise EmptyResults("recall_at_iou needs at least one result")
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    hits = sum(1 for r in results if r.iou >= threshold)
    return 100.0 * hits / len(results)


def mean_iou(results: Sequence[GroundingResult]) -> float:
    """Arithmetic mean IoU as a percentage."""
    if not results:
        raise EmptyResults("mean_iou needs at least one result")
    return 100.0 * math.fsum(r.iou for r in results) / len(results)
