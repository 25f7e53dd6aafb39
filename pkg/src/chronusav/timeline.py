"""Absolute-time primitives: the ``second{t}`` grammar, closed intervals, and IoU.

Timestamps are plain seconds rendered with exactly one fractional digit
(half-up rounding), e.g. ``second{0.0}``, ``second{2.0}``, ``second{126.0}``.
Intervals are two timestamps joined by a single hyphen with no interior
spaces: ``second{3.0}-second{12.5}``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .errors import MalformedInterval, MalformedTimestamp

_TIMESTAMP_RE = re.compile(r"second\{(\d+(?:\.\d+)?)\}")
_INTERVAL_RE = re.compile(
    r"second\{(\d+(?:\.\d+)?)\}-second\{(\d+(?:\.\d+)?)\}"
)


def round_half_up(value: float, digits: int = 1) -> float:
    """Round to ``digits`` decimals, halves away from zero.

    Built-in ``round`` rounds halves to even, which is not stable enough for
    a canonical string grammar; decimal half-up is deterministic everywhere.
    """
    quantum = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP))


def format_seconds(seconds: float) -> str:
    """Seconds as the canonical one-fractional-digit string, e.g. ``126.0``."""
    quantum = Decimal("0.1")
    return str(Decimal(repr(float(seconds))).quantize(quantum, rounding=ROUND_HALF_UP))


@dataclass(frozen=True, order=True)
class Timestamp:
    """A non-negative point on the media timeline, in seconds."""

    seconds: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "seconds", float(self.seconds) + 0.0)
        if not self.seconds >= 0.0:
            raise ValueError(f"timestamp must be >= 0, got {self.seconds}")


@dataclass(frozen=True)
class TimeInterval:
    """Closed interval of absolute seconds; construction rejects reversed bounds."""

    start: Timestamp
    end: Timestamp

    def __post_init__(self) -> None:
        if self.start.seconds > self.end.seconds:
            raise ValueError(
                f"interval start {self.start.seconds} exceeds end {self.end.seconds}"
            )

    @property
    def duration(self) -> float:
        return self.end.seconds - self.start.seconds

    @classmethod
    def from_seconds(cls, start: float, end: float) -> "TimeInterval":
        return cls(Timestamp(start), Timestamp(end))


@dataclass(frozen=True)
class ParsedInterval:
    """Outcome of parsing an interval string.

    ``start`` and ``end`` are kept in written order; a numerically reversed
    pair parses successfully but is flagged, and downstream scoring treats it
    as an empty interval (a negative-length set has no defined overlap).
    """

    start: Timestamp
    end: Timestamp
    is_reversed: bool

    def interval(self) -> TimeInterval:
        """The interval with ordered endpoints (valid even when flagged)."""
        if self.is_reversed:
            return TimeInterval(self.end, self.start)
        return TimeInterval(self.start, self.end)


def render_timestamp(t: Timestamp | float) -> str:
    """Render seconds as ``second{X.Y}`` with one fractional digit, half-up."""
    seconds = t.seconds if isinstance(t, Timestamp) else float(t)
    if seconds < 0:
        raise ValueError(f"cannot render negative seconds: {seconds}")
    return f"second{{{format_seconds(seconds)}}}"


def render_interval(interval: TimeInterval) -> str:
    """Render an interval as ``second{a}-second{b}``."""
    return f"{render_timestamp(interval.start)}-{render_timestamp(interval.end)}"


def parse_timestamp(s: str) -> Timestamp:
    """Parse ``second{D.D}`` (or integer shorthand ``second{D}``) to a Timestamp.

    Raises:
        MalformedTimestamp: anything outside the grammar, including
            surrounding text or whitespace.
    """
    match = _TIMESTAMP_RE.fullmatch(s)
    if match is None:
        raise MalformedTimestamp(f"not a second{{t}} timestamp: {s!r}")
    return Timestamp(float(match.group(1)))


def parse_interval(s: str) -> ParsedInterval:
    """Parse ``second{a}-second{b}``, tolerating surrounding whitespace only.

    A reversed pair (a > b) parses and is flagged rather than rejected:
    it is syntactically a valid model output, just semantically empty.

    Raises:
        MalformedInterval: wrong grammar.
    """
    match = _INTERVAL_RE.fullmatch(s.strip())
    if match is None:
        raise MalformedInterval(f"not a second{{a}}-second{{b}} interval: {s!r}")
    a, b = float(match.group(1)), float(match.group(2))
    return ParsedInterval(Timestamp(a), Timestamp(b), is_reversed=a > b)


def interval_or_none(s: str) -> TimeInterval | None:
    """Parse a predicted interval, mapping garbage and reversed pairs to None."""
    try:
        parsed = parse_interval(s)
    except MalformedInterval:
        return None
    if parsed.is_reversed:
        return None
    return parsed.interval()


def iou(pred: TimeInterval, gt: TimeInterval) -> float:
    """Intersection over union of two intervals, union as total covered length.

    Zero-length conventions: identical point intervals score 1 (identity is
    universal); any other zero-measure union scores 0.
    """
    inter = max(
        0.0,
        min(pred.end.seconds, gt.end.seconds) - max(pred.start.seconds, gt.start.seconds),
    )
    union = pred.duration + gt.duration - inter
    if union <= 0.0:
        identical = (
            pred.start.seconds == gt.start.seconds
            and pred.end.seconds == gt.end.seconds
        )
        return 1.0 if identical else 0.0
    return inter / union
