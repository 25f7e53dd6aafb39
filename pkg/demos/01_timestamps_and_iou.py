"""
Timestamp grammar and interval IoU
==================================

Timestamps render as ``second{t}`` with one fractional digit; intervals are
two timestamps joined by a hyphen. IoU over intervals is the overlap scoring
primitive everything else builds on.
"""

from chronusav import (
    TimeInterval,
    interval_or_none,
    iou,
    parse_interval,
    render_timestamp,
)

# Rendering is deterministic half-up rounding to one decimal.
for seconds in (0.0, 2.0, 3.14, 126.0):
    print(seconds, "->", render_timestamp(seconds))

# Parsing is strict about the grammar but tolerant of surrounding whitespace.
parsed = parse_interval("  second{3.0}-second{12.5} ")
print("parsed:", parsed.start.seconds, "to", parsed.end.seconds)

# A reversed model output still parses, but is flagged and scores 0 overlap.
reversed_output = parse_interval("second{12.5}-second{3.0}")
print("reversed?", reversed_output.is_reversed)
print("scored as:", interval_or_none("second{12.5}-second{3.0}"))

# IoU uses total covered length for the union, never the hull.
pred = TimeInterval.from_seconds(2, 8)
gt = TimeInterval.from_seconds(4, 10)
print("iou([2,8],[4,10]) =", iou(pred, gt))  # intersection 4, union 8 -> 0.5
