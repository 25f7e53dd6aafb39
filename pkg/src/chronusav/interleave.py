"""Interleaved time/video/audio token layout along a media timeline.

The sequence alternates rigidly as ``T_1 V_1 A_1 T_2 V_2 A_2 ...``: a textual
timestamp block, the tokens for the frame sampled at that instant, then the
tokens for the audio slice up to the next frame. This module lays out token
*budgets*, not embeddings; it is the serialization contract an encoder-side
implementation must match.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import InvalidConfig
from .timeline import TimeInterval, Timestamp, format_seconds, render_timestamp, round_half_up


class BlockKind(enum.Enum):
    TIME = "T"
    VIDEO = "V"
    AUDIO = "A"


@dataclass(frozen=True)
class TokenBlock:
    """One block of the interleaved layout.

    TIME blocks carry the rendered timestamp string in ``text`` and span a
    zero-length point; VIDEO blocks budget tokens for the frame at that
    point; AUDIO blocks budget tokens over [t_i, t_{i+1}).
    """

    kind: BlockKind
    index: int
    span: TimeInterval
    payload_len: int = 0
    text: str | None = None


@dataclass(frozen=True)
class InterleavedSequence:
    blocks: tuple[TokenBlock, ...]
    duration_s: float
    frame_count: int

    @property
    def total_video_tokens(self) -> int:
        return sum(b.payload_len for b in self.blocks if b.kind is BlockKind.VIDEO)

    @property
    def total_audio_tokens(self) -> int:
        return sum(b.payload_len for b in self.blocks if b.kind is BlockKind.AUDIO)

    def render_lines(self) -> list[str]:
        """Layout as golden-file lines: ``T second{t}`` / ``V n`` / ``A n [a,b)``."""
        lines = []
        for block in self.blocks:
            if block.kind is BlockKind.TIME:
                lines.append(f"T {block.text}")
            elif block.kind is BlockKind.VIDEO:
                lines.append(f"V {block.payload_len}")
            else:
                a = format_seconds(block.span.start.seconds)
                b = format_seconds(block.span.end.seconds)
                lines.append(f"A {block.payload_len} [{a},{b})")
        return lines


def sample_timeline(duration_s: float, frame_count: int) -> list[Timestamp]:
    """Uniform frame instants t_i = i * duration / (frame_count - 1).

    The first stamp is 0.0 and the last is the duration; each stamp is
    rounded to the grammar's one-decimal resolution. A 126-second video at
    64 frames yields stamps every 2.0 seconds.

    Raises:
        InvalidConfig: fewer than 2 frames, non-positive duration, or frame
            spacing below the 0.1 s timestamp resolution.
    """
    if frame_count < 2:
        raise InvalidConfig(f"frame_count must be >= 2, got {frame_count}")
    if not duration_s > 0:
        raise InvalidConfig(f"duration_s must be positive, got {duration_s}")
    step = float(duration_s) / (frame_count - 1)
    stamps = [Timestamp(round_half_up(i * step, 1)) for i in range(frame_count)]
    for a, b in zip(stamps, stamps[1:]):
        if b.seconds <= a.seconds:
            raise InvalidConfig(
                "frame spacing falls below the 0.1 s timestamp resolution"
            )
    return stamps


def build_sequence(
    duration_s: float,
    frame_count: int,
    video_tokens_per_frame: int,
    audio_tokens_per_second: float,
) -> InterleavedSequence:
    """Build the full T/V/A block sequence with per-block token budgets.

    The audio budget of slice i is round(audio_tokens_per_second * slice
    length). The final frame has no following slice, so A_N is emitted with
    an empty span and zero tokens, keeping the rigid three-block period.
    """
    if video_tokens_per_frame < 0:
        raise InvalidConfig("video_tokens_per_frame must be >= 0")
    if audio_tokens_per_second < 0:
        raise InvalidConfig("audio_tokens_per_second must be >= 0")
    stamps = sample_timeline(duration_s, frame_count)

    blocks: list[TokenBlock] = []
    for i, stamp in enumerate(stamps):
        index = i + 1
        point = TimeInterval(stamp, stamp)
        blocks.append(
            TokenBlock(BlockKind.TIME, index, point, text=render_timestamp(stamp))
        )
        blocks.append(
            TokenBlock(BlockKind.VIDEO, index, point, payload_len=video_tokens_per_frame)
        )
        if i + 1 < len(stamps):
            span = TimeInterval(stamp, stamps[i + 1])
        else:
            span = point
        audio_tokens = int(round_half_up(audio_tokens_per_second * span.duration, 0))
        blocks.append(TokenBlock(BlockKind.AUDIO, index, span, payload_len=audio_tokens))

    return InterleavedSequence(tuple(blocks), float(duration_s), frame_count)
