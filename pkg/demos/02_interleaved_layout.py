"""
Interleaved time/video/audio token layout
=========================================

A media timeline is serialized as rigid [T_i, V_i, A_i] triples: a textual
timestamp, the frame's token budget at that instant, then the audio slice up
to the next frame. For a 126-second video at 64 frames the stamps fall every
2 seconds.
"""

from chronusav import build_sequence, sample_timeline

stamps = sample_timeline(126.0, 64)
print("stamps:", len(stamps), "spacing:", stamps[1].seconds - stamps[0].seconds)
print("first/last:", stamps[0].seconds, stamps[-1].seconds)

sequence = build_sequence(
    duration_s=126.0,
    frame_count=64,
    video_tokens_per_frame=729,
    audio_tokens_per_second=25,
)
print("blocks:", len(sequence.blocks))
print("video tokens:", sequence.total_video_tokens)
print("audio tokens:", sequence.total_audio_tokens)

# The final frame has no following audio slice; its audio block is empty so
# the three-block period never breaks.
for line in sequence.render_lines()[:6]:
    print(line)
print("...")
for line in sequence.render_lines()[-3:]:
    print(line)
