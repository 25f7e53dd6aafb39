"""
Six QA directions from one annotation triplet
=============================================

Every segment carries (interval, video caption, audio caption). Querying one
element for another yields six directions: moment retrieval from either
modality (v2t, a2t), captioning a given span (t2v, t2a), and the implicit
cross-modal pair (v2a, a2v) where time is held fixed.
"""

from chronusav import (
    SegmentAnnotation,
    TimeInterval,
    VideoAnnotation,
    build_dense_caption_target,
    build_qa,
    select_test_segment,
)

video = VideoAnnotation(
    video_id="demo01",
    duration_s=30.0,
    segments=(
        SegmentAnnotation(
            TimeInterval.from_seconds(0.0, 12.0),
            "a chef chops onions on a wooden board",
            "rapid knife taps with kitchen clatter",
        ),
        SegmentAnnotation(
            TimeInterval.from_seconds(12.0, 18.5),
            "steam rises from a copper pot",
            "water boils while a kettle whistles",
        ),
        SegmentAnnotation(
            TimeInterval.from_seconds(18.5, 30.0),
            "plates of pasta arrive at the table",
            "guests applaud and cutlery clinks",
        ),
    ),
)

index = select_test_segment(video, rng_seed=0)
print("selected segment:", index)

for pair in build_qa(video, index):
    print(f"--- {pair.subtask.value} ---")
    print("Q:", pair.question)
    print("A:", pair.answer)

# The dense-captioning supervision string lists every segment in order.
print()
print(build_dense_caption_target(video))
