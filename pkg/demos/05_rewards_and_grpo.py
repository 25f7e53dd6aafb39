"""
Outcome rewards and group-relative learning
===========================================

Moment-retrieval completions earn an IoU reward plus a binary format reward;
caption completions earn METEOR. A group of sampled completions is
normalized to zero-mean advantages, which is enough signal to teach a toy
stochastic interval policy where a hidden target lives.
"""

from chronusav import (
    QaPair,
    RewardConfig,
    Subtask,
    TimeInterval,
    reward_format,
    reward_iou,
    run_grpo_demo,
    score_group,
)

gt = TimeInterval.from_seconds(2.0, 8.0)
for completion in (
    "second{2.0}-second{8.0}",     # exact
    "second{4.0}-second{10.0}",    # half overlap
    "second{8.0}-second{2.0}",     # reversed: well-formed, zero overlap
    "somewhere near the start",    # unparseable
):
    print(f"{reward_iou(completion, gt):.2f} (format {reward_format(completion)})  {completion!r}")

# A full scored group: composite rewards plus normalized advantages.
target = QaPair("demo", "demo", Subtask.V2T, "when?", "second{2.0}-second{8.0}", gt)
batch = score_group(
    ["second{2.0}-second{8.0}", "second{4.0}-second{10.0}", "nope",
     "second{0.0}-second{3.0}"],
    target,
    RewardConfig(),
)
print("rewards:   ", [round(r, 3) for r in batch.rewards])
print("advantages:", [round(a, 3) for a in batch.advantages])

# The desk-scale demo: the IoU reward alone drives a Gaussian interval
# policy from near-zero overlap to tight localization.
trace = run_grpo_demo(RewardConfig(), seed=0, iterations=1000)
print("\nmean IoU reward over training:")
for start in range(0, 1000, 100):
    bar = "#" * int(50 * trace.window_mean(start, start + 100))
    print(f"iters {start:4d}-{start + 99:4d} {trace.window_mean(start, start + 100):.3f} {bar}")
