"""Outcome-driven reward functions and group-relative advantage computation.

Every reward is a total function of the raw completion string: malformed
model output scores 0 rather than raising, because reward scoring must never
crash a training loop. Groups of sampled completions are normalized to
zero-mean, unit-std advantages (population std, guarded near zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .captions import meteor, tokenize
from .errors import GroupSizeMismatch, InvalidConfig, UnknownSubtask
from .qa import GROUNDING_SUBTASKS, QaPair, Subtask
from .timeline import TimeInterval, interval_or_none, iou, parse_interval, render_timestamp

# Default combination weights per subtask: (task weight, format weight).
# Moment retrieval pairs the IoU reward with the format reward; caption
# directions use the caption reward alone.
DEFAULT_WEIGHTS: dict[Subtask, tuple[float, float]] = {
    Subtask.V2T: (1.0, 1.0),
    Subtask.A2T: (1.0, 1.0),
    Subtask.T2V: (1.0, 0.0),
    Subtask.T2A: (1.0, 0.0),
    Subtask.V2A: (1.0, 0.0),
    Subtask.A2V: (1.0, 0.0),
}


@dataclass(frozen=True)
class RewardConfig:
    """Rollout and normalization settings for group-relative scoring."""

    group_size: int = 4
    kl_beta: float = 0.04
    temperature: float = 1.0
    max_gen_tokens: int = 1024
    subtask: Subtask = Subtask.V2T

    def __post_init__(self) -> None:
        if self.group_size < 2:
            raise InvalidConfig(f"group_size must be >= 2, got {self.group_size}")
        if self.kl_beta < 0:
            raise InvalidConfig(f"kl_beta must be >= 0, got {self.kl_beta}")
        if not self.temperature > 0:
            raise InvalidConfig(f"temperature must be positive, got {self.temperature}")
        if self.max_gen_tokens < 1:
            raise InvalidConfig(f"max_gen_tokens must be >= 1, got {self.max_gen_tokens}")


@dataclass(frozen=True)
class RewardBatch:
    """A scored group: raw completions, rewards, and group-relative advantages."""

    completions: tuple[str, ...]
    rewards: tuple[float, ...]
    advantages: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.completions) == len(self.rewards) == len(self.advantages)):
            raise GroupSizeMismatch("completions, rewards, advantages must align")
        total = sum(self.advantages)
        if any(self.advantages) and abs(total) > 1e-9:
            raise GroupSizeMismatch(f"advantages must sum to 0, got {total}")


def reward_iou(completion: str, gt: TimeInterval) -> float:
    """IoU between the completion's interval and the ground truth.

    Unparseable or reversed completions score 0.
    """
    pred = interval_or_none(completion)
    if pred is None:
        return 0.0
    return iou(pred, gt)


def reward_format(completion: str) -> int:
    """1 iff the trimmed completion is exactly one second{a}-second{b} string.

    Syntax only: a numerically reversed interval still formats correctly.
    """
    try:
        parse_interval(completion)
    except Exception:
        return 0
    return 1


def reward_meteor(completion: str, gt_caption: str) -> float:
    """Caption reward: METEOR over canonically tokenized strings."""
    return meteor(tokenize(completion), tokenize(gt_caption))


def group_advantages(
    rewards: Sequence[float], group_size: int | None = None
) -> list[float]:
    """Group-relative advantages: (r - mean) / population std.

    When the group is (near-)uniform (std below 1e-8) all advantages are 0
    rather than amplifying noise.
    """
    if group_size is not None and len(rewards) != group_size:
        raise GroupSizeMismatch(
            f"expected group of {group_size}, got {len(rewards)} rewards"
        )
    if len(rewards) < 2:
        raise GroupSizeMismatch("advantage normalization needs at least 2 rewards")
    mean = sum(rewards) / len(rewards)
    std = math.sqrt(sum((r - mean) ** 2 for r in rewards) / len(rewards))
    if std < 1e-8:
        return [0.0] * len(rewards)
    return [(r - mean) / std for r in rewards]


def composite_reward(
    completion: str,
    target: QaPair,
    weights: dict[Subtask, tuple[float, float]] | None = None,
) -> float:
    """Task reward plus weighted format reward for the target's subtask."""
    table = DEFAULT_WEIGHTS if weights is None else weights
    if target.subtask not in table:
        raise UnknownSubtask(f"no weights for subtask {target.subtask!r}")
    w_task, w_format = table[target.subtask]
    if target.subtask in GROUNDING_SUBTASKS:
        task = reward_iou(completion, target.interval)
    else:
        task = reward_meteor(completion, target.answer)
    return w_task * task + w_format * reward_format(completion)


def score_group(
    completions: Sequence[str],
    target: QaPair,
    config: RewardConfig | None = None,
    weights: dict[Subtask, tuple[float, float]] | None = None,
) -> RewardBatch:
    """Composite rewards plus group-relative advantages for one rollout group."""
    if config is not None and len(completions) != config.group_size:
        raise GroupSizeMismatch(
            f"expected {config.group_size} completions, got {len(completions)}"
        )
    rewards = [composite_reward(c, target, weights) for c in completions]
    advantages = group_advantages(rewards, None if config is None else config.group_size)
    return RewardBatch(tuple(completions), tuple(rewards), tuple(advantages))


# --- Desk-scale demonstration that the IoU reward drives learning ---------

_DEMO_TIMELINE_S = 100.0
# Hidden target interval per episode cue; the policy never observes these,
# only the IoU reward of its sampled intervals.
_DEMO_TARGETS = (
    (12.0, 30.0),
    (35.0, 52.0),
    (58.0, 66.0),
    (74.0, 95.0),
)
_DEMO_LR = 0.2
_DEMO_INIT_SIGMA_START = 20.0
_DEMO_INIT_SIGMA_LOGLEN = 0.6


@dataclass(frozen=True)
class GrpoDemoTrace:
    """Per-iteration mean group reward of the demo policy."""

    mean_rewards: tuple[float, ...]

    @property
    def iterations(self) -> int:
        return len(self.mean_rewards)

    def window_mean(self, start: int, stop: int | None = None) -> float:
        window = self.mean_rewards[start:stop]
        return sum(window) / len(window)


def run_grpo_demo(
    config: RewardConfig, seed: int, iterations: int
) -> GrpoDemoTrace:
    """Optimize a toy stochastic interval policy with group-relative updates.

    Each episode cue hides one target interval on a 100 s timeline. The
    policy keeps, per cue, a Gaussian over the start second and over the
    log-length. Every iteration it renders ``group_size`` sampled intervals
    as canonical strings, scores them with the IoU reward, normalizes the
    group, and applies natural-gradient updates weighted by the advantages.
    The KL penalty is the closed-form Gaussian divergence from the initial
    policy, scaled by ``config.kl_beta``. Deterministic given the seed.
    """
    if iterations < 1:
        raise InvalidConfig(f"iterations must be >= 1, got {iterations}")
    rng = np.random.default_rng(seed)
    sigma_start0 = _DEMO_INIT_SIGMA_START * config.temperature
    sigma_loglen0 = _DEMO_INIT_SIGMA_LOGLEN * config.temperature

    n_cues = len(_DEMO_TARGETS)
    mu_start = [_DEMO_TIMELINE_S / 2.0] * n_cues
    log_sigma_start = [math.log(sigma_start0)] * n_cues
    mu_loglen = [math.log(5.0)] * n_cues
    log_sigma_loglen = [math.log(sigma_loglen0)] * n_cues
    mu_start0 = list(mu_start)
    mu_loglen0 = list(mu_loglen)

    targets = [TimeInterval.from_seconds(a, b) for a, b in _DEMO_TARGETS]
    trace: list[float] = []

    for it in range(iterations):
        cue = it % n_cues
        gt = targets[cue]
        sig_s = math.exp(log_sigma_start[cue])
        sig_l = math.exp(log_sigma_loglen[cue])

        z_start = rng.standard_normal(config.group_size)
        z_loglen = rng.standard_normal(config.group_size)
        rewards = []
        for g in range(config.group_size):
            start = mu_start[cue] + sig_s * z_start[g]
            length = math.exp(mu_loglen[cue] + sig_l * z_loglen[g])
            start = min(max(start, 0.0), _DEMO_TIMELINE_S)
            completion = (
                f"{render_timestamp(start)}-{render_timestamp(start + length)}"
            )
            rewards.append(reward_iou(completion, gt))
        advantages = group_advantages(rewards, config.group_size)
        trace.append(sum(rewards) / len(rewards))

        adv = np.asarray(advantages)
        g_mu_s = float(np.mean(adv * z_start))
        g_ls_s = float(np.mean(adv * (z_start**2 - 1.0)))
        g_mu_l = float(np.mean(adv * z_loglen))
        g_ls_l = float(np.mean(adv * (z_loglen**2 - 1.0)))

        kl = config.kl_beta
        mu_start[cue] += _DEMO_LR * (
            sig_s * g_mu_s
            - kl * sig_s**2 * (mu_start[cue] - mu_start0[cue]) / sigma_start0**2
        )
        log_sigma_start[cue] += 0.5 * _DEMO_LR * (
            g_ls_s - kl * ((sig_s / sigma_start0) ** 2 - 1.0)
        )
        mu_loglen[cue] += _DEMO_LR * (
            sig_l * g_mu_l
            - kl * sig_l**2 * (mu_loglen[cue] - mu_loglen0[cue]) / sigma_loglen0**2
        )
        log_sigma_loglen[cue] += 0.5 * _DEMO_LR * (
            g_ls_l - kl * ((sig_l / sigma_loglen0) ** 2 - 1.0)
        )

        mu_start[cue] = min(max(mu_start[cue], 0.0), _DEMO_TIMELINE_S)
        mu_loglen[cue] = min(max(mu_loglen[cue], math.log(0.5)), math.log(100.0))
        log_sigma_start[cue] = min(
            max(log_sigma_start[cue], math.log(0.2)), math.log(40.0)
        )
        log_sigma_loglen[cue] = min(
            max(log_sigma_loglen[cue], math.log(0.02)), math.log(2.0)
        )

    return GrpoDemoTrace(tuple(trace))
