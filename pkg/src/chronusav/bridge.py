"""Line-delimited JSON scoring bridge for foreign-language training loops.

A long-lived child process reads one request object per line on stdin and
answers one response object per line on stdout, so callers pay interpreter
startup once instead of per call. Scoring errors for malformed completions
never occur by construction (rewards are total); only contract violations
(wrong group size, unknown metric) produce error responses.

Requests::

    {"op": "ping"}
    {"op": "reward_iou", "completion": str, "interval": [a, b]}
    {"op": "reward_format", "completion": str}
    {"op": "score_caption", "pred": str, "ref": str, "metric": "bleu4|rouge_l|meteor"}
    {"op": "score_group", "completions": [str], "target":
        {"subtask": str, "answer": str, "interval": [a, b]}}

Responses: {"ok": true, ...} or {"ok": false, "error": name, "message": str}.
"""

from __future__ import annotations

import json
import sys
from typing import IO

from .captions import bleu4, meteor, rouge_l, tokenize
from .errors import ChronusError, UnknownMetric
from .qa import QaPair, Subtask
from .rewards import RewardConfig, reward_format, reward_iou, score_group
from .timeline import TimeInterval

_CAPTION_METRICS = {
    "bleu4": lambda pred, ref: bleu4(tokenize(pred), [tokenize(ref)]),
    "rouge_l": lambda pred, ref: rouge_l(tokenize(pred), tokenize(ref)),
    "meteor": lambda pred, ref: meteor(tokenize(pred), tokenize(ref)),
}


def score_caption(pred: str, ref: str, metric: str) -> float:
    """Score one caption pair by metric name; empty predictions score 0."""
    scorer = _CAPTION_METRICS.get(metric)
    if scorer is None:
        raise UnknownMetric(
            f"unknown metric {metric!r}; expected one of {sorted(_CAPTION_METRICS)}"
        )
    return scorer(pred, ref)


def _target_from_record(record: dict) -> QaPair:
    interval = record.get("interval") or [0.0, 0.0]
    return QaPair(
        qa_id=record.get("qa_id", "inline"),
        video_id=record.get("video_id", "inline"),
        subtask=Subtask(record["subtask"]),
        question=record.get("question", ""),
        answer=record.get("answer", ""),
        interval=TimeInterval.from_seconds(interval[0], interval[1]),
    )


def handle_request(request: dict, config: RewardConfig) -> dict:
    op = request.get("op")
    if op == "ping":
        return {"ok": True}
    if op == "reward_iou":
        a, b = request["interval"]
        return {
            "ok": True,
            "score": reward_iou(request["completion"], TimeInterval.from_seconds(a, b)),
        }
    if op == "reward_format":
        return {"ok": True, "score": reward_format(request["completion"])}
    if op == "score_caption":
        return {
            "ok": True,
            "score": score_caption(request["pred"], request["ref"], request["metric"]),
        }
    if op == "score_group":
        target = _target_from_record(request["target"])
        batch = score_group(request["completions"], target, config)
        return {
            "ok": True,
            "rewards": list(batch.rewards),
            "advantages": list(batch.advantages),
        }
    raise ValueError(f"unknown op {op!r}")


def serve(config: RewardConfig, stdin: IO[str] | None = None, stdout: IO[str] | None = None) -> None:
    """Serve requests until stdin closes. One JSON object per line each way."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            response = handle_request(request, config)
        except (ChronusError, ValueError, KeyError, TypeError) as exc:
            response = {
                "ok": False,
                "error": type(exc).__name__,
                "message": str(exc),
            }
        stdout.write(json.dumps(response))
        stdout.write("\n")
        stdout.flush()
