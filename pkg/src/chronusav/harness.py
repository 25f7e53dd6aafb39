"""End-to-end evaluation: prediction collection, per-subtask scoring, reports.

Missing predictions are scored as misses (grounding) or zero (captions) and
counted explicitly; silent exclusion would inflate recall.
"""

from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import requests

from . import captions as cm
from .errors import EndpointUnreachable, SchemaError, UnresolvedQaId
from .grounding import GroundingResult, mean_iou, recall_at_iou
from .qa import CAPTION_SUBTASKS, QaPair, Subtask, load_qa
from .timeline import interval_or_none

logger = logging.getLogger(__name__)

IOU_THRESHOLDS = (0.5, 0.7)

# Declared plug-in point: a per-model normalizer can rewrite raw predictions
# into the canonical grammar before scoring. Only the identity is shipped.
PredictionNormalizer = Callable[[str], str]

_SUBTASK_ORDER = [s.value for s in Subtask]
_GROUNDING_METRIC_ORDER = ["R@0.5", "R@0.7", "mIoU"]
_CAPTION_METRIC_ORDER = ["BLEU-4", "ROUGE-L", "METEOR", "CIDEr"]


@dataclass(frozen=True)
class SubtaskReport:
    metrics: dict[str, float]
    sample_count: int
    missing_predictions: int


@dataclass(frozen=True)
class EvalReport:
    """Per-subtask metric tables; subtasks with zero samples are omitted."""

    label: str
    subtasks: dict[str, SubtaskReport]
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "config": self.config,
            "subtasks": {
                name: {
                    "metrics": report.metrics,
                    "sample_count": report.sample_count,
                    "missing_predictions": report.missing_predictions,
                }
                for name, report in self.subtasks.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(
            label=data["label"],
            config=data.get("config", {}),
            subtasks={
                name: SubtaskReport(
                    metrics=dict(sub["metrics"]),
                    sample_count=sub["sample_count"],
                    missing_predictions=sub["missing_predictions"],
                )
                for name, sub in data["subtasks"].items()
            },
        )


def load_predictions(path: str | Path) -> dict[str, str]:
    """Read predictions JSONL ({"qa_id", "prediction"}) into a map."""
    predictions: dict[str, str] = {}
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
            if "qa_id" not in record or "prediction" not in record:
                raise SchemaError(f"{where}: record needs qa_id and prediction")
            if record["qa_id"] in predictions:
                raise SchemaError(f"{where}: duplicate qa_id {record['qa_id']!r}")
            predictions[record["qa_id"]] = record["prediction"]
    return predictions


def _score_grounding(samples: list[tuple[QaPair, str | None]]) -> dict[str, float]:
    results = [
        GroundingResult(
            qa_id=pair.qa_id,
            pred=interval_or_none(pred) if pred is not None else None,
            gt=pair.interval,
        )
        for pair, pred in samples
    ]
    metrics = {
        f"R@{threshold}": recall_at_iou(results, threshold)
        for threshold in IOU_THRESHOLDS
    }
    metrics["mIoU"] = mean_iou(results)
    return metrics


def _score_captions(samples: list[tuple[QaPair, str | None]]) -> dict[str, float]:
    references = [cm.tokenize(pair.answer) for pair, _ in samples]
    corpus = cm.build_idf_corpus(references)
    scores: dict[str, list[float]] = {name: [] for name in _CAPTION_METRIC_ORDER}
    for (pair, pred), ref in zip(samples, references):
        hyp = cm.tokenize(pred) if pred is not None else ()
        scores["BLEU-4"].append(cm.bleu4(hyp, [ref]) if hyp else 0.0)
        scores["ROUGE-L"].append(cm.rouge_l(hyp, ref))
        scores["METEOR"].append(cm.meteor(hyp, ref))
        scores["CIDEr"].append(cm.cider(hyp, [ref], corpus) if hyp else 0.0)
    count = len(samples)
    # fsum keeps the means identical under record reordering
    return {name: math.fsum(values) / count for name, values in scores.items()}


def evaluate(
    qa_path: str | Path,
    predictions_path: str | Path,
    label: str = "model",
    normalizer: PredictionNormalizer | None = None,
) -> EvalReport:
    """Score a predictions file against a QA file, routed by subtask.

    Grounding subtasks report Recall@1 at IoU 0.5 / 0.7 and mean IoU as
    percentages; caption subtasks report BLEU-4, ROUGE-L, METEOR, and CIDEr
    (idf built from the subtask's own reference answers). QA items without a
    prediction are scored as misses/zero and counted.
    """
    pairs = load_qa(qa_path)
    predictions = load_predictions(predictions_path)
    known = {pair.qa_id for pair in pairs}
    for qa_id in predictions:
        if qa_id not in known:
            raise UnresolvedQaId(f"prediction for unknown qa_id {qa_id!r}")
    if not predictions:
        logger.warning("predictions file is empty; every subtask scored as all-miss")

    by_subtask: dict[Subtask, list[tuple[QaPair, str | None]]] = {}
    missing: dict[Subtask, int] = {}
    for pair in pairs:
        pred = predictions.get(pair.qa_id)
        if normalizer is not None and pred is not None:
            pred = normalizer(pred)
        if pred is None:
            missing[pair.subtask] = missing.get(pair.subtask, 0) + 1
        by_subtask.setdefault(pair.subtask, []).append((pair, pred))

    subtask_reports: dict[str, SubtaskReport] = {}
    for name in _SUBTASK_ORDER:
        subtask = Subtask(name)
        samples = by_subtask.get(subtask)
        if not samples:
            continue
        if subtask in CAPTION_SUBTASKS:
            metrics = _score_captions(samples)
        else:
            metrics = _score_grounding(samples)
        subtask_reports[name] = SubtaskReport(
            metrics=metrics,
            sample_count=len(samples),
            missing_predictions=missing.get(subtask, 0),
        )

    return EvalReport(
        label=label,
        subtasks=subtask_reports,
        config={
            "qa_path": str(qa_path),
            "predictions_path": str(predictions_path),
            "iou_thresholds": list(IOU_THRESHOLDS),
        },
    )


def report_to_json(report: EvalReport) -> str:
    """Stable-key-ordered JSON for diffing."""
    return json.dumps(report.to_dict(), indent=2, sort_keys=True)


def report_from_json(text: str) -> EvalReport:
    return EvalReport.from_dict(json.loads(text))


def report_to_markdown(report: EvalReport) -> str:
    """A single comparison-grid row: subtask/metric columns, two decimals."""
    columns: list[tuple[str, str]] = []
    for name in _SUBTASK_ORDER:
        if name not in report.subtasks:
            continue
        order = (
            _CAPTION_METRIC_ORDER
            if Subtask(name) in CAPTION_SUBTASKS
            else _GROUNDING_METRIC_ORDER
        )
        columns.extend((name, metric) for metric in order)
    header = ["Model"] + [f"{name.upper()} {metric}" for name, metric in columns]
    row = [report.label] + [
        f"{report.subtasks[name].metrics[metric]:.2f}" for name, metric in columns
    ]
    counts = ", ".join(
        f"{name}={report.subtasks[name].sample_count}"
        f" (missing {report.subtasks[name].missing_predictions})"
        for name in _SUBTASK_ORDER
        if name in report.subtasks
    )
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join(["---"] * len(header)) + "|",
        "| " + " | ".join(row) + " |",
        "",
        f"Samples: {counts}",
    ]
    return "\n".join(lines)


def emit_report(
    report: EvalReport, format: str = "json", out_path: str | Path | None = None
) -> str:
    """Render a report as json or markdown, optionally writing it to a file."""
    if format == "json":
        text = report_to_json(report)
    elif format == "markdown":
        text = report_to_markdown(report)
    else:
        raise ValueError(f"unknown report format {format!r}")
    if out_path is not None:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
    return text


def _read_raw_qa(qa_path: str | Path) -> list[dict]:
    records = []
    with open(qa_path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def collect_predictions(
    qa_path: str | Path,
    endpoint: str,
    out_path: str | Path,
    concurrency: int = 4,
    timeout_s: float = 30.0,
    max_retries: int = 3,
) -> Path:
    """Query a model endpoint for every QA item and write predictions JSONL.

    Wire contract: POST {"question", "video_ref"?, "audio_ref"?} and expect
    {"prediction": str} back. Per-record failures are recorded as empty
    predictions with an error note; an unreachable endpoint fails fast
    before anything is written. Reruns skip qa_ids already present in the
    output file, so interrupted collections resume cleanly.
    """
    records = _read_raw_qa(qa_path)
    out_path = Path(out_path)
    done: set[str] = set()
    if out_path.exists():
        for line in out_path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                done.add(json.loads(line)["qa_id"])
    todo = [r for r in records if r["qa_id"] not in done]
    if done:
        logger.info("resuming: %d records already collected", len(done))
    if not todo:
        return out_path

    session = requests.Session()

    def ask(record: dict) -> dict:
        payload = {"question": record["question"]}
        for key in ("video_ref", "audio_ref"):
            if key in record:
                payload[key] = record[key]
        response = session.post(endpoint, json=payload, timeout=timeout_s)
        response.raise_for_status()
        return {"qa_id": record["qa_id"], "prediction": response.json()["prediction"]}

    # Preflight on the first record so an unreachable endpoint fails before
    # the output file is touched.
    first_result = None
    for attempt in range(max_retries):
        try:
            first_result = ask(todo[0])
            break
        except requests.exceptions.ConnectionError:
            if attempt + 1 == max_retries:
                raise EndpointUnreachable(
                    f"endpoint {endpoint} unreachable after {max_retries} attempts"
                )
            time.sleep(0.2 * (attempt + 1))
        except requests.exceptions.RequestException as exc:
            first_result = {"qa_id": todo[0]["qa_id"], "prediction": "", "error": str(exc)}
            break

    with open(out_path, "a", encoding="utf-8", newline="\n") as handle:

        def write(result: dict) -> None:
            handle.write(json.dumps(result, ensure_ascii=False))
            handle.write("\n")

        write(first_result)
        remaining = todo[1:]
        if remaining:
            with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
                futures = {pool.submit(ask, r): r for r in remaining}
                for future in as_completed(futures):
                    record = futures[future]
                    try:
                        write(future.result())
                    except Exception as exc:
                        write({"qa_id": record["qa_id"], "prediction": "", "error": str(exc)})
    return out_path
