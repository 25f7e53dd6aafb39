"""Audiovisual temporal grounding toolkit.

Timestamp grammar and interval IoU, interleaved time/video/audio token
layouts, six-direction QA construction from annotation triplets, moment
retrieval and caption metrics, and group-relative reward functions.
"""

from .annotations import (
    CAPTION_PROMPT_AUDIO,
    CAPTION_PROMPT_VIDEO,
    AgreementTable,
    SegmentAnnotation,
    VideoAnnotation,
    filter_corpus,
    fleiss_kappa,
    load_annotations,
    merge_segments,
    save_annotations,
)
from .captions import (
    DEFAULT_METRIC_CONFIG,
    IdfCorpus,
    MetricConfig,
    bleu4,
    build_idf_corpus,
    cider,
    meteor,
    rouge_l,
    tokenize,
)
from .grounding import GroundingResult, mean_iou, recall_at_iou
from .harness import EvalReport, SubtaskReport, collect_predictions, emit_report, evaluate
from .interleave import BlockKind, InterleavedSequence, TokenBlock, build_sequence, sample_timeline
from .qa import (
    QaPair,
    Subtask,
    build_benchmark,
    build_dense_caption_target,
    build_qa,
    load_qa,
    save_qa,
    select_test_segment,
)
from .rewards import (
    DEFAULT_WEIGHTS,
    GrpoDemoTrace,
    RewardBatch,
    RewardConfig,
    composite_reward,
    group_advantages,
    reward_format,
    reward_iou,
    reward_meteor,
    run_grpo_demo,
    score_group,
)
from .timeline import (
    ParsedInterval,
    TimeInterval,
    Timestamp,
    interval_or_none,
    iou,
    parse_interval,
    parse_timestamp,
    render_interval,
    render_timestamp,
)

__version__ = "0.1.0"
