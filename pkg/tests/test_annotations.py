import json
import logging

import numpy as np
import pytest

from chronusav.annotations import (
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
from chronusav.errors import (
    DegenerateAgreement,
    DimensionMismatch,
    SchemaError,
    ValidationError,
)
from chronusav.timeline import TimeInterval
from oracles import fleiss_kappa_oracle
from synth import make_corpus


def _record(video_id="v1", duration=120.0, segments=None, domain=None):
    if segments is None:
        segments = [
            {"start_s": 0.0, "end_s": 60.0, "video_caption": "a road", "audio_caption": "wind"},
            {"start_s": 60.0, "end_s": 120.0, "video_caption": "a car", "audio_caption": "engine"},
        ]
    record = {"video_id": video_id, "duration_s": duration, "segments": segments}
    if domain is not None:
        record["domain"] = domain
    return record


def _write(tmp_path, records, name="annos.jsonl"):
    path = tmp_path / name
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
    return path


class TestLoad:
    def test_well_formed(self, tmp_path):
        path = _write(tmp_path, [_record("a"), _record("b", domain="sports")])
        annos = load_annotations(path)
        assert len(annos) == 2
        assert annos[0].video_id == "a"
        assert annos[1].domain == "sports"
        assert annos[0].segments[0].interval == TimeInterval.from_seconds(0, 60)

    def test_reversed_segment_rejected(self, tmp_path):
        bad = _record(segments=[{"start_s": 10.0, "end_s": 5.0,
                                 "video_caption": "x", "audio_caption": "y"}])
        path = _write(tmp_path, [bad])
        with pytest.raises(ValidationError, match="precedes"):
            load_annotations(path)

    def test_missing_caption_is_schema_error(self, tmp_path):
        bad = _record(segments=[{"start_s": 0.0, "end_s": 5.0, "video_caption": "x"}])
        path = _write(tmp_path, [bad])
        with pytest.raises(SchemaError, match="audio_caption"):
            load_annotations(path)

    def test_error_carries_line_number(self, tmp_path):
        path = _write(tmp_path, [_record("ok"), _record(duration=-3.0)])
        with pytest.raises(ValidationError, match=":2"):
            load_annotations(path)

    def test_invalid_json_line(self, tmp_path):
        path = tmp_path / "broken.jsonl"
        path.write_text('{"video_id": "a"\n', encoding="utf-8")
        with pytest.raises(SchemaError, match=":1"):
            load_annotations(path)

    def test_wrong_type(self, tmp_path):
        path = _write(tmp_path, [{"video_id": 7, "duration_s": 10, "segments": []}])
        with pytest.raises(SchemaError, match="video_id"):
            load_annotations(path)

    def test_empty_caption_rejected(self, tmp_path):
        bad = _record(segments=[{"start_s": 0, "end_s": 5, "video_caption": " ",
                                 "audio_caption": "y"}])
        with pytest.raises(ValidationError, match="empty caption"):
            load_annotations(_write(tmp_path, [bad]))

    def test_big_overlap_rejected(self, tmp_path):
        bad = _record(segments=[
            {"start_s": 0, "end_s": 61, "video_caption": "x", "audio_caption": "y"},
            {"start_s": 60, "end_s": 120, "video_caption": "x", "audio_caption": "y"},
        ])
        with pytest.raises(ValidationError, match="overlap"):
            load_annotations(_write(tmp_path, [bad]))

    def test_small_overlap_and_gap_warn(self, tmp_path, caplog):
        jittery = _record(segments=[
            {"start_s": 0, "end_s": 60.04, "video_caption": "x", "audio_caption": "y"},
            {"start_s": 60.0, "end_s": 80.0, "video_caption": "x", "audio_caption": "y"},
            {"start_s": 85.0, "end_s": 120.0, "video_caption": "x", "audio_caption": "y"},
        ])
        with caplog.at_level(logging.WARNING):
            annos = load_annotations(_write(tmp_path, [jittery]))
        assert len(annos) == 1
        messages = " ".join(r.message for r in caplog.records)
        assert "overlap" in messages and "gap" in messages

    def test_unsorted_rejected(self, tmp_path):
        bad = _record(segments=[
            {"start_s": 60, "end_s": 120, "video_caption": "x", "audio_caption": "y"},
            {"start_s": 0, "end_s": 60, "video_caption": "x", "audio_caption": "y"},
        ])
        with pytest.raises(ValidationError, match="sorted"):
            load_annotations(_write(tmp_path, [bad]))

    def test_segment_outside_duration(self, tmp_path):
        bad = _record(duration=50.0)
        with pytest.raises(ValidationError, match="outside"):
            load_annotations(_write(tmp_path, [bad]))

    def test_round_trip(self, tmp_path):
        path = _write(tmp_path, [_record("a"), _record("b", domain="diy")])
        annos = load_annotations(path)
        out1 = tmp_path / "round1.jsonl"
        save_annotations(annos, out1)
        reloaded = load_annotations(out1)
        assert reloaded == annos
        out2 = tmp_path / "round2.jsonl"
        save_annotations(reloaded, out2)
        assert out1.read_bytes() == out2.read_bytes()


class TestFilterCorpus:
    def _video(self, duration, n_segments):
        step = duration / n_segments
        segments = tuple(
            SegmentAnnotation(
                TimeInterval.from_seconds(i * step, (i + 1) * step), "v", "a"
            )
            for i in range(n_segments)
        )
        return VideoAnnotation(f"d{duration}s{n_segments}", duration, segments)

    def test_boundary_values(self):
        kept = [
            self._video(60.0, 5), self._video(600.0, 30), self._video(226.0, 14),
        ]
        dropped = [
            self._video(59.9, 5), self._video(600.1, 5), self._video(45.0, 10),
            self._video(100.0, 4), self._video(100.0, 31),
        ]
        result = filter_corpus(kept + dropped)
        assert result == kept

    def test_subset_and_idempotent(self):
        corpus = make_corpus(40, seed=5)
        once = filter_corpus(corpus)
        assert set(a.video_id for a in once) <= set(a.video_id for a in corpus)
        assert filter_corpus(once) == once


class TestMergeSegments:
    def test_single_greedy_step(self):
        merged = merge_segments([0.0, 10.0, 20.0, 30.0], [0.9, 0.1],
                                threshold=0.5, max_segments=10)
        assert merged == [0.0, 20.0, 30.0]

    def test_no_pair_qualifies(self):
        bounds = [0.0, 10.0, 20.0, 30.0]
        assert merge_segments(bounds, [0.3, 0.1], 0.5, 10) == bounds

    def test_full_merge(self):
        assert merge_segments([0.0, 10.0, 20.0], [1.0], 0.5, 10) == [0.0, 20.0]

    def test_max_segments_forces_merges_below_threshold(self):
        merged = merge_segments([0.0, 1.0, 2.0, 3.0, 4.0], [0.1, 0.4, 0.2],
                                threshold=0.9, max_segments=2)
        assert len(merged) - 1 == 2
        assert merged[0] == 0.0 and merged[-1] == 4.0

    def test_tie_breaks_earlier(self):
        merged = merge_segments([0.0, 1.0, 2.0, 3.0], [0.8, 0.8], 0.5, 10)
        # both steps fire, but the first merge must remove boundary 1.0
        assert merged == [0.0, 3.0] or merged == [0.0, 2.0, 3.0]
        first_step = merge_segments([0.0, 1.0, 2.0, 3.0], [0.8, 0.8], 0.5, 2)
        assert 1.0 not in first_step

    def test_endpoints_never_move(self):
        merged = merge_segments([2.0, 5.0, 9.0, 14.0], [0.99, 0.99], 0.5, 1)
        assert merged == [2.0, 14.0]

    def test_strictly_increasing_output(self):
        merged = merge_segments(list(range(8)), [0.9, 0.1, 0.8, 0.2, 0.7, 0.3], 0.6, 3)
        assert all(b > a for a, b in zip(merged, merged[1:]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            merge_segments([0.0, 1.0, 2.0], [0.5, 0.5], 0.5, 10)
        with pytest.raises(DimensionMismatch):
            merge_segments([0.0], [], 0.5, 10)
        with pytest.raises(DimensionMismatch):
            merge_segments([0.0, 2.0, 1.0], [0.5], 0.5, 10)


class TestFleissKappa:
    def test_unanimity_is_exactly_one(self):
        assert fleiss_kappa([[3, 0], [0, 3]]) == 1.0
        assert fleiss_kappa([[5, 0, 0], [0, 5, 0], [0, 0, 5], [5, 0, 0]]) == 1.0

    def test_mixed_table_matches_hand_value(self):
        table = [[3, 0, 0], [0, 3, 0], [1, 2, 0], [0, 1, 2]]
        # P_bar = 2/3, Pe_bar = 7/18 -> kappa = 5/11
        assert fleiss_kappa(table) == pytest.approx(5 / 11, abs=1e-9)
        assert fleiss_kappa(table) == pytest.approx(fleiss_kappa_oracle(table), abs=1e-12)

    def test_permutation_invariance(self):
        table = [[3, 0, 0], [0, 3, 0], [1, 2, 0], [0, 1, 2]]
        rows_permuted = [table[2], table[0], table[3], table[1]]
        cols_permuted = [[row[1], row[2], row[0]] for row in table]
        assert fleiss_kappa(rows_permuted) == pytest.approx(fleiss_kappa(table), abs=1e-12)
        assert fleiss_kappa(cols_permuted) == pytest.approx(fleiss_kappa(table), abs=1e-12)

    def test_single_category_degenerate(self):
        with pytest.raises(DegenerateAgreement):
            fleiss_kappa([[3, 0], [3, 0]])

    def test_preconditions(self):
        with pytest.raises(ValidationError):
            fleiss_kappa([[2, 1]])  # one item
        with pytest.raises(ValidationError):
            fleiss_kappa([[1, 0], [0, 1]])  # one rater
        with pytest.raises(ValidationError):
            fleiss_kappa([[3, 0], [1, 1]])  # unequal raters

    def test_agreement_table_wrapper(self):
        table = AgreementTable(np.array([[2, 1], [1, 2]]))
        assert table.n_items == 2 and table.n_raters == 3
        assert fleiss_kappa(table) == pytest.approx(fleiss_kappa([[2, 1], [1, 2]]))


def test_prompt_constants_shipped():
    assert CAPTION_PROMPT_VIDEO.startswith("The user will input a video.")
    assert "Please provide a brief description of the main visual content" in CAPTION_PROMPT_VIDEO
    assert CAPTION_PROMPT_AUDIO.startswith("The user will input a audio.")
    assert "Briefly describe the audio information" in CAPTION_PROMPT_AUDIO
    assert "##For example" in CAPTION_PROMPT_AUDIO
