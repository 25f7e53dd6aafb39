import pytest

from chronusav.errors import EmptyResults
from chronusav.grounding import GroundingResult, mean_iou, recall_at_iou
from chronusav.timeline import TimeInterval


def _result(qa_id, pred, gt=(0.0, 10.0)):
    return GroundingResult(
        qa_id=qa_id,
        pred=TimeInterval.from_seconds(*pred) if pred is not None else None,
        gt=TimeInterval.from_seconds(*gt),
    )


# predictions over gt [0, 10] with IoU 0.8 / 0.6 / 0.4
THREE = [_result("a", (0, 8)), _result("b", (0, 6)), _result("c", (0, 4))]


class TestRecall:
    def test_counting_example(self):
        assert recall_at_iou(THREE, 0.5) == pytest.approx(100 * 2 / 3)
        assert recall_at_iou(THREE, 0.7) == pytest.approx(100 * 1 / 3)

    def test_perfect_predictions(self):
        results = [_result(str(i), (0, 10)) for i in range(4)]
        for threshold in (0.1, 0.5, 0.7, 1.0):
            assert recall_at_iou(results, threshold) == 100.0

    def test_all_parse_failures(self):
        results = [_result(str(i), None) for i in range(3)]
        assert recall_at_iou(results, 0.5) == 0.0
        assert mean_iou(results) == 0.0

    def test_monotone_in_threshold(self):
        values = [recall_at_iou(THREE, t) for t in (0.3, 0.5, 0.7, 0.9)]
        assert values == sorted(values, reverse=True)

    def test_empty_and_bad_threshold(self):
        with pytest.raises(EmptyResults):
            recall_at_iou([], 0.5)
        with pytest.raises(ValueError):
            recall_at_iou(THREE, 0.0)
        with pytest.raises(ValueError):
            recall_at_iou(THREE, 1.2)


class TestMeanIou:
    def test_examples(self):
        assert mean_iou([_result("a", (0, 10)), _result("b", (90, 100))]) == pytest.approx(50.0)
        assert mean_iou([_result("x", (0, 10))]) == 100.0
        assert mean_iou(THREE) == pytest.approx(60.0)

    def test_permutation_invariant(self):
        assert mean_iou(THREE) == mean_iou(list(reversed(THREE)))

    def test_empty(self):
        with pytest.raises(EmptyResults):
            mean_iou([])
