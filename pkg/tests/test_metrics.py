import pytest

from taxonomist.metrics import score_labels


class TestScoreLabels:
    def test_binary_confusion_tp4_fp1_fn1_tn4(self):
        truth = ["Pos"] * 5 + ["Neg"] * 5
        predicted = ["Pos"] * 4 + ["Neg"] + ["Pos"] + ["Neg"] * 4
        report = score_labels(truth, predicted, ["Pos", "Neg"])
        pos = report.per_class["Pos"]
        assert pos.precision == 0.8
        assert pos.recall == 0.8
        assert report.accuracy == 0.8
        assert pos.support == 5

    def test_perfect_run(self):
        truth = ["A", "B", "A"]
        report = score_labels(truth, list(truth), ["A", "B"])
        assert report.accuracy == 1.0
        assert report.macro_precision == 1.0
        assert report.macro_recall == 1.0
        assert report.macro_f1 == 1.0

    def test_hierarchical_accuracy_is_exact_match(self):
        truth = [("A", "A1"), ("A", "A2"), ("B", None)]
        predicted = [("A", "A1"), ("A", "A1"), ("B", None)]
        report = score_labels(truth, predicted, ["A", "B"])
        # wrong child counts against accuracy but not against parent metrics
        assert report.accuracy == pytest.approx(2 / 3)
        assert report.per_class["A"].precision == 1.0
        assert report.per_class["A"].recall == 1.0

    def test_absent_class_scores_zero_not_nan(self):
        report = score_labels(["A", "A"], ["A", "A"], ["A", "B"])
        assert report.per_class["B"].precision == 0.0
        assert report.per_class["B"].f1 == 0.0
        assert report.macro_f1 == 0.5

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            score_labels(["A"], [], ["A"])

    def test_empty_inputs(self):
        report = score_labels([], [], ["A"])
        assert report.accuracy == 0.0
        assert report.total == 0
