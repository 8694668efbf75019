import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipevent.divergence import OPENING, State
from lipevent.errors import EmptyInput, LengthMismatch, MissingEvent, UnmatchedSequence
from lipevent.metrics import (
    GroundTruth, evaluate, event_frame_deviation, event_recall_rate, framewise_accuracy, recall_curve,
    time_deviation,
)

S, O, C = State.STATIC, State.OPENING, State.CLOSING
deviation_lists = st.lists(st.one_of(st.none(), st.integers(0, 200)), min_size=1, max_size=50)


def test_framewise_accuracy():
    labels = [S, O, O, C, S]
    assert framewise_accuracy(labels, labels) == 1.0
    truth = [S] * 90 + [O] * 10
    assert framewise_accuracy([S] * 100, truth) == pytest.approx(0.9)
    assert framewise_accuracy([OPENING, "closing"], [O, C]) == 1.0
    with pytest.raises(LengthMismatch):
        framewise_accuracy([S], [S, S])


def test_framewise_accuracy_against_loop():
    rng = random.Random(5)
    a = [rng.choice([S, O, C]) for _ in range(500)]
    b = [rng.choice([S, O, C]) for _ in range(500)]
    hits = 0
    for i in range(500):
        if a[i] == b[i]:
            hits += 1
    assert framewise_accuracy(a, b) == hits / 500


def test_event_frame_deviation():
    assert event_frame_deviation(112, 100) == 12
    assert event_frame_deviation(100, 100) == 0
    assert event_frame_deviation(88, 100) == 12
    with pytest.raises(MissingEvent):
        event_frame_deviation(None, 100)


def test_event_recall_rate():
    assert event_recall_rate([0, 10, 50, None], 40) == 0.5
    assert event_recall_rate([0, 0, 0], 0) == 1.0
    with pytest.raises(EmptyInput):
        event_recall_rate([], 40)


@given(deviation_lists, st.lists(st.integers(0, 250), min_size=1, max_size=20))
def test_recall_monotone_and_bounded(devs, tolerances):
    curve = recall_curve(devs, tolerances)
    values = [v for _, v in curve]
    assert values == sorted(values)
    assert all(0.0 <= v <= 1.0 for v in values)


def test_recall_curve_examples():
    devs = [0, 3, 17, 64]
    assert recall_curve(devs, [20]) == [(20, event_recall_rate(devs, 20))]
    assert recall_curve(devs, [0, 100])[-1] == (100, 1.0)


def test_time_deviation():
    assert time_deviation(13.175, 250) == 52.7
    assert time_deviation(0, 250) == 0
    assert time_deviation(25, 250) == 100
    # default 40-frame tolerance at 250 fps
    assert time_deviation(40, 250) == 160


@given(st.floats(0, 1e4), st.floats(1, 1e4), st.floats(0.1, 10))
def test_time_deviation_linearity(dev, fps, k):
    assert time_deviation(k * dev, fps) == pytest.approx(k * time_deviation(dev, fps), rel=1e-12, abs=1e-12)
    assert time_deviation(dev, k * fps) == pytest.approx(time_deviation(dev, fps) / k, rel=1e-12, abs=1e-12)


def test_evaluate_hand_computed():
    truths = {
        "a": GroundTruth(100, 400, [S] * 4),
        "b": GroundTruth(50, 200, [S, O, O, S]),
        "c": GroundTruth(80, 300),
    }
    results = {
        "a": {"opening_frame": 112, "closing_frame": 390, "states": ["static"] * 4},
        "b": {"opening_frame": 50, "closing_frame": 260, "states": ["static", "opening", "static", "static"]},
        "c": {"opening_frame": None, "closing_frame": 305},
    }
    report = evaluate(results, truths, tolerance=40)
    # opening deviations 12, 0, miss; closing 10, 60, 5
    assert report.f_dev_opening == pytest.approx(6.0)
    assert report.f_dev_closing == pytest.approx(25.0)
    assert report.e_rr == pytest.approx(4 / 6)
    assert report.f_acc == pytest.approx((1.0 + 0.75) / 2)
    assert report.t_dev_ms == pytest.approx(15.5 / 250 * 1000)
    assert [r["misses"] for r in report.per_sequence] == [0, 0, 1]
    d = report.to_dict()
    assert set(d) >= {"f_acc", "f_dev_opening", "f_dev_closing", "e_rr", "t_dev_ms", "tolerance", "per_sequence"}


def test_evaluate_self_consistency():
    truth = GroundTruth(30, 90, [S, O, C])
    report = evaluate({"x": {"opening_frame": 30, "closing_frame": 90, "states": [S, O, C]}}, {"x": truth})
    assert (report.f_acc, report.f_dev_opening, report.f_dev_closing, report.e_rr) == (1.0, 0.0, 0.0, 1.0)


def test_evaluate_errors():
    with pytest.raises(EmptyInput):
        evaluate({}, {})
    with pytest.raises(UnmatchedSequence):
        evaluate({"a": {"opening_frame": 1, "closing_frame": 2}}, {"b": GroundTruth(1, 2)})


def test_ground_truth_roundtrip():
    gt = GroundTruth(3, 9, ["static", "opening"])
    assert gt.labels == [S, O]
    assert GroundTruth.from_dict(gt.to_dict()).to_dict() == gt.to_dict()
    with pytest.raises(ValueError):
        GroundTruth(9, 3)
