"""Evaluation metrics: framewise accuracy, event frame deviation, event recall, time deviation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .divergence import State
from .errors import EmptyInput, LengthMismatch, MissingEvent

DEFAULT_TOLERANCE = 40


def _kind(label) -> State:
    if isinstance(label, State):
        return label
    kind = getattr(label, "kind", None)
    if kind is not None:
        return kind
    return State(str(label).lower())


@dataclass
class GroundTruth:
    opening_frame: int
    closing_frame: int
    labels: list | None = None

    def __post_init__(self):
        if self.opening_frame >= self.closing_frame:
            raise ValueError("opening_frame must precede closing_frame")
        if self.labels is not None:
            self.labels = [_kind(s) for s in self.labels]

    def to_dict(self) -> dict:
        d = {"opening_frame": self.opening_frame, "closing_frame": self.closing_frame}
        d["labels"] = None if self.labels is None else [s.value for s in self.labels]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GroundTruth":
        return cls(int(d["opening_frame"]), int(d["closing_frame"]), d.get("labels"))


def framewise_accuracy(predicted, truth) -> float:
    if len(predicted) != len(truth):
        raise LengthMismatch(f"{len(predicted)} predicted labels vs {len(truth)} true labels")
    if not truth:
        raise EmptyInput("no frames to compare")
    hits = sum(_kind(p) is _kind(t) for p, t in zip(predicted, truth))
    return hits / len(truth)


def event_frame_deviation(detected, truth: int) -> int:
    if detected is None:
        raise MissingEvent("no event detected; deviation undefined")
    return abs(int(detected) - int(truth))


def event_recall_rate(deviations, tolerance: float = DEFAULT_TOLERANCE) -> float:
    """Share of events with deviation <= tolerance; ``None`` entries are misses."""
    deviations = list(deviations)
    if not deviations:
        raise EmptyInput("no events to score")
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    return sum(d is not None and d <= tolerance for d in deviations) / len(deviations)


def time_deviation(mean_dev_frames: float, frame_rate: float = 250.0) -> float:
    if not frame_rate > 0:
        raise ValueError("frame_rate must be positive")
    return mean_dev_frames / frame_rate * 1000.0


def recall_curve(deviations, tolerances) -> list[tuple[float, float]]:
    deviations = list(deviations)
    return [(tol, event_recall_rate(deviations, tol)) for tol in sorted(tolerances)]


def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


@dataclass
class EvaluationReport:
    f_acc: float | None
    f_dev_opening: float | None
    f_dev_closing: float | None
    e_rr: float
    t_dev_ms: float | None
    tolerance: float
    frame_rate: float
    per_sequence: list = field(default_factory=list)

    @property
    def deviations(self) -> list:
        """Pooled opening and closing deviations, ``None`` for misses."""
        out = []
        for row in self.per_sequence:
            out += [row["opening_deviation"], row["closing_deviation"]]
        return out

    def to_dict(self) -> dict:
        return {
            "f_acc": self.f_acc,
            "f_dev_opening": self.f_dev_opening,
            "f_dev_closing": self.f_dev_closing,
            "e_rr": self.e_rr,
            "t_dev_ms": self.t_dev_ms,
            "tolerance": self.tolerance,
            "frame_rate": self.frame_rate,
            "per_sequence": self.per_sequence,
        }


def evaluate(results: dict, truths: dict, tolerance: float = DEFAULT_TOLERANCE,
             frame_rate: float = 250.0) -> EvaluationReport:
    """Score detections against ground truth, both keyed by sequence id.

    ``results`` values need ``opening_frame``, ``closing_frame`` and optionally
    ``framewise_states``/``states``; either objects or dicts work. Missed events
    count as failures for recall and are left out of the deviation means.
    """
    from .errors import UnmatchedSequence

    if not results:
        raise EmptyInput("no results to evaluate")
    missing = sorted(set(results) ^ set(truths))
    if missing:
        raise UnmatchedSequence(f"sequences without a counterpart: {', '.join(missing)}")

    def get(obj, *names):
        for name in names:
            if isinstance(obj, dict) and name in obj:
                return obj[name]
            if hasattr(obj, name):
                return getattr(obj, name)
        return None

    rows, accs = [], []
    for key in sorted(results):
        res, gt = results[key], truths[key]
        if isinstance(gt, dict):
            gt = GroundTruth.from_dict(gt)
        opened, closed = get(res, "opening_frame"), get(res, "closing_frame")
        d_open = None if opened is None else event_frame_deviation(opened, gt.opening_frame)
        d_close = None if closed is None else event_frame_deviation(closed, gt.closing_frame)
        states = get(res, "framewise_states", "states")
        acc = None
        if states is not None and gt.labels is not None:
            acc = framewise_accuracy(states, gt.labels)
            accs.append(acc)
        rows.append({
            "sequence": key,
            "opening_frame": opened,
            "closing_frame": closed,
            "opening_deviation": d_open,
            "closing_deviation": d_close,
            "misses": int(d_open is None) + int(d_close is None),
            "f_acc": acc,
        })
    f_open = _mean(r["opening_deviation"] for r in rows)
    f_close = _mean(r["closing_deviation"] for r in rows)
    both = _mean([f_open, f_close])
    pooled = [d for r in rows for d in (r["opening_deviation"], r["closing_deviation"])]
    return EvaluationReport(
        f_acc=_mean(accs),
        f_dev_opening=f_open,
        f_dev_closing=f_close,
        e_rr=event_recall_rate(pooled, tolerance),
        t_dev_ms=None if both is None else time_deviation(both, frame_rate),
        tolerance=tolerance,
        frame_rate=frame_rate,
        per_sequence=rows,
    )
