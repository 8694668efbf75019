"""Closed-form cost of the sequential coarse-to-fine scan.

At resolution ``ts`` the scan classifies pairs until the one whose later frame
is the first sampled frame at or past the event, then restarts from that pair's
earlier frame. The event position relative to the new start and the number of
classifications per level follow from integer division alone.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .detector import DEFAULT_LADDER, format_ladder


@dataclass(frozen=True)
class ScheduleStep:
    level: int
    resolution: int
    gt: int
    w: int
    detections: int


def gt_update(gt: int, ts: int) -> tuple[int, int]:
    """Relative event position after descending from resolution ``ts``; also returns the remainder flag."""
    if gt < 1 or ts < 1:
        raise ValueError("need gt >= 1 and ts >= 1")
    w = 1 if gt % ts else 0
    gt_next = w * (gt - (gt // ts) * ts) + (1 - w) * ts
    return gt_next, w


def schedule(gt0: int, ladder=DEFAULT_LADDER) -> list[ScheduleStep]:
    steps = []
    gt = gt0
    for level, ts in enumerate(ladder):
        w = 1 if gt % ts else 0
        count = w * (gt // ts + 1) + (1 - w) * (gt // ts)
        steps.append(ScheduleStep(level, ts, gt, w, count))
        gt, _ = gt_update(gt, ts)
    return steps


def detection_count(gt0: int, ladder=DEFAULT_LADDER) -> int:
    """Interframe classifications the sequential scan performs before locking an event at ``gt0``."""
    return sum(step.detections for step in schedule(gt0, ladder))


def detnum_curve(gt_range, ladders) -> list[tuple[int, tuple[int, ...], int]]:
    gt_values = list(gt_range)
    if not gt_values:
        raise ValueError("gt_range is empty")
    return [(gt0, tuple(ladder), detection_count(gt0, ladder)) for ladder in ladders for gt0 in gt_values]


def write_detnum_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["gt0", "ladder", "detnum"])
        for gt0, ladder, count in rows:
            writer.writerow([gt0, format_ladder(ladder), count])
