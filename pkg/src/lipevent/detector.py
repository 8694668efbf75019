"""Coarse-to-fine lip event detection over a ladder of temporal resolutions.

At each resolution ``ts`` the search region is scanned with frame pairs ``ts``
apart, starting from the region's reference frame. The first pair classified
as Opening becomes the region for the next, finer resolution, and its later
frame the current event estimate. Closing events are found by running the same
scan on the time-reversed sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple

import numpy as np

from .divergence import (
    STATIC, LipState, MotionSignature, State, build_reference_sphere,
    classify_state, interframe_series, signature,
)
from .errors import InvalidConfig, SequenceTooShort
from .geometry import LandmarkFrame, LandmarkSequence, pose_correct, smooth_sequence

DEFAULT_LADDER = (30, 15, 7, 3, 1)


def next_resolution(ts: int, k: int = 2) -> int:
    if ts < 1 or k < 2:
        raise ValueError("need ts >= 1 and k >= 2")
    return max(1, -(-ts // k))


def generate_ladder(ts0: int, k: int = 2) -> tuple[int, ...]:
    """Resolution ladder from repeated :func:`next_resolution`, ending at 1."""
    ladder = [ts0]
    while ladder[-1] > 1:
        ladder.append(next_resolution(ladder[-1], k))
    return tuple(ladder)


def parse_ladder(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(text).strip().split("-"))
    except ValueError:
        raise InvalidConfig(f"cannot parse ladder {text!r}; expected e.g. 30-15-7-3-1") from None


def format_ladder(ladder) -> str:
    return "-".join(str(int(ts)) for ts in ladder)


@dataclass(frozen=True)
class DetectionConfig:
    resolution_ladder: tuple[int, ...] = DEFAULT_LADDER
    eps_silence: float = 1.0
    eps_symmetry: float = 0.4
    update_factor_k: int = 2
    frame_rate: float = 250.0
    coarse_fallback: bool = True
    smoothing_window: int = 5

    def __post_init__(self):
        ladder = tuple(int(ts) for ts in self.resolution_ladder)
        object.__setattr__(self, "resolution_ladder", ladder)
        if not ladder or ladder[-1] != 1 or any(a <= b for a, b in zip(ladder, ladder[1:])) or ladder[0] < 1:
            raise InvalidConfig(f"ladder must be strictly decreasing positive integers ending in 1, got {ladder}")
        if not (self.eps_silence > 0 and self.eps_symmetry > 0):
            raise InvalidConfig("eps_silence and eps_symmetry must be positive")
        if int(self.update_factor_k) != self.update_factor_k or self.update_factor_k < 2:
            raise InvalidConfig("update_factor_k must be an integer >= 2")
        if not self.frame_rate > 0:
            raise InvalidConfig("frame_rate must be positive")
        w = self.smoothing_window
        if int(w) != w or w < 1 or w % 2 == 0:
            raise InvalidConfig(f"smoothing_window must be an odd integer >= 1, got {w!r}")

    def replace(self, **changes) -> "DetectionConfig":
        return replace(self, **changes)

    @classmethod
    def from_mapping(cls, values: dict) -> "DetectionConfig":
        """Build from string-valued keys as found in a config file.

        ``resolution_ladder`` accepts ``30-15-7-3-1`` or ``auto:30`` (generated
        with ``update_factor_k``).
        """
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise InvalidConfig(f"unknown config keys: {', '.join(sorted(unknown))}")
        kw = {}
        try:
            for key, raw in values.items():
                raw = str(raw).strip()
                if key == "resolution_ladder":
                    continue
                if key == "coarse_fallback":
                    if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                        raise InvalidConfig(f"coarse_fallback must be a boolean, got {raw!r}")
                    kw[key] = raw.lower() in ("true", "1", "yes")
                elif key in ("update_factor_k", "smoothing_window"):
                    kw[key] = int(raw)
                else:
                    kw[key] = float(raw)
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from None
        if "resolution_ladder" in values:
            raw = str(values["resolution_ladder"]).strip()
            if raw.startswith("auto:"):
                try:
                    ts0 = int(raw[5:])
                except ValueError:
                    raise InvalidConfig(f"bad auto ladder {raw!r}") from None
                kw["resolution_ladder"] = generate_ladder(ts0, kw.get("update_factor_k", 2))
            else:
                kw["resolution_ladder"] = parse_ladder(raw)
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "DetectionConfig":
        """Read a flat ``key = value`` file; ``#`` starts a comment."""
        values = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise InvalidConfig(f"{path}:{lineno}: expected key = value")
                key, value = (part.strip() for part in line.split("=", 1))
                values[key] = value
        return cls.from_mapping(values)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["resolution_ladder"] = list(self.resolution_ladder)
        return d


class TraceEntry(NamedTuple):
    resolution: int
    pair: tuple[int, int]
    signature: MotionSignature
    state: LipState


class Detection(NamedTuple):
    frame: int | None
    resolution: int | None
    trace: list


@dataclass
class EventResult:
    opening_frame: int | None
    closing_frame: int | None
    opening_resolution: int | None
    closing_resolution: int | None
    framewise_states: list
    trace: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if (self.opening_frame is not None and self.closing_frame is not None
                and self.opening_frame >= self.closing_frame):
            raise ValueError("opening_frame must precede closing_frame")

    def to_dict(self) -> dict:
        return {
            "opening_frame": self.opening_frame,
            "closing_frame": self.closing_frame,
            "opening_resolution": self.opening_resolution,
            "closing_resolution": self.closing_resolution,
            "states": [str(s) for s in self.framewise_states],
        }


def _coarse_to_fine(points: np.ndarray, lo: int, hi: int, config: DetectionConfig, to_output) -> Detection:
    """First-Opening coarse-to-fine search of ``points[lo..hi]``.

    ``to_output`` maps scan indices to the frame indices reported in the trace
    and result (identity for forward scans, mirroring for reversed ones).
    """
    ladder = config.resolution_ladder
    if hi - lo < ladder[0]:
        raise SequenceTooShort(
            f"search window of {hi - lo + 1} frames cannot hold two frames at resolution {ladder[0]}")
    sphere = build_reference_sphere(LandmarkFrame(to_output(lo), points[lo]))
    trace = []
    region = (lo, hi)
    hit = None
    for ts in ladder:
        found = None
        a, end = region
        while a < end:
            # pairs are clipped at the region end so every frame in it is covered
            b = min(a + ts, end)
            sig = signature(LandmarkFrame(to_output(a), points[a]), LandmarkFrame(to_output(b), points[b]), sphere)
            state = classify_state(sig, config.eps_silence, config.eps_symmetry)
            trace.append(TraceEntry(ts, (to_output(a), to_output(b)), sig, state))
            if state.kind is State.OPENING:
                found = (a, b)
                break
            a = b
        if found is not None:
            region = found
            hit = (found[1], ts)
            if ts == 1:
                return Detection(to_output(found[1]), 1, trace)
    if hit is not None and config.coarse_fallback:
        return Detection(to_output(hit[0]), hit[1], trace)
    return Detection(None, None, trace)


def _window(seq_len: int, window) -> tuple[int, int]:
    lo, hi = (0, seq_len - 1) if window is None else (int(window[0]), int(window[1]))
    if not 0 <= lo < hi < seq_len:
        raise SequenceTooShort(f"invalid search window {lo}..{hi} for a sequence of {seq_len} frames")
    return lo, hi


def detect_opening(seq: LandmarkSequence, config: DetectionConfig | None = None, window=None) -> Detection:
    """Opening event of an already preprocessed sequence.

    ``window`` is an inclusive ``(lo, hi)`` frame range; the whole sequence by default.
    """
    config = config or DetectionConfig()
    lo, hi = _window(len(seq), window)
    return _coarse_to_fine(seq.points, lo, hi, config, int)


def detect_closing(seq: LandmarkSequence, config: DetectionConfig | None = None, window=None) -> Detection:
    """Closing event: the opening search run backwards in time from the window end."""
    config = config or DetectionConfig()
    m = len(seq)
    lo, hi = _window(m, window)
    rev = seq.points[::-1]
    return _coarse_to_fine(rev, m - 1 - hi, m - 1 - lo, config, lambda i: m - 1 - int(i))


def preprocess(seq: LandmarkSequence, config: DetectionConfig, reference_index: int = 0) -> LandmarkSequence:
    return smooth_sequence(pose_correct(seq, reference_index), config.smoothing_window)


def framewise_states(seq: LandmarkSequence, config: DetectionConfig | None = None) -> list[LipState]:
    """Per-frame state at the finest resolution; frame 0 is Static."""
    config = config or DetectionConfig()
    center = seq.points[0].mean(axis=0)
    total, left, right = interframe_series(seq.points, center)
    states = [STATIC]
    for t, l, r in zip(total, left, right):
        sig = MotionSignature(float(t), float(l), float(r), np.empty(0), (0, 0))
        states.append(classify_state(sig, config.eps_silence, config.eps_symmetry))
    return states


def default_windows(m: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Opening searched in the first half, closing in the second."""
    mid = m // 2
    return (0, mid), (mid + 1, m - 1)


def detect_events(seq: LandmarkSequence, config: DetectionConfig | None = None,
                  open_window=None, close_window=None) -> EventResult:
    """Preprocess a raw sequence and detect both events."""
    config = config or DetectionConfig()
    m = len(seq)
    if m < 4:
        raise SequenceTooShort(f"sequence of {m} frames is too short to split into search halves")
    default_open, default_close = default_windows(m)
    open_window = open_window or default_open
    close_window = close_window or default_close
    clean = preprocess(seq, config)
    opening = detect_opening(clean, config, open_window)
    closing = detect_closing(clean, config, close_window)
    closing_frame = closing.frame
    if opening.frame is not None and closing_frame is not None and closing_frame <= opening.frame:
        # only reachable with overlapping user windows
        closing_frame = None
    return EventResult(
        opening_frame=opening.frame,
        closing_frame=closing_frame,
        opening_resolution=opening.resolution,
        closing_resolution=closing.resolution if closing_frame is not None else None,
        framewise_states=framewise_states(clean, config),
        trace=opening.trace + closing.trace,
    )


def exhaustive_opening(seq: LandmarkSequence, config: DetectionConfig | None = None, window=None) -> int | None:
    """Reference scan: later frame of the first Opening interframe at resolution 1."""
    config = config or DetectionConfig()
    lo, hi = _window(len(seq), window)
    states = framewise_states(seq.with_points(seq.points[lo:hi + 1]), config)
    for t, s in enumerate(states):
        if s.kind is State.OPENING:
            return lo + t
    return None


__all__ = [
    "DEFAULT_LADDER", "DetectionConfig", "Detection", "EventResult", "TraceEntry",
    "next_resolution", "generate_ladder", "parse_ladder", "format_ladder",
    "detect_opening", "detect_closing", "detect_events", "framewise_states",
    "exhaustive_opening", "preprocess", "default_windows",
]
