"""Parametric synthetic speaking-lip sequences with exact ground truth.

Landmarks sit on an ellipse in the xy-plane (with an optional ``sin 3θ`` z
relief) that is symmetric about the origin and mirror-symmetric about x = 0.
Each landmark moves along its own radial line by r(t), a raised-cosine ramp up
for opening and down for closing, so the interframe divergence equals
r(t) - r(t-1) exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.spatial.transform import Rotation

from .divergence import State
from .errors import InvalidConfig
from .geometry import LandmarkSequence
from .metrics import GroundTruth


@dataclass(frozen=True)
class SynthConfig:
    landmark_count: int = 20
    frame_count: int = 500
    frame_rate: float = 250.0
    lip_radii: tuple[float, float] = (25.0, 10.0)
    z_depth: float = 3.0
    open_start: int = 100
    open_duration: int = 5
    close_end: int = 400
    close_duration: int = 5
    amplitude: float = 5.0
    noise_sigma: float = 0.0
    asymmetry: float = 1.0
    rigid_drift: float = 0.0  # per-frame drift bound, mm of translation and degrees of rotation
    wiggle: float = 0.0  # lateral widening (mm) in the frames before opening
    wiggle_frames: int = 10
    seed: int = 0

    def __post_init__(self):
        n = self.landmark_count
        if n < 4 or n % 2:
            # even counts keep the shape point-symmetric, so its centroid never moves
            raise InvalidConfig(f"landmark_count must be even and >= 4, got {n}")
        if not self.amplitude > 0:
            raise InvalidConfig("amplitude must be positive")
        if self.open_duration < 1 or self.close_duration < 1:
            raise InvalidConfig("ramp durations must be >= 1 frame")
        if self.open_start < 0 or self.open_start + self.open_duration > self.close_end - self.close_duration:
            raise InvalidConfig("need 0 <= open_start and open_start + open_duration <= close_end - close_duration")
        if self.close_end > self.frame_count - 1:
            raise InvalidConfig("close_end must lie inside the sequence")
        if self.noise_sigma < 0 or self.rigid_drift < 0 or self.wiggle < 0:
            raise InvalidConfig("noise_sigma, rigid_drift and wiggle must be >= 0")
        if not self.asymmetry > 0:
            raise InvalidConfig("asymmetry must be positive")
        if not self.frame_rate > 0:
            raise InvalidConfig("frame_rate must be positive")
        if min(self.lip_radii) <= 0:
            raise InvalidConfig("lip radii must be positive")
        if self.wiggle > 0 and not 1 <= self.wiggle_frames <= self.open_start:
            raise InvalidConfig("wiggle_frames must fit before open_start")

    def replace(self, **changes) -> "SynthConfig":
        return replace(self, **changes)


@dataclass
class SynthOutput:
    sequence: LandmarkSequence
    truth: GroundTruth
    config: SynthConfig


def base_shape(cfg: SynthConfig) -> np.ndarray:
    n = cfg.landmark_count
    a, b = cfg.lip_radii
    theta = np.pi / n + 2 * np.pi * np.arange(n) / n
    return np.stack([a * np.cos(theta), b * np.sin(theta), cfg.z_depth * np.sin(3 * theta)], axis=1)


def displacement_profile(cfg: SynthConfig) -> np.ndarray:
    """Radial displacement r(t) in mm for every frame."""
    t = np.arange(cfg.frame_count, dtype=float)
    r = np.zeros(cfg.frame_count)
    s, d = cfg.open_start, cfg.open_duration
    ce, dc = cfg.close_end, cfg.close_duration
    rising = (t > s) & (t < s + d)
    r[rising] = 0.5 * cfg.amplitude * (1 - np.cos(np.pi * (t[rising] - s) / d))
    r[(t >= s + d) & (t <= ce - dc)] = cfg.amplitude
    falling = (t > ce - dc) & (t < ce)
    r[falling] = 0.5 * cfg.amplitude * (1 + np.cos(np.pi * (t[falling] - (ce - dc)) / dc))
    return r


def profile_labels(r: np.ndarray) -> list[State]:
    step = np.diff(r)
    labels = [State.STATIC]
    labels += [State.OPENING if d > 0 else State.CLOSING if d < 0 else State.STATIC for d in step]
    return labels


def generate(cfg: SynthConfig) -> SynthOutput:
    rng = np.random.default_rng(cfg.seed)
    shape = base_shape(cfg)
    unit = shape / np.linalg.norm(shape, axis=1, keepdims=True)
    gain = np.where(shape[:, 0] < 0, cfg.asymmetry, 1.0)
    r = displacement_profile(cfg)
    points = shape[None] + r[:, None, None] * (gain[:, None] * unit)[None]

    if cfg.wiggle > 0:
        w0 = cfg.open_start - cfg.wiggle_frames
        t = np.arange(w0, cfg.open_start)
        bump = cfg.wiggle * np.sin(np.pi * (t - w0) / cfg.wiggle_frames)
        points[w0:cfg.open_start, :, 0] += bump[:, None] * np.sign(shape[:, 0])[None]

    if cfg.rigid_drift > 0:
        m = cfg.frame_count - 1
        axes = rng.normal(size=(m, 3))
        axes /= np.linalg.norm(axes, axis=1, keepdims=True)
        angles = np.deg2rad(rng.uniform(-cfg.rigid_drift, cfg.rigid_drift, size=m))
        rot = Rotation.from_rotvec(axes * angles[:, None]).as_matrix()
        shifts = rng.normal(size=(m, 3))
        shifts *= (rng.uniform(0, cfg.rigid_drift, size=m) / np.linalg.norm(shifts, axis=1))[:, None]
        # frame 0 stays put so it can serve as the registration reference
        points[1:] = np.einsum("fij,fnj->fni", rot, points[1:]) + shifts[:, None, :]

    if cfg.noise_sigma > 0:
        points = points + rng.normal(0.0, cfg.noise_sigma, size=points.shape)

    truth = GroundTruth(cfg.open_start, cfg.close_end, profile_labels(r))
    return SynthOutput(LandmarkSequence(points, cfg.frame_rate), truth, cfg)


SUITE_SPEED_RANGE = (3, 6)
SUITE_AMPLITUDE_RANGE = (6.0, 9.0)


def benchmark_suite(count: int = 100, speed_range=SUITE_SPEED_RANGE, noise_levels=(0.0,), seed: int = 0,
                    amplitude_range=SUITE_AMPLITUDE_RANGE, base: SynthConfig | None = None) -> list[SynthOutput]:
    """Family of one-cycle sequences with varied ramp durations, amplitudes and event times.

    Sequence ``i`` uses noise level ``noise_levels[i % len(noise_levels)]``.
    """
    if count < 1:
        raise InvalidConfig("count must be >= 1")
    base = base or SynthConfig()
    rng = np.random.default_rng(seed)
    lo_d, hi_d = int(speed_range[0]), int(speed_range[1])
    m = base.frame_count
    mid = m // 2
    out = []
    for i in range(count):
        d_open, d_close = (int(x) for x in rng.integers(lo_d, hi_d + 1, size=2))
        amplitude = float(rng.uniform(*amplitude_range))
        open_start = int(rng.integers(m // 10, mid - d_open - m // 10))
        close_end = int(rng.integers(mid + d_close + m // 10, m - m // 10))
        cfg = base.replace(
            open_start=open_start, open_duration=d_open, close_end=close_end, close_duration=d_close,
            amplitude=amplitude, noise_sigma=float(noise_levels[i % len(noise_levels)]),
            seed=int(rng.integers(2**31)),
        )
        out.append(generate(cfg))
    return out


def config_dict(cfg: SynthConfig) -> dict:
    d = asdict(cfg)
    d["lip_radii"] = list(cfg.lip_radii)
    return d
