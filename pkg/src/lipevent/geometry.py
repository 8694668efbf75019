"""Landmark sequences, rigid pose correction and trajectory smoothing.

All coordinates are millimetres. A sequence is stored as one ``(m, n, 3)``
array; :class:`LandmarkFrame` is a light view used by the per-frame API.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CountMismatch, DegenerateConfiguration, InvalidWindow, LipEventError

DEFAULT_FRAME_RATE = 250.0


def _as_points(landmarks) -> np.ndarray:
    pts = np.array(landmarks, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise LipEventError(f"landmarks must have shape (n, 3), got {pts.shape}")
    if pts.shape[0] < 3:
        raise LipEventError(f"need at least 3 landmarks, got {pts.shape[0]}")
    if not np.all(np.isfinite(pts)):
        raise LipEventError("landmark coordinates must be finite")
    pts.setflags(write=False)
    return pts


@dataclass(frozen=True, eq=False)
class LandmarkFrame:
    index: int
    landmarks: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "landmarks", _as_points(self.landmarks))

    def __len__(self) -> int:
        return self.landmarks.shape[0]


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """``x -> rotation @ x + translation``."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        R = np.array(self.rotation, dtype=float)
        t = np.array(self.translation, dtype=float).reshape(3)
        if R.shape != (3, 3):
            raise LipEventError("rotation must be 3x3")
        if not np.allclose(R.T @ R, np.eye(3), atol=1e-9) or abs(np.linalg.det(R) - 1.0) > 1e-9:
            raise LipEventError("rotation must be orthonormal with determinant +1")
        R.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    def apply(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.rotation.T + self.translation

    def inverse(self) -> "RigidTransform":
        Rt = self.rotation.T
        return RigidTransform(Rt, -Rt @ self.translation)

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Transform applying ``other`` first, then ``self``."""
        return RigidTransform(self.rotation @ other.rotation,
                              self.rotation @ other.translation + self.translation)


class LandmarkSequence:
    """Time-ordered frames of ``n`` corresponding 3D landmarks at a fixed rate."""

    def __init__(self, points, frame_rate: float = DEFAULT_FRAME_RATE):
        pts = np.array(points, dtype=float)
        if pts.ndim != 3 or pts.shape[2] != 3:
            raise LipEventError(f"sequence must have shape (m, n, 3), got {pts.shape}")
        if pts.shape[0] < 2:
            raise LipEventError("a sequence needs at least 2 frames")
        if pts.shape[1] < 3:
            raise LipEventError(f"need at least 3 landmarks, got {pts.shape[1]}")
        if not np.all(np.isfinite(pts)):
            raise LipEventError("landmark coordinates must be finite")
        if not frame_rate > 0:
            raise LipEventError("frame_rate must be positive")
        pts.setflags(write=False)
        self.points = pts
        self.frame_rate = float(frame_rate)

    @classmethod
    def from_frames(cls, frames, frame_rate: float = DEFAULT_FRAME_RATE) -> "LandmarkSequence":
        frames = list(frames)
        for expected, f in enumerate(frames):
            if f.index != expected:
                raise LipEventError(f"frame indices must be contiguous from 0; got {f.index} at position {expected}")
        counts = {len(f) for f in frames}
        if len(counts) > 1:
            raise CountMismatch(f"ragged landmark counts: {sorted(counts)}")
        return cls(np.stack([f.landmarks for f in frames]), frame_rate)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def landmark_count(self) -> int:
        return self.points.shape[1]

    def frame(self, i: int) -> LandmarkFrame:
        return LandmarkFrame(i, self.points[i])

    @property
    def frames(self) -> list[LandmarkFrame]:
        return [self.frame(i) for i in range(len(self))]

    def reversed(self) -> "LandmarkSequence":
        return LandmarkSequence(self.points[::-1], self.frame_rate)

    def with_points(self, points) -> "LandmarkSequence":
        return LandmarkSequence(points, self.frame_rate)

    def __repr__(self):
        return f"LandmarkSequence(frames={len(self)}, landmarks={self.landmark_count}, fps={self.frame_rate:g})"


def center_of_mass(frame: LandmarkFrame) -> np.ndarray:
    return frame.landmarks.mean(axis=0)


def _kabsch(src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched least-squares rotation+translation taking ``src`` onto ``dst``.

    ``src`` has shape (..., n, 3); ``dst`` has shape (n, 3) or matches ``src``.
    """
    src_c = src.mean(axis=-2, keepdims=True)
    dst_c = dst.mean(axis=-2, keepdims=True)
    H = np.swapaxes(src - src_c, -1, -2) @ (dst - dst_c)
    U, S, Vt = np.linalg.svd(H)
    # rank < 2 means the points are collinear or coincident
    scale = np.maximum(S[..., :1], 1.0)
    if np.any(S[..., 1] <= 1e-12 * scale[..., 0]):
        raise DegenerateConfiguration("landmarks are collinear or coincident; rotation is underdetermined")
    V = np.swapaxes(Vt, -1, -2)
    d = np.sign(np.linalg.det(V @ np.swapaxes(U, -1, -2)))
    d = np.where(d == 0, 1.0, d)
    D = np.zeros(H.shape)
    D[..., 0, 0] = 1.0
    D[..., 1, 1] = 1.0
    D[..., 2, 2] = d
    R = V @ D @ np.swapaxes(U, -1, -2)
    t = dst_c[..., 0, :] - (R @ src_c[..., 0, :, None])[..., 0]
    return R, t


def rigid_align(frame: LandmarkFrame, reference: LandmarkFrame) -> tuple[LandmarkFrame, RigidTransform]:
    """Align ``frame`` to ``reference`` by the least-squares rigid fit (no scaling)."""
    if len(frame) != len(reference):
        raise CountMismatch(f"landmark counts differ: {len(frame)} vs {len(reference)}")
    R, t = _kabsch(frame.landmarks, reference.landmarks)
    transform = RigidTransform(R, t)
    return LandmarkFrame(frame.index, transform.apply(frame.landmarks)), transform


def pose_correct(seq: LandmarkSequence, reference_index: int = 0) -> LandmarkSequence:
    """Rigidly register every frame onto frame ``reference_index``."""
    m = len(seq)
    if not 0 <= reference_index < m:
        raise IndexError(f"reference_index {reference_index} outside sequence of {m} frames")
    ref = seq.points[reference_index]
    R, t = _kabsch(seq.points, ref)
    aligned = np.einsum("fij,fnj->fni", R, seq.points) + t[:, None, :]
    aligned[reference_index] = ref
    return seq.with_points(aligned)


def smooth_sequence(seq: LandmarkSequence, window: int = 5) -> LandmarkSequence:
    """Centered moving average of every coordinate; the window shrinks at the ends."""
    if int(window) != window or window < 1 or window % 2 == 0:
        raise InvalidWindow(f"smoothing window must be an odd integer >= 1, got {window!r}")
    window = int(window)
    if window == 1:
        return seq
    half = window // 2
    pts = seq.points
    m = len(seq)
    total = np.zeros_like(pts)
    count = np.zeros(m)
    for k in range(-half, half + 1):
        lo, hi = max(0, -k), min(m, m - k)
        if lo >= hi:
            continue
        total[lo:hi] += pts[lo + k:hi + k]
        count[lo:hi] += 1
    return seq.with_points(total / count[:, None, None])
