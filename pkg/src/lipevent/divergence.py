"""Interframe motion divergence over a reference sphere and lip-state classification.

The divergence of an interframe motion is the mean, over landmarks, of each
motion vector projected on the unit direction from the sphere center to the
landmark. Equal surface elements per landmark make the sphere area cancel, so
no radius is needed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import CountMismatch, EmptySide, LandmarkAtCenter
from .geometry import LandmarkFrame, center_of_mass

CENTER_TOL = 1e-9
MIDLINE_TOL = 1e-9


class State(str, enum.Enum):
    STATIC = "static"
    OPENING = "opening"
    CLOSING = "closing"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class LipState:
    kind: State
    rejection: str = "none"  # "none" or "asymmetric"

    def __post_init__(self):
        if self.rejection not in ("none", "asymmetric"):
            raise ValueError(f"unknown rejection reason {self.rejection!r}")
        if self.kind is not State.STATIC and self.rejection != "none":
            raise ValueError("only Static states carry a rejection flag")

    @property
    def rejected(self) -> bool:
        return self.rejection != "none"

    def __str__(self):
        return self.kind.value


STATIC = LipState(State.STATIC)
OPENING = LipState(State.OPENING)
CLOSING = LipState(State.CLOSING)
ASYMMETRIC = LipState(State.STATIC, "asymmetric")


@dataclass(frozen=True)
class ReferenceSphere:
    center: np.ndarray
    landmark_count: int

    def __post_init__(self):
        c = np.array(self.center, dtype=float).reshape(3)
        if not np.all(np.isfinite(c)):
            raise ValueError("sphere center must be finite")
        if self.landmark_count < 3:
            raise ValueError("landmark_count must be >= 3")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)


@dataclass(frozen=True, eq=False)
class MotionSignature:
    div_total: float
    div_left: float
    div_right: float
    per_landmark: np.ndarray
    source_pair: tuple[int, int]


def motion_vectors(current: LandmarkFrame, previous: LandmarkFrame) -> np.ndarray:
    if len(current) != len(previous):
        raise CountMismatch(f"landmark counts differ: {len(current)} vs {len(previous)}")
    return current.landmarks - previous.landmarks


def build_reference_sphere(reference: LandmarkFrame) -> ReferenceSphere:
    return ReferenceSphere(center_of_mass(reference), len(reference))


def split_left_right(landmarks: LandmarkFrame, sphere: ReferenceSphere) -> tuple[np.ndarray, np.ndarray]:
    """Left/right landmark indices by the sign of the x offset from the center.

    Midline landmarks go into both halves.
    """
    dx = landmarks.landmarks[:, 0] - sphere.center[0]
    mid = np.abs(dx) < MIDLINE_TOL
    left = np.flatnonzero((dx < 0) | mid)
    right = np.flatnonzero((dx > 0) | mid)
    if left.size == 0 or right.size == 0:
        raise EmptySide(f"left/right split is one-sided ({left.size} left, {right.size} right)")
    return left, right


def radial_projections(vectors: np.ndarray, landmarks: np.ndarray, center: np.ndarray) -> np.ndarray:
    radial = landmarks - center
    norms = np.linalg.norm(radial, axis=-1)
    if np.any(norms < CENTER_TOL):
        raise LandmarkAtCenter("a landmark coincides with the sphere center")
    return np.einsum("...ij,...ij->...i", vectors, radial) / norms


def interframe_divergence(vectors, landmarks: LandmarkFrame, sphere: ReferenceSphere,
                          partition: tuple[np.ndarray, np.ndarray] | None = None,
                          source_pair: tuple[int, int] | None = None) -> MotionSignature:
    """Divergence signature of one interframe motion.

    ``landmarks`` is the later frame of the pair; ``partition`` defaults to
    :func:`split_left_right` on it.
    """
    vectors = np.asarray(vectors, dtype=float)
    n = sphere.landmark_count
    if vectors.shape != (n, 3) or len(landmarks) != n:
        raise CountMismatch(f"expected {n} motion vectors and landmarks, got {vectors.shape[0]} and {len(landmarks)}")
    if partition is None:
        partition = split_left_right(landmarks, sphere)
    left, right = partition
    per = radial_projections(vectors, landmarks.landmarks, sphere.center)
    per.setflags(write=False)
    if source_pair is None:
        source_pair = (landmarks.index - 1, landmarks.index)
    return MotionSignature(
        div_total=float(per.mean()),
        div_left=float(per[left].mean()),
        div_right=float(per[right].mean()),
        per_landmark=per,
        source_pair=source_pair,
    )


def signature(earlier: LandmarkFrame, later: LandmarkFrame, sphere: ReferenceSphere) -> MotionSignature:
    """Convenience wrapper: motion vectors, partition and divergence for one frame pair."""
    return interframe_divergence(motion_vectors(later, earlier), later, sphere,
                                 source_pair=(earlier.index, later.index))


def classify_state(sig: MotionSignature, eps_silence: float = 1.0, eps_symmetry: float = 0.4) -> LipState:
    if not (eps_silence > 0 and eps_symmetry > 0):
        raise ValueError("thresholds must be positive")
    if abs(sig.div_total) < eps_silence:
        return STATIC
    if abs(sig.div_left - sig.div_right) >= eps_symmetry:
        return ASYMMETRIC
    return OPENING if sig.div_total > 0 else CLOSING


def interframe_series(points: np.ndarray, center) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Total, left and right divergence of every consecutive pair in an (m, n, 3) array.

    Vectorised counterpart of :func:`signature` with a fixed sphere center;
    element ``t`` describes the pair ``(t, t + 1)``.
    """
    points = np.asarray(points, dtype=float)
    center = np.asarray(center, dtype=float)
    later = points[1:]
    per = radial_projections(points[1:] - points[:-1], later, center)
    dx = later[..., 0] - center[0]
    mid = np.abs(dx) < MIDLINE_TOL
    left = (dx < 0) | mid
    right = (dx > 0) | mid
    n_left = left.sum(axis=1)
    n_right = right.sum(axis=1)
    if np.any(n_left == 0) or np.any(n_right == 0):
        raise EmptySide("left/right split is one-sided for at least one frame")
    return per.mean(axis=1), (per * left).sum(axis=1) / n_left, (per * right).sum(axis=1) / n_right
