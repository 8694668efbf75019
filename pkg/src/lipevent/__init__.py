"""3D lip event detection from landmark sequences via interframe motion divergence."""

__version__ = "0.1.0"

from .geometry import LandmarkFrame, LandmarkSequence, RigidTransform, pose_correct, rigid_align, smooth_sequence
from .divergence import LipState, MotionSignature, ReferenceSphere, State, classify_state, signature
from .detector import DetectionConfig, EventResult, detect_closing, detect_events, detect_opening
from .metrics import EvaluationReport, GroundTruth, evaluate
from .synth import SynthConfig, benchmark_suite, generate
