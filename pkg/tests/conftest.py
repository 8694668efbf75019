import numpy as np
import pytest

from lipevent.geometry import LandmarkSequence
from lipevent.synth import SynthConfig, base_shape, benchmark_suite

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def clean_suite():
    return benchmark_suite(100, seed=0)


@pytest.fixture(scope="session")
def noisy_suite():
    return benchmark_suite(100, noise_levels=(0.3,), seed=0)


@pytest.fixture
def ring():
    """20 landmarks of the default synthetic lip, centered at the origin."""
    return base_shape(SynthConfig())


def radial_sequence(shape, profile, frame_rate=250.0):
    """Move every landmark along its radial line from the origin by ``profile[t]`` mm."""
    unit = shape / np.linalg.norm(shape, axis=1, keepdims=True)
    pts = shape[None] + np.asarray(profile, dtype=float)[:, None, None] * unit[None]
    return LandmarkSequence(pts, frame_rate)
