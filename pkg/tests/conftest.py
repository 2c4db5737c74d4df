import numpy as np
import pytest

from fringewire.field import BeamPair
from fringewire.obstruction import DetectorPlane


@pytest.fixture
def beams() -> BeamPair:
    """Default geometry: λ = 0.633 μm, α = 0.01 rad, waist 500 μm, l = 63.3 μm."""
    return BeamPair()


@pytest.fixture
def beams_50() -> BeamPair:
    """λ = 0.5 μm, α = 0.01 rad, so l = 50 μm."""
    return BeamPair(wavelength=0.5, crossing_angle=0.01)


@pytest.fixture
def plane(beams: BeamPair) -> DetectorPlane:
    return DetectorPlane.for_beams(beams)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)
