import math
import warnings

import pytest
from hypothesis import assume, settings
from hypothesis import strategies as st

from srbm_wedge.errors import NearCoincidence
from srbm_wedge.fixtures import FIXTURES
from srbm_wedge.model import quadrant_from_angles

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

MARGIN = 0.05


@st.composite
def valid_angles(draw):
    """Angles of a valid model, kept a little away from every boundary."""
    unit = st.floats(0.0, 1.0, allow_nan=False)
    beta = 0.2 + (math.pi - 0.4) * draw(unit)
    theta = MARGIN + (beta - 2 * MARGIN) * draw(unit)
    delta = theta + MARGIN + (math.pi - theta - 2 * MARGIN) * draw(unit)
    lo = beta - theta + MARGIN
    eps = lo + (math.pi - lo - MARGIN) * draw(unit)
    assume(delta + eps - math.pi < beta - MARGIN)
    assume(beta - eps > delta - math.pi + MARGIN)
    return beta, theta, delta, eps


@st.composite
def valid_models(draw):
    beta, theta, delta, eps = draw(valid_angles())
    scale = st.floats(0.3, 3.0, allow_nan=False)
    return quadrant_from_angles(
        beta, theta, delta, eps,
        sigma11=draw(scale), sigma22=draw(scale), drift=draw(scale), r11=draw(scale), r22=draw(scale),
    )


@pytest.fixture(autouse=True)
def _quiet_near_coincidence():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearCoincidence)
        yield


CLOSED = [f for f in FIXTURES if f.closed_form]
CLOSED_IDS = [f.name for f in CLOSED]
