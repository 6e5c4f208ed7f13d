import os
import sys
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def figure_marks():
    """The hand-built mark skeleton matching the reference space-time picture.

    All coordinates are dyadic rationals, so every derived quantity
    (barrier heights, expiry times, merge times) is exact in binary floats.
    """
    from fireline.events import MarkSet, SpaceTimeMark

    marks = [
        (0.125, -1.875),
        (0.25, -1.75),
        (0.375, -1.625),
        (0.5625, -1.0),
        (0.625, 0.5),
        (0.75, -1.5),
        (0.8125, 1.25),
        (0.875, -0.5),
        (1.375, -0.75),
        (1.5, 0.875),
        (1.6875, -0.25),
        (2.0, -1.25),
        (2.125, 0.75),
        (2.25, 0.25),
        (3.25, 1.0),
    ]
    return MarkSet(3.5, 2.0, [SpaceTimeMark(t, x) for t, x in marks])
