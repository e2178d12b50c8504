import numpy as np
import pytest
from hypothesis import strategies as st

from spudgrade.core import GREEN_SKIN, RUSSET, WHITE, Frame

W, R, G = WHITE, RUSSET, GREEN_SKIN

# 4 white + 8 russet + 4 green, greens in the middle 2x2 block
HAND_PIXELS = [
    W, W, W, W,
    R, G, G, R,
    R, G, G, R,
    R, R, R, R,
]
HAND_GREEN_COORDS = {(1, 1), (2, 1), (1, 2), (2, 2)}


@pytest.fixture
def hand_frame():
    return Frame.from_pixels(4, 4, HAND_PIXELS)


def random_frame(rng, width, height):
    return Frame.from_array(rng.integers(0, 256, (height, width, 3), dtype=np.uint8))


@st.composite
def frames(draw, max_side=16):
    width = draw(st.integers(1, max_side))
    height = draw(st.integers(1, max_side))
    raw = draw(st.binary(min_size=3 * width * height, max_size=3 * width * height))
    return Frame.from_array(np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3))


_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = report.capstdout.strip().splitlines()
        _acceptance[name] = (report.outcome, detail[-1] if detail else "")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, (outcome, detail) in sorted(_acceptance.items()):
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}" + (f"  [{detail}]" if detail else ""))
