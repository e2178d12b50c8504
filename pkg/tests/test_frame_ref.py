import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spudgrade.core import Frame, Grade, NoRoiError, RgbPixel, RUSSET, Thresholds, WHITE
from spudgrade.frame_ref import (
    BitMask,
    WarningKind,
    analyze_frame,
    green_mask,
    render_overlay,
    roi_mask,
    validate_capture,
)
from spudgrade.synthgen import generate_corpus

from conftest import HAND_GREEN_COORDS, frames, random_frame


def brute_counts(frame, t):
    """Per-pixel double loop, independent of the numpy masks."""
    roi = green = 0
    for y in range(frame.height):
        for x in range(frame.width):
            r, g, b = (int(v) for v in frame.data[y, x])
            if b < t.t_blue:
                roi += 1
                if r - g < t.t_diff:
                    green += 1
    return roi, green


@pytest.mark.parametrize("pixel, t_blue, inside", [
    ((255, 255, 255), 200, False),
    ((150, 100, 60), 200, True),
    ((0, 0, 200), 200, False),
    ((0, 0, 199), 200, True),
    ((0, 0, 255), 256, True),
    ((0, 0, 0), 0, False),
])
def test_roi_mask_single_pixel(pixel, t_blue, inside):
    assert roi_mask(Frame.filled(1, 1, pixel), t_blue)[0, 0] is inside


@pytest.mark.parametrize("pixel, t_diff, green", [
    ((0, 255, 0), 20, True),
    ((150, 100, 60), 20, False),
    ((90, 140, 60), 20, True),
    ((120, 100, 0), 20, False),   # r - g == t_diff is not green
    ((119, 100, 0), 20, True),
    ((255, 0, 0), 256, True),
    ((0, 255, 0), -255, False),
])
def test_green_mask_single_pixel(pixel, t_diff, green):
    f = Frame.filled(1, 1, pixel)
    full = BitMask(1, 1, np.ones((1, 1), bool))
    assert green_mask(f, full, t_diff)[0, 0] is green


def test_green_mask_respects_roi():
    f = Frame.filled(2, 1, (0, 255, 0))
    roi = BitMask(2, 1, np.array([[True, False]]))
    assert green_mask(f, roi, 20).coordinates() == {(0, 0)}


def test_mask_dimension_mismatch():
    with pytest.raises(ValueError):
        green_mask(Frame.filled(2, 2), BitMask(1, 1, np.ones((1, 1), bool)), 20)


def test_hand_built_frame(hand_frame):
    report, roi, green = analyze_frame(hand_frame, Thresholds())
    assert (report.roi_pixels, report.green_pixels) == (12, 4)
    assert report.percent_centi == 3333
    assert report.grade is Grade.DAMAGED
    assert report.backend == "frame"
    assert green.coordinates() == HAND_GREEN_COORDS
    assert brute_counts(hand_frame, Thresholds()) == (12, 4)


def test_all_white_is_no_roi():
    with pytest.raises(NoRoiError):
        analyze_frame(Frame.filled(4, 4, WHITE))


def test_full_coverage():
    f = Frame.filled(6, 5, (90, 140, 60))
    report, _, _ = analyze_frame(f)
    assert report.percent_centi == 10000
    assert report.grade is Grade.SERIOUSLY_DAMAGED


def test_overlay_hand_frame(hand_frame):
    _, _, green = analyze_frame(hand_frame)
    marker = RgbPixel(255, 0, 255)
    out = render_overlay(hand_frame, green, marker)
    painted = {(x, y) for y in range(4) for x in range(4) if out.pixel(x, y) == marker}
    assert painted == HAND_GREEN_COORDS
    for y in range(4):
        for x in range(4):
            if (x, y) not in HAND_GREEN_COORDS:
                assert out.pixel(x, y) == hand_frame.pixel(x, y)
    # input untouched
    assert hand_frame.pixel(1, 1) == (90, 140, 60)


def test_overlay_identity_and_full():
    f = random_frame(np.random.default_rng(0), 7, 5)
    empty = BitMask(7, 5, np.zeros((5, 7), bool))
    assert render_overlay(f, empty, (0, 255, 0)) == f
    full = BitMask(7, 5, np.ones((5, 7), bool))
    assert render_overlay(f, full, (0, 255, 0)) == Frame.filled(7, 5, (0, 255, 0))


@given(frames(max_side=24), st.integers(0, 256), st.integers(-255, 256))
@settings(max_examples=80)
def test_counts_match_brute_force(frame, t_blue, t_diff):
    t = Thresholds(t_blue, t_diff)
    roi_n, green_n = brute_counts(frame, t)
    roi = roi_mask(frame, t_blue)
    green = green_mask(frame, roi, t_diff)
    assert (roi.count(), green.count()) == (roi_n, green_n)
    assert green.issubset(roi)
    if roi_n:
        report, _, _ = analyze_frame(frame, t)
        assert (report.roi_pixels, report.green_pixels) == (roi_n, green_n)


@given(frames(), st.integers(0, 256), st.integers(0, 256), st.integers(-255, 256), st.integers(-255, 256))
@settings(max_examples=80)
def test_monotone_in_thresholds(frame, b1, b2, d1, d2):
    b1, b2 = sorted((b1, b2))
    d1, d2 = sorted((d1, d2))
    assert roi_mask(frame, b1).issubset(roi_mask(frame, b2))
    roi = roi_mask(frame, b2)
    assert green_mask(frame, roi, d1).issubset(green_mask(frame, roi, d2))


@given(frames())
def test_threshold_extremes(frame):
    n = frame.width * frame.height
    assert roi_mask(frame, 0).count() == 0
    roi = roi_mask(frame, 256)
    assert roi.count() == n
    assert green_mask(frame, roi, -255).count() == 0
    assert green_mask(frame, roi, 256) == roi


def test_capture_clean_synthetic_frame():
    frame, _ = generate_corpus(1, (64, 48), seed=1, fraction=0.3)[0]
    assert validate_capture(frame) == []


def test_capture_all_white():
    assert validate_capture(Frame.filled(10, 8, WHITE)) == []


def test_capture_left_column_russet():
    w, h = 10, 8
    data = np.full((h, w, 3), 255, np.uint8)
    data[:, 0] = RUSSET
    warnings = validate_capture(Frame.from_array(data))
    assert len(warnings) == 1
    assert warnings[0].kind is WarningKind.BACKGROUND_NOT_WHITE
    ring = 2 * (w + h) - 4
    assert warnings[0].border_roi_fraction == pytest.approx(h / ring)
    assert warnings[0].border_roi_fraction >= h / (2 * (w + h) - 4)


def test_capture_gray_border_reads_as_shadow():
    w, h = 20, 20
    data = np.full((h, w, 3), 255, np.uint8)
    data[-1, :] = (110, 110, 105)
    data[-2, :] = (110, 110, 105)
    warnings = validate_capture(Frame.from_array(data))
    assert [x.kind for x in warnings] == [WarningKind.SUSPECTED_SHADOW]
    assert "suspected_shadow" in str(warnings[0])


def test_capture_small_intrusion_tolerated():
    w, h = 40, 30
    data = np.full((h, w, 3), 255, np.uint8)
    data[0, :3] = RUSSET  # 3 of 136 ring pixels, under 5%
    assert validate_capture(Frame.from_array(data)) == []


def test_capture_warning_does_not_change_report():
    data = np.full((8, 8, 3), 255, np.uint8)
    data[:, 0] = RUSSET
    data[3:5, 3:5] = (90, 140, 60)
    f = Frame.from_array(data)
    assert validate_capture(f)
    report, _, _ = analyze_frame(f)
    assert (report.roi_pixels, report.green_pixels) == (12, 4)
