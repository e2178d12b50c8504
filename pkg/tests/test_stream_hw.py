import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spudgrade import stream_hw
from spudgrade.core import Frame, Grade, NoRoiError, Thresholds, WHITE
from spudgrade.frame_ref import analyze_frame, render_overlay
from spudgrade.stream_hw import (
    ClockConfig,
    LengthMismatch,
    PipelineState,
    PixelStream,
    deserialize,
    estimate_hw_time,
    grade_from_counters,
    run_stream,
    serialize,
    step,
)

from conftest import frames, random_frame


def test_serialize_order_2x2():
    f = Frame.from_pixels(2, 2, [(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0)])
    emitted = [p.r for p in serialize(f)]
    # (0,0), (1,0), (0,1), (1,1)
    assert emitted == [f.pixel(0, 0).r, f.pixel(1, 0).r, f.pixel(0, 1).r, f.pixel(1, 1).r] == [0, 1, 2, 3]


def test_640x480_stream_length():
    s = serialize(Frame.filled(640, 480))
    assert len(s) == 640 * 480 == 307200


@given(frames())
def test_round_trips(frame):
    s = serialize(frame)
    assert deserialize(s) == frame
    assert serialize(deserialize(s)) == s


def test_deserialize_length_mismatch():
    s = PixelStream.from_pixels(2, 2, [(0, 0, 0)] * 3)
    with pytest.raises(LengthMismatch):
        deserialize(s)
    with pytest.raises(LengthMismatch):
        run_stream(s)


def test_deserialize_1x1():
    assert deserialize(PixelStream(1, 1, b"\x01\x02\x03")).pixel(0, 0) == (1, 2, 3)


def test_step_white_pixel():
    s0 = PipelineState.reset(4, 4)
    s1, out, green = step(s0, (255, 255, 255), Thresholds())
    assert (s1.roi_counter, s1.green_counter, s1.pixels_seen) == (0, 0, 1)
    assert tuple(out) == (255, 255, 255) and not green


def test_step_green_pixel():
    t = Thresholds()
    s1, out, green = step(PipelineState.reset(4, 4), (90, 140, 60), t)
    assert (s1.roi_counter, s1.green_counter) == (1, 1)
    assert out == t.marker and green


def test_step_russet_pixel():
    s1, out, green = step(PipelineState.reset(4, 4), (150, 100, 60), Thresholds())
    assert (s1.roi_counter, s1.green_counter) == (1, 0)
    assert tuple(out) == (150, 100, 60) and not green


def test_step_refuses_overrun():
    s = PipelineState.reset(1, 1)
    s, _, _ = step(s, (0, 0, 0), Thresholds())
    with pytest.raises(Exception):
        step(s, (0, 0, 0), Thresholds())


def test_hand_frame_stream(hand_frame):
    report, overlay, stats = run_stream(serialize(hand_frame))
    ref, _, green = analyze_frame(hand_frame)
    assert report.same_result(ref)
    assert report.backend == "stream"
    assert overlay == render_overlay(hand_frame, green, Thresholds().marker)
    assert stats.cycles == 16 + 3


def test_empty_roi_stream():
    with pytest.raises(NoRoiError):
        run_stream(serialize(Frame.filled(5, 5, WHITE)))


@given(frames(max_side=20), st.integers(0, 256), st.integers(-255, 256))
@settings(max_examples=80)
def test_backend_equivalence(frame, t_blue, t_diff):
    t = Thresholds(t_blue, t_diff, marker=(1, 2, 3))
    try:
        ref, _, green = analyze_frame(frame, t)
    except NoRoiError:
        with pytest.raises(NoRoiError):
            run_stream(serialize(frame), t)
        return
    report, overlay, _ = run_stream(serialize(frame), t)
    assert report.same_result(ref)
    assert overlay == render_overlay(frame, green, t.marker)


def test_one_pass_and_monotone_counters(monkeypatch):
    frame = random_frame(np.random.default_rng(5), 13, 7)
    calls = []
    real_step = stream_hw.step

    def spy(state, pixel, thresholds):
        nxt = real_step(state, pixel, thresholds)
        calls.append((state, nxt[0]))
        return nxt

    monkeypatch.setattr(stream_hw, "step", spy)
    run_stream(serialize(frame))
    assert len(calls) == 13 * 7
    for before, after in calls:
        assert after.roi_counter >= before.roi_counter
        assert after.green_counter >= before.green_counter
        assert after.pixels_seen == before.pixels_seen + 1
        assert after.green_counter <= after.roi_counter <= after.pixels_seen


def test_counter_width_sufficient_all_green_640x480():
    frame = Frame.filled(640, 480, (90, 140, 60))
    report, _, stats = run_stream(serialize(frame))
    assert PipelineState.reset(640, 480).counter_bits == 19
    assert report.roi_pixels == report.green_pixels == 307200 < 2**19
    assert report.grade is Grade.SERIOUSLY_DAMAGED


def test_counters_wrap_if_undersized():
    # a deliberately narrow register shows the masking is real
    s = PipelineState(3, 3, 3, 10, 2)
    s, _, _ = step(s, (90, 140, 60), Thresholds())
    assert (s.roi_counter, s.green_counter) == (0, 0)


def test_cycle_model_640x480():
    _, _, stats = run_stream(serialize(Frame.filled(640, 480, (150, 100, 60))))
    assert stats.cycles == 307203
    assert stats.latency == 3
    assert stats.estimated_time_ns == pytest.approx(307203 * 10.169, abs=1e-6)
    assert abs(stats.estimated_time_ns - 3_123_947.3) <= 0.1


def test_latency_configurable():
    _, _, stats = run_stream(serialize(Frame.filled(4, 4, (150, 100, 60))), latency=0)
    assert stats.cycles == 16


def test_estimate_hw_time():
    assert estimate_hw_time(307200, ClockConfig(10.169)) == pytest.approx(3_123_916.8, abs=1e-6)
    assert estimate_hw_time(0, ClockConfig(3.0)) == 0
    assert estimate_hw_time(1) == pytest.approx(10.169)
    assert estimate_hw_time(1000, ClockConfig(2 * 10.169)) == pytest.approx(2 * estimate_hw_time(1000))
    with pytest.raises(ValueError):
        ClockConfig(0)
    with pytest.raises(ValueError):
        estimate_hw_time(-1)


def test_grade_from_counters_matches_core():
    from spudgrade.core import classify_grade

    for r in range(1, 120):
        for g in range(r + 1):
            assert grade_from_counters(g, r) is classify_grade(g, r)
    with pytest.raises(NoRoiError):
        grade_from_counters(0, 0)
