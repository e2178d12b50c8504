"""Pixel-serial model of the hardware pipeline.

One pixel enters per clock in raster order. The per-pixel datapath is a blue
comparator, a signed 9-bit R-G subtractor with a comparator, two counters sized
from the frame dimensions, and an overlay mux. Nothing in the
per-pixel path divides, multiplies or touches floating point. Grade and
percentage are resolved once per frame after the last pixel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from spudgrade.core import (
    Frame,
    Grade,
    GradeReport,
    NoRoiError,
    RgbPixel,
    SpudGradeError,
    Thresholds,
    counter_bits,
    percentage_centi,
)

DEFAULT_CLOCK_NS = 10.169
DEFAULT_LATENCY = 3


class LengthMismatch(SpudGradeError, ValueError):
    pass


@dataclass(frozen=True)
class PixelStream:
    """Serialized pixels: ``data`` holds R, G, B octets in emission order."""

    width: int
    height: int
    data: bytes

    @classmethod
    def from_pixels(cls, width: int, height: int, pixels: Iterable) -> "PixelStream":
        raw = bytearray()
        for p in pixels:
            raw.extend(RgbPixel(*p).validate())
        return cls(width, height, bytes(raw))

    def __len__(self) -> int:
        return len(self.data) // 3

    def __iter__(self) -> Iterator[RgbPixel]:
        it = iter(self.data)
        return (RgbPixel(r, g, b) for r, g, b in zip(it, it, it))


class PipelineState(NamedTuple):
    roi_counter: int
    green_counter: int
    pixels_seen: int
    frame_pixels: int
    counter_bits: int

    @classmethod
    def reset(cls, width: int, height: int) -> "PipelineState":
        return cls(0, 0, 0, width * height, counter_bits(width, height))


@dataclass(frozen=True)
class ClockConfig:
    period_ns: float = DEFAULT_CLOCK_NS

    def __post_init__(self):
        if not self.period_ns > 0:
            raise ValueError(f"clock period must be positive, got {self.period_ns}")


@dataclass(frozen=True)
class CycleStats:
    cycles: int
    latency: int
    clock_period_ns: float
    estimated_time_ns: float


def serialize(frame: Frame) -> PixelStream:
    # C-order flattening of (H, W, 3) is exactly row-major, top row first
    return PixelStream(frame.width, frame.height, frame.data.tobytes())


def deserialize(stream: PixelStream) -> Frame:
    expected = stream.width * stream.height
    if len(stream.data) != 3 * expected:
        raise LengthMismatch(
            f"stream carries {len(stream.data) / 3:g} pixels, "
            f"{stream.width}x{stream.height} needs {expected}"
        )
    array = np.frombuffer(stream.data, dtype=np.uint8).reshape(stream.height, stream.width, 3)
    return Frame(stream.width, stream.height, array)


def step(state: PipelineState, pixel, thresholds: Thresholds):
    """Clock one pixel through the datapath.

    Returns ``(next_state, overlay_pixel, is_green)``.
    """
    roi, green, seen, limit, bits = state
    if seen >= limit:
        raise SpudGradeError(f"pipeline already consumed all {limit} pixels of the frame")
    r, g, b = pixel
    mask = (1 << bits) - 1
    seen += 1
    if b < thresholds.t_blue:
        roi = (roi + 1) & mask
        if r - g < thresholds.t_diff:
            green = (green + 1) & mask
            return PipelineState(roi, green, seen, limit, bits), thresholds.marker, True
    return PipelineState(roi, green, seen, limit, bits), pixel, False


def grade_from_counters(green: int, roi: int) -> Grade:
    """Frame-end grade decision using shifts and compares only."""
    if roi == 0:
        raise NoRoiError()
    if (green << 1) > roi:
        return Grade.SERIOUSLY_DAMAGED
    if (green << 2) > roi:
        return Grade.DAMAGED
    return Grade.NOT_DAMAGED


def estimate_hw_time(cycles: int, clock: ClockConfig = ClockConfig()) -> float:
    if cycles < 0:
        raise ValueError("cycle count must be non-negative")
    return cycles * clock.period_ns


def cycle_stats(pixels: int, clock: ClockConfig = ClockConfig(), latency: int = DEFAULT_LATENCY) -> CycleStats:
    cycles = pixels + latency
    return CycleStats(cycles, latency, clock.period_ns, estimate_hw_time(cycles, clock))


def run_stream(
    stream: PixelStream,
    thresholds: Thresholds = Thresholds(),
    clock: ClockConfig = ClockConfig(),
    latency: int = DEFAULT_LATENCY,
):
    """Fold :func:`step` over the stream once.

    Returns ``(report, overlay_frame, cycle_stats)``.
    """
    if latency < 0:
        raise ValueError("latency must be non-negative")
    n = stream.width * stream.height
    if len(stream.data) != 3 * n:
        raise LengthMismatch(f"stream length does not match {stream.width}x{stream.height}")

    state = PipelineState.reset(stream.width, stream.height)
    overlay = bytearray(stream.data)
    marker = bytes(thresholds.marker)
    it = iter(stream.data)
    offset = 0
    for pixel in zip(it, it, it):
        state, _, is_green = step(state, pixel, thresholds)
        if is_green:
            overlay[offset:offset + 3] = marker
        offset += 3

    grade = grade_from_counters(state.green_counter, state.roi_counter)
    report = GradeReport(
        roi_pixels=state.roi_counter,
        green_pixels=state.green_counter,
        percent_centi=percentage_centi(state.green_counter, state.roi_counter),
        grade=grade,
        backend="stream",
        thresholds=thresholds,
    )
    overlay_frame = deserialize(PixelStream(stream.width, stream.height, bytes(overlay)))
    return report, overlay_frame, cycle_stats(n, clock, latency)
