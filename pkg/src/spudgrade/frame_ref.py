"""Frame-at-once reference backend.

Masks are materialized as whole boolean rasters so each intermediate can be
inspected or plotted. This is the verification reference for the streaming
model in :mod:`spudgrade.stream_hw`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from spudgrade.core import Frame, GradeReport, NoRoiError, RgbPixel, Thresholds

BORDER_ROI_LIMIT = 0.05
# max(r, g, b) - min(r, g, b) at or below this reads as gray, i.e. shadow-like
SHADOW_CHROMA_MAX = 24


@dataclass(frozen=True, eq=False)
class BitMask:
    width: int
    height: int
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (self.height, self.width):
            raise ValueError(f"mask shape {bits.shape} does not match {self.width}x{self.height}")
        bits = bits.copy()
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def coordinates(self) -> set[tuple[int, int]]:
        ys, xs = np.nonzero(self.bits)
        return set(zip(xs.tolist(), ys.tolist()))

    def issubset(self, other: "BitMask") -> bool:
        return not np.any(self.bits & ~other.bits)

    def __getitem__(self, xy) -> bool:
        x, y = xy
        return bool(self.bits[y, x])

    def __eq__(self, other):
        if not isinstance(other, BitMask):
            return NotImplemented
        return self.bits.shape == other.bits.shape and np.array_equal(self.bits, other.bits)

    __hash__ = None


class WarningKind(enum.Enum):
    BACKGROUND_NOT_WHITE = "background_not_white"
    SUSPECTED_SHADOW = "suspected_shadow"


@dataclass(frozen=True)
class CaptureWarning:
    kind: WarningKind
    border_roi_fraction: float

    def __str__(self):
        return f"{self.kind.value}: {self.border_roi_fraction:.4f} of border ring inside ROI"


def _check_dims(frame: Frame, mask: BitMask) -> None:
    if (mask.width, mask.height) != (frame.width, frame.height):
        raise ValueError(
            f"mask {mask.width}x{mask.height} does not match frame {frame.width}x{frame.height}"
        )


def roi_mask(frame: Frame, t_blue: int) -> BitMask:
    return BitMask(frame.width, frame.height, frame.data[:, :, 2] < t_blue)


def green_mask(frame: Frame, roi: BitMask, t_diff: int) -> BitMask:
    _check_dims(frame, roi)
    # int16 holds r - g in [-255, 255] without wrapping
    diff = frame.data[:, :, 0].astype(np.int16) - frame.data[:, :, 1].astype(np.int16)
    return BitMask(frame.width, frame.height, roi.bits & (diff < t_diff))


def analyze_frame(frame: Frame, thresholds: Thresholds = Thresholds()):
    """Grade one frame.

    Returns ``(report, roi, green)``. Raises :class:`NoRoiError` when no pixel
    passes the blue cut (an all-white frame, for instance).
    """
    roi = roi_mask(frame, thresholds.t_blue)
    green = green_mask(frame, roi, thresholds.t_diff)
    roi_count = roi.count()
    if roi_count == 0:
        raise NoRoiError()
    report = GradeReport.from_counts(green.count(), roi_count, "frame", thresholds)
    return report, roi, green


def render_overlay(frame: Frame, green: BitMask, marker: RgbPixel) -> Frame:
    _check_dims(frame, green)
    out = frame.data.copy()
    out[green.bits] = tuple(RgbPixel(*marker).validate())
    return Frame(frame.width, frame.height, out)


def border_ring(frame: Frame) -> np.ndarray:
    """Pixels of the one-pixel outer ring, each counted once, as an (N, 3) array."""
    data = frame.data
    if frame.height <= 2 or frame.width <= 2:
        return data.reshape(-1, 3)
    return np.concatenate([
        data[0, :],
        data[-1, :],
        data[1:-1, 0],
        data[1:-1, -1],
    ])


def validate_capture(frame: Frame, thresholds: Thresholds = Thresholds()) -> list[CaptureWarning]:
    """Check the capture conditions the thresholding relies on.

    The outer ring of a good capture is white background. If more than 5% of
    ring pixels pass the ROI cut, a warning is returned. Gray intruders are
    reported as a suspected shadow, anything else as a non-white background.
    Warnings are advisory and never alter grading.
    """
    ring = border_ring(frame)
    in_roi = ring[:, 2] < thresholds.t_blue
    hits = int(np.count_nonzero(in_roi))
    fraction = hits / len(ring)
    if fraction <= BORDER_ROI_LIMIT:
        return []
    intruders = ring[in_roi].astype(np.int16)
    chroma = intruders.max(axis=1) - intruders.min(axis=1)
    gray = int(np.count_nonzero(chroma <= SHADOW_CHROMA_MAX))
    kind = WarningKind.SUSPECTED_SHADOW if 2 * gray > hits else WarningKind.BACKGROUND_NOT_WHITE
    return [CaptureWarning(kind, fraction)]
