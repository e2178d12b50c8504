"""Domain types shared by every backend, plus the integer grading arithmetic.

All grading math is exact integer arithmetic. Percentages are carried as
centi-percent (hundredths of a percent) so that a hardware implementation
and the software reference can agree bit-for-bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

import numpy as np


class SpudGradeError(Exception):
    """Base class for all errors raised by this package."""


class NoRoiError(SpudGradeError):
    """The region of interest is empty, so no percentage can be computed."""

    def __init__(self, message: str = "no pixels fall inside the region of interest"):
        super().__init__(message)


class RgbPixel(NamedTuple):
    r: int
    g: int
    b: int

    def validate(self) -> "RgbPixel":
        for name, value in zip("rgb", self):
            if not isinstance(value, (int, np.integer)) or not 0 <= value <= 255:
                raise ValueError(f"channel {name}={value!r} outside [0, 255]")
        return self


WHITE = RgbPixel(255, 255, 255)
RUSSET = RgbPixel(150, 100, 60)
GREEN_SKIN = RgbPixel(90, 140, 60)
PURE_GREEN = RgbPixel(0, 255, 0)

DEFAULT_T_BLUE = 200
DEFAULT_T_DIFF = 20


@dataclass(frozen=True, eq=False)
class Frame:
    """An 8-bit RGB raster.

    ``data`` has shape ``(height, width, 3)`` and dtype ``uint8``; flattening it
    in C order gives the row-major pixel sequence (x fastest, top row first).
    The array is stored read-only.
    """

    width: int
    height: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"frame dimensions must be positive, got {self.width}x{self.height}")
        data = np.asarray(self.data)
        if data.shape != (self.height, self.width, 3):
            raise ValueError(
                f"pixel array shape {data.shape} does not match "
                f"{self.width}x{self.height}x3"
            )
        if data.dtype != np.uint8:
            raise ValueError(f"pixel array must be uint8, got {data.dtype}")
        data = np.array(data, dtype=np.uint8, copy=True, order="C")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, array) -> "Frame":
        array = np.asarray(array)
        if array.ndim != 3 or array.shape[2] != 3:
            raise ValueError(f"expected an (H, W, 3) array, got shape {array.shape}")
        if array.dtype != np.uint8:
            if array.size and (array.min() < 0 or array.max() > 255):
                raise ValueError("pixel channel outside [0, 255]")
            array = array.astype(np.uint8)
        return cls(array.shape[1], array.shape[0], array)

    @classmethod
    def from_pixels(cls, width: int, height: int, pixels: Iterable) -> "Frame":
        """Build a frame from a row-major sequence of ``(r, g, b)`` triples."""
        flat = [tuple(p) for p in pixels]
        if len(flat) != width * height:
            raise ValueError(f"expected {width * height} pixels, got {len(flat)}")
        array = np.array(flat, dtype=np.int64).reshape(height, width, 3)
        if array.min(initial=0) < 0 or array.max(initial=0) > 255:
            raise ValueError("pixel channel outside [0, 255]")
        return cls(width, height, array.astype(np.uint8))

    @classmethod
    def filled(cls, width: int, height: int, color=WHITE) -> "Frame":
        array = np.empty((height, width, 3), dtype=np.uint8)
        array[...] = tuple(RgbPixel(*color).validate())
        return cls(width, height, array)

    @property
    def pixels(self) -> list[RgbPixel]:
        """Row-major list of pixels. Materializes Python objects; avoid on hot paths."""
        return [RgbPixel(*p) for p in self.data.reshape(-1, 3).tolist()]

    def pixel(self, x: int, y: int) -> RgbPixel:
        return RgbPixel(*self.data[y, x].tolist())

    def __iter__(self) -> Iterator[RgbPixel]:
        return iter(self.pixels)

    def __len__(self) -> int:
        return self.width * self.height

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.data, other.data)
        )

    __hash__ = None


@dataclass(frozen=True)
class Thresholds:
    """Comparator constants for the two per-pixel tests.

    A pixel is in the ROI iff ``b < t_blue``; an ROI pixel is green iff
    ``r - g < t_diff`` (signed). ``marker`` paints green pixels in overlays.
    """

    t_blue: int = DEFAULT_T_BLUE
    t_diff: int = DEFAULT_T_DIFF
    marker: RgbPixel = PURE_GREEN

    def __post_init__(self):
        if not 0 <= self.t_blue <= 256:
            raise ValueError(f"t_blue={self.t_blue} outside [0, 256]")
        if not -255 <= self.t_diff <= 256:
            raise ValueError(f"t_diff={self.t_diff} outside [-255, 256]")
        object.__setattr__(self, "marker", RgbPixel(*self.marker).validate())

    def in_roi(self, pixel) -> bool:
        return pixel[2] < self.t_blue

    def is_green(self, pixel) -> bool:
        return pixel[2] < self.t_blue and int(pixel[0]) - int(pixel[1]) < self.t_diff


class Grade(enum.Enum):
    NOT_DAMAGED = "not_damaged"
    DAMAGED = "damaged"
    SERIOUSLY_DAMAGED = "seriously_damaged"

    @property
    def code(self) -> int:
        """Two-bit encoding used by the hardware model."""
        return _GRADE_CODES[self]


_GRADE_CODES = {Grade.NOT_DAMAGED: 0, Grade.DAMAGED: 1, Grade.SERIOUSLY_DAMAGED: 2}


def _check_counts(green: int, roi: int) -> None:
    if roi < 1:
        raise NoRoiError()
    if not 0 <= green <= roi:
        raise ValueError(f"green count {green} must lie in [0, roi={roi}]")


def classify_grade(green: int, roi: int) -> Grade:
    """USDA aggregate-surface grade from pixel counts.

    Seriously damaged when green covers more than half the ROI, damaged when
    it covers more than a quarter. Cross-multiplied, so exact at the limits.
    """
    _check_counts(green, roi)
    if 2 * green > roi:
        return Grade.SERIOUSLY_DAMAGED
    if 4 * green > roi:
        return Grade.DAMAGED
    return Grade.NOT_DAMAGED


def percentage_centi(green: int, roi: int) -> int:
    """Green share of the ROI in hundredths of a percent, rounded half-up."""
    _check_counts(green, roi)
    return (10000 * green + roi // 2) // roi


def counter_bits(width: int, height: int) -> int:
    """Register width able to hold any count from 0 to ``width * height``."""
    return max(1, (width * height).bit_length())


def format_percent(percent_centi: int) -> str:
    return f"{percent_centi // 100}.{percent_centi % 100:02d}"


@dataclass(frozen=True)
class GradeReport:
    roi_pixels: int
    green_pixels: int
    percent_centi: int
    grade: Grade
    backend: str
    thresholds: Thresholds

    @classmethod
    def from_counts(cls, green: int, roi: int, backend: str, thresholds: Thresholds) -> "GradeReport":
        return cls(
            roi_pixels=roi,
            green_pixels=green,
            percent_centi=percentage_centi(green, roi),
            grade=classify_grade(green, roi),
            backend=backend,
            thresholds=thresholds,
        )

    def same_result(self, other: "GradeReport") -> bool:
        """True when counts, percentage and grade agree (backend tag ignored)."""
        return (
            self.roi_pixels == other.roi_pixels
            and self.green_pixels == other.green_pixels
            and self.percent_centi == other.percent_centi
            and self.grade == other.grade
        )
