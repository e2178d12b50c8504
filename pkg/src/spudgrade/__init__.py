"""Potato greening detection and grading, with a pixel-serial hardware model."""

from spudgrade.core import (
    Frame,
    Grade,
    GradeReport,
    NoRoiError,
    RgbPixel,
    SpudGradeError,
    Thresholds,
    classify_grade,
    percentage_centi,
)

__version__ = "0.1.0"

__all__ = [
    "Frame",
    "Grade",
    "GradeReport",
    "NoRoiError",
    "RgbPixel",
    "SpudGradeError",
    "Thresholds",
    "classify_grade",
    "percentage_centi",
]
