"""Synthetic potato images with exact ground truth.

Each image is a white background, an elliptical tuber painted in a body
color, and one or more connected greening patches grown pixel by pixel from
seeded interior points. Ground-truth counts come from the paint loop itself.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from spudgrade.core import GREEN_SKIN, RUSSET, WHITE, Frame, RgbPixel, SpudGradeError, Thresholds
from spudgrade.imgio import write_ppm

# Fraction anchors for a corpus: both sides of the 25% and 50% grade limits.
FRACTION_ANCHORS = (0.0, 0.10, 0.22, 0.30, 0.40, 0.47, 0.55, 0.75, 1.0)


class InvalidSpec(SpudGradeError, ValueError):
    pass


@dataclass(frozen=True)
class SynthSpec:
    width: int
    height: int
    center: tuple[float, float]
    axes: tuple[float, float]
    target_fraction: float
    seed: int = 0
    body_color: RgbPixel = RUSSET
    patch_color: RgbPixel = GREEN_SKIN
    background: RgbPixel = WHITE
    patches: int = 1


@dataclass(frozen=True)
class GroundTruth:
    roi_pixels: int
    green_pixels: int
    green_coordinates: frozenset = field(repr=False)

    @property
    def fraction(self) -> float:
        return self.green_pixels / self.roi_pixels if self.roi_pixels else 0.0

    def to_json(self) -> str:
        return json.dumps({"roi_pixels": self.roi_pixels, "green_pixels": self.green_pixels})


def ellipse_mask(width: int, height: int, center, axes) -> np.ndarray:
    """Boolean (H, W) mask of pixel centers with ((x-cx)/a)^2 + ((y-cy)/b)^2 <= 1."""
    cx, cy = center
    a, b = axes
    ys, xs = np.mgrid[0:height, 0:width]
    return ((xs - cx) / a) ** 2 + ((ys - cy) / b) ** 2 <= 1.0


def _validate(spec: SynthSpec, thresholds: Thresholds, inside: np.ndarray) -> None:
    if spec.width < 3 or spec.height < 3:
        raise InvalidSpec("frame must be at least 3x3 to leave a background border")
    if spec.axes[0] <= 0 or spec.axes[1] <= 0:
        raise InvalidSpec(f"ellipse semi-axes must be positive, got {spec.axes}")
    if not 0.0 <= spec.target_fraction <= 1.0:
        raise InvalidSpec(f"target_fraction {spec.target_fraction} outside [0, 1]")
    if spec.patches < 1:
        raise InvalidSpec("at least one patch seed is required")
    if not inside.any():
        raise InvalidSpec("ellipse covers no pixel centers")
    if inside[0, :].any() or inside[-1, :].any() or inside[:, 0].any() or inside[:, -1].any():
        raise InvalidSpec("ellipse touches the border ring")

    checks = [
        (not thresholds.in_roi(spec.background), "background must fall outside the ROI"),
        (thresholds.in_roi(spec.body_color), "body color must fall inside the ROI"),
        (not thresholds.is_green(spec.body_color), "body color must not read as green"),
        (thresholds.is_green(spec.patch_color), "patch color must read as green"),
    ]
    for ok, message in checks:
        if not ok:
            raise InvalidSpec(f"{message} under {thresholds}")


def _grow_patch(inside: np.ndarray, needed: int, seeds: int, rng: np.random.Generator) -> np.ndarray:
    """Eden growth: add one random frontier pixel at a time until ``needed`` are painted."""
    height, width = inside.shape
    painted = np.zeros_like(inside)
    if needed == 0:
        return painted
    candidates = np.flatnonzero(inside)
    queued = np.zeros(inside.size, dtype=bool)
    frontier = []
    for idx in rng.choice(candidates, size=min(seeds, len(candidates)), replace=False).tolist():
        queued[idx] = True
        frontier.append(idx)

    flat_inside = inside.ravel()
    flat_painted = painted.ravel()
    count = 0
    while count < needed and frontier:
        j = int(rng.integers(len(frontier)))
        frontier[j], frontier[-1] = frontier[-1], frontier[j]
        idx = frontier.pop()
        flat_painted[idx] = True
        count += 1
        y, x = divmod(idx, width)
        for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
            if 0 <= ny < height and 0 <= nx < width:
                n = ny * width + nx
                if flat_inside[n] and not queued[n]:
                    queued[n] = True
                    frontier.append(n)
    return painted


def generate(spec: SynthSpec, thresholds: Thresholds = Thresholds()):
    """Render ``spec`` and return ``(frame, truth)``.

    The patch keeps growing until its share of the ellipse reaches the target
    or the ellipse is exhausted, so the achieved fraction is reported rather
    than the requested one.
    """
    inside = ellipse_mask(spec.width, spec.height, spec.center, spec.axes)
    _validate(spec, thresholds, inside)

    total = int(np.count_nonzero(inside))
    needed = min(total, math.ceil(Fraction(spec.target_fraction) * total))
    rng = np.random.default_rng(spec.seed)
    patch = _grow_patch(inside, needed, spec.patches, rng)

    data = np.empty((spec.height, spec.width, 3), dtype=np.uint8)
    data[...] = spec.background
    data[inside] = spec.body_color
    data[patch] = spec.patch_color

    ys, xs = np.nonzero(patch)
    truth = GroundTruth(
        roi_pixels=total,
        green_pixels=int(np.count_nonzero(patch)),
        green_coordinates=frozenset(zip(xs.tolist(), ys.tolist())),
    )
    return Frame(spec.width, spec.height, data), truth


def random_spec(rng: np.random.Generator, width: int, height: int, fraction: float, **kwargs) -> SynthSpec:
    """An ellipse of random size and placement that stays clear of the border ring."""
    half_w = (width - 3) / 2
    half_h = (height - 3) / 2
    # semi-axes >= 0.75 keep the pixel nearest the centre inside the ellipse
    a = max(0.75, rng.uniform(0.45, 0.9) * half_w)
    b = max(0.75, rng.uniform(0.45, 0.9) * half_h)
    cx = (width - 1) / 2 + rng.uniform(-1, 1) * max(0.0, half_w - a)
    cy = (height - 1) / 2 + rng.uniform(-1, 1) * max(0.0, half_h - b)
    return SynthSpec(
        width=width,
        height=height,
        center=(float(cx), float(cy)),
        axes=(float(a), float(b)),
        target_fraction=float(fraction),
        seed=int(rng.integers(2**31)),
        **kwargs,
    )


def fraction_schedule(n: int, rng: np.random.Generator) -> list[float]:
    if n <= len(FRACTION_ANCHORS):
        picks = np.linspace(0, len(FRACTION_ANCHORS) - 1, n).round().astype(int)
        return [FRACTION_ANCHORS[i] for i in picks]
    extra = rng.uniform(0.0, 1.0, n - len(FRACTION_ANCHORS))
    return list(FRACTION_ANCHORS) + [round(float(f), 4) for f in extra]


def generate_corpus(n: int, dims=(640, 480), seed: int = 0, thresholds: Thresholds = Thresholds(), fraction=None):
    """``n`` deterministic (frame, truth) pairs at fixed dimensions.

    Without ``fraction`` the targets follow :data:`FRACTION_ANCHORS`, which
    straddle both grade limits; otherwise every image uses ``fraction``.
    """
    if n < 1:
        raise ValueError("corpus size must be at least 1")
    width, height = dims
    rng = np.random.default_rng(seed)
    fractions = [fraction] * n if fraction is not None else fraction_schedule(n, rng)
    return [generate(random_spec(rng, width, height, f), thresholds) for f in fractions]


def write_corpus(corpus, out_dir, prefix: str = "potato") -> list[Path]:
    """Write ``<prefix>_NNN.ppm`` and ``<prefix>_NNN.truth.json`` pairs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    digits = max(3, len(str(len(corpus) - 1)))
    written = []
    for i, (frame, truth) in enumerate(corpus):
        name = f"{prefix}_{i:0{digits}d}"
        image_path = out_dir / f"{name}.ppm"
        image_path.write_bytes(write_ppm(frame))
        (out_dir / f"{name}.truth.json").write_text(truth.to_json() + "\n")
        written.append(image_path)
    return written
