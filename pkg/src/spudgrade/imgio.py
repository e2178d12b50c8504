"""Lossless raster I/O.

Binary PPM (P6, maxval 255) is the mandatory format. PNG is read and written
through Pillow when it is installed. Lossy formats are refused outright since
compression artifacts shift the comparator decisions.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from spudgrade.core import Frame, SpudGradeError

_WHITESPACE = b" \t\n\r\v\f"


class ImageFormatError(SpudGradeError, ValueError):
    pass


class BadMagic(ImageFormatError):
    pass


class UnsupportedMaxval(ImageFormatError):
    pass


class Truncated(ImageFormatError):
    pass


class Malformed(ImageFormatError):
    pass


class UnknownFormat(ImageFormatError):
    pass


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Pull ``count`` whitespace-separated tokens, skipping '#' comments.

    Returns the tokens and the offset of the single whitespace byte that
    terminates the last one.
    """
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in _WHITESPACE:
            pos += 1
        if pos >= n:
            raise Truncated("header ended early")
        if data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def read_ppm(data: bytes) -> Frame:
    if data[:2] != b"P6":
        raise BadMagic(f"expected P6 magic, got {data[:2]!r}")
    if len(data) > 2 and data[2] not in _WHITESPACE and data[2] != ord("#"):
        raise BadMagic(f"expected P6 magic, got {data[:3]!r}")

    tokens, pos = _header_tokens(data[2:], 3)
    pos += 2
    try:
        width, height, maxval = (int(t.decode("ascii")) for t in tokens)
    except (UnicodeDecodeError, ValueError):
        raise Malformed(f"non-numeric header fields {tokens!r}") from None
    if any(not t.isdigit() for t in tokens):
        raise Malformed(f"non-numeric header fields {tokens!r}")
    if width < 1 or height < 1:
        raise Malformed(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxval(f"maxval {maxval} (only 255 is supported)")
    if pos >= len(data):
        raise Truncated("header ends at maxval")
    if data[pos] not in _WHITESPACE:
        raise Malformed("maxval must be followed by a single whitespace byte")

    start = pos + 1
    size = 3 * width * height
    raster = data[start:start + size]
    if len(raster) < size:
        raise Truncated(f"raster has {len(raster)} of {size} bytes")
    array = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)
    return Frame(width, height, array)


def write_ppm(frame: Frame) -> bytes:
    header = f"P6\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.data.tobytes()


def _read_png(path: Path) -> Frame:
    from PIL import Image

    with Image.open(path) as im:
        if im.format != "PNG":
            raise UnknownFormat(f"{path} is not a PNG file")
        if im.mode not in ("RGB", "RGBA", "P", "L"):
            raise UnknownFormat(f"unsupported PNG mode {im.mode}")
        array = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return Frame.from_array(array)


def _write_png(frame: Frame, path: Path) -> None:
    from PIL import Image

    Image.fromarray(frame.data, mode="RGB").save(path, format="PNG")


def load_image(path) -> Frame:
    path = Path(path)
    ext = path.suffix.lower()
    if ext in (".ppm", ".pnm"):
        return read_ppm(path.read_bytes())
    if ext == ".png":
        return _read_png(path)
    raise UnknownFormat(f"unsupported image extension {ext or '(none)'!r}")


def save_image(frame: Frame, path) -> None:
    path = Path(path)
    ext = path.suffix.lower()
    if ext in (".ppm", ".pnm"):
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_bytes(write_ppm(frame))
        os.replace(tmp, path)
    elif ext == ".png":
        _write_png(frame, path)
    else:
        raise UnknownFormat(f"unsupported image extension {ext or '(none)'!r}")


SUPPORTED_EXTENSIONS = (".ppm", ".pnm", ".png")
