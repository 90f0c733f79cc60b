"""8-bit image buffers with binary PPM/PGM (P6/P5) reading and writing."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class ImageFormatError(Exception):
    """Raised when a PPM/PGM stream does not parse."""


@dataclass(frozen=True)
class ImageBuf:
    """A height x width x channels block of uint8 samples.

    channels is 1 (grayscale) or 3 (RGB); row 0 is the top of the image.
    """

    width: int
    height: int
    channels: int
    samples: np.ndarray

    def __post_init__(self):
        if self.channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {self.channels}")
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")
        samples = np.ascontiguousarray(self.samples, dtype=np.uint8)
        if samples.shape != (self.height, self.width, self.channels):
            raise ValueError(
                f"samples shape {samples.shape} does not match "
                f"({self.height}, {self.width}, {self.channels})"
            )
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __eq__(self, other):
        if not isinstance(other, ImageBuf):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.channels == other.channels
            and np.array_equal(self.samples, other.samples)
        )

    def __hash__(self):
        return hash((self.width, self.height, self.channels, self.samples.tobytes()))

    def to_gray(self) -> "ImageBuf":
        """Rec. 601 luma; fractions of exactly .5 round up."""
        if self.channels == 1:
            return self
        rgb = self.samples.astype(np.float64)
        luma = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
        gray = np.floor(luma + 0.5).astype(np.uint8)
        return ImageBuf(self.width, self.height, 1, gray[:, :, np.newaxis])

    def crop(self, x: int, y: int, width: int, height: int) -> "ImageBuf":
        if x < 0 or y < 0 or x + width > self.width or y + height > self.height:
            raise ValueError("crop window extends outside the image")
        return ImageBuf(width, height, self.channels, self.samples[y : y + height, x : x + width])


def _read_header_tokens(data: bytes, count: int, start: int) -> tuple[list[int], int]:
    """Pull `count` whitespace-separated integers, honoring # comments."""
    tokens: list[int] = []
    i = start
    while len(tokens) < count:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i] == ord("#"):
            while i < len(data) and data[i] != ord("\n"):
                i += 1
            continue
        j = i
        while j < len(data) and not data[j : j + 1].isspace():
            j += 1
        if j == i:
            raise ImageFormatError("truncated header")
        token = data[i:j]
        if not token.isdigit():
            raise ImageFormatError(f"non-numeric header token {token!r}")
        tokens.append(int(token))
        i = j
    if i >= len(data) or not data[i : i + 1].isspace():
        raise ImageFormatError("missing whitespace after header")
    return tokens, i + 1


def read_ppm(path) -> ImageBuf:
    data = Path(path).read_bytes()
    if data[:2] == b"P6":
        channels = 3
    elif data[:2] == b"P5":
        channels = 1
    else:
        raise ImageFormatError(f"unsupported magic {data[:2]!r}, expected P5 or P6")
    (width, height, maxval), offset = _read_header_tokens(data, 3, 2)
    if maxval != 255:
        raise ImageFormatError(f"unsupported maxval {maxval}, only 255 is handled")
    if width < 1 or height < 1:
        raise ImageFormatError(f"bad dimensions {width}x{height}")
    expected = width * height * channels
    pixels = data[offset : offset + expected]
    if len(pixels) < expected:
        raise ImageFormatError(f"pixel data truncated: expected {expected} bytes, got {len(pixels)}")
    samples = np.frombuffer(pixels, dtype=np.uint8).reshape(height, width, channels)
    return ImageBuf(width, height, channels, samples)


def write_ppm(image: ImageBuf, path) -> None:
    magic = b"P6" if image.channels == 3 else b"P5"
    header = magic + b"\n" + f"{image.width} {image.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + image.samples.tobytes())


def image_from_array(array: np.ndarray) -> ImageBuf:
    """Wrap a (h, w), (h, w, 1) or (h, w, 3) uint8 array."""
    if array.ndim == 2:
        array = array[:, :, np.newaxis]
    if array.ndim != 3 or array.shape[2] not in (1, 3):
        raise ValueError(f"cannot interpret array of shape {array.shape} as an image")
    return ImageBuf(array.shape[1], array.shape[0], array.shape[2], array)
