"""Binary PGM/PPM parsing and emission, Bayer mosaicing, sequence loading.

Only the binary netpbm variants are supported (P5 for single-channel
frames, P6 for RGB), maxval 255, one sample byte per channel. Emission and
parsing round-trip bit-exactly.
"""

import os
from dataclasses import dataclass
from enum import IntEnum

import numpy as np


class ImageFormatError(ValueError):
    """Base class for frame parsing and geometry errors."""


class BadMagicError(ImageFormatError):
    pass


class BadMaxvalError(ImageFormatError):
    pass


class TruncatedDataError(ImageFormatError):
    pass


class DimensionError(ImageFormatError):
    pass


class SequenceError(ImageFormatError):
    pass


class BayerPattern(IntEnum):
    """2x2 Bayer phase; the value doubles as the container header code."""

    RGGB = 0
    GRBG = 1
    GBRG = 2
    BGGR = 3

    @classmethod
    def from_name(cls, name: str) -> "BayerPattern":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown Bayer pattern {name!r}") from None


# RGB channel index captured at each (row parity, col parity)
_PATTERN_CHANNELS = {
    BayerPattern.RGGB: ((0, 1), (1, 2)),
    BayerPattern.GRBG: ((1, 0), (2, 1)),
    BayerPattern.GBRG: ((1, 2), (0, 1)),
    BayerPattern.BGGR: ((2, 1), (1, 0)),
}


@dataclass(eq=False)
class CfaFrame:
    """Single-channel 8-bit frame plus the Bayer phase it was sampled with."""

    samples: np.ndarray  # (height, width) uint8
    pattern: BayerPattern = BayerPattern.RGGB

    def __post_init__(self):
        if self.samples.ndim != 2:
            raise DimensionError("CFA samples must be a 2-D array")
        if self.samples.dtype != np.uint8:
            raise ValueError("CFA samples must be uint8")
        if self.samples.size == 0:
            raise DimensionError("CFA frame must have nonzero dimensions")

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CfaFrame):
            return NotImplemented
        return self.pattern == other.pattern and np.array_equal(self.samples, other.samples)


@dataclass(eq=False)
class RgbFrame:
    """8-bit RGB frame, row-major (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise DimensionError("RGB pixels must be a (h, w, 3) array")
        if self.pixels.dtype != np.uint8:
            raise ValueError("RGB pixels must be uint8")
        if self.pixels.size == 0:
            raise DimensionError("RGB frame must have nonzero dimensions")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RgbFrame):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)


_WHITESPACE = b" \t\n\r\x0b\x0c"


def _scan_header(data: bytes, magic: bytes) -> tuple[int, int, int]:
    """Parse a netpbm header; returns (width, height, raster offset).

    Accepts '#' comment lines anywhere in the header and requires exactly
    one whitespace byte between the maxval and the raster.
    """
    if data[:2] != magic:
        raise BadMagicError(f"expected magic {magic.decode()!r}, got {data[:2]!r}")
    pos = 2
    fields = []
    names = ("width", "height", "maxval")
    while len(fields) < 3:
        while pos < len(data):
            ch = data[pos]
            if ch in _WHITESPACE:
                pos += 1
            elif ch == 0x23:  # '#' comment runs to end of line
                eol = data.find(b"\n", pos)
                pos = len(data) if eol < 0 else eol + 1
            else:
                break
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos] != 0x23:
            pos += 1
        token = data[start:pos]
        if not token:
            raise TruncatedDataError(f"header ended while reading {names[len(fields)]}")
        if not token.isdigit():
            if len(fields) == 2:
                raise BadMaxvalError(f"malformed maxval {token!r}")
            raise DimensionError(f"malformed {names[len(fields)]} {token!r}")
        fields.append(int(token))
    width, height, maxval = fields
    if maxval != 255:
        raise BadMaxvalError(f"only maxval 255 is supported, got {maxval}")
    if width == 0 or height == 0:
        raise DimensionError(f"zero dimension {width}x{height}")
    if pos >= len(data):
        raise TruncatedDataError("no raster data after header")
    if data[pos] not in _WHITESPACE:
        raise TruncatedDataError("missing whitespace between maxval and raster")
    return width, height, pos + 1


def _read_raster(data: bytes, offset: int, count: int) -> np.ndarray:
    if len(data) - offset < count:
        raise TruncatedDataError(f"raster needs {count} bytes, found {len(data) - offset}")
    return np.frombuffer(data, dtype=np.uint8, count=count, offset=offset)


def parse_pgm(data: bytes, pattern: BayerPattern = BayerPattern.RGGB) -> CfaFrame:
    """Parse a binary PGM (P5, maxval 255) into a CFA frame."""
    width, height, offset = _scan_header(data, b"P5")
    raster = _read_raster(data, offset, width * height)
    return CfaFrame(raster.reshape(height, width).copy(), pattern)


def emit_pgm(frame: CfaFrame) -> bytes:
    """Serialize a CFA frame as binary PGM; parse_pgm inverts this bit-exactly."""
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.samples.tobytes()


def parse_ppm(data: bytes) -> RgbFrame:
    """Parse a binary PPM (P6, maxval 255) into an RGB frame."""
    width, height, offset = _scan_header(data, b"P6")
    raster = _read_raster(data, offset, width * height * 3)
    return RgbFrame(raster.reshape(height, width, 3).copy())


def emit_ppm(frame: RgbFrame) -> bytes:
    header = f"P6\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.pixels.tobytes()


def mosaic(frame: RgbFrame, pattern: BayerPattern = BayerPattern.RGGB) -> CfaFrame:
    """Keep one RGB channel per pixel according to the 2x2 Bayer phase.

    Requires even dimensions so the 2x2 pattern tiles the frame exactly.
    """
    if frame.width % 2 or frame.height % 2:
        raise DimensionError(f"mosaic needs even dimensions, got {frame.width}x{frame.height}")
    channels = _PATTERN_CHANNELS[pattern]
    out = np.empty((frame.height, frame.width), dtype=np.uint8)
    for row_par in (0, 1):
        for col_par in (0, 1):
            chan = channels[row_par][col_par]
            out[row_par::2, col_par::2] = frame.pixels[row_par::2, col_par::2, chan]
    return CfaFrame(out, pattern)


def load_sequence(paths: list[str | os.PathLike], pattern: BayerPattern = BayerPattern.RGGB) -> list[CfaFrame]:
    """Load an ordered PGM sequence; all frames must share dimensions."""
    if not paths:
        raise SequenceError("empty frame sequence")
    frames = []
    for path in paths:
        with open(path, "rb") as fh:
            frame = parse_pgm(fh.read(), pattern)
        if frames and (frame.width, frame.height) != (frames[0].width, frames[0].height):
            raise SequenceError(
                f"{path}: {frame.width}x{frame.height} does not match "
                f"{frames[0].width}x{frames[0].height}"
            )
        frames.append(frame)
    return frames
