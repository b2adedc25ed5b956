"""Lossless inter-frame codec for Bayer-CFA image sequences."""

from .codec import (
    CodecParams,
    DecodeError,
    ParamError,
    decode_sequence,
    encode_sequence,
    pad_frame,
    stream_stats,
)
from .frames import (
    BayerPattern,
    CfaFrame,
    RgbFrame,
    emit_pgm,
    load_sequence,
    mosaic,
    parse_pgm,
    parse_ppm,
)

__version__ = "0.1.0"

__all__ = [
    "BayerPattern",
    "CfaFrame",
    "CodecParams",
    "DecodeError",
    "ParamError",
    "RgbFrame",
    "decode_sequence",
    "emit_pgm",
    "encode_sequence",
    "load_sequence",
    "mosaic",
    "pad_frame",
    "parse_pgm",
    "parse_ppm",
    "stream_stats",
]
