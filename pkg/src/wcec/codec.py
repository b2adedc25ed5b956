"""Container format and the encode/decode pipeline.

A WCEC container is a 19-byte header followed by one record per frame.
All multi-byte fields are little-endian.

Header::

    magic            4 bytes  "WCEC"
    version          u8       1
    width, height    u16 x2   original frame dimensions
    block_size       u8
    search_radius    u8
    bayer_pattern    u8       0=RGGB 1=GRBG 2=GBRG 3=BGGR
    flags            u8       bit0 smooth, bit1 cfa-phase, bit2 recode-residuals
    threshold        u16      classifier threshold, fixed-point x10
    frame_count      u32

Frame record: frame type (u8, 0=intra 1=inter), payload length (u32),
then the byte-aligned bit payload. Frames are coded at dimensions padded
up to the block grid (edge replication); the header keeps the original
dimensions so decoding crops back.

Intra payload: Rice-coded zigzagged MED prediction residuals in raster
order. Inter payload, per block in raster order: a 6-bit motion vector
(3 bits dy then 3 bits dx, each biased by +3), then either a DPCM payload
(raw 8-bit seed plus Rice-coded differences) when the vector is the
smooth marker (dx=4, dy=0), or Rice-coded motion residuals. With the
recode flag, motion residuals are assembled into a frame-sized plane
(zero in smooth blocks) and MED-predicted (corner seed 0) before Rice
coding. Each data class (intra, inter, DPCM) has its own Rice context,
reset at every frame payload.
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from .classify import _gradient_map, smooth_block_mask
from .entropy import BitSink, BitSource, RiceContext, decode_signed, encode_signed
from .frames import BayerPattern, CfaFrame
from .motion import SMOOTH_MARKER, SearchMode, SearchParams, search_frame
from .predict import ReconstructionRangeError, intra_decode, med_residual_plane

MAGIC = b"WCEC"
VERSION = 1
FLAG_SMOOTH = 1
FLAG_CFA_PHASE = 2
FLAG_RECODE = 4
FRAME_INTRA = 0
FRAME_INTER = 1
MV_BIAS = 3  # 3-bit codes cover offsets -3..4; (4,0) is the smooth marker
MAX_RADIUS = 3  # larger offsets would collide with the marker encoding

_HEADER = struct.Struct("<4sBHHBBBBHI")
_FRAME_RECORD = struct.Struct("<BI")
HEADER_SIZE = _HEADER.size


class ParamError(ValueError):
    """Encoder parameter or input sequence violates the header invariants."""


class DecodeError(ValueError):
    pass


class HeaderFormatError(DecodeError):
    pass


class TruncatedPayloadError(DecodeError):
    pass


class MotionVectorRangeError(DecodeError):
    pass


class PixelRangeError(DecodeError):
    pass


@dataclass(frozen=True)
class CodecParams:
    """Everything the encoder needs beyond the frames themselves."""

    block_size: int = 5
    search_radius: int = 3
    threshold: float = 10.0
    smooth: bool = False
    cfa_phase: bool = False
    recode_residuals: bool = False


@dataclass(frozen=True)
class ContainerHeader:
    width: int
    height: int
    block_size: int = 5
    search_radius: int = 3
    pattern: BayerPattern = BayerPattern.RGGB
    smooth: bool = False
    cfa_phase: bool = False
    recode_residuals: bool = False
    threshold_tenths: int = 100
    frame_count: int = 0

    @property
    def threshold(self) -> float:
        return self.threshold_tenths / 10.0

    @property
    def flags(self) -> int:
        return (
            (FLAG_SMOOTH if self.smooth else 0)
            | (FLAG_CFA_PHASE if self.cfa_phase else 0)
            | (FLAG_RECODE if self.recode_residuals else 0)
        )

    def pack(self) -> bytes:
        return _HEADER.pack(
            MAGIC,
            VERSION,
            self.width,
            self.height,
            self.block_size,
            self.search_radius,
            int(self.pattern),
            self.flags,
            self.threshold_tenths,
            self.frame_count,
        )

    @classmethod
    def unpack(cls, data: bytes) -> "ContainerHeader":
        if len(data) < HEADER_SIZE:
            raise HeaderFormatError(f"container of {len(data)} bytes is shorter than the header")
        magic, version, width, height, block, radius, pattern, flags, tenths, count = (
            _HEADER.unpack_from(data)
        )
        if magic != MAGIC:
            raise HeaderFormatError(f"bad magic {magic!r}")
        if version != VERSION:
            raise HeaderFormatError(f"unsupported version {version}")
        if width == 0 or height == 0:
            raise HeaderFormatError(f"zero dimension {width}x{height}")
        if block == 0:
            raise HeaderFormatError("block size must be at least 1")
        if radius > block:
            raise HeaderFormatError(f"search radius {radius} exceeds block size {block}")
        if pattern > 3:
            raise HeaderFormatError(f"unknown Bayer pattern code {pattern}")
        if flags & ~(FLAG_SMOOTH | FLAG_CFA_PHASE | FLAG_RECODE):
            raise HeaderFormatError(f"reserved flag bits set: {flags:#04x}")
        return cls(
            width,
            height,
            block,
            radius,
            BayerPattern(pattern),
            bool(flags & FLAG_SMOOTH),
            bool(flags & FLAG_CFA_PHASE),
            bool(flags & FLAG_RECODE),
            tenths,
            count,
        )


def pad_frame(frame: CfaFrame, block_size: int) -> CfaFrame:
    """Replicate-pad right/bottom edges up to the next block-size multiple."""
    h, w = frame.height, frame.width
    ph = -(-h // block_size) * block_size
    pw = -(-w // block_size) * block_size
    if ph == h and pw == w:
        return frame
    samples = np.pad(frame.samples, ((0, ph - h), (0, pw - w)), mode="edge")
    return CfaFrame(samples, frame.pattern)


def _validated_header(frames: list[CfaFrame], params: CodecParams) -> ContainerHeader:
    if not frames:
        raise ParamError("cannot encode an empty sequence")
    first = frames[0]
    for i, f in enumerate(frames[1:], 1):
        if (f.width, f.height) != (first.width, first.height):
            raise ParamError(f"frame {i} is {f.width}x{f.height}, expected {first.width}x{first.height}")
        if f.pattern != first.pattern:
            raise ParamError(f"frame {i} has pattern {f.pattern.name}, expected {first.pattern.name}")
    if first.width > 0xFFFF or first.height > 0xFFFF:
        raise ParamError(f"dimensions {first.width}x{first.height} exceed the 16-bit header fields")
    if not 1 <= params.block_size <= 255:
        raise ParamError(f"block size {params.block_size} out of range 1..255")
    if not 0 <= params.search_radius <= min(MAX_RADIUS, params.block_size):
        raise ParamError(
            f"search radius {params.search_radius} out of range 0..{min(MAX_RADIUS, params.block_size)}"
        )
    tenths = round(params.threshold * 10)
    if params.threshold < 0 or tenths > 0xFFFF:
        raise ParamError(f"threshold {params.threshold} not representable in tenths 0..6553.5")
    if len(frames) > 0xFFFFFFFF:
        raise ParamError("frame count exceeds 32 bits")
    return ContainerHeader(
        first.width,
        first.height,
        params.block_size,
        params.search_radius,
        first.pattern,
        params.smooth,
        params.cfa_phase,
        params.recode_residuals,
        tenths,
        len(frames),
    )


def encode_sequence(
    frames: list[CfaFrame], params: CodecParams | None = None, *, intra_only: bool = False
) -> bytes:
    """Encode a frame sequence: first frame intra, the rest inter.

    ``intra_only`` codes every frame without a reference (the benchmark
    baseline); the result is still a valid container.
    """
    params = params or CodecParams()
    header = _validated_header(frames, params)
    out = bytearray(header.pack())
    padded = [pad_frame(f, params.block_size).samples for f in frames]
    prev = None
    for cur in padded:
        if prev is None or intra_only:
            ftype, payload = FRAME_INTRA, _encode_intra(cur)
        else:
            ftype, payload = FRAME_INTER, _encode_inter(prev, cur, params, header.threshold)
        out += _FRAME_RECORD.pack(ftype, len(payload))
        out += payload
        prev = cur
    return bytes(out)


def _encode_intra(samples: np.ndarray) -> bytes:
    sink = BitSink()
    ctx = RiceContext()
    for v in med_residual_plane(samples).reshape(-1).tolist():
        encode_signed(sink, ctx, v)
    return sink.getvalue()


def _encode_inter(
    prev: np.ndarray, cur: np.ndarray, params: CodecParams, threshold: float
) -> bytes:
    n = params.block_size
    h, w = cur.shape
    nbr, nbc = h // n, w // n
    mode = SearchMode.CFA_PHASE if params.cfa_phase else SearchMode.FULL
    mv_dy, mv_dx, _ = search_frame(prev, cur, SearchParams(n, params.search_radius, mode))
    smooth = smooth_block_mask(_gradient_map(cur), n, threshold) if params.smooth else None
    cur32 = cur.astype(np.int32)
    prev32 = prev.astype(np.int32)
    err = None
    if params.recode_residuals:
        plane = np.zeros((h, w), np.int32)
        for br in range(nbr):
            r0 = br * n
            for bc in range(nbc):
                if smooth is not None and smooth[br, bc]:
                    continue
                c0 = bc * n
                dy = int(mv_dy[br, bc])
                dx = int(mv_dx[br, bc])
                plane[r0 : r0 + n, c0 : c0 + n] = (
                    cur32[r0 : r0 + n, c0 : c0 + n]
                    - prev32[r0 + dy : r0 + dy + n, c0 + dx : c0 + dx + n]
                )
        err = med_residual_plane(plane, corner_pred=0)
    sink = BitSink()
    inter_ctx = RiceContext()
    dpcm_ctx = RiceContext()
    smooth_code = ((SMOOTH_MARKER.dy + MV_BIAS) << 3) | (SMOOTH_MARKER.dx + MV_BIAS)
    for br in range(nbr):
        r0 = br * n
        for bc in range(nbc):
            c0 = bc * n
            if smooth is not None and smooth[br, bc]:
                sink.write_bits(smooth_code, 6)
                flat = cur[r0 : r0 + n, c0 : c0 + n].reshape(-1).tolist()
                sink.write_bits(flat[0], 8)
                prev_v = flat[0]
                for v in flat[1:]:
                    encode_signed(sink, dpcm_ctx, v - prev_v)
                    prev_v = v
                continue
            dy = int(mv_dy[br, bc])
            dx = int(mv_dx[br, bc])
            sink.write_bits(((dy + MV_BIAS) << 3) | (dx + MV_BIAS), 6)
            if err is not None:
                vals = err[r0 : r0 + n, c0 : c0 + n].reshape(-1).tolist()
            else:
                vals = (
                    cur32[r0 : r0 + n, c0 : c0 + n]
                    - prev32[r0 + dy : r0 + dy + n, c0 + dx : c0 + dx + n]
                ).reshape(-1).tolist()
            for v in vals:
                encode_signed(sink, inter_ctx, v)
    return sink.getvalue()


@dataclass
class FrameStat:
    frame_type: int
    payload_bytes: int
    smooth_blocks: int
    total_blocks: int  # 0 for intra frames


@dataclass
class StreamStats:
    """Sizes and ratios recovered from a container (after a verifying decode)."""

    header: ContainerHeader
    s_in: int
    s_out: int
    frames: list[FrameStat] = field(default_factory=list)

    @property
    def cr(self) -> float:
        return self.s_in / self.s_out

    @property
    def smooth_pct(self) -> float:
        blocks = sum(f.total_blocks for f in self.frames if f.frame_type == FRAME_INTER)
        if not blocks:
            return 0.0
        return 100.0 * sum(f.smooth_blocks for f in self.frames) / blocks


def compression_ratio(s_in: int, s_out: int) -> float:
    """Uncompressed size over compressed size, rounded to 2 decimals."""
    return round(s_in / s_out, 2)


def decode_sequence(data: bytes) -> list[CfaFrame]:
    """Reconstruct the encoder's input sequence bit-exactly."""
    _, frames, _ = _decode(data)
    return frames


def stream_stats(data: bytes) -> StreamStats:
    header, _, stats = _decode(data)
    s_in = header.width * header.height * header.frame_count
    return StreamStats(header, s_in, len(data), stats)


def _decode(data: bytes) -> tuple[ContainerHeader, list[CfaFrame], list[FrameStat]]:
    header = ContainerHeader.unpack(data)
    n = header.block_size
    ph = -(-header.height // n) * n
    pw = -(-header.width // n) * n
    pos = HEADER_SIZE
    frames: list[CfaFrame] = []
    stats: list[FrameStat] = []
    prev = None
    for fi in range(header.frame_count):
        if len(data) - pos < _FRAME_RECORD.size:
            raise TruncatedPayloadError(f"frame {fi}: record header missing")
        ftype, plen = _FRAME_RECORD.unpack_from(data, pos)
        pos += _FRAME_RECORD.size
        if len(data) - pos < plen:
            raise TruncatedPayloadError(
                f"frame {fi}: payload declares {plen} bytes, {len(data) - pos} remain"
            )
        payload = data[pos : pos + plen]
        pos += plen
        if ftype == FRAME_INTRA:
            samples = _decode_intra(payload, ph, pw, header.pattern, fi)
            smooth_blocks = total_blocks = 0
        elif ftype == FRAME_INTER:
            if prev is None:
                raise DecodeError(f"frame {fi}: inter frame without a reference")
            samples, smooth_blocks, total_blocks = _decode_inter(payload, prev, header, fi)
        else:
            raise DecodeError(f"frame {fi}: unknown frame type {ftype}")
        frames.append(CfaFrame(samples[: header.height, : header.width].copy(), header.pattern))
        stats.append(FrameStat(ftype, plen, smooth_blocks, total_blocks))
        prev = samples
    if pos != len(data):
        raise DecodeError(f"{len(data) - pos} trailing bytes after the final frame")
    return header, frames, stats


def _decode_intra(payload: bytes, ph: int, pw: int, pattern: BayerPattern, fi: int) -> np.ndarray:
    src = BitSource(payload)
    ctx = RiceContext()
    try:
        vals = [decode_signed(src, ctx) for _ in range(ph * pw)]
    except EOFError as e:
        raise TruncatedPayloadError(f"frame {fi}: intra payload truncated") from e
    plane = np.asarray(vals, dtype=np.int32).reshape(ph, pw)
    try:
        return intra_decode(plane, pattern).samples
    except ReconstructionRangeError as e:
        raise PixelRangeError(f"frame {fi}: {e}") from e


def _decode_inter(
    payload: bytes, prev: np.ndarray, header: ContainerHeader, fi: int
) -> tuple[np.ndarray, int, int]:
    n = header.block_size
    radius = header.search_radius
    h, w = prev.shape
    nbr, nbc = h // n, w // n
    src = BitSource(payload)
    inter_ctx = RiceContext()
    dpcm_ctx = RiceContext()
    out = np.empty((h, w), dtype=np.uint8)
    plane = [[0] * w for _ in range(h)] if header.recode_residuals else None
    smooth_count = 0
    br = bc = 0
    try:
        for br in range(nbr):
            r0 = br * n
            for bc in range(nbc):
                c0 = bc * n
                code = src.read_bits(6)
                dy = (code >> 3) - MV_BIAS
                dx = (code & 7) - MV_BIAS
                if dy == SMOOTH_MARKER.dy and dx == SMOOTH_MARKER.dx:
                    seed = src.read_bits(8)
                    vals = [seed]
                    v = seed
                    for _ in range(n * n - 1):
                        v += decode_signed(src, dpcm_ctx)
                        if v < 0 or v > 255:
                            raise PixelRangeError(
                                f"frame {fi} block ({br},{bc}): DPCM reconstruction {v} out of range"
                            )
                        vals.append(v)
                    out[r0 : r0 + n, c0 : c0 + n] = np.asarray(vals, np.uint8).reshape(n, n)
                    smooth_count += 1
                    continue
                if dy == 4 or dx == 4 or abs(dy) > radius or abs(dx) > radius:
                    raise MotionVectorRangeError(
                        f"frame {fi} block ({br},{bc}): motion vector ({dx},{dy}) not decodable"
                    )
                rr, cc = r0 + dy, c0 + dx
                if rr < 0 or cc < 0 or rr + n > h or cc + n > w:
                    raise MotionVectorRangeError(
                        f"frame {fi} block ({br},{bc}): reference at ({dx},{dy}) leaves the frame"
                    )
                ref = prev[rr : rr + n, cc : cc + n]
                if plane is not None:
                    _decode_recoded_block(src, inter_ctx, plane, ref, out, r0, c0, n, fi, br, bc)
                else:
                    vals = [decode_signed(src, inter_ctx) for _ in range(n * n)]
                    blk = np.asarray(vals, np.int32).reshape(n, n) + ref.astype(np.int32)
                    if blk.min() < 0 or blk.max() > 255:
                        raise PixelRangeError(f"frame {fi} block ({br},{bc}): pixel out of range")
                    out[r0 : r0 + n, c0 : c0 + n] = blk.astype(np.uint8)
    except EOFError as e:
        raise TruncatedPayloadError(f"frame {fi}: payload ends inside block ({br},{bc})") from e
    return out, smooth_count, nbr * nbc


def _decode_recoded_block(src, ctx, plane, ref, out, r0, c0, n, fi, br, bc):
    """Undo the MED pass over the residual plane for one searched block.

    Plane neighbors referenced by the prediction are always final: they
    belong to earlier blocks in raster order, to earlier pixels of this
    block, or to smooth blocks whose plane entries stay zero on both
    sides.
    """
    ref_rows = ref.tolist()
    for i in range(n):
        row = r0 + i
        prow = plane[row]
        up = plane[row - 1] if row else None
        ref_row = ref_rows[i]
        orow = []
        for j in range(n):
            col = c0 + j
            e = decode_signed(src, ctx)
            if row == 0:
                pred = prow[col - 1] if col else 0
            elif col == 0:
                pred = up[col]
            else:
                a = prow[col - 1]
                b = up[col]
                c = up[col - 1]
                if a > b:
                    mx, mn = a, b
                else:
                    mx, mn = b, a
                if c >= mx:
                    pred = mn
                elif c <= mn:
                    pred = mx
                else:
                    pred = a + b - c
            v = pred + e
            prow[col] = v
            px = ref_row[j] + v
            if px < 0 or px > 255:
                raise PixelRangeError(f"frame {fi} block ({br},{bc}): pixel {px} out of range")
            orow.append(px)
        out[row, c0 : c0 + n] = orow
