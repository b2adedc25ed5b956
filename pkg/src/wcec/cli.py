"""Command-line front end: wcec encode | decode | mosaic | bench."""

import argparse
import glob
import sys
from pathlib import Path

import numpy as np

from .bench import run_bench, rows_to_csv, write_csv
from .codec import (
    CodecParams,
    DecodeError,
    ParamError,
    decode_sequence,
    encode_sequence,
    stream_stats,
)
from .frames import (
    BayerPattern,
    ImageFormatError,
    emit_pgm,
    load_sequence,
    mosaic,
    parse_pgm,
    parse_ppm,
)


class UsageError(ValueError):
    pass


def _expand_inputs(patterns: list[str]) -> list[str]:
    """Expand each argument as a glob (sorted) or keep it as a literal path."""
    paths: list[str] = []
    for pattern in patterns:
        matches = sorted(glob.glob(pattern))
        if matches:
            paths.extend(matches)
        elif Path(pattern).exists():
            paths.append(pattern)
        else:
            raise UsageError(f"no input files match {pattern!r}")
    return paths


def _params_from_args(args) -> CodecParams:
    return CodecParams(
        block_size=args.block_size,
        search_radius=args.search_radius,
        threshold=args.threshold,
        smooth=args.smooth,
        cfa_phase=args.cfa_phase,
        recode_residuals=args.recode_residuals,
    )


def _add_codec_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--block-size", type=int, default=5, help="square block side (default 5)")
    sub.add_argument("--search-radius", type=int, default=3, help="motion search radius (default 3)")
    sub.add_argument("--threshold", type=float, default=10.0, help="smooth-block gradient threshold (default 10)")
    sub.add_argument("--smooth", action="store_true", help="classify blocks and DPCM-code smooth ones")
    sub.add_argument("--cfa-phase", action="store_true", help="restrict the search to even offsets")
    sub.add_argument("--recode-residuals", action="store_true", help="MED-recode motion residuals before Rice coding")
    sub.add_argument("--pattern", default="rggb", choices=["rggb", "grbg", "gbrg", "bggr"], help="Bayer phase of the input frames")


def cmd_encode(args) -> int:
    paths = _expand_inputs(args.input)
    frames = load_sequence(paths, BayerPattern.from_name(args.pattern))
    blob = encode_sequence(frames, _params_from_args(args))
    Path(args.output).write_bytes(blob)
    stats = stream_stats(blob)
    print(
        f"{args.output}: frames={stats.header.frame_count} "
        f"size={stats.header.width}x{stats.header.height} "
        f"s_in={stats.s_in} s_out={stats.s_out} cr={stats.cr:.2f} "
        f"smooth={stats.smooth_pct:.2f}%"
    )
    return 0


def cmd_decode(args) -> int:
    blob = Path(args.input).read_bytes()
    frames = decode_sequence(blob)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(frames):
        (outdir / f"frame_{i:04d}.pgm").write_bytes(emit_pgm(frame))
    print(f"decoded {len(frames)} frames into {outdir}")
    if args.verify is not None:
        return _verify(frames, args.verify, args.pattern)
    return 0


def _verify(frames, original_dir: str, pattern_name: str) -> int:
    originals = sorted(Path(original_dir).glob("*.pgm"))
    if len(originals) != len(frames):
        print(f"verify: {len(frames)} decoded frames but {len(originals)} originals in {original_dir}", file=sys.stderr)
        return 1
    pattern = BayerPattern.from_name(pattern_name)
    for i, path in enumerate(originals):
        original = parse_pgm(path.read_bytes(), pattern)
        if original != frames[i]:
            mism = np.argwhere(original.samples != frames[i].samples)
            where = f"pixel ({mism[0][0]},{mism[0][1]})" if len(mism) else "header"
            print(f"verify: frame {i} ({path.name}) differs, first at {where}", file=sys.stderr)
            return 1
    print("OK, 0 mismatches")
    return 0


def cmd_mosaic(args) -> int:
    paths = _expand_inputs(args.input)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    pattern = BayerPattern.from_name(args.pattern)
    for path in paths:
        rgb = parse_ppm(Path(path).read_bytes())
        cfa = mosaic(rgb, pattern)
        (outdir / (Path(path).stem + ".pgm")).write_bytes(emit_pgm(cfa))
    print(f"mosaicked {len(paths)} frames into {outdir}")
    return 0


def cmd_bench(args) -> int:
    paths = _expand_inputs(args.input)
    frames = load_sequence(paths, BayerPattern.from_name(args.pattern))
    rows = run_bench(frames, _params_from_args(args))
    print(rows_to_csv(rows), end="")
    if args.csv is not None:
        write_csv(rows, args.csv)
        print(f"wrote {args.csv}")
    return 1 if any(not row.lossless for row in rows) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wcec", description="Lossless inter-frame codec for Bayer-CFA image sequences")
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="encode a PGM sequence into a container")
    enc.add_argument("--input", nargs="+", required=True, help="PGM paths or globs, in frame order")
    enc.add_argument("--output", required=True, help="container file to write")
    _add_codec_flags(enc)
    enc.set_defaults(func=cmd_encode)

    dec = sub.add_parser("decode", help="decode a container back into PGM frames")
    dec.add_argument("--input", required=True, help="container file")
    dec.add_argument("--output", default=".", help="directory for frame_NNNN.pgm files")
    dec.add_argument("--verify", metavar="DIR", help="compare decoded frames against the PGMs in DIR")
    dec.add_argument("--pattern", default="rggb", choices=["rggb", "grbg", "gbrg", "bggr"], help="Bayer phase used when reading originals for --verify")
    dec.set_defaults(func=cmd_decode)

    mos = sub.add_parser("mosaic", help="turn RGB PPM frames into CFA PGM frames")
    mos.add_argument("--input", nargs="+", required=True, help="PPM paths or globs")
    mos.add_argument("--output", required=True, help="directory for the CFA PGMs")
    mos.add_argument("--pattern", default="rggb", choices=["rggb", "grbg", "gbrg", "bggr"], help="Bayer phase to sample (default rggb)")
    mos.set_defaults(func=cmd_mosaic)

    ben = sub.add_parser("bench", help="run the configuration matrix and report compression ratios")
    ben.add_argument("--input", nargs="+", required=True, help="PGM paths or globs, in frame order")
    ben.add_argument("--csv", help="also write the rows to this CSV file")
    _add_codec_flags(ben)
    ben.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except (ImageFormatError, ParamError, DecodeError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
