"""Benchmark harness: run the standard configuration matrix, verify, report.

Each row re-encodes the same input sequence under one configuration,
decodes the result, and only reports a compression ratio when the round
trip reconstructed the input bit-exactly; otherwise the row's cr column
says FAILED. Containers and every CSV field except the wall-clock
encode_ms column are deterministic for identical inputs and flags.
"""

import time
from dataclasses import dataclass, replace

from .codec import CodecParams, decode_sequence, encode_sequence, stream_stats
from .frames import CfaFrame

CSV_COLUMNS = ("config", "frames", "s_in_bytes", "s_out_bytes", "cr", "smooth_pct", "encode_ms")


@dataclass(frozen=True)
class BenchConfig:
    name: str
    smooth: bool = False
    recode_residuals: bool = False
    intra_only: bool = False


DEFAULT_CONFIGS = (
    BenchConfig("intra-baseline", intra_only=True),
    BenchConfig("inter"),
    BenchConfig("inter+smooth", smooth=True),
    BenchConfig("inter+recode", recode_residuals=True),
    BenchConfig("inter+smooth+recode", smooth=True, recode_residuals=True),
)


@dataclass
class BenchRow:
    config: str
    frames: int
    s_in: int
    s_out: int
    cr: float
    smooth_pct: float
    encode_ms: int
    lossless: bool

    def csv_fields(self) -> tuple[str, ...]:
        return (
            self.config,
            str(self.frames),
            str(self.s_in),
            str(self.s_out),
            f"{self.cr:.2f}" if self.lossless else "FAILED",
            f"{self.smooth_pct:.2f}",
            str(self.encode_ms),
        )


def run_config(frames: list[CfaFrame], params: CodecParams, config: BenchConfig) -> BenchRow:
    run_params = replace(params, smooth=config.smooth, recode_residuals=config.recode_residuals)
    start = time.perf_counter()
    blob = encode_sequence(frames, run_params, intra_only=config.intra_only)
    encode_ms = int(round((time.perf_counter() - start) * 1000))
    lossless = decode_sequence(blob) == frames
    stats = stream_stats(blob)
    return BenchRow(
        config=config.name,
        frames=len(frames),
        s_in=stats.s_in,
        s_out=stats.s_out,
        cr=round(stats.cr, 2),
        smooth_pct=round(stats.smooth_pct, 2),
        encode_ms=encode_ms,
        lossless=lossless,
    )


def run_bench(
    frames: list[CfaFrame],
    params: CodecParams | None = None,
    configs: tuple[BenchConfig, ...] = DEFAULT_CONFIGS,
) -> list[BenchRow]:
    params = params or CodecParams()
    return [run_config(frames, params, cfg) for cfg in configs]


def rows_to_csv(rows: list[BenchRow]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(",".join(row.csv_fields()) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(rows: list[BenchRow], path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(rows_to_csv(rows))
