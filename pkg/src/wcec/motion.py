"""Full-search block matching against the previous frame.

Matching minimizes the sum of squared differences (same argmin as MSE over
fixed-size blocks, integer exact). Candidate reference blocks that fall
outside the previous frame are skipped; ties break on the first minimum in
candidate order, which both encoder and tests rely on.

A motion vector (dy, dx offset of the matched reference block relative to
the current block) of (dx=4, dy=0) is reserved as the smooth-block marker
and cannot be produced by a search with radius <= 3.
"""

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .frames import CfaFrame


class MotionVector(NamedTuple):
    dx: int
    dy: int


SMOOTH_MARKER = MotionVector(dx=4, dy=0)


class SearchMode(Enum):
    FULL = "full"
    CFA_PHASE = "cfa-phase"


@dataclass(frozen=True)
class SearchParams:
    """Block-matching geometry. Defaults give an 11x11 window (49 candidates)."""

    block_size: int = 5
    radius: int = 3
    mode: SearchMode = SearchMode.FULL


@dataclass
class ResidualBlock:
    """Signed difference between a current block and its matched reference."""

    origin: tuple[int, int]  # (row, col) of the block in the current frame
    values: np.ndarray  # (block_size, block_size) int32


def candidate_offsets(params: SearchParams) -> list[tuple[int, int]]:
    """(dy, dx) offsets in raster order; CFA-phase mode keeps even offsets only."""
    r = params.radius
    span = range(-r, r + 1)
    if params.mode is SearchMode.CFA_PHASE:
        return [(dy, dx) for dy in span for dx in span if dy % 2 == 0 and dx % 2 == 0]
    return [(dy, dx) for dy in span for dx in span]


def block_ssd(cur: np.ndarray, ref: np.ndarray) -> int:
    """Sum of squared differences between two equal-size pixel blocks."""
    if cur.shape != ref.shape:
        raise ValueError(f"block shapes differ: {cur.shape} vs {ref.shape}")
    d = cur.astype(np.int64) - ref.astype(np.int64)
    return int((d * d).sum())


def best_match(
    prev: CfaFrame, cur: CfaFrame, origin: tuple[int, int], params: SearchParams
) -> tuple[MotionVector, ResidualBlock, int]:
    """Search one block of ``cur`` against ``prev``; first minimum wins ties."""
    n = params.block_size
    row, col = origin
    cur_s = cur.samples
    prev_s = prev.samples
    if row < 0 or col < 0 or row + n > cur_s.shape[0] or col + n > cur_s.shape[1]:
        raise ValueError(f"block at {origin} size {n} exceeds frame {cur_s.shape}")
    block = cur_s[row : row + n, col : col + n].astype(np.int64)
    h, w = prev_s.shape
    best = None
    for dy, dx in candidate_offsets(params):
        rr, cc = row + dy, col + dx
        if rr < 0 or cc < 0 or rr + n > h or cc + n > w:
            continue
        d = block - prev_s[rr : rr + n, cc : cc + n]
        ssd = int((d * d).sum())
        if best is None or ssd < best[0]:
            best = (ssd, dy, dx)
    ssd, dy, dx = best  # (0, 0) is always a valid candidate
    ref = prev_s[row + dy : row + dy + n, col + dx : col + dx + n]
    residual = cur_s[row : row + n, col : col + n].astype(np.int32) - ref.astype(np.int32)
    return MotionVector(dx=dx, dy=dy), ResidualBlock(origin, residual), ssd


_SENTINEL = np.iinfo(np.int64).max


def search_frame(
    prev: np.ndarray, cur: np.ndarray, params: SearchParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized best_match over the whole block grid of a frame pair.

    Frames must have identical shapes divisible by the block size. Returns
    (mv_dy, mv_dx, ssd) arrays over the block grid, equal blockwise to
    best_match with the identical tie rule.
    """
    n = params.block_size
    h, w = cur.shape
    nbr, nbc = h // n, w // n
    offsets = candidate_offsets(params)
    cur64 = cur.astype(np.int64)
    prev64 = prev.astype(np.int64)
    ssd = np.full((len(offsets), nbr, nbc), _SENTINEL, dtype=np.int64)
    for i, (dy, dx) in enumerate(offsets):
        br_lo = max(0, (-dy + n - 1) // n)
        br_hi = min(nbr, (h - n - dy) // n + 1)
        bc_lo = max(0, (-dx + n - 1) // n)
        bc_hi = min(nbc, (w - n - dx) // n + 1)
        if br_lo >= br_hi or bc_lo >= bc_hi:
            continue
        r0, r1 = br_lo * n, br_hi * n
        c0, c1 = bc_lo * n, bc_hi * n
        d = cur64[r0:r1, c0:c1] - prev64[r0 + dy : r1 + dy, c0 + dx : c1 + dx]
        ssd[i, br_lo:br_hi, bc_lo:bc_hi] = (
            (d * d).reshape(br_hi - br_lo, n, bc_hi - bc_lo, n).sum(axis=(1, 3))
        )
    best = ssd.argmin(axis=0)  # first occurrence keeps candidate-order ties
    off = np.asarray(offsets, dtype=np.int32)
    mv_dy = off[best, 0]
    mv_dx = off[best, 1]
    return mv_dy, mv_dx, np.take_along_axis(ssd, best[None], axis=0)[0]
