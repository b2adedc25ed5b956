"""Smooth-vs-informative block labeling from Sobel gradient magnitude.

The gradient map is |Gx| + |Gy| of the standard 3x3 Sobel pair, computed
on the raw CFA plane with replicate-edge padding. A block is smooth when
the block mean of the map falls below the threshold.
"""

from enum import Enum

import numpy as np

from .frames import CfaFrame


class BlockLabel(Enum):
    SMOOTH = "smooth"
    INFORMATIVE = "informative"


def sobel_gradient(frame: CfaFrame) -> np.ndarray:
    """Per-pixel |Gx| + |Gy| as an int32 map with the frame's shape."""
    return _gradient_map(frame.samples)


def _gradient_map(samples: np.ndarray) -> np.ndarray:
    p = np.pad(samples.astype(np.int32), 1, mode="edge")
    # Gx: column c+1 minus column c-1, rows weighted 1,2,1
    gx = (p[:-2, 2:] + 2 * p[1:-1, 2:] + p[2:, 2:]) - (p[:-2, :-2] + 2 * p[1:-1, :-2] + p[2:, :-2])
    # Gy: row r+1 minus row r-1, columns weighted 1,2,1
    gy = (p[2:, :-2] + 2 * p[2:, 1:-1] + p[2:, 2:]) - (p[:-2, :-2] + 2 * p[:-2, 1:-1] + p[:-2, 2:])
    return np.abs(gx) + np.abs(gy)


def classify_block(
    gmap: np.ndarray, origin: tuple[int, int], size: int, threshold: float
) -> BlockLabel:
    """Label one square block: smooth iff its mean gradient is below the threshold."""
    row, col = origin
    if row < 0 or col < 0 or row + size > gmap.shape[0] or col + size > gmap.shape[1]:
        raise ValueError(f"block at {origin} size {size} exceeds {gmap.shape}")
    total = int(gmap[row : row + size, col : col + size].sum())
    # sum < threshold * size^2 is the block mean test without the division
    if total < threshold * (size * size):
        return BlockLabel.SMOOTH
    return BlockLabel.INFORMATIVE


def smooth_block_mask(gmap: np.ndarray, block_size: int, threshold: float) -> np.ndarray:
    """Vector form of classify_block over a full block grid.

    The map dimensions must be multiples of block_size; returns a bool
    array of shape (rows/block_size, cols/block_size), True where smooth.
    """
    h, w = gmap.shape
    n = block_size
    if h % n or w % n:
        raise ValueError(f"gradient map {h}x{w} not divisible by block size {n}")
    sums = gmap.astype(np.int64).reshape(h // n, n, w // n, n).sum(axis=(1, 3))
    return sums < threshold * (n * n)
