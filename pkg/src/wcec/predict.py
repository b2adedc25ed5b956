"""DPCM coding of smooth blocks and MED-predictor intra coding of frames.

The intra path predicts each pixel with the median edge detector from its
left (a), above (b), and above-left (c) neighbors in raster order:
min(a, b) when c >= max(a, b), max(a, b) when c <= min(a, b), else
a + b - c. Boundary conventions: the first pixel is predicted as 128, the
rest of the first row from a only, the first column from b only. The same
prediction with a corner seed of 0 is reused to re-code signed residual
planes.
"""

from dataclasses import dataclass

import numpy as np

from .frames import BayerPattern, CfaFrame

FIRST_PIXEL_PRED = 128


class ReconstructionRangeError(ValueError):
    """A decoded pixel fell outside [0, 255]; the stream is corrupt."""


@dataclass
class DpcmBlock:
    """First pixel plus the chain of adjacent differences in raster order."""

    seed: int
    diffs: np.ndarray  # int32, one fewer entries than the block has pixels


def dpcm_encode(pixels: np.ndarray) -> DpcmBlock:
    """Difference-code a raster-ordered (flat) pixel array."""
    flat = np.asarray(pixels, dtype=np.int32).reshape(-1)
    if flat.size == 0:
        raise ValueError("cannot DPCM-encode an empty block")
    return DpcmBlock(int(flat[0]), np.diff(flat))


def dpcm_decode(block: DpcmBlock) -> np.ndarray:
    """Invert dpcm_encode; raises if any running sum leaves [0, 255]."""
    values = np.concatenate(([block.seed], block.diffs)).cumsum(dtype=np.int64)
    if values.min() < 0 or values.max() > 255:
        raise ReconstructionRangeError("DPCM reconstruction left the pixel range")
    return values.astype(np.uint8)


def med_predict(a: int, b: int, c: int) -> int:
    """Median edge detector prediction from left, above, above-left."""
    mx = a if a > b else b
    mn = a if a < b else b
    if c >= mx:
        return mn
    if c <= mn:
        return mx
    return a + b - c


def med_residual_plane(plane: np.ndarray, corner_pred: int = FIRST_PIXEL_PRED) -> np.ndarray:
    """Prediction errors of the MED raster scan over a 2-D integer plane.

    For lossless coding the predictor sees original values, so the whole
    plane can be computed at once.
    """
    p = np.asarray(plane, dtype=np.int32)
    a = p[1:, :-1]  # left
    b = p[:-1, 1:]  # above
    c = p[:-1, :-1]  # above-left
    mx = np.maximum(a, b)
    mn = np.minimum(a, b)
    pred = np.empty_like(p)
    pred[0, 0] = corner_pred
    pred[0, 1:] = p[0, :-1]
    pred[1:, 0] = p[:-1, 0]
    pred[1:, 1:] = np.where(c >= mx, mn, np.where(c <= mn, mx, a + b - c))
    return p - pred


def intra_encode(frame: CfaFrame) -> np.ndarray:
    """MED prediction residuals of a whole frame, int32, same shape."""
    return med_residual_plane(frame.samples)


def intra_decode(residuals: np.ndarray, pattern: BayerPattern = BayerPattern.RGGB) -> CfaFrame:
    """Invert intra_encode; raises if a reconstructed pixel leaves [0, 255]."""
    res = np.asarray(residuals, dtype=np.int64)
    h, w = res.shape
    first_row = res[0].cumsum() + FIRST_PIXEL_PRED
    if first_row.min() < 0 or first_row.max() > 255:
        raise ReconstructionRangeError("intra reconstruction left the pixel range in row 0")
    rows = [first_row.tolist()]
    for r in range(1, h):
        up = rows[r - 1]
        rrow = res[r].tolist()
        v = up[0] + rrow[0]  # first column predicts from above
        if v < 0 or v > 255:
            raise ReconstructionRangeError(f"intra reconstruction out of range at ({r},0)")
        out = [v]
        a = v
        for col in range(1, w):
            b = up[col]
            c = up[col - 1]
            if a > b:
                mx, mn = a, b
            else:
                mx, mn = b, a
            if c >= mx:
                p = mn
            elif c <= mn:
                p = mx
            else:
                p = a + b - c
            a = p + rrow[col]
            if a < 0 or a > 255:
                raise ReconstructionRangeError(f"intra reconstruction out of range at ({r},{col})")
            out.append(a)
        rows.append(out)
    return CfaFrame(np.asarray(rows, dtype=np.uint8), pattern)
