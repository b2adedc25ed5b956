"""Deterministic synthetic CFA sequences for benchmarks and tests.

Frames are a smooth bilinear-interpolated random base plus small per-pixel
noise. The noise makes every block locally unique (so block matching locks
onto the true offset), while the smooth base keeps intra coding rates in a
realistic range. Identical seeds give identical frames on any platform.
"""

import numpy as np

from .frames import BayerPattern, CfaFrame

DETAIL_SCALE = 24
NOISE_AMPLITUDE = 1


def _smooth_base(height: int, width: int, rng: np.random.Generator, scale: int) -> np.ndarray:
    gh = height // scale + 2
    gw = width // scale + 2
    grid = rng.uniform(0.0, 255.0, size=(gh, gw))
    ys = np.arange(height) / scale
    xs = np.arange(width) / scale
    y0 = ys.astype(np.int64)
    x0 = xs.astype(np.int64)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    y1 = np.minimum(y0 + 1, gh - 1)
    x1 = np.minimum(x0 + 1, gw - 1)
    top = grid[y0][:, x0] * (1 - fx) + grid[y0][:, x1] * fx
    bot = grid[y1][:, x0] * (1 - fx) + grid[y1][:, x1] * fx
    return top * (1 - fy) + bot * fy


def textured_array(
    height: int,
    width: int,
    *,
    seed: int = 0,
    detail_scale: int = DETAIL_SCALE,
    noise_amplitude: int = NOISE_AMPLITUDE,
) -> np.ndarray:
    """One textured uint8 plane: smooth random base plus uniform noise."""
    rng = np.random.default_rng(seed)
    base = _smooth_base(height, width, rng, detail_scale)
    noise = rng.integers(-noise_amplitude, noise_amplitude + 1, size=(height, width))
    return np.clip(np.rint(base) + noise, 0, 255).astype(np.uint8)


def textured_frame(
    width: int,
    height: int,
    *,
    seed: int = 0,
    pattern: BayerPattern = BayerPattern.RGGB,
    detail_scale: int = DETAIL_SCALE,
    noise_amplitude: int = NOISE_AMPLITUDE,
) -> CfaFrame:
    return CfaFrame(
        textured_array(
            height, width, seed=seed, detail_scale=detail_scale, noise_amplitude=noise_amplitude
        ),
        pattern,
    )


def repeated_sequence(
    width: int,
    height: int,
    count: int,
    *,
    seed: int = 0,
    pattern: BayerPattern = BayerPattern.RGGB,
    **texture_kwargs,
) -> list[CfaFrame]:
    """The same textured frame repeated ``count`` times."""
    frame = textured_frame(width, height, seed=seed, pattern=pattern, **texture_kwargs)
    return [frame] * count


def translating_sequence(
    width: int,
    height: int,
    count: int,
    *,
    step_x: int = 2,
    step_y: int = 0,
    seed: int = 0,
    pattern: BayerPattern = BayerPattern.RGGB,
    **texture_kwargs,
) -> list[CfaFrame]:
    """A window sliding (step_x, step_y) per frame over one master texture.

    Consecutive frames satisfy frame[t](r, c) == frame[t-1](r + step_y,
    c + step_x) wherever both sides exist, so a matched block's offset is
    exactly (step_y, step_x). Even steps preserve the Bayer phase.
    """
    span_x = abs(step_x) * (count - 1)
    span_y = abs(step_y) * (count - 1)
    master = textured_array(height + span_y, width + span_x, seed=seed, **texture_kwargs)
    frames = []
    for t in range(count):
        x0 = t * step_x + (span_x if step_x < 0 else 0)
        y0 = t * step_y + (span_y if step_y < 0 else 0)
        frames.append(CfaFrame(master[y0 : y0 + height, x0 : x0 + width].copy(), pattern))
    return frames
