"""Synthetic sagittal phantoms with ground truth.

A phantom stacks bright rounded-rectangle bodies down an off-center spine
column, flanks the column with mid-gray full-height bands standing in for
paraspinal muscle, then degrades the scene with a smooth multiplicative
bias field (horizontal plus vertical cosine, range 1 +/- amplitude) and
seeded Gaussian noise. The seed also drives mild anatomical variation
(per-body scale, column placement, small per-body wobble), so a batch of
seeds behaves like a batch of different patients rather than one patient
re-imaged sixteen times. The returned ground truth is the clean body
mask, and body proportions are kept inside the aspect band the downstream
filters expect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffusion import quantize
from .errors import ConfigError, SpecOverflow
from .morphology import LUMBAR_NAMES

BACKGROUND_LEVEL = 40.0
MUSCLE_LEVEL = 120.0
BODY_LEVEL = 190.0

# Layout fractions of the canvas width: where the spine column starts and
# how wide each flanking muscle band is.
_COLUMN_FRACTION = 0.15
_BAND_FRACTION = 0.14

# Anatomy jitter: per-body scale range, column shift, stack shift, and
# per-body horizontal wobble (pixels).
_SCALE_LOW, _SCALE_HIGH = 0.92, 1.08
_COLUMN_SHIFT = 5
_STACK_SHIFT = 4
_WOBBLE = 2


@dataclass(frozen=True)
class PhantomSpec:
    width: int = 256
    height: int = 256
    num_bodies: int = 5
    body_width: int = 64
    body_height: int = 36
    gap: int = 10
    noise_sigma: float = 0.0
    bias_amplitude: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.width < 32 or self.height < 32:
            raise ConfigError("canvas must be at least 32x32")
        if not 1 <= self.num_bodies <= 7:
            raise ConfigError(f"num_bodies must lie in 1..7, got {self.num_bodies}")
        if self.body_width < 6 or self.body_height < 4:
            raise ConfigError("bodies must be at least 6x4")
        ratio = self.body_width / self.body_height
        if not 1.5 <= ratio <= 2.0:
            raise ConfigError(
                f"body width/height ratio must lie in [1.5, 2.0], got {ratio:.3g}"
            )
        if self.gap < 1:
            raise ConfigError(f"gap must be positive, got {self.gap}")
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be non-negative, got {self.noise_sigma}")
        if not 0 <= self.bias_amplitude < 1:
            raise ConfigError(
                f"bias_amplitude must lie in [0, 1), got {self.bias_amplitude}"
            )
        max_body_h = math.ceil(_SCALE_HIGH * self.body_height)
        stack = self.num_bodies * max_body_h + (self.num_bodies - 1) * self.gap
        if stack + 2 * _STACK_SHIFT + 2 > self.height:
            raise SpecOverflow(
                f"{self.num_bodies} bodies of height {self.body_height} with gap "
                f"{self.gap} can need {stack + 2 * _STACK_SHIFT} rows, canvas "
                f"offers {self.height - 2}"
            )
        max_body_w = math.ceil(_SCALE_HIGH * self.body_width)
        column_left = int(round(_COLUMN_FRACTION * self.width))
        if column_left + _COLUMN_SHIFT + _WOBBLE + max_body_w + 2 > self.width:
            raise SpecOverflow(
                f"body width {self.body_width} does not fit the canvas width "
                f"{self.width} at the column position"
            )


def _rounded_rect(height, width, top, left, box_h, box_w, radius) -> np.ndarray:
    rows = np.arange(height)[:, None]
    cols = np.arange(width)[None, :]
    inside = (
        (rows >= top) & (rows < top + box_h) & (cols >= left) & (cols < left + box_w)
    )
    if radius > 0:
        dy = np.maximum(np.maximum((top + radius) - rows, rows - (top + box_h - 1 - radius)), 0)
        dx = np.maximum(np.maximum((left + radius) - cols, cols - (left + box_w - 1 - radius)), 0)
        inside &= dy * dy + dx * dx <= radius * radius
    return inside


def generate_phantom(spec: PhantomSpec = PhantomSpec()):
    """Build (image, ground-truth mask, names of the bodies bottom-up).

    All randomness comes from one generator seeded with ``spec.seed``; the
    anatomy draws happen before the noise draw, so identical specs yield
    identical phantoms byte for byte.
    """
    h, w = spec.height, spec.width
    rng = np.random.default_rng(spec.seed)
    scales = rng.uniform(_SCALE_LOW, _SCALE_HIGH, size=spec.num_bodies)
    column_shift = int(rng.integers(-_COLUMN_SHIFT, _COLUMN_SHIFT + 1))
    stack_shift = int(rng.integers(-_STACK_SHIFT, _STACK_SHIFT + 1))
    wobbles = rng.integers(-_WOBBLE, _WOBBLE + 1, size=spec.num_bodies)

    ratio = spec.body_width / spec.body_height
    widths = [max(6, int(round(spec.body_width * s))) for s in scales]
    heights = [max(4, int(round(bw / ratio))) for bw in widths]

    stack = sum(heights) + (spec.num_bodies - 1) * spec.gap
    top = int(np.clip((h - stack) // 2 + stack_shift, 1, max(1, h - 1 - stack)))
    column_left = int(round(_COLUMN_FRACTION * w)) + column_shift

    base = np.full((h, w), BACKGROUND_LEVEL, dtype=np.float64)
    truth = np.zeros((h, w), dtype=bool)
    lefts = [column_left + int(wob) for wob in wobbles]
    for i in range(spec.num_bodies):
        radius = max(2, heights[i] // 8)
        body = _rounded_rect(h, w, top, lefts[i], heights[i], widths[i], radius)
        truth |= body
        top += heights[i] + spec.gap
    leftmost = min(lefts)
    rightmost = max(left + bw - 1 for left, bw in zip(lefts, widths))
    band = int(round(_BAND_FRACTION * w))
    base[:, max(0, leftmost - band) : leftmost] = MUSCLE_LEVEL
    base[:, rightmost + 1 : min(w, rightmost + 1 + band)] = MUSCLE_LEVEL
    base[truth] = BODY_LEVEL

    values = base
    if spec.bias_amplitude > 0:
        horizontal = np.cos(np.pi * np.arange(w) / max(w - 1, 1))
        vertical = np.cos(np.pi * np.arange(h) / max(h - 1, 1))
        field = 1.0 + spec.bias_amplitude * (horizontal[None, :] + vertical[:, None]) / 2.0
        values = values * field
    if spec.noise_sigma > 0:
        values = values + rng.normal(0.0, spec.noise_sigma, size=values.shape)

    names = LUMBAR_NAMES[: min(spec.num_bodies, len(LUMBAR_NAMES))]
    return quantize(values), truth, names
