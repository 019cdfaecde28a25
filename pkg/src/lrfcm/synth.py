"""Synthetic four-level test image and seeded noise models."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LEVELS = (0.0, 85.0, 170.0, 255.0)


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = "mixed"  # gaussian | impulse | mixed
    std: float = 0.0
    density: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gaussian", "impulse", "mixed"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.std < 0:
            raise ValueError("noise std must be non-negative")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("impulse density must lie in [0, 1]")

    def apply(self, img) -> np.ndarray:
        if self.kind == "gaussian":
            return add_gaussian(img, self.std, self.seed)
        if self.kind == "impulse":
            return add_impulse(img, self.density, self.seed)
        return add_mixed(img, self.std, self.density, self.seed)


def generate_four_level(size=(256, 256)) -> tuple[np.ndarray, np.ndarray]:
    """Four-band pattern at gray levels 0, 85, 170, 255.

    Bands run left to right with gently sinusoidal borders, so each region
    covers about a quarter of the image, borders have no corners, and only
    consecutive gray levels share a border.

    Returns ``(image, labels)`` with ``image == 85 * (labels - 1)``.
    """
    h, w = size
    if h < 64 or w < 64:
        raise ValueError(f"synthetic image needs at least 64x64 pixels, got {h}x{w}")
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    labels = np.ones((h, w), dtype=np.int64)
    for k in (1, 2, 3):
        border = k * w / 4.0 + 0.03 * w * np.sin(2.0 * np.pi * (yy / h + k / 3.0))
        labels[xx >= border] = k + 1
    image = 85.0 * (labels - 1)
    return image, labels


def add_gaussian(img, std: float, seed=0) -> np.ndarray:
    """Add i.i.d. zero-mean normal noise and clamp to [0, 255]."""
    if std < 0:
        raise ValueError("noise std must be non-negative")
    img = np.asarray(img, dtype=np.float64)
    if std == 0:
        return img.copy()
    rng = np.random.default_rng(seed)
    return np.clip(img + rng.normal(0.0, std, size=img.shape), 0.0, 255.0)


def impulse_count(density: float, pixels: int) -> int:
    return int(math.floor(density * pixels + 0.5))


def add_impulse(img, density: float, seed=0) -> np.ndarray:
    """Salt-and-pepper: exactly ``round(density * K)`` pixels set to 0 or 255.

    For color images whole pixels (all three planes) are corrupted.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError("impulse density must lie in [0, 1]")
    out = np.array(img, dtype=np.float64, copy=True)
    h, w = out.shape[:2]
    n = impulse_count(density, h * w)
    if n == 0:
        return out
    rng = np.random.default_rng(seed)
    idx = rng.choice(h * w, size=n, replace=False)
    values = np.where(rng.random(n) < 0.5, 0.0, 255.0)
    flat = out.reshape(h * w, -1)
    flat[idx] = values[:, None]
    return out


def add_mixed(img, std: float, density: float, seed=0) -> np.ndarray:
    """Gaussian noise followed by impulse noise.

    The impulse stage uses ``seed`` itself and the Gaussian stage a child
    seed, so ``add_mixed(g, 0, d, s) == add_impulse(g, d, s)``.
    """
    (gseed,) = np.random.SeedSequence(seed).spawn(1)
    return add_impulse(add_gaussian(img, std, gseed), density, seed)
