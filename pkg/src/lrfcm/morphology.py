"""Flat grayscale morphology and geodesic reconstruction.

All window scans use whole-sample symmetric extension at the borders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import as_gray, channels, is_color


@dataclass(frozen=True)
class StructuringElement:
    """Flat structuring element; the origin is the center cell."""

    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 2 or mask.shape[0] % 2 == 0 or mask.shape[1] % 2 == 0:
            raise ValueError(f"structuring element needs odd side lengths, got {mask.shape}")
        if not mask[mask.shape[0] // 2, mask.shape[1] // 2]:
            raise ValueError("structuring element must contain its origin")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def square(cls, size: int = 3) -> "StructuringElement":
        return cls(np.ones((size, size), dtype=bool))

    @property
    def offsets(self) -> list[tuple[int, int]]:
        ry, rx = self.mask.shape[0] // 2, self.mask.shape[1] // 2
        return [(dy - ry, dx - rx) for dy, dx in zip(*np.nonzero(self.mask))]


def _window_reduce(img, se: StructuringElement, reduce) -> np.ndarray:
    arr = as_gray(img)
    ry, rx = se.mask.shape[0] // 2, se.mask.shape[1] // 2
    h, w = arr.shape
    if ry > h or rx > w:
        raise ValueError(f"structuring element {se.mask.shape} too large for image {arr.shape}")
    padded = np.pad(arr, ((ry, ry), (rx, rx)), mode="symmetric")
    out = None
    for dy, dx in se.offsets:
        view = padded[ry + dy : ry + dy + h, rx + dx : rx + dx + w]
        out = view.copy() if out is None else reduce(out, view)
    return out


def dilate(img, se: StructuringElement | None = None) -> np.ndarray:
    """Window maximum over the SE footprint."""
    return _window_reduce(img, se or StructuringElement.square(), np.maximum)


def erode(img, se: StructuringElement | None = None) -> np.ndarray:
    """Window minimum over the SE footprint."""
    return _window_reduce(img, se or StructuringElement.square(), np.minimum)


def _geodesic(marker, mask, step, bound):
    r = marker
    for _ in range(r.size):
        nxt = bound(step(r), mask)
        if np.array_equal(nxt, r):
            return nxt
        r = nxt
    return r


def reconstruct_by_dilation(marker, mask, se: StructuringElement | None = None) -> np.ndarray:
    """Iterate ``r <- min(dilate(r), mask)`` until it stops changing.

    Requires ``marker <= mask`` pointwise.
    """
    se = se or StructuringElement.square()
    marker, mask = as_gray(marker), as_gray(mask)
    if marker.shape != mask.shape:
        raise ValueError(f"marker {marker.shape} and mask {mask.shape} differ in shape")
    if np.any(marker > mask):
        raise ValueError("reconstruction by dilation requires marker <= mask")
    return _geodesic(marker, mask, lambda r: dilate(r, se), np.minimum)


def reconstruct_by_erosion(marker, mask, se: StructuringElement | None = None) -> np.ndarray:
    """Iterate ``r <- max(erode(r), mask)`` until it stops changing.

    Requires ``marker >= mask`` pointwise.
    """
    se = se or StructuringElement.square()
    marker, mask = as_gray(marker), as_gray(mask)
    if marker.shape != mask.shape:
        raise ValueError(f"marker {marker.shape} and mask {mask.shape} differ in shape")
    if np.any(marker < mask):
        raise ValueError("reconstruction by erosion requires marker >= mask")
    return _geodesic(marker, mask, lambda r: erode(r, se), np.maximum)


def opening_reconstruction(img, se: StructuringElement) -> np.ndarray:
    g = as_gray(img)
    return reconstruct_by_dilation(erode(g, se), g, se)


def closing_reconstruction(img, se: StructuringElement | None = None) -> np.ndarray:
    """Opening by reconstruction followed by closing by reconstruction.

    ``t = R^D_g(E(g))``, then ``R^E_t(D(t))``. Color images are filtered
    channel by channel.
    """
    se = se or StructuringElement.square()
    if is_color(img):
        return np.stack([closing_reconstruction(ch, se) for ch in channels(img)], axis=-1)
    t = opening_reconstruction(img, se)
    return reconstruct_by_erosion(dilate(t, se), t, se)


def weighted_sum(g, g_bar, alpha: float) -> np.ndarray:
    """Blend the observed and filtered images: ``(g + alpha * g_bar) / (1 + alpha)``."""
    g, g_bar = np.asarray(g, dtype=np.float64), np.asarray(g_bar, dtype=np.float64)
    if g.shape != g_bar.shape:
        raise ValueError(f"shape mismatch {g.shape} vs {g_bar.shape}")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    return (g + alpha * g_bar) / (1.0 + alpha)
