"""Piecewise-linear B-spline tight wavelet frame (undecimated, one level).

Decomposition correlates the symmetrically extended image with nine
3x3 tensor-product kernels. Reconstruction is the exact matrix adjoint of
that operator, including the boundary fold, so ``reconstruct(decompose(x))``
returns ``x`` everywhere, not just in the interior.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .image import as_gray, channels, is_color

_R2 = np.sqrt(2.0) / 4.0
A0 = np.array([0.25, 0.5, 0.25])
A1 = np.array([-0.25, 0.5, -0.25])
A2 = np.array([_R2, 0.0, -_R2])
FILTERS_1D = (A0, A1, A2)


def build_filter_bank() -> np.ndarray:
    """Return the ``(9, 3, 3)`` kernels ``a_p (x) a_q``, row-major in (p, q)."""
    return np.stack([np.outer(ap, aq) for ap in FILTERS_1D for aq in FILTERS_1D])


FILTER_BANK = build_filter_bank()
FILTER_BANK.setflags(write=False)


@dataclass
class FeatureSet:
    """``L x K`` feature matrix with the source image geometry.

    Column ``j`` is the feature vector of pixel ``j`` in row-major order.
    """

    data: np.ndarray
    height: int
    width: int
    blocks: int = field(default=1)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2 or self.data.shape[0] < 1:
            raise ValueError(f"feature data must be (L, K) with L >= 1, got {self.data.shape}")
        if self.data.shape[1] != self.height * self.width:
            raise ValueError(f"K={self.data.shape[1]} inconsistent with {self.height}x{self.width}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("feature data contains NaN or Inf")

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def pixels(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width

    def grid(self) -> np.ndarray:
        """View the data as ``(L, height, width)``."""
        return self.data.reshape(self.channels, self.height, self.width)

    @classmethod
    def from_grid(cls, grid, blocks: int = 1) -> "FeatureSet":
        grid = np.asarray(grid, dtype=np.float64)
        L, h, w = grid.shape
        return cls(grid.reshape(L, h * w), h, w, blocks)

    @classmethod
    def from_intensity(cls, img) -> "FeatureSet":
        """Raw intensities as features: one channel per gray/RGB plane."""
        return cls.from_grid(np.stack(channels(img)), blocks=3 if is_color(img) else 1)


def _decompose_gray(img) -> np.ndarray:
    arr = as_gray(img)
    h, w = arr.shape
    padded = np.pad(arr, 1, mode="symmetric")
    out = np.zeros((len(FILTER_BANK), h, w))
    for k, kernel in enumerate(FILTER_BANK):
        acc = out[k]
        for di in range(3):
            for dj in range(3):
                if kernel[di, dj] != 0.0:
                    acc += kernel[di, dj] * padded[di : di + h, dj : dj + w]
    return out


def _reconstruct_gray(coeffs: np.ndarray) -> np.ndarray:
    _, h, w = coeffs.shape
    padded = np.zeros((h + 2, w + 2))
    for k, kernel in enumerate(FILTER_BANK):
        for di in range(3):
            for dj in range(3):
                if kernel[di, dj] != 0.0:
                    padded[di : di + h, dj : dj + w] += kernel[di, dj] * coeffs[k]
    # transpose of the symmetric extension: fold the border onto the edge samples
    padded[1, :] += padded[0, :]
    padded[h, :] += padded[h + 1, :]
    padded[:, 1] += padded[:, 0]
    padded[:, w] += padded[:, w + 1]
    return padded[1 : h + 1, 1 : w + 1].copy()


def decompose(img, levels: int = 1) -> FeatureSet:
    """Frame decomposition ``X = W g``; color planes are stacked (L = 27)."""
    if levels != 1:
        raise NotImplementedError(f"only level-1 decomposition is supported, got levels={levels}")
    planes = channels(img)
    grid = np.concatenate([_decompose_gray(p) for p in planes])
    return FeatureSet.from_grid(grid, blocks=len(planes))


def reconstruct(fs: FeatureSet) -> np.ndarray:
    """Adjoint transform ``W^T``; returns a gray image, or RGB for 27 channels."""
    n = len(FILTER_BANK)
    if fs.channels != n * fs.blocks:
        raise ValueError(f"expected {n * fs.blocks} channels, got {fs.channels}")
    grid = fs.grid()
    planes = [_reconstruct_gray(grid[b * n : (b + 1) * n]) for b in range(fs.blocks)]
    if fs.blocks == 1:
        return planes[0]
    if fs.blocks == 3:
        return np.stack(planes, axis=-1)
    raise ValueError(f"cannot assemble an image from {fs.blocks} blocks")
