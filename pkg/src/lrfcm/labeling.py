"""Label extraction, morphological label smoothing and segmented-image assembly.

Label images are 2-D integer arrays with values in ``1..c``.
"""

from __future__ import annotations

import numpy as np

from .frames import FeatureSet, reconstruct
from .morphology import StructuringElement, closing_reconstruction


def argmax_labels(U: np.ndarray, height: int, width: int) -> np.ndarray:
    """Hard labels ``1 + argmax_i u_ij``; ties go to the smallest index."""
    U = np.asarray(U)
    if U.shape[1] != height * width:
        raise ValueError(f"partition has {U.shape[1]} columns, expected {height * width}")
    return (np.argmax(U, axis=0) + 1).reshape(height, width)


def smooth_labels(labels, se: StructuringElement | None = None, clusters: int | None = None) -> np.ndarray:
    """Closing reconstruction of the label image, re-rounded into ``[1, c]``."""
    labels = np.asarray(labels)
    c = int(labels.max()) if clusters is None else clusters
    out = closing_reconstruction(labels.astype(np.float64), se)
    return np.clip(np.floor(out + 0.5), 1, c).astype(np.int64)


def _check_labels(labels, V):
    labels = np.asarray(labels)
    if labels.min() < 1 or labels.max() > len(V):
        raise ValueError(f"labels must lie in [1, {len(V)}], got [{labels.min()}, {labels.max()}]")
    return labels


def assemble_segmented_features(labels, V: np.ndarray, blocks: int = 1) -> FeatureSet:
    """Column ``j`` becomes the prototype of pixel ``j``'s label."""
    V = np.asarray(V, dtype=np.float64)
    labels = _check_labels(labels, V)
    h, w = labels.shape
    return FeatureSet(V[labels.ravel() - 1].T, h, w, blocks)


def render_segmentation(labels, V: np.ndarray, blocks: int = 1, frames: bool = True) -> np.ndarray:
    """Segmented image from labels and prototypes.

    With ``frames`` the assembled features go through the frame
    reconstruction; otherwise prototypes are intensities already.
    """
    fs = assemble_segmented_features(labels, V, blocks)
    if frames:
        return reconstruct(fs)
    grid = fs.grid()
    return grid[0] if blocks == 1 else np.moveaxis(grid, 0, -1)


def labels_to_gray(labels, clusters: int | None = None) -> np.ndarray:
    """Spread labels over gray levels: ``i -> round(255 (i-1) / (c-1))``."""
    labels = np.asarray(labels)
    c = int(labels.max()) if clusters is None else clusters
    if c < 2:
        return np.zeros(labels.shape)
    return np.floor(255.0 * (labels - 1) / (c - 1) + 0.5)
