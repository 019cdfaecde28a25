"""Segmentation accuracy (SA) and entropy-based information (EI)."""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

EXHAUSTIVE_LIMIT = 8


@dataclass
class EvaluationReport:
    sa_percent: float | None = None
    e1: float | None = None
    e2: float | None = None
    ei: float | None = None
    matching: dict = field(default_factory=dict)
    pixels: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["matching"] = {str(k): v for k, v in self.matching.items()}
        return d


def contingency(pred, truth):
    """Overlap counts between predicted clusters (rows) and true classes (columns)."""
    pred, truth = np.asarray(pred).ravel(), np.asarray(truth).ravel()
    p_vals, p_idx = np.unique(pred, return_inverse=True)
    t_vals, t_idx = np.unique(truth, return_inverse=True)
    table = np.zeros((len(p_vals), len(t_vals)), dtype=np.int64)
    np.add.at(table, (p_idx, t_idx), 1)
    return p_vals, t_vals, table


def _best_assignment(table):
    n_p, n_t = table.shape
    if max(n_p, n_t) <= EXHAUSTIVE_LIMIT:
        best, best_pairs = -1, []
        if n_p <= n_t:
            for perm in itertools.permutations(range(n_t), n_p):
                score = sum(table[i, j] for i, j in enumerate(perm))
                if score > best:
                    best, best_pairs = score, list(enumerate(perm))
        else:
            for perm in itertools.permutations(range(n_p), n_t):
                score = sum(table[i, j] for j, i in enumerate(perm))
                if score > best:
                    best, best_pairs = score, sorted((i, j) for j, i in enumerate(perm))
        return best, best_pairs
    rows, cols = linear_sum_assignment(table, maximize=True)
    return int(table[rows, cols].sum()), list(zip(rows.tolist(), cols.tolist()))


def segmentation_accuracy(pred, truth) -> tuple[float, dict]:
    """Percentage of pixels matched under the best one-to-one relabeling.

    Returns ``(sa_percent, matching)`` where ``matching`` maps predicted
    labels to ground-truth labels.
    """
    pred, truth = np.asarray(pred), np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {truth.shape}")
    p_vals, t_vals, table = contingency(pred, truth)
    score, pairs = _best_assignment(table)
    matching = {p_vals[i].item(): t_vals[j].item() for i, j in pairs}
    return 100.0 * score / pred.size, matching


def _entropy(counts) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-np.sum(p * np.log(p)))


def entropy_information(seg, regions) -> tuple[float, float, float]:
    """``(E1, E2, EI)`` with natural logarithms.

    ``seg`` is quantized to integer gray levels first; for color images a
    gray level is the RGB triple.
    """
    seg = np.floor(np.clip(np.asarray(seg, dtype=np.float64), 0, 255) + 0.5).astype(np.int64)
    regions = np.asarray(regions)
    if seg.shape[:2] != regions.shape:
        raise ValueError(f"shape mismatch: {seg.shape[:2]} vs {regions.shape}")
    if seg.ndim == 3:
        seg = (seg[..., 0] << 16) | (seg[..., 1] << 8) | seg[..., 2]
    seg, regions = seg.ravel(), regions.ravel()
    total = seg.size
    e1 = 0.0
    sizes = []
    for r in np.unique(regions):
        values = seg[regions == r]
        _, counts = np.unique(values, return_counts=True)
        sizes.append(values.size)
        e1 += values.size * _entropy(counts) / total
    e2 = _entropy(np.array(sizes))
    return e1, e2, e1 + e2


def evaluate(pred=None, truth=None, seg=None) -> EvaluationReport:
    report = EvaluationReport()
    if pred is not None:
        report.pixels = int(np.asarray(pred).size)
    if pred is not None and truth is not None:
        report.sa_percent, report.matching = segmentation_accuracy(pred, truth)
    if pred is not None and seg is not None:
        report.e1, report.e2, report.ei = entropy_information(seg, pred)
    return report
