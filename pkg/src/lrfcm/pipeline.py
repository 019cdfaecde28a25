"""End-to-end segmentation: MR prefilter, frame features, l0-regularized
spatial FCM, label smoothing and segmented-image reconstruction.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import clustering, frames, labeling, metrics, morphology
from .errors import StageError
from .image import is_color

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    clusters: int = 4
    fuzzifier: float = 2.0
    epsilon: float = 1e-6
    alpha: float = 3.8
    beta_scale: float = 70.0
    window_radius: int = 1
    se_size: int = 3
    levels: int = 1
    max_iter: int = 300
    seed: int = 0
    threshold_convention: str = "magnitude"
    residual_rule: str = "exact"
    enable_mr_filter: bool = True
    enable_frames: bool = True
    enable_l0: bool = True
    enable_label_smoothing: bool = True

    def __post_init__(self):
        if self.se_size < 1 or self.se_size % 2 == 0:
            raise ValueError(f"se_size must be a positive odd integer, got {self.se_size}")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.window_radius < 0:
            raise ValueError("window_radius must be non-negative")
        if self.levels != 1:
            raise ValueError("only levels=1 is supported")
        # delegate the remaining numeric checks
        self.solver_config(beta=None)

    def solver_config(self, beta) -> clustering.SolverConfig:
        return clustering.SolverConfig(
            clusters=self.clusters,
            m=self.fuzzifier,
            epsilon=self.epsilon,
            max_iter=self.max_iter,
            beta=beta,
            beta_scale=self.beta_scale,
            seed=self.seed,
            threshold_convention=self.threshold_convention,
            residual_rule=self.residual_rule,
            update_residuals=self.enable_l0,
        )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "PipelineConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class PipelineResult:
    segmented: np.ndarray
    labels: np.ndarray
    raw_labels: np.ndarray
    solver: clustering.SolverResult
    features: frames.FeatureSet
    filtered: np.ndarray
    weighted: np.ndarray
    stage_ms: dict = field(default_factory=dict)
    total_ms: float = 0.0


class _Stages:
    def __init__(self):
        self.ms = {}

    def run(self, name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            out = fn(*args, **kwargs)
        except Exception as exc:
            raise StageError(name, exc) from exc
        self.ms[name] = (time.perf_counter() - t0) * 1000.0
        return out


def _lowpass_key(V: np.ndarray, blocks: int, with_frames: bool) -> np.ndarray:
    step = len(frames.FILTER_BANK) if with_frames else 1
    return V[:, [b * step for b in range(blocks)]].sum(axis=1)


def run_pipeline(img, cfg: PipelineConfig) -> PipelineResult:
    """Segment an in-memory gray or RGB image."""
    t_start = time.perf_counter()
    st = _Stages()
    se = morphology.StructuringElement.square(cfg.se_size)
    img = np.asarray(img, dtype=np.float64)
    blocks = 3 if is_color(img) else 1

    if cfg.enable_mr_filter:
        g_bar = st.run("mr_filter", morphology.closing_reconstruction, img, se)
    else:
        g_bar = img
    g_hat = st.run("weighted_sum", morphology.weighted_sum, img, g_bar, cfg.alpha)

    if cfg.enable_frames:
        X = st.run("features", frames.decompose, g_hat, cfg.levels)
    else:
        X = st.run("features", frames.FeatureSet.from_intensity, g_hat)

    nb = clustering.NeighborhoodSpec(cfg.window_radius)

    def cluster():
        beta = clustering.estimate_beta(X, cfg.beta_scale)
        res = clustering.run_lrfcm(X, nb, cfg.solver_config(beta))
        order = np.argsort(_lowpass_key(res.V, blocks, cfg.enable_frames), kind="stable")
        res.V, res.U = res.V[order], res.U[order]
        return res

    res = st.run("clustering", cluster)
    raw = st.run("labels", labeling.argmax_labels, res.U, X.height, X.width)
    if cfg.enable_label_smoothing:
        smoothed = st.run("label_smoothing", labeling.smooth_labels, raw, se, cfg.clusters)
    else:
        smoothed = raw
    seg = st.run("render", labeling.render_segmentation, smoothed, res.V, blocks, cfg.enable_frames)
    total = (time.perf_counter() - t_start) * 1000.0
    return PipelineResult(seg, smoothed, raw, res, X, g_bar, g_hat, st.ms, total)


# ------------------------------------------------------------------ ablation

# (mr_filter, frames, l0, label_smoothing), in the order of the reference table
ABLATION_ROWS = (
    (False, False, False, False),
    (True, False, False, False),
    (False, True, False, False),
    (False, False, True, False),
    (False, False, False, True),
    (True, True, True, False),
    (True, True, False, True),
    (True, False, True, True),
    (False, True, True, True),
    (True, True, True, True),
)


def ablation_configs(base: PipelineConfig):
    for mr, fr, l0, sm in ABLATION_ROWS:
        yield dataclasses.replace(
            base, enable_mr_filter=mr, enable_frames=fr, enable_l0=l0, enable_label_smoothing=sm
        )


@dataclass
class AblationRow:
    mr_filter: bool
    frames: bool
    l0: bool
    label_smoothing: bool
    sa_percent: float | None = None
    iterations: int | None = None
    total_ms: float | None = None
    error: str | None = None


def ablate(img, truth, base: PipelineConfig) -> list[AblationRow]:
    """Run every switch combination; a failing row is recorded, not raised."""
    rows = []
    for cfg in ablation_configs(base):
        row = AblationRow(cfg.enable_mr_filter, cfg.enable_frames, cfg.enable_l0, cfg.enable_label_smoothing)
        try:
            out = run_pipeline(img, cfg)
            row.iterations = out.solver.iterations
            row.total_ms = out.total_ms
            if truth is not None:
                row.sa_percent = metrics.segmentation_accuracy(out.labels, truth)[0]
        except StageError as exc:
            row.error = str(exc)
            log.warning("ablation row %s failed: %s", row, exc)
        rows.append(row)
    return rows


def format_ablation(rows) -> str:
    mark = {True: "on", False: "off"}
    lines = ["mr_filter  frames  l0   smoothing  SA(%)     iterations"]
    for r in rows:
        sa = "failed" if r.error else ("-" if r.sa_percent is None else f"{r.sa_percent:8.4f}")
        it = "-" if r.iterations is None else str(r.iterations)
        lines.append(
            f"{mark[r.mr_filter]:<10} {mark[r.frames]:<7} {mark[r.l0]:<4} {mark[r.label_smoothing]:<10} {sa:<9} {it}"
        )
    return "\n".join(lines)
