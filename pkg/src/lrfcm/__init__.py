"""Residual-sparse fuzzy C-means segmentation with morphological prefiltering
and tight wavelet frame features."""

from .clustering import NeighborhoodSpec, SolverConfig, SolverResult, run_baseline_fcm, run_lrfcm
from .errors import DivergenceError, FormatError, StageError
from .frames import FeatureSet, build_filter_bank, decompose, reconstruct
from .image import read_image, write_image
from .metrics import EvaluationReport, entropy_information, evaluate, segmentation_accuracy
from .morphology import StructuringElement, closing_reconstruction, weighted_sum
from .pipeline import PipelineConfig, PipelineResult, ablate, run_pipeline
from .synth import NoiseSpec, generate_four_level

__all__ = [
    "DivergenceError",
    "EvaluationReport",
    "FeatureSet",
    "FormatError",
    "NeighborhoodSpec",
    "NoiseSpec",
    "PipelineConfig",
    "PipelineResult",
    "SolverConfig",
    "SolverResult",
    "StageError",
    "StructuringElement",
    "ablate",
    "build_filter_bank",
    "closing_reconstruction",
    "decompose",
    "entropy_information",
    "evaluate",
    "generate_four_level",
    "read_image",
    "reconstruct",
    "run_baseline_fcm",
    "run_lrfcm",
    "run_pipeline",
    "segmentation_accuracy",
    "weighted_sum",
    "write_image",
]
