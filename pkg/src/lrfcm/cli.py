"""Command-line interface: ``segment``, ``evaluate``, ``generate``, ``ablate``, ``decompose``.

Exit codes: 0 success, 1 I/O error, 2 usage error, 3 input format error,
4 numerical divergence.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys

import numpy as np

from . import frames, labeling, metrics, synth
from .errors import DivergenceError, FormatError, StageError
from .image import read_image, write_image
from .pipeline import PipelineConfig, ablate, format_ablation, run_pipeline

log = logging.getLogger("lrfcm")

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_FORMAT, EXIT_DIVERGED = 0, 1, 2, 3, 4


class _Outputs:
    """Track written files so a failed run leaves nothing half-done behind."""

    def __init__(self):
        self.paths = []

    def add(self, path):
        self.paths.append(str(path))
        return path

    def cleanup(self):
        for p in self.paths:
            try:
                os.remove(p)
            except FileNotFoundError:
                pass


# ---------------------------------------------------------------- config flags

# (flag, field, type)
_CONFIG_FLAGS = (
    ("--clusters", "clusters", int),
    ("--fuzzifier", "fuzzifier", float),
    ("--epsilon", "epsilon", float),
    ("--alpha", "alpha", float),
    ("--beta-scale", "beta_scale", float),
    ("--window-radius", "window_radius", int),
    ("--se-size", "se_size", int),
    ("--max-iter", "max_iter", int),
    ("--seed", "seed", int),
)
_SWITCHES = (
    ("--no-mr", "enable_mr_filter"),
    ("--no-frames", "enable_frames"),
    ("--no-l0", "enable_l0"),
    ("--no-smooth", "enable_label_smoothing"),
)


def _add_config_flags(p):
    g = p.add_argument_group("pipeline configuration")
    g.add_argument("--config", help="JSON file with PipelineConfig fields; flags override it")
    for flag, name, typ in _CONFIG_FLAGS:
        g.add_argument(flag, dest=name, type=typ, default=argparse.SUPPRESS)
    g.add_argument(
        "--threshold-convention", dest="threshold_convention", choices=("magnitude", "literal"),
        default=argparse.SUPPRESS,
    )
    g.add_argument(
        "--residual-rule", dest="residual_rule", choices=("exact", "unscaled"), default=argparse.SUPPRESS,
        help="exact: objective-minimizing threshold; unscaled: threshold on the penalty weight alone",
    )
    for flag, name in _SWITCHES:
        g.add_argument(flag, dest=name, action="store_false", default=argparse.SUPPRESS)


def config_from_args(args) -> PipelineConfig:
    values = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            values.update(json.load(fh))
    names = {f.name for f in dataclasses.fields(PipelineConfig)}
    values.update({k: v for k, v in vars(args).items() if k in names})
    return PipelineConfig.from_dict(values)


# ---------------------------------------------------------------- subcommands


def _write_trace(path, result):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "objective", "delta_u", "nonzero_residuals"])
        for row in result.trace_rows():
            w.writerow([row[0], repr(row[1]), repr(row[2]), row[3]])


def cmd_segment(args, out: _Outputs) -> int:
    cfg = config_from_args(args)
    img = read_image(args.input)
    res = run_pipeline(img, cfg)
    write_image(res.segmented, out.add(args.output))
    paths = {"segmented": str(args.output)}
    if args.labels:
        write_image(labeling.labels_to_gray(res.labels, cfg.clusters), out.add(args.labels))
        paths["labels"] = str(args.labels)
    if args.trace:
        _write_trace(out.add(args.trace), res.solver)
        paths["trace"] = str(args.trace)
    report = {
        "config": cfg.to_dict(),
        "iterations": res.solver.iterations,
        "converged": res.solver.converged,
        "reseeded": res.solver.reseeded,
        "stage_ms": res.stage_ms,
        "total_ms": res.total_ms,
        "objective_trace_path": paths.get("trace"),
        "outputs": paths,
        "metrics": None,
    }
    if args.truth:
        truth = _label_image(args.truth)
        report["metrics"] = metrics.evaluate(res.labels, truth, res.segmented).to_dict()
    if args.report:
        with open(out.add(args.report), "w") as fh:
            json.dump(report, fh, indent=2)
    log.info("segmented %s in %d iterations", args.input, res.solver.iterations)
    return EXIT_OK


def _label_image(path):
    img = read_image(path)
    if img.ndim == 3:
        raise ValueError(f"{path}: label images must be grayscale")
    return np.floor(img + 0.5).astype(np.int64)


def cmd_evaluate(args, out: _Outputs) -> int:
    pred = _label_image(args.pred)
    truth = _label_image(args.truth) if args.truth else None
    seg = read_image(args.seg) if args.seg else None
    report = metrics.evaluate(pred, truth, seg)
    json.dump(report.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_generate(args, out: _Outputs) -> int:
    clean, labels = synth.generate_four_level((args.height, args.width))
    noise = synth.NoiseSpec(args.noise, args.std, args.density, args.seed)
    noisy = noise.apply(clean)
    os.makedirs(args.outdir, exist_ok=True)
    for name, img in (("clean", clean), ("noisy", noisy), ("truth", labeling.labels_to_gray(labels, 4))):
        write_image(img, out.add(os.path.join(args.outdir, f"{args.prefix}{name}.pgm")))
    return EXIT_OK


def cmd_ablate(args, out: _Outputs) -> int:
    cfg = config_from_args(args)
    if args.input:
        img = read_image(args.input)
        truth = _label_image(args.truth) if args.truth else None
    else:
        img, truth = synth.generate_four_level((args.height, args.width))
        img = synth.NoiseSpec(args.noise, args.std, args.density, args.noise_seed).apply(img)
    rows = ablate(img, truth, cfg)
    print(format_ablation(rows))
    if args.json:
        with open(out.add(args.json), "w") as fh:
            json.dump([dataclasses.asdict(r) for r in rows], fh, indent=2)
    return EXIT_OK


def _normalize(ch):
    lo, hi = float(ch.min()), float(ch.max())
    if hi - lo <= 0:
        return np.zeros_like(ch)
    return 255.0 * (ch - lo) / (hi - lo)


def cmd_decompose(args, out: _Outputs) -> int:
    img = read_image(args.input)
    fs = frames.decompose(img)
    err = float(np.max(np.abs(frames.reconstruct(fs) - img)))
    os.makedirs(args.outdir, exist_ok=True)
    grid = fs.grid()
    n = len(frames.FILTER_BANK)
    for k, ch in enumerate(grid):
        block, idx = divmod(k, n)
        p, q = divmod(idx, 3)
        suffix = f"_c{block}" if fs.blocks > 1 else ""
        write_image(_normalize(ch), out.add(os.path.join(args.outdir, f"channel_k{p}{q}{suffix}.pgm")))
    print(f"max-abs reconstruction error: {err:.3e}")
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lrfcm", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="segment one image")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="segmented image path (.pgm/.ppm/.png)")
    p.add_argument("--labels", help="label image path (PGM, labels spread over gray levels)")
    p.add_argument("--report", help="RunReport JSON path")
    p.add_argument("--trace", help="objective trace CSV path")
    p.add_argument("--truth", help="ground-truth label image; adds SA/EI to the report")
    _add_config_flags(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("evaluate", help="SA and EI of a label image")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth")
    p.add_argument("--seg", help="segmented image for EI")
    p.set_defaults(func=cmd_evaluate)

    def synth_flags(p, seed_name):
        p.add_argument("--height", type=int, default=256)
        p.add_argument("--width", type=int, default=256)
        p.add_argument("--noise", choices=("gaussian", "impulse", "mixed"), default="mixed")
        p.add_argument("--std", type=float, default=30.0)
        p.add_argument("--density", type=float, default=0.2)
        p.add_argument(seed_name, dest=seed_name.lstrip("-").replace("-", "_"), type=int, default=0)

    p = sub.add_parser("generate", help="write the synthetic four-level image, a noisy copy and the truth")
    p.add_argument("outdir")
    p.add_argument("--prefix", default="")
    synth_flags(p, "--seed")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("ablate", help="run the ten component combinations")
    p.add_argument("--input", help="image to segment; default is the noisy synthetic image")
    p.add_argument("--truth", help="ground-truth labels for SA")
    p.add_argument("--json", help="write rows as JSON")
    synth_flags(p, "--noise-seed")
    _add_config_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("decompose", help="dump the nine frame channels as PGMs")
    p.add_argument("input")
    p.add_argument("outdir")
    p.set_defaults(func=cmd_decompose)
    return ap


def _root_cause(exc):
    while isinstance(exc, StageError):
        exc = exc.cause
    return exc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    out = _Outputs()
    try:
        return args.func(args, out)
    except Exception as exc:
        out.cleanup()
        cause = _root_cause(exc)
        print(f"lrfcm: error: {exc}", file=sys.stderr)
        if isinstance(cause, FormatError):
            return EXIT_FORMAT
        if isinstance(cause, DivergenceError):
            return EXIT_DIVERGED
        if isinstance(cause, OSError):
            return EXIT_IO
        if isinstance(cause, (ValueError, TypeError, NotImplementedError)):
            return EXIT_USAGE
        raise
