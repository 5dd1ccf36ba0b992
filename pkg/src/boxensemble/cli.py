"""Command line entry point: ``boxensemble {ensemble,score,compare,generate}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .ensemble import EnsembleConfig, ensemble_dataset
from .errors import BoxEnsembleError
from .io import (
    read_ground_truth,
    read_predictions,
    write_ground_truth_csv,
    write_predictions_csv,
    write_report,
)
from .metric import MetricConfig, dataset_score, default_thresholds
from .synth import SyntheticConfig, generate_benchmark


def parse_thresholds(text: str) -> tuple[float, ...]:
    """``start:stop:step`` with both endpoints included."""
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}") from None
    if not (step > 0 and stop >= start and all(map(math.isfinite, (start, stop, step)))):
        raise argparse.ArgumentTypeError(f"{text!r} does not give an increasing list")
    n = round((stop - start) / step)
    if abs(start + n * step - stop) > 1e-9:
        raise argparse.ArgumentTypeError(f"{text!r}: stop is not reachable from start by step")
    values = tuple(round(start + k * step, 12) for k in range(n + 1))
    try:
        MetricConfig(values)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return values


def _add_ensemble_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-scale", type=float, default=4.0, help="score divisor (default 4)")
    p.add_argument("--alpha", type=float, default=0.1, help="std weight on fused corners (default 0.1)")
    p.add_argument("--pre-threshold", type=float, default=0.5,
                   help="drop input boxes scoring below this (default 0.5)")
    p.add_argument("--cluster-iou", type=float, default=0.25,
                   help="IoU with the seed box needed to join a group (default 0.25)")
    p.add_argument("--post-threshold", type=float, default=0.25,
                   help="drop fused boxes scoring below this (default 0.25)")
    p.add_argument("--corner-mode", choices=("literal", "signed"), default="literal")


def _ensemble_config(args) -> EnsembleConfig:
    return EnsembleConfig(
        pre_threshold=args.pre_threshold,
        cluster_iou=args.cluster_iou,
        n_scale=args.n_scale,
        alpha=args.alpha,
        post_threshold=args.post_threshold,
        corner_mode=args.corner_mode,
    )


def _emit(data: bytes, output: str | None) -> None:
    if output:
        Path(output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def cmd_ensemble(args) -> int:
    cfg = _ensemble_config(args)
    sets = [read_predictions(path) for path in args.input]
    stats: dict = {}
    fused = ensemble_dataset(sets, cfg, stats)
    Path(args.output).write_bytes(write_predictions_csv(fused))
    for s in sets:
        print(f"input {s.model_id}: {s.n_detections()} detections")
    print(f"kept after pre-threshold: {stats.get('kept', 0)}")
    print(f"clusters formed: {stats.get('clusters', 0)}")
    print(f"survivors: {stats.get('survivors', 0)}")
    return 0


def cmd_score(args) -> int:
    report = dataset_score(
        read_predictions(args.predictions), read_ground_truth(args.ground_truth),
        MetricConfig(args.thresholds),
    )
    _emit(write_report(report, args.format), args.output)
    return 0


@dataclass
class CompareReport:
    per_model_scores: list[tuple[str, float]]
    model_average: float
    ensemble_score: float

    def table(self) -> str:
        w = max([len("Model Average")] + [len(t) + 2 for t, _ in self.per_model_scores]) + 2
        rows = [f"{'':<{w}}{'mC':>8}"]
        for tag, mc in self.per_model_scores:
            rows.append(f"{'  ' + tag:<{w}}{mc:>8.4f}")
        rows.append(f"{'Model Average':<{w}}{self.model_average:>8.4f}")
        rows.append(f"{'Ensemble':<{w}}{self.ensemble_score:>8.4f}")
        return "\n".join(rows) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "per_model_scores": [{"model_id": t, "mc": v} for t, v in self.per_model_scores],
            "model_average": self.model_average,
            "ensemble_score": self.ensemble_score,
        }, sort_keys=True) + "\n"


def compare(sets, gts, ens_cfg: EnsembleConfig, metric_cfg: MetricConfig) -> CompareReport:
    """Score every model alone, their mean, and the fused set."""
    per_model = [(str(s.model_id), dataset_score(s, gts, metric_cfg).mc_dataset) for s in sets]
    average = math.fsum(v for _, v in per_model) / len(per_model)
    fused = ensemble_dataset(sets, ens_cfg)
    return CompareReport(per_model, average, dataset_score(fused, gts, metric_cfg).mc_dataset)


def cmd_compare(args) -> int:
    sets = [read_predictions(path) for path in args.input]
    report = compare(sets, read_ground_truth(args.ground_truth), _ensemble_config(args),
                     MetricConfig(args.thresholds))
    _emit((report.to_json() if args.json else report.table()).encode("utf-8"), None)
    return 0


def cmd_generate(args) -> int:
    cfg = SyntheticConfig(
        images=args.images,
        positives_fraction=args.positives_fraction,
        models=args.models,
        seed=args.seed,
        jitter=args.jitter,
        drop_rate=args.drop_rate,
        spurious_rate=args.spurious_rate,
    )
    gts, sets = generate_benchmark(cfg)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "ground_truth.csv").write_bytes(write_ground_truth_csv(gts))
    for s in sets:
        (out / f"{s.model_id}.csv").write_bytes(write_predictions_csv(s))
    print(f"wrote ground_truth.csv and {len(sets)} prediction files to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxensemble",
        description="Fuse detector submissions and score them with the RSNA pneumonia metric.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ensemble", help="fuse several submission files into one")
    p.add_argument("--input", action="append", required=True, help="submission CSV, once per model")
    p.add_argument("--output", required=True)
    _add_ensemble_flags(p)
    p.set_defaults(func=cmd_ensemble)

    thresholds_help = "inclusive start:stop:step (default 0.40:0.75:0.05)"
    p = sub.add_parser("score", help="score a submission against ground truth")
    p.add_argument("--predictions", required=True)
    p.add_argument("--ground-truth", required=True)
    p.add_argument("--thresholds", type=parse_thresholds, default=tuple(default_thresholds()),
                   help=thresholds_help)
    p.add_argument("--format", choices=("summary", "json", "csv"), default="summary")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("compare", help="single-model average versus ensemble")
    p.add_argument("--input", action="append", required=True)
    p.add_argument("--ground-truth", required=True)
    p.add_argument("--thresholds", type=parse_thresholds, default=tuple(default_thresholds()),
                   help=thresholds_help)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    _add_ensemble_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser(
        "generate",
        help="write a seeded synthetic benchmark",
        description="Ground-truth boxes are perturbed per model by uniform corner noise "
                    "(std JITTER px), dropped with probability DROP_RATE, and padded with "
                    "Poisson(SPURIOUS_RATE) random boxes per image.",
    )
    p.add_argument("--images", type=int, default=1000)
    p.add_argument("--positives-fraction", type=float, default=0.3)
    p.add_argument("--models", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jitter", type=float, default=10.0, help="corner noise std in pixels")
    p.add_argument("--drop-rate", type=float, default=0.1)
    p.add_argument("--spurious-rate", type=float, default=0.3)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BoxEnsembleError, ValueError, OSError) as exc:
        print(f"boxensemble {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
