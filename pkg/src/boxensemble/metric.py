"""Challenge scoring: greedy matching and the mean threshold coefficient.

For one image and threshold ``t`` predictions are visited in descending
confidence; each takes the still-unmatched ground-truth box with the
highest IoU, provided that IoU is at least ``t``. The coefficient is
``TP / (TP + FP + FN)``. An image scores the mean coefficient over all
thresholds, and the dataset scores the mean over images that have at least
one ground-truth or predicted box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .ensemble import Detection, as_entries
from .errors import EmptyEvaluation, UndefinedCoefficient
from .geometry import Box, iou

__all__ = [
    "ImageScore",
    "MetricConfig",
    "ScoreReport",
    "ThresholdTally",
    "dataset_score",
    "default_thresholds",
    "image_score",
    "match_detections",
    "score_coefficient",
]


def default_thresholds() -> list[float]:
    """0.40, 0.45, ..., 0.75 as the nearest doubles to the decimal values."""
    return [round(0.40 + 0.05 * k, 2) for k in range(8)]


@dataclass(frozen=True)
class MetricConfig:
    thresholds: tuple[float, ...] = field(default_factory=lambda: tuple(default_thresholds()))

    def __post_init__(self):
        ts = tuple(float(t) for t in self.thresholds)
        object.__setattr__(self, "thresholds", ts)
        if not ts:
            raise ValueError("at least one threshold is required")
        if any(not 0.0 < t < 1.0 for t in ts):
            raise ValueError(f"thresholds must lie in (0, 1): {ts}")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError(f"thresholds must be strictly increasing: {ts}")


@dataclass
class ThresholdTally:
    threshold: float
    tp: int
    fp: int
    fn: int
    # (prediction input index, ground-truth input index, iou)
    matches: list[tuple[int, int, float]] = field(default_factory=list)


@dataclass
class ImageScore:
    image_id: str
    tallies: list[ThresholdTally]
    c_i: float | None
    included: bool

    @property
    def per_threshold(self) -> list[tuple[float, float]]:
        return [(t.threshold, score_coefficient(t)) for t in self.tallies]


@dataclass
class ScoreReport:
    per_image: list[ImageScore]
    mc_dataset: float
    included_count: int

    @property
    def excluded_count(self) -> int:
        return len(self.per_image) - self.included_count


def _prediction_order(preds: Sequence[Detection]) -> list[int]:
    return sorted(range(len(preds)), key=lambda i: (-preds[i].score, preds[i].box.as_tuple(), i))


def _match(preds: Sequence[Detection], gts: Sequence[Box], t: float, order: list[int],
           ious: list[list[float]]) -> ThresholdTally:
    taken = [False] * len(gts)
    matches = []
    for pi in order:
        best, best_iou = -1, -1.0
        for gi in range(len(gts)):
            if taken[gi]:
                continue
            v = ious[pi][gi]
            # strict > keeps the lowest index on ties
            if v >= t and v > best_iou:
                best, best_iou = gi, v
        if best >= 0:
            taken[best] = True
            matches.append((pi, best, best_iou))
    tp = len(matches)
    return ThresholdTally(t, tp, len(preds) - tp, len(gts) - tp, matches)


def _iou_table(preds: Sequence[Detection], gts: Sequence[Box]) -> list[list[float]]:
    return [[iou(p.box, g) for g in gts] for p in preds]


def match_detections(preds: Sequence[Detection], gts: Sequence[Box], t: float) -> ThresholdTally:
    """One-to-one greedy matching of predictions to ground truth at threshold ``t``.

    Predictions are sorted internally by descending score, then box, then
    input position. The result is not necessarily a maximum matching.
    """
    return _match(preds, gts, t, _prediction_order(preds), _iou_table(preds, gts))


def score_coefficient(tally: ThresholdTally) -> float:
    denom = tally.tp + tally.fp + tally.fn
    if denom == 0:
        raise UndefinedCoefficient(
            f"no predictions and no ground truth at threshold {tally.threshold}"
        )
    return tally.tp / denom


def image_score(image_id: str, preds: Sequence[Detection], gts: Sequence[Box],
                cfg: MetricConfig = MetricConfig()) -> ImageScore:
    if not preds and not gts:
        return ImageScore(image_id, [], None, False)
    order = _prediction_order(preds)
    ious = _iou_table(preds, gts)
    tallies = [_match(preds, gts, t, order, ious) for t in cfg.thresholds]
    c_i = math.fsum(score_coefficient(t) for t in tallies) / len(tallies)
    return ImageScore(image_id, tallies, c_i, True)


def dataset_score(preds, gts, cfg: MetricConfig = MetricConfig()) -> ScoreReport:
    """Score a prediction set against ground truth.

    ``preds`` and ``gts`` may be a :class:`PredictionSet` / ``GroundTruthSet``
    or plain mappings from image id to detections / boxes. Images missing on
    one side count as having no boxes there.
    """
    pred_map: Mapping = as_entries(preds)
    gt_map: Mapping = as_entries(gts)
    per_image = []
    for img in sorted(set(pred_map) | set(gt_map)):
        per_image.append(image_score(img, pred_map.get(img, []), gt_map.get(img, []), cfg))
    scored = [s.c_i for s in per_image if s.included]
    if not scored:
        raise EmptyEvaluation("no image has a ground-truth or predicted box")
    mc = math.fsum(scored) / len(scored)
    return ScoreReport(per_image, mc, len(scored))
