"""Fusing per-model detections into consensus detections.

Pipeline for one image:

1. keep detections whose confidence is at least ``pre_threshold``;
2. group them by greedy seeding: walk detections in global order and let
   each unassigned seed absorb every unassigned detection whose IoU with
   the seed box is at least ``cluster_iou``;
3. per group, score = sum of member scores / ``n_scale`` and every box
   coordinate = median + ``alpha`` * population std of that coordinate;
4. drop fused detections scoring below ``post_threshold``.

``n_scale`` is a fixed divisor, not the group size, so a box found by few
models is penalised. With the defaults a lone box needs a score of 1.0 to
survive.
"""

from __future__ import annotations

import math
import statistics
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence, Union

from .errors import DegenerateResult, DuplicateModelTag, InvalidBoxError
from .geometry import Box, iou

__all__ = [
    "ENSEMBLE_TAG",
    "Cluster",
    "Detection",
    "EnsembleConfig",
    "PredictionSet",
    "cluster_detections",
    "ensemble_box",
    "ensemble_dataset",
    "ensemble_image",
    "ensemble_score",
    "filter_by_confidence",
    "detection_sort_key",
]

ENSEMBLE_TAG = "ensemble"

ModelId = Union[int, str]


@dataclass(frozen=True)
class Detection:
    """A scored box from one model.

    Detector scores lie in ``[0, 1]``. Fused scores may exceed 1 when a group
    has more members than ``n_scale``, so only ``score >= 0`` is enforced.
    """

    box: Box
    score: float
    model_id: ModelId = 0

    def __post_init__(self):
        if not (math.isfinite(self.score) and self.score >= 0.0):
            raise ValueError(f"score must be finite and non-negative, got {self.score!r}")


def detection_sort_key(det: Detection) -> tuple:
    """Global order: descending score, then box, then model tag."""
    return (-det.score, det.box.as_tuple(), str(det.model_id))


@dataclass
class Cluster:
    members: list[Detection]

    def __post_init__(self):
        if not self.members:
            raise ValueError("a cluster needs at least one member")

    @property
    def seed(self) -> Detection:
        return self.members[0]

    def __len__(self) -> int:
        return len(self.members)


CORNER_MODES = ("literal", "signed")


@dataclass(frozen=True)
class EnsembleConfig:
    pre_threshold: float = 0.50
    cluster_iou: float = 0.25
    n_scale: float = 4.0
    alpha: float = 0.1
    post_threshold: float = 0.25
    corner_mode: str = "literal"

    def __post_init__(self):
        if not 0.0 <= self.pre_threshold <= 1.0:
            raise ValueError(f"pre_threshold out of [0, 1]: {self.pre_threshold}")
        if not 0.0 <= self.post_threshold <= 1.0:
            raise ValueError(f"post_threshold out of [0, 1]: {self.post_threshold}")
        if not 0.0 < self.cluster_iou < 1.0:
            raise ValueError(f"cluster_iou out of (0, 1): {self.cluster_iou}")
        if not (self.n_scale > 0 and math.isfinite(self.n_scale)):
            raise ValueError(f"n_scale must be positive, got {self.n_scale}")
        if not math.isfinite(self.alpha):
            raise ValueError(f"alpha must be finite, got {self.alpha}")
        if self.corner_mode not in CORNER_MODES:
            raise ValueError(f"corner_mode must be one of {CORNER_MODES}")


@dataclass
class PredictionSet:
    """Detections of one model (or of the ensemble), keyed by image id."""

    model_id: ModelId
    entries: dict[str, list[Detection]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def image_ids(self) -> list[str]:
        return sorted(self.entries)

    def n_detections(self) -> int:
        return sum(len(v) for v in self.entries.values())


def filter_by_confidence(dets: Iterable[Detection], threshold: float) -> list[Detection]:
    return [d for d in dets if d.score >= threshold]


def cluster_detections(dets: Sequence[Detection], cluster_iou: float) -> list[Cluster]:
    """Greedy seeded grouping.

    Membership is decided against the seed box only, so the result is not a
    transitive closure: two members may overlap each other less than
    ``cluster_iou``, and a detection overlapping a member but not the seed
    starts its own group.
    """
    ordered = sorted(dets, key=detection_sort_key)
    assigned = [False] * len(ordered)
    clusters = []
    for i, seed in enumerate(ordered):
        if assigned[i]:
            continue
        assigned[i] = True
        members = [seed]
        for j in range(i + 1, len(ordered)):
            if not assigned[j] and iou(seed.box, ordered[j].box) >= cluster_iou:
                assigned[j] = True
                members.append(ordered[j])
        clusters.append(Cluster(members))
    return clusters


def ensemble_score(cluster: Cluster, n_scale: float) -> float:
    # one rounding of the exact rational sum / n_scale: independent of member
    # order, and K copies of s with n_scale == K give back s bit for bit
    total = sum(Fraction(d.score) for d in cluster.members)
    return float(total / Fraction(n_scale))


def _fuse_coordinate(values: list[float], alpha: float, sign: float) -> float:
    # statistics.pstdev works in exact rationals: order independent and
    # exactly 0.0 when all values agree
    return statistics.median(values) + sign * alpha * statistics.pstdev(values)


def ensemble_box(cluster: Cluster, alpha: float, mode: str = "literal") -> Box:
    """Fuse member boxes coordinate by coordinate.

    ``literal`` adds ``alpha * std`` to every coordinate. ``signed`` subtracts
    it from ``x_min``/``y_min`` and adds it to ``x_max``/``y_max``, growing the
    box outward; minimum coordinates are clamped at 0 in that mode.
    """
    if mode not in CORNER_MODES:
        raise ValueError(f"unknown corner mode {mode!r}")
    boxes = [d.box for d in cluster.members]
    lo_sign = 1.0 if mode == "literal" else -1.0
    x_min = _fuse_coordinate([b.x_min for b in boxes], alpha, lo_sign)
    y_min = _fuse_coordinate([b.y_min for b in boxes], alpha, lo_sign)
    x_max = _fuse_coordinate([b.x_max for b in boxes], alpha, 1.0)
    y_max = _fuse_coordinate([b.y_max for b in boxes], alpha, 1.0)
    if mode == "signed":
        x_min, y_min = max(0.0, x_min), max(0.0, y_min)
    try:
        return Box(x_min, y_min, x_max, y_max)
    except InvalidBoxError as exc:
        raise DegenerateResult(
            f"cluster seeded at {cluster.seed.box.as_tuple()} fused to an invalid box "
            f"({x_min}, {y_min}, {x_max}, {y_max})",
            cluster=cluster,
        ) from exc


def ensemble_image(
    per_model: Sequence[Sequence[Detection]],
    cfg: EnsembleConfig = EnsembleConfig(),
    stats: dict | None = None,
) -> list[Detection]:
    """Fuse one image's detections; ``per_model`` holds one list per model.

    If ``stats`` is given, the counts ``kept``, ``clusters`` and ``survivors``
    are added to it.
    """
    pooled = [d for dets in per_model for d in dets]
    kept = filter_by_confidence(pooled, cfg.pre_threshold)
    clusters = cluster_detections(kept, cfg.cluster_iou)
    fused = []
    for cluster in clusters:
        score = ensemble_score(cluster, cfg.n_scale)
        if score < cfg.post_threshold:
            continue
        box = ensemble_box(cluster, cfg.alpha, cfg.corner_mode)
        fused.append(Detection(box, score, ENSEMBLE_TAG))
    fused.sort(key=lambda d: (-d.score, d.box.as_tuple()))
    if stats is not None:
        for key, n in (("kept", len(kept)), ("clusters", len(clusters)), ("survivors", len(fused))):
            stats[key] = stats.get(key, 0) + n
    return fused


def ensemble_dataset(
    sets: Sequence[PredictionSet],
    cfg: EnsembleConfig = EnsembleConfig(),
    stats: dict | None = None,
) -> PredictionSet:
    """Run :func:`ensemble_image` on every image present in any input set."""
    seen: set[Hashable] = set()
    for s in sets:
        if s.model_id in seen:
            raise DuplicateModelTag(f"model tag {s.model_id!r} appears more than once")
        seen.add(s.model_id)
    image_ids = sorted({img for s in sets for img in s.entries})
    out = PredictionSet(ENSEMBLE_TAG)
    for img in image_ids:
        per_model = [s.entries.get(img, []) for s in sets]
        try:
            out.entries[img] = ensemble_image(per_model, cfg, stats)
        except DegenerateResult as exc:
            raise DegenerateResult(f"image {img}: {exc}", cluster=exc.cluster) from exc
    return out


def as_entries(obj: PredictionSet | Mapping[str, list]) -> Mapping[str, list]:
    return obj.entries if hasattr(obj, "entries") else obj
