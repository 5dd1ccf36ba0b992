"""Seeded synthetic ground truth and noisy per-model predictions.

Noise model, per model and per ground-truth box:

* the box is missed with probability ``drop_rate``;
* otherwise each coordinate moves by uniform noise with standard deviation
  ``jitter`` pixels (half-width ``sqrt(3) * jitter``) and the confidence is
  ``0.8 + 0.1 * N(0, 1)`` clipped to ``[0.05, 1]``;
* on every image the model also emits ``Poisson(spurious_rate)`` random
  boxes with confidence uniform in ``[0.3, 0.9]``.

With ``jitter=0``, ``drop_rate=0`` and ``spurious_rate=0`` every model
reproduces the ground truth with confidence 1. Coordinates are rounded to
0.1 px and confidences to 1e-4 so files stay readable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import Detection, PredictionSet
from .geometry import Box
from .io import GroundTruthSet

__all__ = ["SyntheticConfig", "generate_benchmark"]


@dataclass(frozen=True)
class SyntheticConfig:
    images: int = 1000
    positives_fraction: float = 0.3
    models: int = 4
    seed: int = 0
    jitter: float = 10.0
    drop_rate: float = 0.1
    spurious_rate: float = 0.3
    image_size: float = 1024.0

    def __post_init__(self):
        if self.images < 0 or self.models < 1:
            raise ValueError("need images >= 0 and models >= 1")
        if not 0.0 <= self.positives_fraction <= 1.0:
            raise ValueError("positives_fraction must lie in [0, 1]")
        if not 0.0 <= self.drop_rate <= 1.0:
            raise ValueError("drop_rate must lie in [0, 1]")
        if self.jitter < 0 or self.spurious_rate < 0:
            raise ValueError("jitter and spurious_rate must be non-negative")
        if self.image_size < 256:
            raise ValueError("image_size must be at least 256")


def _truth_boxes(rng: np.random.Generator, size: float) -> list[Box]:
    # one or two boxes, one per image half, like left/right lung opacities
    n = 1 + int(rng.random() < 0.4)
    halves = rng.permutation(2)[:n]
    boxes = []
    for half in sorted(halves):
        w = rng.uniform(0.12, 0.25) * size
        h = rng.uniform(0.18, 0.40) * size
        lo = 0.05 * size + half * 0.5 * size
        x = rng.uniform(lo, lo + 0.45 * size - w)
        y = rng.uniform(0.05 * size, 0.95 * size - h)
        boxes.append(Box(*(round(v, 1) for v in (x, y, x + w, y + h))))
    return boxes


def _perturb(rng: np.random.Generator, box: Box, jitter: float, size: float) -> Box | None:
    half = math.sqrt(3.0) * jitter
    x0, y0, x1, y1 = (
        min(max(round(v + rng.uniform(-half, half), 1), 0.0), size)
        for v in box.as_tuple()
    )
    if x1 - x0 < 1.0 or y1 - y0 < 1.0:
        return None
    return Box(x0, y0, x1, y1)


def _random_box(rng: np.random.Generator, size: float) -> Box:
    w = rng.uniform(0.05, 0.25) * size
    h = rng.uniform(0.05, 0.35) * size
    x = rng.uniform(0.0, size - w)
    y = rng.uniform(0.0, size - h)
    return Box(*(round(v, 1) for v in (x, y, x + w, y + h)))


def generate_benchmark(cfg: SyntheticConfig) -> tuple[GroundTruthSet, list[PredictionSet]]:
    """Build ground truth and ``cfg.models`` prediction sets from ``cfg.seed``.

    Each model draws from its own child stream, so adding models never
    changes the ground truth or the earlier models.
    """
    truth_seq, *model_seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.models + 1)
    rng = np.random.default_rng(truth_seq)
    width = max(5, len(str(max(cfg.images - 1, 0))))
    ids = [f"img{i:0{width}d}" for i in range(cfg.images)]
    n_pos = round(cfg.images * cfg.positives_fraction)
    positive = set(rng.permutation(cfg.images)[:n_pos].tolist())
    gts = GroundTruthSet()
    for i, img in enumerate(ids):
        gts.entries[img] = _truth_boxes(rng, cfg.image_size) if i in positive else []

    noiseless = cfg.jitter == 0 and cfg.drop_rate == 0 and cfg.spurious_rate == 0
    sets = []
    for m, seq in enumerate(model_seqs):
        mrng = np.random.default_rng(seq)
        pset = PredictionSet(f"model_{m}")
        for img in ids:
            dets = []
            for b in gts.entries[img]:
                if mrng.random() < cfg.drop_rate:
                    continue
                score = 1.0 if noiseless else float(np.clip(0.8 + 0.1 * mrng.standard_normal(), 0.05, 1.0))
                moved = _perturb(mrng, b, cfg.jitter, cfg.image_size)
                if moved is not None:
                    dets.append(Detection(moved, round(score, 4), pset.model_id))
            for _ in range(mrng.poisson(cfg.spurious_rate)):
                score = round(float(mrng.uniform(0.3, 0.9)), 4)
                dets.append(Detection(_random_box(mrng, cfg.image_size), score, pset.model_id))
            pset.entries[img] = dets
        sets.append(pset)
    return gts, sets
