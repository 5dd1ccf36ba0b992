"""
Fusing boxes from several detectors
===================================

Each model's boxes below 0.5 confidence are dropped, the rest are grouped
around the most confident box (IoU >= 0.25 with that seed), and each group
becomes one box:

* score = sum of member scores / 4, so a box seen by one model alone
  cannot reach the final 0.25 cut unless it scored 1.0;
* every coordinate = median + 0.1 * population std of that coordinate.
"""

from boxensemble import (
    Box,
    Detection,
    EnsembleConfig,
    cluster_detections,
    ensemble_box,
    ensemble_image,
    ensemble_score,
)

models = [
    [Detection(Box(100, 120, 300, 420), 0.92, "a"), Detection(Box(600, 100, 700, 200), 0.95, "a")],
    [Detection(Box(110, 118, 310, 400), 0.81, "b")],
    [Detection(Box(96, 130, 290, 430), 0.77, "c"), Detection(Box(650, 700, 700, 760), 0.45, "c")],
    [],
]

pooled = [d for m in models for d in m if d.score >= 0.5]
for k, cluster in enumerate(cluster_detections(pooled, 0.25)):
    print(f"group {k}: models {[d.model_id for d in cluster.members]}")
    print(f"  score {ensemble_score(cluster, 4):.4f}")
    print(f"  literal box {ensemble_box(cluster, 0.1, 'literal').as_tuple()}")
    print(f"  signed box  {ensemble_box(cluster, 0.1, 'signed').as_tuple()}")

###############################################################################
# The whole pipeline in one call. The lone box from model "a" (0.95 / 4)
# falls under the 0.25 cut; model "c"'s 0.45 box never enters.

for d in ensemble_image(models, EnsembleConfig()):
    print(d.score, d.box.as_tuple())

# ``corner_mode="signed"`` widens boxes outward instead of shifting them.
for d in ensemble_image(models, EnsembleConfig(corner_mode="signed")):
    print(d.score, d.box.as_tuple())
