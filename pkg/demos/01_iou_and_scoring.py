"""
Scoring one image with the challenge metric
===========================================

A prediction counts as a hit at threshold ``t`` when its IoU with a
still-unmatched ground-truth box is at least ``t``. Predictions are matched
one at a time, most confident first, so a confident but sloppy box can
take a ground truth that a later, better box needed.
"""

from boxensemble import Box, Detection, default_thresholds, image_score, iou, match_detections

# Two boxes sharing half of the wider one: IoU is exactly 1/2.
truth = Box(0, 0, 20, 10)
guess = Box(0, 0, 10, 10)
print("IoU:", iou(truth, guess))

# The image score averages TP / (TP + FP + FN) over eight thresholds
# 0.40, 0.45, ..., 0.75. Our box hits the first three only.
score = image_score("demo", [Detection(guess, 0.9)], [truth])
for t, c in score.per_threshold:
    print(f"  t={t:.2f}  C={c:.0f}")
print("image score:", score.c_i)          # 3/8

###############################################################################
# Greedy order matters
# --------------------
# Four predictions against four ground-truth boxes at t = 0.5. Visiting
# predictions by confidence forms two pairs; a different assignment of the
# same boxes would form three. The metric keeps the greedy answer.

preds = [
    Detection(Box(3, 2, 11, 12), 0.7),
    Detection(Box(1, 5, 5, 13), 0.9),
    Detection(Box(9, 3, 14, 4), 0.8),
    Detection(Box(4, 3, 10, 16), 0.6),
]
gts = [Box(2, 1, 14, 13), Box(9, 10, 13, 16), Box(1, 4, 5, 11), Box(2, 3, 11, 14)]
tally = match_detections(preds, gts, 0.5)
print(f"TP={tally.tp} FP={tally.fp} FN={tally.fn}")
for p, g, v in tally.matches:
    print(f"  prediction {p} (score {preds[p].score}) -> truth {g}, IoU {v:.3f}")

print("thresholds:", default_thresholds())
