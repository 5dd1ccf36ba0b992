"""Axis-aligned boxes and area intersection-over-union.

Coordinates are continuous pixel positions. Area is the geometric
``(x_max - x_min) * (y_max - y_min)``, with no inclusive ``+1`` pixel
convention, so boxes that only share an edge or corner do not overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidBoxError

__all__ = ["Box", "area", "intersection_area", "iou"]


@dataclass(frozen=True, order=True)
class Box:
    """Rectangle given by its top-left and bottom-right corners.

    Ordering is lexicographic on ``(x_min, y_min, x_max, y_max)``; it is
    used as a deterministic tie-break wherever detections are sorted.
    """

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        coords = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(c) for c in coords):
            raise InvalidBoxError(f"non-finite coordinate in {coords}")
        if self.x_min < 0 or self.y_min < 0:
            raise InvalidBoxError(f"negative coordinate in {coords}")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise InvalidBoxError(f"box has non-positive extent: {coords}")

    @classmethod
    def from_xywh(cls, x: float, y: float, width: float, height: float) -> "Box":
        return cls(x, y, x + width, y + height)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)


def area(b: Box) -> float:
    return (b.x_max - b.x_min) * (b.y_max - b.y_min)


def intersection_area(a: Box, b: Box) -> float:
    """Area shared by ``a`` and ``b``; zero for disjoint or edge-touching boxes."""
    w = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    h = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    return max(0.0, w) * max(0.0, h)


def iou(a: Box, b: Box) -> float:
    """Intersection over union of the two box areas, in ``[0, 1]``.

    The union is always positive because a valid box has positive area.
    """
    inter = intersection_area(a, b)
    union = area(a) + area(b) - inter
    return min(1.0, inter / union)
