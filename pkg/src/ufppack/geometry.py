"""Axis-aligned box arithmetic shared by every pipeline stage."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in pixel coordinates, corners (x1, y1) <= (x2, y2)."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        if self.x2 < self.x1 or self.y2 < self.y1:
            raise ValueError(f"degenerate box: ({self.x1},{self.y1},{self.x2},{self.y2})")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x1 + self.x2), 0.5 * (self.y1 + self.y2))

    def contains(self, other: "BBox", tol: float = 0.0) -> bool:
        return (
            self.x1 <= other.x1 + tol
            and self.y1 <= other.y1 + tol
            and other.x2 <= self.x2 + tol
            and other.y2 <= self.y2 + tol
        )

    def contains_point(self, x: float, y: float) -> bool:
        return self.x1 <= x <= self.x2 and self.y1 <= y <= self.y2


@dataclass(frozen=True)
class ImageExtent:
    width: float
    height: float

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"extent must be positive, got {self.width}x{self.height}")


def area(box: BBox) -> float:
    return box.width * box.height


def expand(box: BBox, beta: float, extent: ImageExtent) -> BBox:
    """Scale width and height by beta about the box center, clamped to the image."""
    if beta < 1.0:
        raise ValueError(f"expansion ratio must be >= 1, got {beta}")
    cx, cy = box.center
    hw = 0.5 * beta * box.width
    hh = 0.5 * beta * box.height
    return BBox(
        max(0.0, cx - hw),
        max(0.0, cy - hh),
        min(extent.width, cx + hw),
        min(extent.height, cy + hh),
    )


def enclosing(a: BBox, b: BBox) -> BBox:
    """Smallest box containing both inputs."""
    return BBox(min(a.x1, b.x1), min(a.y1, b.y1), max(a.x2, b.x2), max(a.y2, b.y2))


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union; 0 for disjoint or both-degenerate boxes."""
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = area(a) + area(b) - inter
    if union <= 0:
        return 0.0
    return inter / union
