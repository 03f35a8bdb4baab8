"""Coordinate transfer between mosaic and source image, plus detection fusion.

A box is owned by the placement that contains its center; boxes straddling a
seam are clipped to their owner. Detections landing in the gutter between
placements map to nothing and are dropped.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .geometry import BBox, iou
from .mosaic import MosaicLayout, Placement


@dataclass(frozen=True)
class Detection:
    box: BBox
    score: float
    category: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0,1], got {self.score}")
        if self.category < 0:
            raise ValueError(f"category must be nonnegative, got {self.category}")


def _owner_by_dest(layout: MosaicLayout, x: float, y: float) -> Optional[Placement]:
    for p in layout.placements:
        if p.dest_box().contains_point(x, y):
            return p
    return None


def _owner_by_source(layout: MosaicLayout, x: float, y: float) -> Optional[Placement]:
    for p in layout.placements:
        if p.source.contains_point(x, y):
            return p
    return None


def to_source(det: Detection, layout: MosaicLayout) -> Optional[Detection]:
    """Map a mosaic-coordinate detection back to source-image coordinates.

    Returns None when the detection center falls in the gutter (no owning
    placement). The mapped box is clipped to the owner's source region.
    """
    cx, cy = det.box.center
    p = _owner_by_dest(layout, cx, cy)
    if p is None:
        return None
    src = p.source
    x1 = (det.box.x1 - p.dest_x) / p.scale + src.x1
    y1 = (det.box.y1 - p.dest_y) / p.scale + src.y1
    x2 = (det.box.x2 - p.dest_x) / p.scale + src.x1
    y2 = (det.box.y2 - p.dest_y) / p.scale + src.y1
    box = BBox(
        min(max(x1, src.x1), src.x2),
        min(max(y1, src.y1), src.y2),
        min(max(x2, src.x1), src.x2),
        min(max(y2, src.y1), src.y2),
    )
    return Detection(box, det.score, det.category)


def to_mosaic(box: BBox, layout: MosaicLayout) -> Optional[BBox]:
    """Forward-map a source-image box into mosaic coordinates.

    Ownership is by box center; returns None when the center lies inside no
    placement's source region.
    """
    cx, cy = box.center
    p = _owner_by_source(layout, cx, cy)
    if p is None:
        return None
    return BBox(
        (box.x1 - p.source.x1) * p.scale + p.dest_x,
        (box.y1 - p.source.y1) * p.scale + p.dest_y,
        (box.x2 - p.source.x1) * p.scale + p.dest_x,
        (box.y2 - p.source.y1) * p.scale + p.dest_y,
    )


def nms(dets: Sequence[Detection], iou_threshold: float) -> list[Detection]:
    """Per-category greedy NMS by descending score, deterministic tie-breaks."""
    order = sorted(
        range(len(dets)), key=lambda i: (-dets[i].score, dets[i].category, i)
    )
    keep: list[Detection] = []
    for i in order:
        d = dets[i]
        if all(
            k.category != d.category or iou(k.box, d.box) <= iou_threshold
            for k in keep
        ):
            keep.append(d)
    return keep


def fuse(
    coarse: Sequence[Detection], fine: Sequence[Detection], iou_threshold: float = 0.5
) -> list[Detection]:
    """Concatenate coarse and fine detections and run per-category NMS."""
    return nms(list(coarse) + list(fine), iou_threshold)
