"""End-to-end glue: coarse detections -> merged regions -> equalized mosaic.

Also computes the mosaic-side statistics used to evaluate how packing shifts
foreground coverage and object size distribution.
"""
from __future__ import annotations

from typing import Sequence

from .config import PipelineConfig
from .geometry import BBox, ImageExtent
from .metrics import SizeStats, foreground_ratio, size_buckets, union_area
from .mosaic import MosaicLayout, equalize, pack
from .regions import RegionSet, expand_and_merge
from .remap import Detection, to_mosaic


def build_layout(
    detections: Sequence[Detection], extent: ImageExtent, config: PipelineConfig
) -> tuple[RegionSet, MosaicLayout]:
    """Expand, merge, equalize and pack coarse detections into one mosaic."""
    regions = expand_and_merge([d.box for d in detections], config.beta, extent)
    scaled = equalize(regions, config.fixed_size)
    layout = pack(scaled, config.mosaic_width, config.padding)
    return regions, layout


def mosaic_stats(gt_boxes: Sequence[BBox], layout: MosaicLayout) -> SizeStats:
    """Foreground ratio and size buckets of ground-truth boxes inside the mosaic.

    Boxes whose center lies in no placement (missed by the coarse stage) do
    not appear in the mosaic and are excluded.
    """
    mapped = [m for b in gt_boxes if (m := to_mosaic(b, layout)) is not None]
    if not mapped or layout.mosaic_height <= 0:
        return SizeStats(fr=0.0, small=0.0, medium=0.0, large=0.0, empty=True)
    stats = size_buckets(mapped)
    stats.fr = union_area(mapped) / (layout.mosaic_width * layout.mosaic_height)
    return stats


def source_stats(gt_boxes: Sequence[BBox], extent: ImageExtent) -> SizeStats:
    stats = size_buckets(gt_boxes)
    stats.fr = foreground_ratio(gt_boxes, extent)
    return stats
