"""Scale equalization of cluster regions and shelf packing into one mosaic.

The packer is a deterministic height-sorted shelf heuristic: rectangles are
sorted by scaled height (descending, ties by input order) and placed
left-to-right on the current shelf, opening a new shelf on width overflow.
Alternative packers can be swapped in as long as they honor the same
non-overlap / containment contract.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import BBox, area
from .regions import RegionSet


class UnpackableRegionError(ValueError):
    """A scaled region is too wide for the target strip."""


@dataclass(frozen=True)
class ScaledRegion:
    source: BBox
    scale: float

    def __post_init__(self) -> None:
        if self.scale < 1.0:
            raise ValueError(f"regions are only enlarged, got scale {self.scale}")

    @property
    def scaled_width(self) -> float:
        return self.scale * self.source.width

    @property
    def scaled_height(self) -> float:
        return self.scale * self.source.height


@dataclass(frozen=True)
class Placement:
    source: BBox
    scale: float
    dest_x: float
    dest_y: float

    @property
    def width(self) -> float:
        return self.scale * self.source.width

    @property
    def height(self) -> float:
        return self.scale * self.source.height

    def dest_box(self) -> BBox:
        return BBox(self.dest_x, self.dest_y, self.dest_x + self.width, self.dest_y + self.height)


@dataclass
class MosaicLayout:
    mosaic_width: float
    mosaic_height: float
    placements: list[Placement]


def equalize(regions: RegionSet, fixed_size: float) -> list[ScaledRegion]:
    """Enlarge small regions so the average region scale reaches fixed_size.

    Region scale is sqrt(area). When the mean scale falls short of
    fixed_size, every region smaller than fixed_size grows by the common
    factor fixed_size / mean; all other regions keep scale 1.
    """
    if fixed_size <= 0:
        raise ValueError(f"fixed_size must be positive, got {fixed_size}")
    if not regions.regions:
        return []
    scales = [math.sqrt(area(r)) for r in regions.regions]
    mean_scale = sum(scales) / len(scales)
    if mean_scale >= fixed_size or mean_scale == 0:
        return [ScaledRegion(r, 1.0) for r in regions.regions]
    factor = fixed_size / mean_scale
    return [
        ScaledRegion(r, factor if s < fixed_size else 1.0)
        for r, s in zip(regions.regions, scales)
    ]


def pack(scaled: Sequence[ScaledRegion], target_width: float, padding: float = 2.0) -> MosaicLayout:
    """Shelf-pack scaled regions into a strip of the given width."""
    if target_width <= 0:
        raise ValueError(f"target_width must be positive, got {target_width}")
    if padding < 0:
        raise ValueError(f"padding must be nonnegative, got {padding}")
    for i, r in enumerate(scaled):
        if r.scaled_width > target_width - 2 * padding:
            raise UnpackableRegionError(
                f"region {i} (source {r.source}, scale {r.scale}) is "
                f"{r.scaled_width:.2f} px wide; strip allows "
                f"{target_width - 2 * padding:.2f}"
            )

    order = sorted(range(len(scaled)), key=lambda i: (-scaled[i].scaled_height, i))
    placements: dict[int, Placement] = {}
    shelf_y = 0.0
    shelf_height = 0.0
    cursor_x = 0.0
    for i in order:
        r = scaled[i]
        w, h = r.scaled_width, r.scaled_height
        at_start = cursor_x == 0.0
        if not at_start and cursor_x + w > target_width:
            shelf_y += shelf_height + padding
            shelf_height = 0.0
            cursor_x = 0.0
            at_start = True
        if at_start:
            shelf_height = h  # height-sorted order: first item on a shelf is tallest

        placements[i] = Placement(r.source, r.scale, cursor_x, shelf_y)
        cursor_x += w + padding
    height = shelf_y + shelf_height if placements else 0.0
    return MosaicLayout(target_width, height, [placements[i] for i in range(len(scaled))])


def waste_ratio(layout: MosaicLayout) -> float:
    """Mosaic area divided by the summed placed-rectangle area (>= 1)."""
    if not layout.placements:
        raise ValueError("waste_ratio is undefined for an empty layout")
    placed = sum(p.width * p.height for p in layout.placements)
    return (layout.mosaic_width * layout.mosaic_height) / placed
