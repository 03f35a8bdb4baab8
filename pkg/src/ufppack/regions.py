"""Greedy merging of coarse foreground boxes into cluster regions.

Starting from the smallest remaining box, a box B is absorbed whenever the
smallest box enclosing both covers no more area than the two boxes combined
(|A| + |B| >= |C|). The scan over remaining boxes repeats until a full pass
absorbs nothing, since each absorption grows A and may newly qualify boxes
that failed earlier.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .geometry import BBox, ImageExtent, area, enclosing, expand


@dataclass
class RegionSet:
    regions: list[BBox] = field(default_factory=list)
    # For each region, the input indices of the boxes it absorbed, in
    # absorption order (seed box first).
    provenance: list[list[int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.regions)


def merge(candidates: Sequence[BBox]) -> RegionSet:
    """Merge boxes into cluster regions; deterministic given input order."""
    pool: list[tuple[BBox, list[int]]] = [(b, [i]) for i, b in enumerate(candidates)]
    out = RegionSet()
    while pool:
        # Smallest-area box seeds the next region; ties go to the lowest
        # input index, which is the earliest pool entry.
        seed_pos = min(range(len(pool)), key=lambda i: area(pool[i][0]))
        current, absorbed = pool.pop(seed_pos)
        changed = True
        while changed:
            changed = False
            kept: list[tuple[BBox, list[int]]] = []
            for box, idxs in pool:
                grown = enclosing(current, box)
                if area(current) + area(box) >= area(grown):
                    current = grown
                    absorbed.extend(idxs)
                    changed = True
                else:
                    kept.append((box, idxs))
            pool = kept
        out.regions.append(current)
        out.provenance.append(absorbed)
    return out


def expand_and_merge(detections: Sequence[BBox], beta: float, extent: ImageExtent) -> RegionSet:
    """Expand every detection by beta, then merge."""
    return merge([expand(b, beta, extent) for b in detections])
