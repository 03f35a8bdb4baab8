"""Independent reference implementations used to cross-check the library.

These deliberately avoid the library's own code paths: the merge oracle is a
direct index-juggling transcription of the greedy pseudocode, the union-area
oracle is Monte Carlo, the bilinear oracle is a scalar loop, and gradients
are checked by central finite differences.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

Box = tuple[float, float, float, float]


def _area(b: Box) -> float:
    return (b[2] - b[0]) * (b[3] - b[1])


def _hull(a: Box, b: Box) -> Box:
    return (min(a[0], b[0]), min(a[1], b[1]), max(a[2], b[2]), max(a[3], b[3]))


def merge_oracle(boxes: Sequence[Box], single_pass: bool = False) -> list[Box]:
    """Literal greedy region merge on coordinate tuples.

    Smallest box seeds a region; any remaining box whose hull with the
    current region costs no extra area is absorbed. By default the scan over
    remaining boxes repeats until a pass absorbs nothing; single_pass=True
    stops after one scan.
    """
    pool = list(boxes)
    merged: list[Box] = []
    while pool:
        best = 0
        for i in range(1, len(pool)):
            if _area(pool[i]) < _area(pool[best]):
                best = i
        a = pool.pop(best)
        while True:
            absorbed_any = False
            i = 0
            while i < len(pool):
                c = _hull(a, pool[i])
                if _area(a) + _area(pool[i]) >= _area(c):
                    a = c
                    pool.pop(i)
                    absorbed_any = True
                else:
                    i += 1
            if single_pass or not absorbed_any:
                break
        merged.append(a)
    return merged


def union_area_mc(boxes: Sequence[Box], extent: tuple[float, float], n: int, seed: int) -> float:
    """Monte Carlo estimate of the union area of boxes within the extent."""
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0, extent[0], n)
    ys = rng.uniform(0, extent[1], n)
    hit = np.zeros(n, dtype=bool)
    for x1, y1, x2, y2 in boxes:
        hit |= (xs >= x1) & (xs <= x2) & (ys >= y1) & (ys <= y2)
    return float(hit.mean()) * extent[0] * extent[1]


def central_diff(f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e.flat[i] = h
        g.flat[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def bilinear_reference(image: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Scalar half-pixel-centered bilinear resampler."""
    in_h, in_w = image.shape[:2]
    out = np.zeros((out_h, out_w, image.shape[2]))
    for oy in range(out_h):
        sy = (oy + 0.5) * in_h / out_h - 0.5
        y0 = min(max(int(np.floor(sy)), 0), in_h - 1)
        y1 = min(y0 + 1, in_h - 1)
        fy = min(max(sy - y0, 0.0), 1.0)
        for ox in range(out_w):
            sx = (ox + 0.5) * in_w / out_w - 0.5
            x0 = min(max(int(np.floor(sx)), 0), in_w - 1)
            x1 = min(x0 + 1, in_w - 1)
            fx = min(max(sx - x0, 0.0), 1.0)
            top = image[y0, x0] * (1 - fx) + image[y0, x1] * fx
            bot = image[y1, x0] * (1 - fx) + image[y1, x1] * fx
            out[oy, ox] = top * (1 - fy) + bot * fy
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def random_boxes(rng: np.random.Generator, n: int, extent: tuple[float, float]) -> list[Box]:
    out = []
    for _ in range(n):
        w = rng.uniform(1, extent[0] / 3)
        h = rng.uniform(1, extent[1] / 3)
        x = rng.uniform(0, extent[0] - w)
        y = rng.uniform(0, extent[1] - h)
        out.append((x, y, x + w, y + h))
    return out
