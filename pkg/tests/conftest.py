from __future__ import annotations

import sys
from pathlib import Path

from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from ufppack.geometry import BBox


def bbox_strategy(max_coord: float = 1000.0, min_size: float = 0.0):
    coords = st.floats(0, max_coord, allow_nan=False, allow_infinity=False)
    return st.tuples(coords, coords, coords, coords).map(
        lambda t: BBox(
            min(t[0], t[2]),
            min(t[1], t[3]),
            max(t[0], t[2]) + min_size,
            max(t[1], t[3]) + min_size,
        )
    )
