from __future__ import annotations

import numpy as np
import pytest

from ufppack.geometry import BBox, iou
from ufppack.mosaic import MosaicLayout, Placement, ScaledRegion, pack
from ufppack.remap import Detection, fuse, to_mosaic, to_source


def _layout_one(src, scale, dest):
    p = Placement(src, scale, dest[0], dest[1])
    return MosaicLayout(1000, 1000, [p])


class TestToSource:
    def test_offset_only(self):
        lay = _layout_one(BBox(100, 200, 228, 328), 1.0, (0, 0))
        got = to_source(Detection(BBox(10, 10, 20, 20), 0.9, 1), lay)
        assert got.box == BBox(110, 210, 120, 220)
        assert (got.score, got.category) == (0.9, 1)

    def test_divide_by_scale(self):
        lay = _layout_one(BBox(0, 0, 48, 48), 2.0, (0, 0))
        got = to_source(Detection(BBox(0, 0, 96, 96), 0.5, 0), lay)
        assert got.box == BBox(0, 0, 48, 48)

    def test_gutter_hit_dropped(self):
        lay = _layout_one(BBox(0, 0, 48, 48), 1.0, (0, 0))
        assert to_source(Detection(BBox(200, 200, 210, 210), 0.5, 0), lay) is None

    def test_straddling_clipped_to_owner(self):
        lay = _layout_one(BBox(0, 0, 50, 50), 1.0, (0, 0))
        # center (47.5, 15) is inside the placement; the overhang is clipped
        got = to_source(Detection(BBox(35, 10, 60, 20), 0.5, 0), lay)
        assert got.box.x2 <= 50.0

    def test_center_in_gutter_dropped_even_if_overlapping(self):
        lay = _layout_one(BBox(0, 0, 50, 50), 1.0, (0, 0))
        assert to_source(Detection(BBox(40, 10, 70, 20), 0.5, 0), lay) is None


class TestRoundTrip:
    @pytest.mark.parametrize("seed", range(30))
    def test_forward_inverse_identity(self, seed):
        rng = np.random.default_rng(seed)
        # disjoint source regions (one per grid cell) so ownership is unambiguous
        scaled = [
            ScaledRegion(
                BBox(
                    x := col * 150 + rng.uniform(0, 40),
                    y := row * 150 + rng.uniform(0, 40),
                    x + rng.uniform(20, 100),
                    y + rng.uniform(20, 100),
                ),
                float(rng.uniform(1.0, 3.0)),
            )
            for row in range(3)
            for col in range(3)
        ]
        lay = pack(scaled, 600, padding=2.0)
        for p in lay.placements:
            src = p.source
            w, h = src.width, src.height
            bx1 = src.x1 + 0.2 * w
            by1 = src.y1 + 0.2 * h
            inner = BBox(bx1, by1, bx1 + 0.5 * w, by1 + 0.5 * h)
            fwd = to_mosaic(inner, lay)
            assert fwd is not None
            back = to_source(Detection(fwd, 1.0, 0), lay)
            for a, b in zip(
                (inner.x1, inner.y1, inner.x2, inner.y2),
                (back.box.x1, back.box.y1, back.box.x2, back.box.y2),
            ):
                assert abs(a - b) < 1e-6

    def test_result_inside_owner_region(self):
        lay = _layout_one(BBox(10, 10, 60, 60), 2.0, (0, 0))
        got = to_source(Detection(BBox(0, 0, 150, 150), 0.5, 0), lay)
        assert BBox(10, 10, 60, 60).contains(got.box)


class TestFuse:
    def test_fine_empty_is_nms_of_coarse(self):
        coarse = [
            Detection(BBox(0, 0, 10, 10), 0.9, 0),
            Detection(BBox(1, 1, 11, 11), 0.8, 0),
        ]
        got = fuse(coarse, [], iou_threshold=0.5)
        assert got == [coarse[0]]

    def test_identical_boxes_keep_best(self):
        a = Detection(BBox(0, 0, 10, 10), 0.9, 2)
        b = Detection(BBox(0, 0, 10, 10), 0.8, 2)
        assert fuse([a], [b], 0.5) == [a]

    def test_disjoint_boxes_survive(self):
        a = Detection(BBox(0, 0, 10, 10), 0.3, 0)
        b = Detection(BBox(50, 50, 60, 60), 0.9, 0)
        got = fuse([a], [b], 0.5)
        assert got == [b, a]  # sorted by descending score

    def test_different_categories_not_suppressed(self):
        a = Detection(BBox(0, 0, 10, 10), 0.9, 0)
        b = Detection(BBox(0, 0, 10, 10), 0.8, 1)
        assert len(fuse([a], [b], 0.5)) == 2

    @pytest.mark.parametrize("seed", range(10))
    def test_no_surviving_pair_above_threshold(self, seed):
        rng = np.random.default_rng(seed)
        dets = [
            Detection(
                BBox(
                    x := rng.uniform(0, 80),
                    y := rng.uniform(0, 80),
                    x + rng.uniform(5, 30),
                    y + rng.uniform(5, 30),
                ),
                float(rng.uniform(0, 1)),
                int(rng.integers(0, 3)),
            )
            for _ in range(30)
        ]
        got = fuse(dets[:15], dets[15:], 0.5)
        for i in range(len(got)):
            for j in range(i + 1, len(got)):
                if got[i].category == got[j].category:
                    assert iou(got[i].box, got[j].box) <= 0.5

    def test_permutation_invariant_outputs(self):
        rng = np.random.default_rng(3)
        dets = [
            Detection(
                BBox(x := rng.uniform(0, 50), y := rng.uniform(0, 50), x + 10, y + 10),
                round(float(rng.uniform(0, 1)), 3),
                0,
            )
            for _ in range(12)
        ]
        a = fuse(dets, [], 0.5)
        perm = [dets[i] for i in rng.permutation(len(dets))]
        b = fuse(perm, [], 0.5)
        assert {(d.box, d.score) for d in a} == {(d.box, d.score) for d in b}
