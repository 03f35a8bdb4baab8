from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bbox_strategy
from oracles import random_boxes, union_area_mc
from ufppack.geometry import BBox, ImageExtent
from ufppack.metrics import (
    InfeasibleSpecError,
    SceneSpec,
    foreground_ratio,
    generate_scene,
    scene_stats,
    size_buckets,
    union_area,
)


class TestForegroundRatio:
    def test_single_box(self):
        fr = foreground_ratio([BBox(0, 0, 20, 20)], ImageExtent(100, 100))
        assert fr == pytest.approx(0.04)

    def test_duplicate_boxes_union(self):
        b = BBox(10, 10, 30, 30)
        one = foreground_ratio([b], ImageExtent(100, 100))
        two = foreground_ratio([b, b], ImageExtent(100, 100))
        assert one == two

    def test_disjoint_sum(self):
        boxes = [BBox(0, 0, 10, 10), BBox(50, 50, 60, 60)]
        assert foreground_ratio(boxes, ImageExtent(100, 100)) == pytest.approx(0.02)

    @given(st.lists(bbox_strategy(max_coord=100), max_size=8), bbox_strategy(max_coord=100))
    def test_monotone_under_addition(self, boxes, extra):
        ext = ImageExtent(100, 100)
        assert foreground_ratio(boxes + [extra], ext) >= foreground_ratio(boxes, ext) - 1e-9
        assert foreground_ratio(boxes + [extra], ext) <= 1.0 + 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_monte_carlo(self, seed):
        rng = np.random.default_rng(seed)
        raw = random_boxes(rng, 12, (200, 150))
        exact = union_area([BBox(*b) for b in raw])
        approx = union_area_mc(raw, (200, 150), n=200_000, seed=seed)
        assert abs(exact - approx) / (200 * 150) < 0.005


class TestSizeBuckets:
    def test_small(self):
        st_ = size_buckets([BBox(0, 0, 16, 16)])
        assert st_.small == 1.0

    def test_medium(self):
        st_ = size_buckets([BBox(0, 0, 64, 64)])
        assert st_.medium == 1.0

    def test_large(self):
        st_ = size_buckets([BBox(0, 0, 128, 128)])
        assert st_.large == 1.0

    def test_boundaries(self):
        assert size_buckets([BBox(0, 0, 32, 32)]).medium == 1.0
        assert size_buckets([BBox(0, 0, 96, 96)]).large == 1.0

    def test_scale_adjustment(self):
        st_ = size_buckets([BBox(0, 0, 16, 16)], scales=[3.0])
        assert st_.medium == 1.0

    def test_empty(self):
        st_ = size_buckets([])
        assert st_.empty and st_.small == 0.0

    def test_proportions_sum_to_one(self):
        rng = np.random.default_rng(0)
        boxes = [BBox(*b) for b in random_boxes(rng, 40, (500, 500))]
        st_ = size_buckets(boxes)
        assert st_.small + st_.medium + st_.large == pytest.approx(1.0)


class TestGenerateScene:
    def test_targets_hit(self):
        spec = SceneSpec(seed=3)
        gt, _ = generate_scene(spec)
        stats = scene_stats(gt, spec.extent)
        assert abs(stats.fr - spec.target_fr) < 0.02
        assert abs(stats.small - spec.proportions[0]) < 0.02

    def test_zero_objects(self):
        gt, coarse = generate_scene(SceneSpec(n_objects=0, seed=0))
        assert gt == [] and coarse == []

    def test_deterministic(self):
        a = generate_scene(SceneSpec(seed=11))
        b = generate_scene(SceneSpec(seed=11))
        assert a == b

    def test_different_seeds_differ(self):
        a, _ = generate_scene(SceneSpec(seed=1))
        b, _ = generate_scene(SceneSpec(seed=2))
        assert a != b

    def test_infeasible_spec_rejected(self):
        spec = SceneSpec(n_objects=2, target_fr=0.5, seed=0)
        with pytest.raises(InfeasibleSpecError):
            generate_scene(spec)

    def test_boxes_within_extent(self):
        spec = SceneSpec(seed=5)
        gt, coarse = generate_scene(spec)
        for b in gt + [d.box for d in coarse]:
            assert 0 <= b.x1 <= b.x2 <= spec.extent.width
            assert 0 <= b.y1 <= b.y2 <= spec.extent.height

    def test_bad_proportions_rejected(self):
        with pytest.raises(ValueError):
            SceneSpec(proportions=(0.5, 0.2, 0.2))
