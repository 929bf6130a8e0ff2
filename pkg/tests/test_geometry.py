import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flocklevels.geometry import (
    TorusWorld,
    UndefinedMeanError,
    circular_mean,
    heading_diff,
    torus_centroid,
    torus_delta,
    torus_distance,
    turn_towards,
    wrap,
)
from helpers import brute_delta

W = TorusWorld(100.0, 100.0)

coords = st.floats(min_value=-500.0, max_value=500.0, allow_nan=False)
in_world = st.tuples(
    st.floats(min_value=0.0, max_value=99.999999),
    st.floats(min_value=0.0, max_value=99.999999),
)
headings = st.floats(min_value=0.0, max_value=359.999999)


class TestWrap:
    def test_modulo(self):
        assert wrap((105.0, -3.0), W) == (5.0, 97.0)

    def test_identity(self):
        assert wrap((50.0, 50.0), W) == (50.0, 50.0)

    def test_exact_extent(self):
        assert wrap((200.0, 0.0), W) == (0.0, 0.0)

    def test_non_finite(self):
        with pytest.raises(ValueError):
            wrap((math.inf, 0.0), W)

    @given(st.tuples(coords, coords))
    def test_idempotent(self, p):
        once = wrap(p, W)
        assert wrap(once, W) == once
        assert 0 <= once[0] < 100 and 0 <= once[1] < 100


class TestTorusDelta:
    def test_seam(self):
        assert torus_delta((1.0, 0.0), (99.0, 0.0), W) == (-2.0, 0.0)

    def test_identity(self):
        assert torus_delta((5.0, 5.0), (5.0, 5.0), W) == (0.0, 0.0)

    def test_against_image_oracle(self):
        # frozen from the 9-image brute force
        assert torus_delta((10.0, 10.0), (20.0, 90.0), W) == (10.0, -20.0)
        assert brute_delta((10.0, 10.0), (20.0, 90.0), 100.0, 100.0) == (10.0, -20.0)

    @given(in_world, in_world)
    def test_matches_oracle_and_roundtrips(self, a, b):
        dx, dy = torus_delta(a, b, W)
        ox, oy = brute_delta(a, b, 100.0, 100.0)
        assert math.hypot(dx, dy) == pytest.approx(math.hypot(ox, oy), abs=1e-9)
        assert abs(dx) <= 50.0 and abs(dy) <= 50.0
        wx, wy = wrap((a[0] + dx, a[1] + dy), W)
        assert min(abs(wx - b[0]), 100 - abs(wx - b[0])) < 1e-9
        assert min(abs(wy - b[1]), 100 - abs(wy - b[1])) < 1e-9


class TestTorusDistance:
    def test_seam(self):
        assert torus_distance((1.0, 0.0), (99.0, 0.0), W) == 2.0

    def test_zero(self):
        assert torus_distance((3.0, 4.0), (3.0, 4.0), W) == 0.0

    def test_derived(self):
        d = torus_distance((10.0, 10.0), (20.0, 90.0), W)
        assert d == pytest.approx(math.sqrt(500.0), abs=1e-12)

    @given(in_world, in_world, in_world)
    @settings(max_examples=200)
    def test_metric_properties(self, a, b, c):
        dab = torus_distance(a, b, W)
        assert dab == pytest.approx(torus_distance(b, a, W), abs=1e-9)
        assert dab <= math.sqrt(50.0**2 + 50.0**2) + 1e-9
        assert dab <= torus_distance(a, c, W) + torus_distance(c, b, W) + 1e-9


class TestCircularMean:
    def test_wraparound(self):
        assert circular_mean([350.0, 10.0]) == pytest.approx(0.0, abs=1e-9)

    def test_singleton(self):
        assert circular_mean([90.0]) == pytest.approx(90.0)

    def test_symmetric(self):
        assert circular_mean([0.0, 90.0]) == pytest.approx(45.0)

    def test_zero_resultant(self):
        with pytest.raises(UndefinedMeanError):
            circular_mean([0.0, 180.0])

    def test_empty(self):
        with pytest.raises(ValueError):
            circular_mean([])


class TestHeadingDiff:
    @pytest.mark.parametrize(
        "a,b,expected", [(350.0, 10.0, 20.0), (0.0, 180.0, 180.0), (45.0, 45.0, 0.0)]
    )
    def test_examples(self, a, b, expected):
        assert heading_diff(a, b) == pytest.approx(expected)
        assert heading_diff(b, a) == pytest.approx(expected)


class TestTurnTowards:
    def test_clamped(self):
        assert turn_towards(0.0, 90.0, 5.0) == 5.0

    def test_within_bound(self):
        assert turn_towards(0.0, 3.0, 5.0) == 3.0

    def test_antipodal_tie_counterclockwise(self):
        assert turn_towards(10.0, 190.0, 5.0) == 15.0

    @given(headings, headings, st.floats(min_value=0.0, max_value=180.0))
    @settings(max_examples=200)
    def test_progress_and_bound(self, c, t, m):
        r = turn_towards(c, t, m)
        assert heading_diff(r, t) <= heading_diff(c, t) + 1e-9
        assert heading_diff(r, c) <= m + 1e-9


class TestTorusCentroid:
    def test_singleton(self):
        assert torus_centroid([(10.0, 10.0)], W) == (10.0, 10.0)

    def test_seam_symmetry(self):
        cx, cy = torus_centroid([(98.0, 0.0), (2.0, 0.0)], W)
        assert min(cx, 100 - cx) == pytest.approx(0.0, abs=1e-9)
        assert cy == pytest.approx(0.0, abs=1e-9)

    def test_collinear(self):
        cx, cy = torus_centroid([(10.0, 10.0), (20.0, 10.0), (30.0, 10.0)], W)
        assert cx == pytest.approx(20.0, abs=1e-9)
        assert cy == pytest.approx(10.0, abs=1e-9)

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=0.0, max_value=30.0),
                st.floats(min_value=0.0, max_value=30.0),
            ),
            min_size=1,
            max_size=8,
        ),
        st.tuples(coords, coords),
    )
    @settings(max_examples=150)
    def test_translation_equivariant(self, cluster, shift):
        base = torus_centroid([wrap(p, W) for p in cluster], W)
        shifted = torus_centroid(
            [wrap((p[0] + shift[0], p[1] + shift[1]), W) for p in cluster], W
        )
        expected = wrap((base[0] + shift[0], base[1] + shift[1]), W)
        for got, want, extent in zip(shifted, expected, (100.0, 100.0)):
            d = abs(got - want)
            assert min(d, extent - d) < 1e-6
