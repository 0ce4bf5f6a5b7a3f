import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planopt.geometry import (
    Boundary,
    GeometryError,
    Point2,
    boundary_rect,
    compactness,
    inside_area,
    outside_area,
    overlap_area,
    rect,
    rect_distance,
    shared_edge_length,
    wall_azimuth,
)


def raster_inside_area(r, b, cell=0.01):
    """Independent 1 cm grid-rasterization oracle for rect-in-boundary area."""
    bb = b.bbox
    x0 = max(r.x0, bb.x0)
    x1 = min(r.x1, bb.x1)
    y0 = max(r.y0, bb.y0)
    y1 = min(r.y1, bb.y1)
    if x1 <= x0 or y1 <= y0:
        return 0.0
    nx = max(1, round((x1 - x0) / cell))
    ny = max(1, round((y1 - y0) / cell))
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    total = 0.0
    for i in range(nx):
        cx = x0 + (i + 0.5) * dx
        for j in range(ny):
            cy = y0 + (j + 0.5) * dy
            if b.contains_point(Point2(cx, cy)):
                total += dx * dy
    return total


def l_shaped_boundary():
    # 10x10 square with a 4x4 notch removed from the top-right corner
    return Boundary(
        (
            Point2(0, 0),
            Point2(10, 0),
            Point2(10, 6),
            Point2(6, 6),
            Point2(6, 10),
            Point2(0, 10),
        )
    )


class TestOverlapArea:
    def test_partial_overlap(self):
        assert overlap_area(rect(0, 0, 4, 3), rect(2, 1, 4, 4)) == pytest.approx(4.0)

    def test_disjoint(self):
        assert overlap_area(rect(0, 0, 1, 1), rect(5, 5, 1, 1)) == 0.0

    def test_self(self):
        a = rect(0, 0, 4, 3)
        assert overlap_area(a, a) == pytest.approx(12.0)

    @given(
        st.tuples(*[st.floats(-20, 20) for _ in range(4)]),
        st.tuples(*[st.floats(-20, 20) for _ in range(4)]),
        st.floats(0.1, 10),
        st.floats(0.1, 10),
    )
    @settings(max_examples=200)
    def test_symmetric_and_bounded(self, p1, p2, w, h):
        a = rect(p1[0], p1[1], 0.1 + abs(p1[2]), 0.1 + abs(p1[3]))
        b = rect(p2[0], p2[1], w, h)
        ab = overlap_area(a, b)
        assert ab == overlap_area(b, a)
        assert 0.0 <= ab <= min(a.area, b.area) + 1e-12


class TestSharedEdge:
    def test_full_edge_contact(self):
        assert shared_edge_length(rect(0, 0, 4, 3), rect(4, 0, 3, 3)) == pytest.approx(3.0)

    def test_gap(self):
        assert shared_edge_length(rect(0, 0, 1, 1), rect(2, 0, 1, 1)) == 0.0

    def test_corner_touch(self):
        assert shared_edge_length(rect(0, 0, 1, 1), rect(1, 1, 1, 1)) == 0.0

    def test_overlapping_interiors_have_no_shared_edge(self):
        a = rect(0, 0, 4, 4)
        b = rect(2, 0, 4, 4)
        assert overlap_area(a, b) > 0
        assert shared_edge_length(a, b) == 0.0

    @given(
        st.floats(-10, 10),
        st.floats(-10, 10),
        st.floats(0.5, 5),
        st.floats(0.5, 5),
        st.floats(-10, 10),
        st.floats(-10, 10),
        st.floats(0.5, 5),
        st.floats(0.5, 5),
    )
    @settings(max_examples=200)
    def test_contact_implies_no_overlap(self, x1, y1, w1, h1, x2, y2, w2, h2):
        a = rect(x1, y1, w1, h1)
        b = rect(x2, y2, w2, h2)
        if shared_edge_length(a, b) > 0:
            assert overlap_area(a, b) == 0.0


class TestRectDistance:
    def test_touching(self):
        assert rect_distance(rect(0, 0, 1, 1), rect(1, 0, 1, 1)) == 0.0

    def test_axis_gap(self):
        assert rect_distance(rect(0, 0, 1, 1), rect(3, 0, 1, 1)) == pytest.approx(2.0)

    def test_diagonal_gap(self):
        assert rect_distance(rect(0, 0, 1, 1), rect(4, 5, 1, 1)) == pytest.approx(5.0)


class TestOutsideArea:
    def test_contained(self):
        assert outside_area(rect(1, 1, 2, 2), boundary_rect(0, 0, 10, 10)) == 0.0

    def test_straddling(self):
        assert outside_area(rect(-1, 0, 2, 2), boundary_rect(0, 0, 10, 10)) == pytest.approx(2.0)

    def test_l_shape_notch(self):
        b = l_shaped_boundary()
        r = rect(7, 7, 2, 2)  # entirely in the notch
        assert outside_area(r, b) == pytest.approx(4.0)
        r2 = rect(5, 5, 4, 4)  # partially in the notch
        oracle = r2.area - raster_inside_area(r2, b)
        assert outside_area(r2, b) == pytest.approx(oracle, abs=1e-3)

    @given(
        st.floats(-2, 11),
        st.floats(-2, 11),
        st.floats(0.3, 6),
        st.floats(0.3, 6),
    )
    @settings(max_examples=25, deadline=None)
    def test_inside_plus_outside_is_area(self, x, y, w, h):
        b = l_shaped_boundary()
        r = rect(round(x, 2), round(y, 2), round(w, 2), round(h, 2))
        inside = inside_area(r, b)
        assert inside + outside_area(r, b) == pytest.approx(r.area, abs=1e-9)
        assert inside == pytest.approx(raster_inside_area(r, b), abs=1e-3)


class TestCompactness:
    def test_square(self):
        assert compactness(rect(0, 0, 4, 4)) == pytest.approx(1.0)

    def test_8x2(self):
        assert compactness(rect(0, 0, 8, 2)) == pytest.approx(0.64)

    def test_16x1(self):
        assert compactness(rect(0, 0, 16, 1)) == pytest.approx(256 / 1156)

    @given(st.floats(0.2, 10), st.floats(0.2, 10), st.floats(0.1, 7))
    @settings(max_examples=100)
    def test_scale_invariant(self, w, h, k):
        assert compactness(rect(0, 0, w, h)) == pytest.approx(
            compactness(rect(3, -2, k * w, k * h))
        )

    @given(st.floats(0.2, 10), st.floats(0.2, 10))
    @settings(max_examples=100)
    def test_bounded_by_square(self, w, h):
        assert 0 < compactness(rect(0, 0, w, h)) <= 1.0 + 1e-12


class TestWallAzimuth:
    @pytest.mark.parametrize(
        "side,orient,expected",
        [("S", 0, 180), ("S", 90, 270), ("N", 350, 350), ("E", 0, 90), ("W", 271, 181)],
    )
    def test_cases(self, side, orient, expected):
        assert wall_azimuth(side, orient) == pytest.approx(expected)

    @given(st.sampled_from("NESW"), st.floats(0, 359.99), st.integers(-3, 3))
    @settings(max_examples=100)
    def test_periodic(self, side, orient, k):
        assert wall_azimuth(side, orient) == pytest.approx(
            wall_azimuth(side, (orient + 360 * k) % 360)
        )


class TestBoundary:
    def test_rejects_triangle_count(self):
        with pytest.raises(GeometryError):
            Boundary((Point2(0, 0), Point2(1, 0), Point2(1, 1)))

    def test_rejects_diagonal_edge(self):
        with pytest.raises(GeometryError):
            Boundary((Point2(0, 0), Point2(5, 1), Point2(5, 5), Point2(0, 5)))

    def test_rejects_clockwise(self):
        with pytest.raises(GeometryError):
            Boundary((Point2(0, 0), Point2(0, 5), Point2(5, 5), Point2(5, 0)))

    def test_rejects_self_intersection(self):
        with pytest.raises(GeometryError):
            Boundary(
                (
                    Point2(0, 0),
                    Point2(4, 0),
                    Point2(4, 4),
                    Point2(2, 4),
                    Point2(2, 2),
                    Point2(6, 2),
                    Point2(6, 6),
                    Point2(0, 6),
                )
            )

    def test_area_and_pieces(self):
        b = l_shaped_boundary()
        assert b.area == pytest.approx(84.0)
        assert sum(p.area for p in b.pieces) == pytest.approx(84.0)

    def test_rect_helper(self):
        b = boundary_rect(1, 2, 3, 4)
        assert b.area == pytest.approx(12.0)
        assert len(b.pieces) == 1
