import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvesynth.geometry import (
    CurveSegment,
    Path,
    Point2,
    Region,
    arc_length,
    contains,
    distance_to_boundary,
    point_at,
    tangent_at,
)

coord = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
unit = st.floats(0.0, 1.0)


def pt(x, y):
    return Point2(float(x), float(y))


def quad(ax, ay, cx, cy, bx, by):
    return CurveSegment("quadratic", (pt(ax, ay), pt(cx, cy), pt(bx, by)))


class TestCurveSegment:
    def test_line_eval_endpoints(self):
        seg = CurveSegment("line", (pt(0, 0), pt(10, 4)))
        assert seg.eval(0.0) == pt(0, 0)
        assert seg.eval(1.0) == pt(10, 4)
        assert seg.eval(0.5) == pt(5, 2)

    def test_wrong_control_point_count(self):
        with pytest.raises(ValueError):
            CurveSegment("line", (pt(0, 0),))
        with pytest.raises(ValueError):
            CurveSegment("quadratic", (pt(0, 0), pt(1, 1)))
        with pytest.raises(ValueError):
            CurveSegment("cubic", (pt(0, 0), pt(1, 1), pt(2, 2)))

    @given(coord, coord, coord, coord, coord, coord, unit, unit)
    @settings(max_examples=100, deadline=None)
    def test_split_agrees_with_eval(self, ax, ay, cx, cy, bx, by, u, v):
        seg = quad(ax, ay, cx, cy, bx, by)
        left, right = seg.split(u)
        assert left.start == seg.start
        assert right.end == seg.end
        # the split point is shared and lies on the original curve
        m = seg.eval(u)
        assert left.end.distance(m) < 1e-6
        assert right.start.distance(m) < 1e-6
        # any point of the left half maps back onto the original
        p = left.eval(v)
        q = seg.eval(u * v)
        assert p.distance(q) < 1e-6

    def test_quadratic_length_matches_numeric_integration(self):
        seg = quad(0, 0, 50, 80, 100, 0)
        u = np.linspace(0.0, 1.0, 200_001)
        pts = np.array([[p.x, p.y] for p in (seg.eval(t) for t in u)])
        ref = float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
        assert seg.length() == pytest.approx(ref, rel=1e-6)

    @given(coord, coord, coord, coord, unit)
    @settings(max_examples=100, deadline=None)
    def test_derivative_finite_everywhere(self, ax, ay, cx, cy, u):
        seg = quad(ax, ay, cx, cy, ax, ay)  # closed quad has a cusp
        dx, dy = seg.derivative(u)
        assert math.isfinite(dx) and math.isfinite(dy)


class TestPath:
    def test_segments_must_chain(self):
        a = CurveSegment("line", (pt(0, 0), pt(1, 0)))
        b = CurveSegment("line", (pt(2, 0), pt(3, 0)))
        with pytest.raises(ValueError):
            Path((a, b))

    def test_point_at_full_length_is_endpoint(self):
        path = Path(
            (
                CurveSegment("line", (pt(0, 0), pt(30, 0))),
                quad(30, 0, 60, 40, 90, 0),
            )
        )
        total = arc_length(path)
        end = point_at(path, total)
        assert end.distance(path.end) < 1e-9

    def test_point_at_out_of_range(self):
        path = Path((CurveSegment("line", (pt(0, 0), pt(10, 0))),))
        with pytest.raises(ValueError):
            point_at(path, 11.0)
        with pytest.raises(ValueError):
            point_at(path, -1.0)

    def test_arc_length_additive_under_split(self):
        seg = quad(0, 0, 35, 65, 80, 0)
        left, right = seg.split(0.37)
        assert left.length() + right.length() == pytest.approx(
            seg.length(), rel=1e-6
        )

    def test_tangent_of_horizontal_line(self):
        path = Path((CurveSegment("line", (pt(0, 0), pt(10, 0))),))
        assert tangent_at(path, 5.0) == pytest.approx(0.0)

    def test_flatten_covers_endpoints(self):
        path = Path((quad(0, 0, 5, 9, 10, 0),))
        flat = path.flatten()
        assert np.allclose(flat[0], [0, 0])
        assert np.allclose(flat[-1], [10, 0])


class TestRegion:
    def test_needs_three_points_and_area(self):
        with pytest.raises(ValueError):
            Region((pt(0, 0), pt(1, 1)))
        with pytest.raises(ValueError):
            Region((pt(0, 0), pt(1, 1), pt(2, 2)))  # collinear, zero area

    def test_from_bbox_rejects_nonpositive_extent(self):
        with pytest.raises(ValueError):
            Region.from_bbox(0, 0, 0, 5)
        with pytest.raises(ValueError):
            Region.from_bbox(0, 0, 5, -1)

    @given(
        st.floats(-100, 100),
        st.floats(-100, 100),
        st.floats(1, 100),
        st.floats(1, 100),
        unit,
        unit,
    )
    @settings(max_examples=100, deadline=None)
    def test_bbox_region_contains_interior_points(self, x, y, w, h, u, v):
        region = Region.from_bbox(x, y, w, h)
        q = pt(x + u * w, y + v * h)
        assert contains(region, q)

    def test_boundary_counts_as_inside(self):
        region = Region.from_bbox(0, 0, 10, 10)
        assert contains(region, pt(0, 5))
        assert contains(region, pt(10, 10))
        assert not contains(region, pt(10.001, 5))

    @given(st.floats(-200, 200), st.floats(-200, 200))
    @settings(max_examples=100, deadline=None)
    def test_distance_to_boundary_is_consistent(self, qx, qy):
        region = Region((pt(0, 0), pt(40, 10), pt(30, 50), pt(-10, 30)))
        q = pt(qx, qy)
        dist, nearest = distance_to_boundary(region, q)
        assert dist == pytest.approx(q.distance(nearest), abs=1e-9)
        # the nearest point sits on (or within float noise of) the boundary
        d2, _ = distance_to_boundary(region, nearest)
        assert d2 < 1e-6

    def test_area_of_square(self):
        assert Region.from_bbox(2, 3, 10, 5).area == pytest.approx(50.0)


def test_point_coordinates_must_be_finite():
    with pytest.raises(ValueError):
        Point2(math.nan, 0.0)
    with pytest.raises(ValueError):
        Point2(0.0, math.inf)
