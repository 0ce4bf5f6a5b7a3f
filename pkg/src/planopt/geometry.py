"""Axis-aligned plan geometry: points, rectangles, rectilinear boundaries.

All lengths are meters, areas m2. Spaces are axis-aligned rectangles in the
plan-local frame; only the whole building carries a rotation, so every
intersection here is exact interval arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

SIDES = ("N", "E", "S", "W")
SIDE_AZIMUTH = {"N": 0.0, "E": 90.0, "S": 180.0, "W": 270.0}


class GeometryError(ValueError):
    """Raised when a geometric type invariant is violated."""


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle anchored at its minimum corner."""

    min_corner: Point2
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise GeometryError(
                f"rect must have positive size, got {self.width} x {self.height}"
            )

    @property
    def x0(self) -> float:
        return self.min_corner.x

    @property
    def y0(self) -> float:
        return self.min_corner.y

    @property
    def x1(self) -> float:
        return self.min_corner.x + self.width

    @property
    def y1(self) -> float:
        return self.min_corner.y + self.height

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.width + self.height)

    @property
    def centroid(self) -> Point2:
        return Point2(self.x0 + self.width / 2.0, self.y0 + self.height / 2.0)

    def side_length(self, side: str) -> float:
        """Wall length of one side (N/S walls run along x, E/W along y)."""
        return self.width if side in ("N", "S") else self.height

    def side_segment(self, side: str) -> tuple[Point2, Point2]:
        """Endpoints of one wall, ordered by increasing offset coordinate."""
        if side == "S":
            return Point2(self.x0, self.y0), Point2(self.x1, self.y0)
        if side == "N":
            return Point2(self.x0, self.y1), Point2(self.x1, self.y1)
        if side == "W":
            return Point2(self.x0, self.y0), Point2(self.x0, self.y1)
        if side == "E":
            return Point2(self.x1, self.y0), Point2(self.x1, self.y1)
        raise GeometryError(f"unknown side {side!r}")

    def translated(self, dx: float, dy: float) -> "Rect":
        return Rect(Point2(self.x0 + dx, self.y0 + dy), self.width, self.height)


def rect(x: float, y: float, w: float, h: float) -> Rect:
    """Shorthand constructor used heavily in tests."""
    return Rect(Point2(x, y), w, h)


def overlap_area(a: Rect, b: Rect) -> float:
    """Area of the intersection of two rectangles; 0 when disjoint."""
    w = min(a.x1, b.x1) - max(a.x0, b.x0)
    h = min(a.y1, b.y1) - max(a.y0, b.y0)
    if w <= 0.0 or h <= 0.0:
        return 0.0
    return w * h


def shared_edge_length(a: Rect, b: Rect) -> float:
    """Length of wall contact between two rectangles with disjoint interiors.

    Returns 0 if the interiors overlap, if the rects are separated, or if
    they only touch at a corner.
    """
    wx = min(a.x1, b.x1) - max(a.x0, b.x0)
    wy = min(a.y1, b.y1) - max(a.y0, b.y0)
    if wx > 0.0 and wy > 0.0:
        return 0.0  # interiors overlap
    if wx == 0.0 and wy > 0.0:
        return wy  # vertical wall contact
    if wy == 0.0 and wx > 0.0:
        return wx  # horizontal wall contact
    return 0.0


def rect_distance(a: Rect, b: Rect) -> float:
    """Euclidean gap between two rectangles; 0 when touching or overlapping."""
    dx = max(0.0, max(a.x0, b.x0) - min(a.x1, b.x1))
    dy = max(0.0, max(a.y0, b.y0) - min(a.y1, b.y1))
    return math.hypot(dx, dy)


def compactness(r: Rect) -> float:
    """16*A/P^2, in (0, 1]; equals 1 exactly for squares."""
    p = r.perimeter
    return 16.0 * r.area / (p * p)


def wall_azimuth(side: str, building_orientation: float) -> float:
    """Absolute outward azimuth of a wall side under the building rotation.

    Side bases are N=0, E=90, S=180, W=270 degrees; the building orientation
    (clockwise from true north) is added modulo 360.
    """
    if side not in SIDE_AZIMUTH:
        raise GeometryError(f"unknown side {side!r}")
    return (SIDE_AZIMUTH[side] + building_orientation) % 360.0


def angle_difference(a: float, b: float) -> float:
    """Smallest absolute angular difference between two azimuths, in [0, 180]."""
    d = abs(a - b) % 360.0
    return 360.0 - d if d > 180.0 else d


def sector_deviation(azimuth: float, center: float, half_width: float) -> float:
    """Degrees by which an azimuth falls outside a compass sector; 0 inside."""
    return max(0.0, angle_difference(azimuth, center) - half_width)


@dataclass(frozen=True)
class Boundary:
    """Counter-clockwise rectilinear simple polygon, closed implicitly."""

    vertices: tuple[Point2, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        v = self.vertices
        if len(v) < 4:
            raise GeometryError("boundary needs at least 4 vertices")
        for i, (a, b) in enumerate(self._edge_pairs()):
            if a.x != b.x and a.y != b.y:
                raise GeometryError(f"boundary edge {i} is not axis-aligned")
            if a.x == b.x and a.y == b.y:
                raise GeometryError(f"boundary edge {i} has zero length")
        if self._signed_area() <= 0:
            raise GeometryError("boundary vertices must wind counter-clockwise")
        if self._self_intersects():
            raise GeometryError("boundary polygon is self-intersecting")

    def _edge_pairs(self):
        v = self.vertices
        for i in range(len(v)):
            yield v[i], v[(i + 1) % len(v)]

    def _signed_area(self) -> float:
        s = 0.0
        for a, b in self._edge_pairs():
            s += a.x * b.y - b.x * a.y
        return s / 2.0

    def _self_intersects(self) -> bool:
        edges = list(self._edge_pairs())
        n = len(edges)
        for i in range(n):
            for j in range(i + 1, n):
                adjacent = j == i + 1 or (i == 0 and j == n - 1)
                if _segments_cross(edges[i], edges[j], adjacent):
                    return True
        return False

    @property
    def area(self) -> float:
        return self._signed_area()

    @property
    def bbox(self) -> Rect:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return Rect(Point2(min(xs), min(ys)), max(xs) - min(xs), max(ys) - min(ys))

    def edges(self) -> list[tuple[Point2, Point2]]:
        return list(self._edge_pairs())

    @cached_property
    def pieces(self) -> tuple[Rect, ...]:
        """Disjoint rectangles exactly tiling the polygon interior.

        Vertical slab sweep: between consecutive distinct x coordinates the
        interior is a union of y intervals found by parity of horizontal-edge
        crossings at the slab midline.
        """
        xs = sorted({p.x for p in self.vertices})
        horiz = [
            (min(a.x, b.x), max(a.x, b.x), a.y)
            for a, b in self._edge_pairs()
            if a.y == b.y
        ]
        out: list[Rect] = []
        for x0, x1 in zip(xs, xs[1:]):
            mid = (x0 + x1) / 2.0
            crossings = sorted(y for (ex0, ex1, y) in horiz if ex0 < mid < ex1)
            for y0, y1 in zip(crossings[0::2], crossings[1::2]):
                out.append(Rect(Point2(x0, y0), x1 - x0, y1 - y0))
        return tuple(out)

    def contains_point(self, p: Point2) -> bool:
        return any(
            pc.x0 <= p.x <= pc.x1 and pc.y0 <= p.y <= pc.y1 for pc in self.pieces
        )


def _segments_cross(e1, e2, adjacent: bool) -> bool:
    """Improper intersection test for axis-aligned segments.

    Adjacent edges of a rectilinear polygon legitimately share an endpoint;
    anything beyond that (collinear overlap, crossing, touching mid-segment)
    makes the polygon non-simple.
    """
    (a1, b1), (a2, b2) = e1, e2
    x10, x11 = min(a1.x, b1.x), max(a1.x, b1.x)
    y10, y11 = min(a1.y, b1.y), max(a1.y, b1.y)
    x20, x21 = min(a2.x, b2.x), max(a2.x, b2.x)
    y20, y21 = min(a2.y, b2.y), max(a2.y, b2.y)
    ox = min(x11, x21) - max(x10, x20)
    oy = min(y11, y21) - max(y10, y20)
    if ox < 0 or oy < 0:
        return False
    if adjacent:
        # sharing exactly the common endpoint is fine
        return ox > 0 or oy > 0
    return True


def boundary_rect(x: float, y: float, w: float, h: float) -> Boundary:
    """Rectangular boundary helper (counter-clockwise winding)."""
    return Boundary(
        (Point2(x, y), Point2(x + w, y), Point2(x + w, y + h), Point2(x, y + h))
    )


def inside_area(r: Rect, b: Boundary) -> float:
    """Area of the part of a rectangle lying inside the boundary."""
    return sum(overlap_area(r, piece) for piece in b.pieces)


def outside_area(r: Rect, b: Boundary) -> float:
    """Area of the part of a rectangle lying outside the boundary."""
    return max(0.0, r.area - inside_area(r, b))
