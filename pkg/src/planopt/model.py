"""Building domain types: openings, spaces, storeys, constructions, programs.

Every type is an immutable value; operations elsewhere never mutate a
building, they build modified copies.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .geometry import (
    Boundary,
    GeometryError,
    Point2,
    Rect,
    SIDES,
)

SPACE_FUNCTIONS = (
    "bedroom",
    "living",
    "kitchen",
    "bathroom",
    "hall",
    "corridor",
    "stair",
)
CIRCULATION_FUNCTIONS = frozenset({"hall", "corridor", "stair"})

ELEMENT_KINDS = (
    "exterior_wall",
    "interior_wall",
    "ceiling",
    "pavement",
    "window",
    "door",
)


class ModelError(ValueError):
    """Raised when a domain type invariant is violated."""


def _check_function(fn: str) -> str:
    if fn in SPACE_FUNCTIONS or fn.startswith("other:"):
        return fn
    raise ModelError(f"unknown space function {fn!r}")


def is_circulation(fn: str) -> bool:
    return fn in CIRCULATION_FUNCTIONS


@dataclass(frozen=True)
class Opening:
    """Door or window hosted on one wall of a space, in wall-local offset."""

    kind: str  # "door" | "window"
    side: str  # N | E | S | W in the plan-local frame
    offset: float  # meters along the wall from its low corner
    width: float
    height: float
    sill: float = 0.0
    overhang_depth: float = 0.0
    fin_depth_left: float = 0.0
    fin_depth_right: float = 0.0

    def __post_init__(self):
        if self.kind not in ("door", "window"):
            raise ModelError(f"opening kind must be door or window, got {self.kind!r}")
        if self.side not in SIDES:
            raise ModelError(f"opening side must be one of NESW, got {self.side!r}")
        if self.width <= 0:
            raise ModelError("opening width must be positive")
        if self.height <= 0:
            raise ModelError("opening height must be positive")
        if self.offset < 0:
            raise ModelError("opening offset must be >= 0")
        if self.kind == "door" and self.sill != 0.0:
            raise ModelError("doors must have sill = 0")
        if min(self.overhang_depth, self.fin_depth_left, self.fin_depth_right) < 0:
            raise ModelError("shading depths must be >= 0")

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class Space:
    id: str
    function: str
    storey: int
    rect: Rect
    openings: tuple[Opening, ...] = ()
    construction_overrides: Optional[dict] = None

    def __post_init__(self):
        _check_function(self.function)
        if self.storey < 0:
            raise ModelError(f"space {self.id}: storey must be >= 0")
        object.__setattr__(self, "openings", tuple(self.openings))
        for i, op in enumerate(self.openings):
            wall = self.rect.side_length(op.side)
            if op.offset + op.width > wall + 1e-9:
                raise ModelError(
                    f"space {self.id}: opening {i} exceeds its {op.side} wall "
                    f"({op.offset:.3f}+{op.width:.3f} > {wall:.3f})"
                )

    @property
    def is_circulation(self) -> bool:
        return is_circulation(self.function)

    def opening_center(self, op: Opening) -> Point2:
        """Plan coordinates of an opening's center on its host wall."""
        a, _ = self.rect.side_segment(op.side)
        t = op.offset + op.width / 2.0
        if op.side in ("N", "S"):
            return Point2(a.x + t, a.y)
        return Point2(a.x, a.y + t)


@dataclass(frozen=True)
class FloorPlan:
    storey: int
    spaces: tuple[Space, ...]

    def __post_init__(self):
        object.__setattr__(self, "spaces", tuple(self.spaces))
        for s in self.spaces:
            if s.storey != self.storey:
                raise ModelError(
                    f"space {s.id} carries storey {s.storey}, plan is {self.storey}"
                )


@dataclass(frozen=True)
class Assembly:
    """Opaque layered construction, or a glazing (u_value, shgc) pair.

    Layers are (thickness m, conductivity W/mK, density kg/m3,
    specific heat J/kgK), listed outside-in.
    """

    layers: tuple[tuple[float, float, float, float], ...] = ()
    u_value: Optional[float] = None
    shgc: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(tuple(l) for l in self.layers))
        if self.is_glazing:
            if self.layers:
                raise ModelError("assembly cannot mix glazing values and layers")
            if self.u_value is None or self.u_value <= 0:
                raise ModelError("glazing u_value must be positive")
            if self.shgc is None or not (0.0 <= self.shgc <= 1.0):
                raise ModelError("glazing shgc must lie in [0, 1]")
        else:
            if not self.layers:
                raise ModelError("opaque assembly needs at least one layer")
            for t, k, rho, cp in self.layers:
                if t <= 0 or k <= 0:
                    raise ModelError("layer thickness and conductivity must be > 0")
                if rho <= 0 or cp <= 0:
                    raise ModelError("layer density and specific heat must be > 0")

    @property
    def is_glazing(self) -> bool:
        return self.u_value is not None or self.shgc is not None

    @staticmethod
    def opaque(*layers: tuple[float, float, float, float]) -> "Assembly":
        return Assembly(layers=tuple(layers))

    @staticmethod
    def glazing(u_value: float, shgc: float) -> "Assembly":
        return Assembly(u_value=u_value, shgc=shgc)


@dataclass(frozen=True)
class ConstructionSet:
    """One assembly per building element kind; all six kinds required."""

    elements: dict

    def __post_init__(self):
        object.__setattr__(self, "elements", dict(self.elements))
        missing = [k for k in ELEMENT_KINDS if k not in self.elements]
        if missing:
            raise ModelError(f"construction set missing elements: {missing}")
        for k, a in self.elements.items():
            if k not in ELEMENT_KINDS:
                raise ModelError(f"unknown element kind {k!r}")
            if not isinstance(a, Assembly):
                raise ModelError(f"element {k} is not an Assembly")
        if not self.elements["window"].is_glazing:
            raise ModelError("window assembly must be a glazing")

    def __getitem__(self, kind: str) -> Assembly:
        return self.elements[kind]


def default_construction_set() -> ConstructionSet:
    """Mid-weight masonry construction used when a project sets nothing."""
    return ConstructionSet(
        {
            "exterior_wall": Assembly.opaque(
                (0.02, 0.8, 1800.0, 900.0),  # render
                (0.20, 0.9, 1800.0, 900.0),  # brick
                (0.06, 0.04, 30.0, 1400.0),  # insulation
                (0.015, 0.4, 900.0, 1000.0),  # plaster
            ),
            "interior_wall": Assembly.opaque((0.11, 0.4, 1000.0, 1000.0)),
            "ceiling": Assembly.opaque((0.20, 1.4, 2200.0, 880.0)),
            "pavement": Assembly.opaque(
                (0.20, 1.4, 2200.0, 880.0), (0.02, 0.2, 600.0, 1600.0)
            ),
            "window": Assembly.glazing(2.8, 0.7),
            "door": Assembly.opaque((0.04, 0.15, 600.0, 1600.0)),
        }
    )


@dataclass(frozen=True)
class Location:
    latitude: float
    longitude: float
    timezone: float  # hours east of UTC
    elevation: float = 0.0


@dataclass(frozen=True)
class Building:
    boundary: Boundary
    storey_count: int
    storey_height: float
    plans: tuple[FloorPlan, ...]
    orientation: float = 0.0  # degrees clockwise from true north
    party_edges: tuple[int, ...] = ()
    constructions: ConstructionSet = field(default_factory=default_construction_set)
    location: Location = Location(40.0, -8.4, 0.0, 100.0)

    def __post_init__(self):
        object.__setattr__(self, "plans", tuple(self.plans))
        object.__setattr__(self, "party_edges", tuple(self.party_edges))
        if self.storey_count < 1:
            raise ModelError("storey_count must be >= 1")
        if self.storey_height <= 0:
            raise ModelError("storey_height must be positive")
        if len(self.plans) != self.storey_count:
            raise ModelError(
                f"expected {self.storey_count} plans, got {len(self.plans)}"
            )
        for i, plan in enumerate(self.plans):
            if plan.storey != i:
                raise ModelError(f"plan {i} carries storey index {plan.storey}")
        if not (0.0 <= self.orientation < 360.0):
            raise ModelError("orientation must lie in [0, 360)")
        n_edges = len(self.boundary.vertices)
        for e in self.party_edges:
            if not (0 <= e < n_edges):
                raise ModelError(f"party edge index {e} out of range")
        ids = [s.id for p in self.plans for s in p.spaces]
        if len(ids) != len(set(ids)):
            raise ModelError("space ids must be unique within a building")

    def spaces(self) -> list[Space]:
        return [s for p in self.plans for s in p.spaces]

    def space(self, space_id: str) -> Space:
        for p in self.plans:
            for s in p.spaces:
                if s.id == space_id:
                    return s
        raise KeyError(space_id)

    def replace_space(self, space_id: str, new: Optional[Space]) -> "Building":
        """Copy of the building with one space replaced (or removed if None)."""
        plans = []
        found = False
        for p in self.plans:
            spaces = []
            for s in p.spaces:
                if s.id == space_id:
                    found = True
                    if new is not None and new.storey == p.storey:
                        spaces.append(new)
                else:
                    spaces.append(s)
            if new is not None and new.storey == p.storey and found and new.id != space_id:
                pass  # renames keep the original slot
            plans.append(FloorPlan(p.storey, tuple(spaces)))
        if not found:
            raise KeyError(space_id)
        return replace(self, plans=tuple(plans))

    def add_space(self, new: Space) -> "Building":
        plans = []
        for p in self.plans:
            if p.storey == new.storey:
                plans.append(FloorPlan(p.storey, p.spaces + (new,)))
            else:
                plans.append(p)
        return replace(self, plans=tuple(plans))


@dataclass(frozen=True)
class SpaceRequirement:
    id: str
    function: str
    storey: int
    area_range: tuple[float, float]
    min_dimension: float
    orientation_pref: Optional[tuple[float, float]] = None  # (azimuth, half width)
    position_pref: Optional[Point2] = None
    window_required: bool = False
    window_orientation_pref: Optional[tuple[float, float]] = None
    window_position_pref: Optional[Point2] = None

    def __post_init__(self):
        _check_function(self.function)
        amin, amax = self.area_range
        if not (0 < amin <= amax):
            raise ModelError(f"requirement {self.id}: invalid area range {self.area_range}")
        if self.min_dimension <= 0:
            raise ModelError(f"requirement {self.id}: min_dimension must be > 0")
        if self.min_dimension * self.min_dimension > amax + 1e-9:
            raise ModelError(
                f"requirement {self.id}: min_dimension^2 exceeds max area"
            )


ADJACENCY_KINDS = ("door-connected", "adjacent")


@dataclass(frozen=True)
class DesignProgram:
    boundary: Boundary
    storey_count: int
    storey_height: float
    gross_area_limit: float  # per storey
    construction_area_limit: float  # whole building
    space_reqs: tuple[SpaceRequirement, ...]
    adjacency_reqs: tuple[tuple[str, str, str], ...] = ()
    neighbor_sides: tuple[int, ...] = ()
    min_door_width: float = 0.8
    min_window_width: float = 0.8
    window_to_floor_ratio_min: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "space_reqs", tuple(self.space_reqs))
        object.__setattr__(
            self, "adjacency_reqs", tuple(tuple(a) for a in self.adjacency_reqs)
        )
        object.__setattr__(self, "neighbor_sides", tuple(self.neighbor_sides))

    def requirement(self, req_id: str) -> SpaceRequirement:
        for r in self.space_reqs:
            if r.id == req_id:
                return r
        raise KeyError(req_id)


def validate_program(p: DesignProgram) -> list[str]:
    """Collect every invariant violation as a human-readable issue string."""
    issues: list[str] = []
    if p.storey_count < 1:
        issues.append("storey_count must be >= 1")
    if p.storey_height <= 0:
        issues.append("storey_height must be positive")
    if p.gross_area_limit <= 0:
        issues.append("gross_area_limit must be positive")
    if p.construction_area_limit <= 0:
        issues.append("construction_area_limit must be positive")
    if not (0.0 < p.window_to_floor_ratio_min < 1.0):
        issues.append("window_to_floor_ratio_min must lie strictly between 0 and 1")
    if p.min_door_width <= 0 or p.min_window_width <= 0:
        issues.append("minimum opening widths must be positive")

    seen = set()
    for r in p.space_reqs:
        if r.id in seen:
            issues.append(f"duplicate space requirement id {r.id!r}")
        seen.add(r.id)
        if not (0 <= r.storey < p.storey_count):
            issues.append(f"requirement {r.id!r}: storey {r.storey} out of range")

    for a, b, kind in p.adjacency_reqs:
        if kind not in ADJACENCY_KINDS:
            issues.append(f"adjacency ({a!r}, {b!r}): unknown kind {kind!r}")
        for sid in (a, b):
            if sid not in seen:
                issues.append(f"adjacency references unknown space id {sid!r}")
        if a == b:
            issues.append(f"adjacency ({a!r}, {b!r}) is self-referential")

    n_edges = len(p.boundary.vertices)
    for e in p.neighbor_sides:
        if not (0 <= e < n_edges):
            issues.append(f"neighbor side index {e} out of range")

    for storey in range(p.storey_count):
        total_min = sum(r.area_range[0] for r in p.space_reqs if r.storey == storey)
        if total_min > p.gross_area_limit + 1e-9:
            issues.append(
                f"storey {storey}: required minimum areas total {total_min:.1f} m2, "
                f"exceeding the gross area limit {p.gross_area_limit:.1f} m2"
            )
    return issues
