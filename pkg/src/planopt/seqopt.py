"""Sequential variable optimization: coordinate descent over an ordered list
of design variables, each swept over a discretized domain against the
weighted degree-hours discomfort objective.

Geometric feasibility is guarded through the indicators module: a candidate
whose overlap plus overflow penalties regress beyond the configured
tolerance is discarded before it is ever simulated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .geometry import Point2, Rect
from .indicators import evaluate
from .model import Building, DesignProgram, ModelError, Opening, Space
from .thermal.comfort import ComfortModel, degree_hours, discomfort_objective
from .thermal.rc import simulate
from .thermal.weather import WeatherYear

VARIABLE_KINDS = (
    "BuildingOrientation",
    "OpeningPosition",
    "OpeningWidth",
    "OpeningSide",
    "WallPosition",
    "ReflectPlan",
    "OverhangDepth",
    "FinDepth",
)

SHADING_DEPTH_MAX = 1.5  # m, overhangs and fins sweep [0, max]


class SeqOptError(ValueError):
    pass


@dataclass(frozen=True)
class DesignVariable:
    kind: str
    space_id: Optional[str] = None
    opening_index: Optional[int] = None
    fin_side: Optional[str] = None  # "left" | "right"
    storey: Optional[int] = None
    axis: Optional[str] = None  # "x" | "y" for WallPosition
    coord: Optional[float] = None

    def label(self) -> str:
        if self.kind == "BuildingOrientation":
            return "orientation"
        if self.kind == "ReflectPlan":
            return "reflect"
        if self.kind == "WallPosition":
            return f"wall[{self.storey}:{self.axis}={self.coord:g}]"
        base = f"{self.kind}[{self.space_id}:{self.opening_index}]"
        if self.fin_side:
            return f"{base}:{self.fin_side}"
        return base


@dataclass(frozen=True)
class Strategy:
    order: tuple[str, ...] = VARIABLE_KINDS
    steps_per_variable: int = 12
    max_passes: int = 3
    feasibility_tolerance: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        unknown = [k for k in self.order if k not in VARIABLE_KINDS]
        if unknown:
            raise SeqOptError(f"unknown variable kinds in strategy: {unknown}")
        if self.steps_per_variable < 2:
            raise SeqOptError("steps_per_variable must be >= 2")
        if self.max_passes < 1:
            raise SeqOptError("max_passes must be >= 1")
        if self.feasibility_tolerance < 0:
            raise SeqOptError("feasibility_tolerance must be >= 0")


@dataclass(frozen=True)
class OptStep:
    variable: str
    candidates: tuple
    objectives: tuple
    chosen: object
    objective_before: float
    objective_after: float
    changed: bool
    all_infeasible: bool = False


@dataclass(frozen=True)
class OptTrace:
    steps: tuple[OptStep, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        for s in self.steps:
            if s.objective_after > s.objective_before + 1e-12:
                raise SeqOptError("trace step increased the objective")


@dataclass
class OptContext:
    """Everything a candidate evaluation needs besides the building."""

    program: DesignProgram
    weather: WeatherYear
    uses: dict = field(default_factory=dict)
    comfort: ComfortModel = field(default_factory=lambda: ComfortModel.en15251("II"))
    w_heat: float = 1.0
    w_cool: float = 1.0


def thermal_objective(b: Building, ctx: OptContext) -> float:
    result = simulate(b, ctx.uses, ctx.weather)
    d = degree_hours(result, ctx.comfort, ctx.weather)
    return discomfort_objective(d, ctx.w_heat, ctx.w_cool)


def _geometric_guard_value(b: Building, p: DesignProgram) -> float:
    perf = evaluate(b, p)
    return perf.space_overlap + perf.space_overflow


# ---------------------------------------------------------------------------
# variable enumeration and domains
# ---------------------------------------------------------------------------


def _window_refs(b: Building) -> list[tuple[str, int]]:
    refs = []
    for plan in b.plans:
        for s in sorted(plan.spaces, key=lambda sp: sp.id):
            for i, op in enumerate(s.openings):
                if op.kind == "window":
                    refs.append((s.id, i))
    return refs


def _shared_wall_coords(b: Building) -> list[tuple[int, str, float]]:
    out = []
    for plan in b.plans:
        xs = {}
        ys = {}
        for s in plan.spaces:
            xs.setdefault(round(s.rect.x0, 6), set()).add(("lo", s.id))
            xs.setdefault(round(s.rect.x1, 6), set()).add(("hi", s.id))
            ys.setdefault(round(s.rect.y0, 6), set()).add(("lo", s.id))
            ys.setdefault(round(s.rect.y1, 6), set()).add(("hi", s.id))
        for coord, members in sorted(xs.items()):
            sides = {side for side, _ in members}
            if len(members) >= 2 and {"lo", "hi"} <= sides:
                out.append((plan.storey, "x", coord))
        for coord, members in sorted(ys.items()):
            sides = {side for side, _ in members}
            if len(members) >= 2 and {"lo", "hi"} <= sides:
                out.append((plan.storey, "y", coord))
    return out


def enumerate_variables(b: Building, s: Strategy) -> list[DesignVariable]:
    """Expand the strategy's kinds into concrete instances, deterministic
    order (storey, space id, opening index)."""
    out: list[DesignVariable] = []
    windows = _window_refs(b)
    for kind in s.order:
        if kind == "BuildingOrientation":
            out.append(DesignVariable("BuildingOrientation"))
        elif kind == "ReflectPlan":
            out.append(DesignVariable("ReflectPlan"))
        elif kind == "WallPosition":
            for storey, axis, coord in _shared_wall_coords(b):
                out.append(
                    DesignVariable("WallPosition", storey=storey, axis=axis, coord=coord)
                )
        elif kind == "FinDepth":
            for sid, i in windows:
                out.append(DesignVariable("FinDepth", sid, i, fin_side="left"))
                out.append(DesignVariable("FinDepth", sid, i, fin_side="right"))
        else:
            for sid, i in windows:
                out.append(DesignVariable(kind, sid, i))
    return out


def _grid(lo: float, hi: float, steps: int) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * k / (steps - 1) for k in range(steps)]


def domain_of(
    v: DesignVariable, b: Building, s: Strategy, program: DesignProgram | None = None
) -> list:
    """Candidate values for one variable; the current value always included."""
    steps = s.steps_per_variable
    if v.kind == "BuildingOrientation":
        values = [360.0 * k / steps for k in range(steps)]
        current = b.orientation
    elif v.kind == "ReflectPlan":
        return [False, True]
    elif v.kind == "WallPosition":
        lo, hi = _wall_position_bounds(b, v)
        values = _grid(lo, hi, steps)
        current = v.coord
    else:
        space = b.space(v.space_id)
        op = space.openings[v.opening_index]
        wall = space.rect.side_length(op.side)
        if v.kind == "OpeningPosition":
            values = _grid(0.0, max(0.0, wall - op.width), steps)
            current = op.offset
        elif v.kind == "OpeningWidth":
            min_w = program.min_window_width if program is not None else 0.1
            values = _grid(min_w, max(min_w, wall - op.offset), steps)
            current = op.width
        elif v.kind == "OpeningSide":
            values = [
                side
                for side in ("N", "E", "S", "W")
                if space.rect.side_length(side) >= op.width - 1e-9
            ]
            current = op.side
        elif v.kind == "OverhangDepth":
            values = _grid(0.0, SHADING_DEPTH_MAX, steps)
            current = op.overhang_depth
        elif v.kind == "FinDepth":
            values = _grid(0.0, SHADING_DEPTH_MAX, steps)
            current = (
                op.fin_depth_left if v.fin_side == "left" else op.fin_depth_right
            )
        else:
            raise SeqOptError(f"unknown variable kind {v.kind}")
    if not any(_values_equal(current, c) for c in values):
        values.append(current)
    return values


def _wall_position_bounds(b: Building, v: DesignVariable) -> tuple[float, float]:
    """Within +/-25% of the coordinate, clipped so every incident space keeps
    a sane minimum dimension."""
    span = 0.25 * max(abs(v.coord), 1.0)
    lo, hi = v.coord - span, v.coord + span
    for sp in b.plans[v.storey].spaces:
        r = sp.rect
        lo_c, hi_c = (r.x0, r.x1) if v.axis == "x" else (r.y0, r.y1)
        if abs(lo_c - v.coord) <= 1e-6:  # wall is this space's low edge
            hi = min(hi, hi_c - 0.3)
        if abs(hi_c - v.coord) <= 1e-6:  # wall is this space's high edge
            lo = max(lo, lo_c + 0.3)
    return min(lo, v.coord), max(hi, v.coord)


def _values_equal(a, b) -> bool:
    if isinstance(a, float) and isinstance(b, float):
        return abs(a - b) <= 1e-9
    return a == b


# ---------------------------------------------------------------------------
# applying variable values
# ---------------------------------------------------------------------------


def set_variable(b: Building, v: DesignVariable, value) -> Optional[Building]:
    """Building with the variable set; None when the value cannot be applied."""
    if v.kind == "BuildingOrientation":
        return replace(b, orientation=float(value) % 360.0)
    if v.kind == "ReflectPlan":
        return _reflect_plan(b) if value else b
    if v.kind == "WallPosition":
        return _move_wall(b, v, float(value))

    try:
        s = b.space(v.space_id)
    except KeyError:
        return None
    if v.opening_index >= len(s.openings):
        return None
    op = s.openings[v.opening_index]
    wall = s.rect.side_length(op.side)

    if v.kind == "OpeningPosition":
        value = float(value)
        if value < -1e-9 or value + op.width > wall + 1e-9:
            return None
        new = replace(op, offset=max(0.0, value))
    elif v.kind == "OpeningWidth":
        value = float(value)
        if value <= 0 or op.offset + value > wall + 1e-9:
            return None
        new = replace(op, width=value)
    elif v.kind == "OpeningSide":
        new_wall = s.rect.side_length(value)
        if op.width > new_wall + 1e-9:
            return None
        offset = min(op.offset, new_wall - op.width)
        new = replace(op, side=value, offset=max(0.0, offset))
    elif v.kind == "OverhangDepth":
        new = replace(op, overhang_depth=float(value))
    elif v.kind == "FinDepth":
        if v.fin_side == "left":
            new = replace(op, fin_depth_left=float(value))
        else:
            new = replace(op, fin_depth_right=float(value))
    else:
        raise SeqOptError(f"unknown variable kind {v.kind}")

    openings = list(s.openings)
    openings[v.opening_index] = new
    try:
        return b.replace_space(s.id, replace(s, openings=tuple(openings)))
    except ModelError:
        return None


def _reflect_plan(b: Building) -> Building:
    """Mirror every storey about the vertical axis through the boundary
    bbox center(matching the generator's Mirror on whole storeys)."""
    cx = b.boundary.bbox.centroid.x
    mirror_side = {"N": "N", "S": "S", "E": "W", "W": "E"}
    plans = []
    for plan in b.plans:
        spaces = []
        for s in plan.spaces:
            r = s.rect
            nr = Rect(Point2(round(2 * cx - r.x1, 9), r.y0), r.width, r.height)
            ops = []
            for op in s.openings:
                offset = (
                    round(r.width - op.offset - op.width, 9)
                    if op.side in ("N", "S")
                    else op.offset
                )
                ops.append(replace(op, side=mirror_side[op.side], offset=offset))
            spaces.append(replace(s, rect=nr, openings=tuple(ops)))
        plans.append(replace(plan, spaces=tuple(spaces)))
    return replace(b, plans=tuple(plans))


def _move_wall(b: Building, v: DesignVariable, value: float) -> Optional[Building]:
    delta = value - v.coord
    if abs(delta) < 1e-12:
        return b
    nb = b
    for sp in b.plans[v.storey].spaces:
        r = sp.rect
        lo, hi = (r.x0, r.x1) if v.axis == "x" else (r.y0, r.y1)
        new_lo = lo + delta if abs(lo - v.coord) <= 1e-6 else lo
        new_hi = hi + delta if abs(hi - v.coord) <= 1e-6 else hi
        if new_lo == lo and new_hi == hi:
            continue
        if new_hi - new_lo < 0.3:
            return None
        if v.axis == "x":
            nr = Rect(Point2(new_lo, r.y0), new_hi - new_lo, r.height)
        else:
            nr = Rect(Point2(r.x0, new_lo), r.width, new_hi - new_lo)
        cur = nb.space(sp.id)
        ops = []
        ok = True
        for op in cur.openings:
            old_len = cur.rect.side_length(op.side)
            new_len = nr.side_length(op.side)
            offset = op.offset
            if abs(old_len - new_len) > 1e-12:
                offset = op.offset / old_len * new_len
            if op.width > new_len + 1e-9:
                ok = False
                break
            ops.append(replace(op, offset=min(max(0.0, offset), new_len - op.width)))
        if not ok:
            return None
        try:
            nb = nb.replace_space(sp.id, replace(cur, rect=nr, openings=tuple(ops)))
        except ModelError:
            return None
    return nb


# ---------------------------------------------------------------------------
# the optimization loop
# ---------------------------------------------------------------------------


def optimize_variable(
    b: Building,
    v: DesignVariable,
    ctx: OptContext,
    s: Strategy,
    objective_before: float,
    guard_baseline: float,
) -> tuple[Building, float, OptStep]:
    """Sweep one variable's domain; strict-improvement acceptance.

    Candidates that regress overlap+overflow beyond the baseline tolerance
    are discarded unsimulated. Ties and no-improvement keep the current
    value.
    """
    candidates = domain_of(v, b, s, ctx.program)
    objectives: list[float] = []
    feasible_any = False
    best_obj = objective_before
    best_building = b
    best_value = None

    for value in candidates:
        nb = set_variable(b, v, value)
        if nb is None:
            objectives.append(math.inf)
            continue
        if nb is not b:
            guard = _geometric_guard_value(nb, ctx.program)
            if guard > guard_baseline + s.feasibility_tolerance + 1e-9:
                objectives.append(math.inf)
                continue
        feasible_any = True
        obj = objective_before if nb is b else thermal_objective(nb, ctx)
        objectives.append(obj)
        if obj < best_obj - 1e-12:  # strict improvement only
            best_obj = obj
            best_building = nb
            best_value = value

    changed = best_value is not None
    step = OptStep(
        variable=v.label(),
        candidates=tuple(candidates),
        objectives=tuple(objectives),
        chosen=best_value if changed else "kept",
        objective_before=objective_before,
        objective_after=best_obj,
        changed=changed,
        all_infeasible=not feasible_any,
    )
    return best_building, best_obj, step


def run(b: Building, ctx: OptContext, s: Strategy | None = None) -> tuple[Building, OptTrace]:
    """Coordinate-descent passes until a full pass changes nothing or the
    pass budget is exhausted; the objective never increases."""
    s = s or Strategy()
    current = b
    objective = thermal_objective(current, ctx)
    steps: list[OptStep] = []
    for _ in range(s.max_passes):
        guard_baseline = _geometric_guard_value(current, ctx.program)
        changed_any = False
        for v in enumerate_variables(current, s):
            current, objective, step = optimize_variable(
                current, v, ctx, s, objective, guard_baseline
            )
            steps.append(step)
            changed_any = changed_any or step.changed
        if not changed_any:
            break
    return current, OptTrace(tuple(steps))
