"""Hybrid (1+lambda) evolution strategy arranging spaces and openings.

Offspring are built by applying one to three geometric transforms to the
incumbent; transform kinds are sampled by adaptive weights that track their
past success, targets are drawn from the nonconformity ranking, and move
magnitudes are derived from the targeted object's actual deviations
(deviation-directed local search). Coordinates live on a 1 cm grid and
moved edges snap flush to nearby walls, so exact contacts and exact zero
overlap are reachable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .geometry import (
    Point2,
    Rect,
    outside_area,
    overlap_area,
    rect_distance,
    shared_edge_length,
)
from .indicators import (
    ObjectDeviation,
    ObjectRef,
    PerformanceVector,
    Weights,
    aggregate,
    default_weights,
    evaluate_with_deviations,
    requirement_id_for_space,
)
from .model import (
    Building,
    DesignProgram,
    FloorPlan,
    ModelError,
    Opening,
    Space,
    validate_program,
)

GRID = 0.01  # m; all generated coordinates live on this grid
SNAP_TOL = 0.15  # m; moved edges glue to walls closer than this
MIN_DIM_FLOOR = 0.3  # m; dimension floor for spaces without a requirement

TRANSFORM_KINDS = ("Move", "Rotate", "Stretch", "Mirror", "Slice", "Swap", "WallShift")

VENT_SIDES = ("N", "E", "S", "W")


class GeneratorError(ValueError):
    pass


def snap(value: float) -> float:
    return round(value / GRID) * GRID


def snap_up(value: float) -> float:
    return math.ceil(value / GRID - 1e-9) * GRID


@dataclass(frozen=True)
class Individual:
    building: Building
    perf: PerformanceVector
    objective: float


@dataclass(frozen=True)
class GeneratorConfig:
    lam: int = 8  # offspring per generation
    max_evaluations: int = 200_000
    transforms_min: int = 1
    transforms_max: int = 3
    greediness: float = 0.8
    ema_rate: float = 0.1
    weight_floor: float = 0.05
    stagnation_restart: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.lam < 1 or self.transforms_min < 1 or self.transforms_max < self.transforms_min:
            raise GeneratorError("invalid offspring/transform counts")
        if not (0.0 <= self.greediness <= 1.0 and 0.0 <= self.ema_rate <= 1.0):
            raise GeneratorError("greediness and ema_rate must lie in [0, 1]")
        if self.weight_floor <= 0 or self.stagnation_restart < 1:
            raise GeneratorError("invalid weight floor or stagnation window")
        if self.max_evaluations < 0:
            raise GeneratorError("max_evaluations must be >= 0")


@dataclass(frozen=True)
class ActionStats:
    """Per-kind sampling weight and success EMA."""

    entries: dict  # kind -> (weight, ema)

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))
        total = sum(w for w, _ in self.entries.values())
        if total <= 0:
            raise GeneratorError("action weights must sum to > 0")

    @staticmethod
    def initial(weight_floor: float) -> "ActionStats":
        w0 = max(weight_floor, 0.5)
        return ActionStats({k: (w0, 0.5) for k in TRANSFORM_KINDS})


def update_stats(
    stats: ActionStats, kind: str, improved: bool, ema_rate: float = 0.1, weight_floor: float = 0.05
) -> ActionStats:
    """EMA success update: weight = max(floor, ema)."""
    weight, ema = stats.entries[kind]
    ema = (1.0 - ema_rate) * ema + ema_rate * (1.0 if improved else 0.0)
    entries = dict(stats.entries)
    entries[kind] = (max(weight_floor, ema), ema)
    return ActionStats(entries)


def propose_action(stats: ActionStats, rng: np.random.Generator) -> str:
    """Sample a transform kind proportionally to its adaptive weight."""
    kinds = TRANSFORM_KINDS
    weights = np.array([stats.entries[k][0] for k in kinds])
    return kinds[rng.choice(len(kinds), p=weights / weights.sum())]


def all_object_refs(b: Building) -> list[ObjectRef]:
    """Every addressable object: spaces first, then their openings."""
    refs = []
    for s in b.spaces():
        refs.append(ObjectRef(s.id))
        for i in range(len(s.openings)):
            refs.append(ObjectRef(s.id, i))
    return refs


def select_target(
    ind: Individual,
    devs: list[ObjectDeviation],
    greediness: float,
    rng: np.random.Generator,
) -> ObjectRef:
    """Greedy pick of the worst nonconforming object, else uniform.

    The deviation list is sparse (conforming objects omitted), so the
    uniform branch draws from the building's full object set.
    """
    if rng.random() < greediness and devs and devs[0].deviation > 0.0:
        return devs[0].ref  # ranking is descending
    refs = all_object_refs(ind.building)
    if not refs:
        raise GeneratorError("building has no objects to target")
    return refs[int(rng.integers(len(refs)))]


# ---------------------------------------------------------------------------
# magnitudes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Magnitude:
    vector: Optional[tuple[float, float]] = None  # Move (spaces)
    delta: Optional[float] = None  # Stretch / WallShift / opening moves
    side: Optional[str] = None  # Stretch / WallShift wall choice
    ratio: Optional[float] = None  # Slice cut
    partner: Optional[str] = None  # Swap partner space id


def _bbox_pull(r: Rect, p: DesignProgram) -> tuple[float, float]:
    """Minimal translation bringing a rect inside the boundary bounding box."""
    bb = p.boundary.bbox
    dx = max(0.0, bb.x0 - r.x0) - max(0.0, r.x1 - bb.x1)
    dy = max(0.0, bb.y0 - r.y0) - max(0.0, r.y1 - bb.y1)
    return dx, dy


def _flush_translation(mover: Rect, partner: Rect) -> tuple[float, float]:
    """Translation placing the mover flush against the partner's facing side,
    centered on the partner so the contact maximizes."""
    mc, pc = mover.centroid, partner.centroid
    dx_c, dy_c = mc.x - pc.x, mc.y - pc.y
    if abs(dx_c) >= abs(dy_c):
        nx0 = partner.x1 if dx_c >= 0 else partner.x0 - mover.width
        ny0 = pc.y - mover.height / 2.0
    else:
        ny0 = partner.y1 if dy_c >= 0 else partner.y0 - mover.height
        nx0 = pc.x - mover.width / 2.0
    return nx0 - mover.x0, ny0 - mover.y0


def _best_flush_translation(
    b: Building, p: DesignProgram, s: Space, partner: Rect
) -> tuple[float, float]:
    """Scan flush placements around the partner and keep the least-conflicting.

    Candidate spots: centered on each partner side plus the corner-aligned
    variants; scored by overlap with other spaces and area outside the
    boundary. This is the local-search flavor of the hybrid strategy.
    """
    mover = s.rect
    others = [o.rect for o in b.plans[s.storey].spaces if o.id != s.id]
    best_score = None
    best_vec = (0.0, 0.0)

    def slide_positions(lo, hi, length):
        # translate along the wall, keeping a door's worth of contact
        start = lo - length + 0.8
        stop = hi - 0.8
        if stop <= start:
            return [lo + (hi - lo - length) / 2.0]
        return list(np.linspace(start, stop, 7))

    for side in ("N", "E", "S", "W"):
        if side == "E":
            xs = [partner.x1]
            ys = slide_positions(partner.y0, partner.y1, mover.height)
        elif side == "W":
            xs = [partner.x0 - mover.width]
            ys = slide_positions(partner.y0, partner.y1, mover.height)
        elif side == "N":
            ys = [partner.y1]
            xs = slide_positions(partner.x0, partner.x1, mover.width)
        else:
            ys = [partner.y0 - mover.height]
            xs = slide_positions(partner.x0, partner.x1, mover.width)
        for x0 in xs:
            for y0 in ys:
                cand = Rect(Point2(snap(x0), snap(y0)), mover.width, mover.height)
                conflict = outside_area(cand, p.boundary) * 10.0
                for o in others:
                    conflict += overlap_area(cand, o)
                vec = (cand.x0 - mover.x0, cand.y0 - mover.y0)
                score = (conflict, math.hypot(*vec))  # prefer the nearest spot
                if best_score is None or score < best_score:
                    best_score = score
                    best_vec = vec
    return best_vec


def _move_attractor(
    b: Building, p: DesignProgram, s: Space, rng: np.random.Generator
) -> tuple[float, float]:
    """Deviation-directed translation for one space.

    Candidates carry (priority, dx, dy) where (dx, dy) is the translation
    that would resolve the deviation: pulls toward unmet required
    adjacencies, the position preference, the boundary interior and the
    stair stack, plus a push apart from the heaviest overlap partner. The
    highest-priority candidate wins and is scaled by U(0.5, 1.5).
    """
    candidates: list[tuple[float, float, float]] = []
    my_req = requirement_id_for_space(s.id)
    c = s.rect.centroid

    for a_id, b_id, _ in p.adjacency_reqs:
        if my_req not in (a_id, b_id):
            continue
        other_req = b_id if my_req == a_id else a_id
        partners = [
            o
            for o in b.spaces()
            if o.storey == s.storey and requirement_id_for_space(o.id) == other_req
        ]
        if not partners:
            continue
        partner = min(partners, key=lambda o: rect_distance(s.rect, o.rect))
        if shared_edge_length(s.rect, partner.rect) >= p.min_door_width:
            continue
        gap = rect_distance(s.rect, partner.rect)
        dev = gap if gap > 0 else p.min_door_width
        dx, dy = _best_flush_translation(b, p, s, partner.rect)
        candidates.append((dev, dx, dy))

    req = None
    try:
        req = p.requirement(my_req)
    except KeyError:
        pass
    if req is not None and req.position_pref is not None:
        d = c.distance_to(req.position_pref)
        if d > 0:
            candidates.append((d, req.position_pref.x - c.x, req.position_pref.y - c.y))

    out = outside_area(s.rect, p.boundary)
    if out > 0:
        dx, dy = _bbox_pull(s.rect, p)
        pull = math.hypot(dx, dy)
        if pull > 0:
            candidates.append((pull, dx, dy))
        else:  # inside the bbox but outside a notched boundary: random nudge
            ang = rng.uniform(0, 2 * math.pi)
            step = math.sqrt(out)
            candidates.append((step, step * math.cos(ang), step * math.sin(ang)))

    worst_overlap = 0.0
    away = (0.0, 0.0)
    for other in b.spaces():
        if other.id == s.id or other.storey != s.storey:
            continue
        ov = overlap_area(s.rect, other.rect)
        if ov > worst_overlap:
            worst_overlap = ov
            oc = other.rect.centroid
            wx = min(s.rect.x1, other.rect.x1) - max(s.rect.x0, other.rect.x0)
            wy = min(s.rect.y1, other.rect.y1) - max(s.rect.y0, other.rect.y0)
            push = min(wx, wy)  # smallest separating translation
            dx = -push if oc.x >= c.x else push
            dy = -push if oc.y >= c.y else push
            away = (dx, 0.0) if wx <= wy else (0.0, dy)
    if worst_overlap > 0:
        candidates.append((worst_overlap, away[0], away[1]))

    if s.function == "stair":
        for plan in b.plans:
            if abs(plan.storey - s.storey) == 1:
                for other in plan.spaces:
                    if other.function == "stair":
                        oc = other.rect.centroid
                        d = c.distance_to(oc)
                        if d > 1e-9:
                            candidates.append((d, oc.x - c.x, oc.y - c.y))

    if not candidates:
        ang = rng.uniform(0, 2 * math.pi)
        length = rng.uniform(0.0, 1.0)
        return length * math.cos(ang), length * math.sin(ang)

    _, dx, dy = max(candidates, key=lambda t: t[0])
    noise = rng.uniform(0.5, 1.5)
    return dx * noise, dy * noise


def _stretch_need(p: DesignProgram, s: Space, rng: np.random.Generator) -> tuple[str, float]:
    """(side, outward delta) sized from area and min-dimension deficits."""
    req = None
    try:
        req = p.requirement(requirement_id_for_space(s.id))
    except KeyError:
        pass
    w, h = s.rect.width, s.rect.height
    noise = rng.uniform(0.5, 1.5)
    # small overshoot so deficit-driven growth lands strictly inside the range
    margin = 0.05
    if req is not None:
        amin, amax = req.area_range
        area = s.rect.area
        if min(w, h) < req.min_dimension:
            # grow the short axis to its minimum
            delta = (req.min_dimension - min(w, h) + GRID) * noise
            if w <= h:
                return ("E" if rng.random() < 0.5 else "W", delta)
            return ("N" if rng.random() < 0.5 else "S", delta)
        if area < amin:
            side = VENT_SIDES[int(rng.integers(4))]
            length = w if side in ("N", "S") else h
            return side, (amin - area + margin) / max(length, 0.1) * noise
        if area > amax:
            side = VENT_SIDES[int(rng.integers(4))]
            length = w if side in ("N", "S") else h
            return side, -(area - amax + margin) / max(length, 0.1) * noise
    # no deficit: small exploratory shift
    return VENT_SIDES[int(rng.integers(4))], rng.uniform(-0.5, 0.5)


def transform_magnitude(
    b: Building,
    p: DesignProgram,
    kind: str,
    target: ObjectRef,
    rng: np.random.Generator,
) -> Magnitude:
    """Derive how far a transform should reach from the target's deviations."""
    try:
        s = b.space(target.space_id)
    except KeyError:
        return Magnitude()

    if target.opening_index is not None:
        if target.opening_index >= len(s.openings):
            return Magnitude()
        op = s.openings[target.opening_index]
        wall = s.rect.side_length(op.side)
        if kind == "Move":
            req = None
            try:
                req = p.requirement(requirement_id_for_space(s.id))
            except KeyError:
                pass
            if req is not None and req.window_position_pref is not None and op.kind == "window":
                a, _ = s.rect.side_segment(op.side)
                t_pref = (
                    req.window_position_pref.x - a.x
                    if op.side in ("N", "S")
                    else req.window_position_pref.y - a.y
                )
                current = op.offset + op.width / 2.0
                return Magnitude(delta=(t_pref - current) * rng.uniform(0.5, 1.5))
            return Magnitude(delta=rng.uniform(-1.0, 1.0))
        if kind == "Stretch":
            min_w = p.min_door_width if op.kind == "door" else p.min_window_width
            if op.width < min_w:
                return Magnitude(delta=(min_w - op.width) * rng.uniform(0.5, 1.5))
            if op.kind == "window" and req_wfr_deficit(p, s) > 0:
                extra = req_wfr_deficit(p, s) * s.rect.area / max(op.height, 0.1)
                return Magnitude(delta=extra * rng.uniform(0.5, 1.5))
            return Magnitude(delta=rng.uniform(-0.3, 0.3) * wall)
        return Magnitude()

    if kind == "Move":
        return Magnitude(vector=_move_attractor(b, p, s, rng))
    if kind == "Stretch":
        side, delta = _stretch_need(p, s, rng)
        return Magnitude(side=side, delta=delta)
    if kind == "WallShift":
        side, delta = _stretch_need(p, s, rng)
        return Magnitude(side=side, delta=delta)
    if kind == "Slice":
        return Magnitude(ratio=rng.uniform(0.3, 0.7))
    if kind == "Swap":
        others = [o for o in b.spaces() if o.storey == s.storey and o.id != s.id]
        if not others:
            return Magnitude()
        # trade places with whoever sits where this space wants to be
        dx, dy = _move_attractor(b, p, s, rng)
        gx, gy = s.rect.centroid.x + dx, s.rect.centroid.y + dy
        partner = min(
            others,
            key=lambda o: math.hypot(o.rect.centroid.x - gx, o.rect.centroid.y - gy),
        )
        return Magnitude(partner=partner.id)
    return Magnitude()  # Rotate, Mirror carry no magnitude


def req_wfr_deficit(p: DesignProgram, s: Space) -> float:
    try:
        req = p.requirement(requirement_id_for_space(s.id))
    except KeyError:
        return 0.0
    if not req.window_required:
        return 0.0
    win = sum(o.area for o in s.openings if o.kind == "window")
    return max(0.0, p.window_to_floor_ratio_min - win / s.rect.area)


# ---------------------------------------------------------------------------
# transform application
# ---------------------------------------------------------------------------


def _min_dimension_for(p: DesignProgram, space_id: str) -> float:
    try:
        return max(MIN_DIM_FLOOR, p.requirement(requirement_id_for_space(space_id)).min_dimension)
    except KeyError:
        return MIN_DIM_FLOOR


def _storey_snap_coords(b: Building, storey: int, exclude: str):
    xs, ys = set(), set()
    for sp in b.plans[storey].spaces:
        if sp.id == exclude:
            continue
        xs.update((sp.rect.x0, sp.rect.x1))
        ys.update((sp.rect.y0, sp.rect.y1))
    for piece in b.boundary.pieces:
        xs.update((piece.x0, piece.x1))
        ys.update((piece.y0, piece.y1))
    return sorted(xs), sorted(ys)


def _axis_snap_delta(lo: float, hi: float, coords, tol: float) -> float:
    """Translation gluing either edge to the nearest wall line within tol.

    Edges already flush win (no drift away from an existing contact);
    otherwise the smallest nonzero adjustment is taken.
    """
    best = 0.0
    best_abs = tol
    for c in coords:
        for edge in (lo, hi):
            d = c - edge
            if abs(d) < 1e-12:
                return 0.0  # already flush somewhere: leave the axis alone
            if abs(d) < best_abs:
                best, best_abs = d, abs(d)
    return best


def _snap_rect_flush(b: Building, s: Space, r: Rect) -> Rect:
    """Glue the rect's edges to nearby walls or boundary lines, axis-wise."""
    xs, ys = _storey_snap_coords(b, s.storey, s.id)
    dx = _axis_snap_delta(r.x0, r.x1, xs, SNAP_TOL)
    dy = _axis_snap_delta(r.y0, r.y1, ys, SNAP_TOL)
    return r.translated(dx, dy)


def _rescale_openings(s: Space, old_rect: Rect, new_rect: Rect) -> Optional[tuple[Opening, ...]]:
    """Proportionally rescale opening offsets onto the resized walls.

    Returns None when an opening no longer fits its wall.
    """
    out = []
    for op in s.openings:
        old_len = old_rect.side_length(op.side)
        new_len = new_rect.side_length(op.side)
        offset = op.offset
        if abs(old_len - new_len) > 1e-12:
            offset = snap(op.offset / old_len * new_len)
        if op.width > new_len + 1e-9:
            return None
        offset = min(max(0.0, offset), new_len - op.width)
        out.append(replace(op, offset=offset))
    return tuple(out)


def _with_rect(b: Building, p: DesignProgram, s: Space, r: Rect, snap_flush: bool = True):
    """Replace a space's rect, rescaling openings; None when invalid."""
    if r.width < _min_dimension_for(p, s.id) - 1e-9 or r.height < _min_dimension_for(p, s.id) - 1e-9:
        return None
    if snap_flush:
        r = _snap_rect_flush(b, s, r)
    openings = _rescale_openings(s, s.rect, r)
    if openings is None:
        return None
    return b.replace_space(s.id, replace(s, rect=r, openings=openings))


_ROTATE_MAP = {"N": "E", "E": "S", "S": "W", "W": "N"}
_MIRROR_MAP = {"N": "N", "S": "S", "E": "W", "W": "E"}


def apply_transform(
    b: Building,
    p: DesignProgram,
    kind: str,
    target: ObjectRef,
    mag: Magnitude,
) -> tuple[Building, bool]:
    """Apply one transform; invalid results reject to the unchanged building."""
    try:
        s = b.space(target.space_id)
    except KeyError:
        return b, False

    if target.opening_index is not None:
        return _apply_opening_transform(b, s, target.opening_index, kind, mag)

    r = s.rect
    if kind == "Move":
        if mag.vector is None:
            return b, False
        dx, dy = snap(mag.vector[0]), snap(mag.vector[1])
        nb = _with_rect(b, p, s, r.translated(dx, dy))
        return (nb, True) if nb is not None else (b, False)

    if kind == "Rotate":
        # dims swap about the centroid; each wall keeps its length under the
        # side remap, so opening offsets carry over unchanged
        c = r.centroid
        nr = Rect(Point2(c.x - r.height / 2.0, c.y - r.width / 2.0), r.height, r.width)
        rotated = tuple(replace(op, side=_ROTATE_MAP[op.side]) for op in s.openings)
        try:
            nb = b.replace_space(s.id, replace(s, rect=nr, openings=rotated))
        except ModelError:
            return b, False
        return nb, True

    if kind == "Stretch":
        if mag.side is None or mag.delta is None:
            return b, False
        d = snap(mag.delta)
        x0, y0, x1, y1 = r.x0, r.y0, r.x1, r.y1
        if mag.side == "E":
            x1 += d
        elif mag.side == "W":
            x0 -= d
        elif mag.side == "N":
            y1 += d
        else:
            y0 -= d
        if x1 - x0 <= 0 or y1 - y0 <= 0:
            return b, False
        nb = _with_rect(b, p, s, Rect(Point2(x0, y0), x1 - x0, y1 - y0))
        return (nb, True) if nb is not None else (b, False)

    if kind == "Mirror":
        # reflect about the vertical axis through the boundary bbox center;
        # E/W sides swap, offsets on horizontal walls flip along the wall
        cx = b.boundary.bbox.centroid.x
        nr = Rect(Point2(2 * cx - r.x1, r.y0), r.width, r.height)
        mirrored = []
        for op in s.openings:
            offset = snap(r.width - op.offset - op.width) if op.side in ("N", "S") else op.offset
            mirrored.append(replace(op, side=_MIRROR_MAP[op.side], offset=offset))
        try:
            nb = b.replace_space(s.id, replace(s, rect=nr, openings=tuple(mirrored)))
        except ModelError:
            return b, False
        return nb, True

    if kind == "Slice":
        if mag.ratio is None:
            return b, False
        return _apply_slice(b, p, s, mag.ratio)

    if kind == "Swap":
        if mag.partner is None:
            return b, False
        try:
            other = b.space(mag.partner)
        except KeyError:
            return b, False
        if other.storey != s.storey:
            return b, False
        ra = Rect(other.rect.min_corner, s.rect.width, s.rect.height)
        rb = Rect(s.rect.min_corner, other.rect.width, other.rect.height)
        nb = _with_rect(b, p, s, ra, snap_flush=False)
        if nb is None:
            return b, False
        nb = _with_rect(nb, p, nb.space(other.id), rb, snap_flush=False)
        return (nb, True) if nb is not None else (b, False)

    if kind == "WallShift":
        if mag.side is None or mag.delta is None:
            return b, False
        return _apply_wall_shift(b, p, s, mag.side, snap(mag.delta))

    return b, False


def _apply_opening_transform(b: Building, s: Space, idx: int, kind: str, mag: Magnitude):
    if idx >= len(s.openings):
        return b, False
    op = s.openings[idx]
    wall = s.rect.side_length(op.side)

    if kind == "Move":
        if mag.delta is None:
            return b, False
        new_offset = snap(op.offset + mag.delta)
        if new_offset < 0 or new_offset + op.width > wall + 1e-9:
            return b, False
        new = replace(op, offset=new_offset)
    elif kind == "Rotate":
        new_side = _ROTATE_MAP[op.side]
        new_wall = s.rect.side_length(new_side)
        if op.width > new_wall + 1e-9:
            return b, False
        offset = snap(op.offset / wall * new_wall)
        offset = min(max(0.0, offset), new_wall - op.width)
        new = replace(op, side=new_side, offset=offset)
    elif kind == "Stretch":
        if mag.delta is None:
            return b, False
        new_width = snap(op.width + mag.delta)
        if new_width <= 0 or op.offset + new_width > wall + 1e-9:
            return b, False
        new = replace(op, width=new_width)
    elif kind == "Mirror":
        new = replace(op, offset=wall - op.offset - op.width)
    else:
        return b, False  # Slice/Swap/WallShift do not act on openings

    openings = list(s.openings)
    openings[idx] = new
    return b.replace_space(s.id, replace(s, openings=tuple(openings))), True


def _mergeable_sibling(b: Building, s: Space) -> Optional[Space]:
    """A same-requirement space whose rect unions with s into an exact rect."""
    base = requirement_id_for_space(s.id)
    for other in b.plans[s.storey].spaces:
        if other.id == s.id or requirement_id_for_space(other.id) != base:
            continue
        ra, rb = s.rect, other.rect
        same_band_y = abs(ra.y0 - rb.y0) <= 1e-9 and abs(ra.y1 - rb.y1) <= 1e-9
        same_band_x = abs(ra.x0 - rb.x0) <= 1e-9 and abs(ra.x1 - rb.x1) <= 1e-9
        touch_x = abs(ra.x1 - rb.x0) <= 1e-9 or abs(rb.x1 - ra.x0) <= 1e-9
        touch_y = abs(ra.y1 - rb.y0) <= 1e-9 or abs(rb.y1 - ra.y0) <= 1e-9
        if (same_band_y and touch_x) or (same_band_x and touch_y):
            return other
    return None


def _merge_spaces(b: Building, keep: Space, absorb: Space) -> tuple[Building, bool]:
    ra, rb = keep.rect, absorb.rect
    nr = Rect(
        Point2(min(ra.x0, rb.x0), min(ra.y0, rb.y0)),
        max(ra.x1, rb.x1) - min(ra.x0, rb.x0),
        max(ra.y1, rb.y1) - min(ra.y0, rb.y0),
    )
    # remap both spaces' openings onto the merged rect by plan position
    merged_ops = []
    for host in (keep, absorb):
        for op in host.openings:
            a, _ = host.rect.side_segment(op.side)
            if op.side in ("N", "S"):
                if op.side == "N" and abs(host.rect.y1 - nr.y1) > 1e-9:
                    continue  # wall became interior to the merge, drop
                if op.side == "S" and abs(host.rect.y0 - nr.y0) > 1e-9:
                    continue
                offset = snap(a.x + op.offset - nr.x0)
            else:
                if op.side == "E" and abs(host.rect.x1 - nr.x1) > 1e-9:
                    continue
                if op.side == "W" and abs(host.rect.x0 - nr.x0) > 1e-9:
                    continue
                offset = snap(a.y + op.offset - nr.y0)
            if offset < 0 or offset + op.width > nr.side_length(op.side) + 1e-9:
                continue
            merged_ops.append(replace(op, offset=offset))
    try:
        nb = b.replace_space(absorb.id, None)
        nb = nb.replace_space(keep.id, replace(keep, rect=nr, openings=tuple(merged_ops)))
    except ModelError:
        return b, False
    return nb, True


def _absorb_sibling(b: Building, p: DesignProgram, s: Space) -> tuple[Building, bool]:
    """Remove the smallest same-requirement sibling and regrow the survivor.

    The generalized inverse of Slice once pieces have drifted: the target
    absorbs the sibling's floor area by stretching whichever side still
    admits the growth; plain removal if no side does.
    """
    base = requirement_id_for_space(s.id)
    siblings = [
        o
        for o in b.plans[s.storey].spaces
        if o.id != s.id and requirement_id_for_space(o.id) == base
    ]
    if not siblings:
        return b, False
    victim = min(siblings, key=lambda o: o.rect.area)
    keep = s if "~" in victim.id or "~" not in s.id else victim
    victim = victim if keep is s else s
    nb = b.replace_space(victim.id, None)
    lost = victim.rect.area
    cur = nb.space(keep.id)
    for side in ("E", "W", "N", "S"):
        length = cur.rect.side_length("N" if side in ("E", "W") else "E")
        grown = _with_rect(
            nb, p, cur, _stretched(cur.rect, side, snap(lost / length)), snap_flush=True
        )
        if grown is not None:
            return grown, True
    return nb, True  # removal alone; gross shortfall pressure remains


def _stretched(r: Rect, side: str, delta: float) -> Rect:
    x0, y0, x1, y1 = r.x0, r.y0, r.x1, r.y1
    if side == "E":
        x1 += delta
    elif side == "W":
        x0 -= delta
    elif side == "N":
        y1 += delta
    else:
        y0 -= delta
    return Rect(Point2(x0, y0), x1 - x0, y1 - y0)


def _apply_slice(b: Building, p: DesignProgram, s: Space, ratio: float):
    # a slice on a space with same-requirement siblings reverses: merge the
    # flush case exactly, otherwise absorb the smallest sibling
    sibling = _mergeable_sibling(b, s)
    if sibling is not None:
        keep, absorb = (s, sibling) if "~" in sibling.id else (sibling, s)
        return _merge_spaces(b, keep, absorb)
    merged, did = _absorb_sibling(b, p, s)
    if did:
        return merged, True

    # slice pieces are transient sub-spaces: only the physical floor applies,
    # the requirement's min_dimension is enforced through the area_dims penalty
    r = s.rect
    min_dim = MIN_DIM_FLOOR
    existing = {sp.id for sp in b.spaces()}
    k = 2
    while f"{s.id}~{k}" in existing:
        k += 1
    new_id = f"{s.id}~{k}"

    if r.width >= r.height:  # cut vertically
        left_w = snap(r.width * ratio)
        right_w = r.width - left_w
        if left_w < min_dim or right_w < min_dim:
            return b, False
        ra = Rect(r.min_corner, left_w, r.height)
        rb = Rect(Point2(r.x0 + left_w, r.y0), right_w, r.height)
        ops_a, ops_b = [], []
        for op in s.openings:
            if op.side in ("E",):
                ops_b.append(op)
            elif op.side in ("W",):
                ops_a.append(op)
            else:  # N/S walls are split at the cut
                if op.offset + op.width <= left_w + 1e-9:
                    ops_a.append(op)
                elif op.offset >= left_w - 1e-9:
                    ops_b.append(replace(op, offset=max(0.0, snap(op.offset - left_w))))
                else:
                    return b, False  # opening straddles the cut
    else:  # cut horizontally
        low_h = snap(r.height * ratio)
        high_h = r.height - low_h
        if low_h < min_dim or high_h < min_dim:
            return b, False
        ra = Rect(r.min_corner, r.width, low_h)
        rb = Rect(Point2(r.x0, r.y0 + low_h), r.width, high_h)
        ops_a, ops_b = [], []
        for op in s.openings:
            if op.side in ("N",):
                ops_b.append(op)
            elif op.side in ("S",):
                ops_a.append(op)
            else:
                if op.offset + op.width <= low_h + 1e-9:
                    ops_a.append(op)
                elif op.offset >= low_h - 1e-9:
                    ops_b.append(replace(op, offset=max(0.0, snap(op.offset - low_h))))
                else:
                    return b, False

    part_a = replace(s, rect=ra, openings=tuple(ops_a))
    part_b = Space(new_id, s.function, s.storey, rb, tuple(ops_b))
    return b.replace_space(s.id, part_a).add_space(part_b), True


def _apply_wall_shift(b: Building, p: DesignProgram, s: Space, side: str, delta: float):
    """Move a shared wall coordinate, stretching every space incident to it."""
    if delta == 0.0:
        return b, False
    r = s.rect
    if side in ("E", "W"):
        coord = r.x1 if side == "E" else r.x0
        axis = "x"
    else:
        coord = r.y1 if side == "N" else r.y0
        axis = "y"

    nb = b
    touched = False
    for sp in b.plans[s.storey].spaces:
        rr = sp.rect
        lo, hi = (rr.x0, rr.x1) if axis == "x" else (rr.y0, rr.y1)
        new_lo, new_hi = lo, hi
        if abs(lo - coord) <= 1e-9:
            new_lo = lo + delta
        if abs(hi - coord) <= 1e-9:
            new_hi = hi + delta
        if new_lo == lo and new_hi == hi:
            continue
        if new_hi - new_lo < _min_dimension_for(p, sp.id) - 1e-9:
            return b, False
        if axis == "x":
            nr = Rect(Point2(new_lo, rr.y0), new_hi - new_lo, rr.height)
        else:
            nr = Rect(Point2(rr.x0, new_lo), rr.width, new_hi - new_lo)
        cur = nb.space(sp.id)
        openings = _rescale_openings(cur, cur.rect, nr)
        if openings is None:
            return b, False
        nb = nb.replace_space(sp.id, replace(cur, rect=nr, openings=openings))
        touched = True
    return (nb, True) if touched else (b, False)


# ---------------------------------------------------------------------------
# initialization and the evolution loop
# ---------------------------------------------------------------------------


def _initial_rect(req, rng: np.random.Generator, bbox: Rect) -> Rect:
    amin, _ = req.area_range
    side = math.sqrt(amin)
    if side >= req.min_dimension:
        w = h = snap_up(side)
    else:
        w = snap_up(req.min_dimension)
        h = snap_up(max(req.min_dimension, amin / req.min_dimension))
    w = min(w, snap(bbox.width))
    h = min(h, snap(bbox.height))
    x0 = snap(rng.uniform(bbox.x0, max(bbox.x0, bbox.x1 - w)))
    y0 = snap(rng.uniform(bbox.y0, max(bbox.y0, bbox.y1 - h)))
    return Rect(Point2(x0, y0), w, h)


def _facing_side(from_rect: Rect, to: Point2) -> str:
    c = from_rect.centroid
    dx, dy = to.x - c.x, to.y - c.y
    if abs(dx) >= abs(dy):
        return "E" if dx >= 0 else "W"
    return "N" if dy >= 0 else "S"


def _centered_opening(kind: str, side: str, rect_: Rect, width: float, height: float, sill: float) -> Opening:
    wall = rect_.side_length(side)
    width = min(width, snap(wall))
    offset = snap((wall - width) / 2.0)
    return Opening(kind, side, offset, width, height, sill=sill)


def init_individual(
    p: DesignProgram,
    rng: np.random.Generator,
    weights: Optional[Weights] = None,
) -> Individual:
    """Seed individual: one square-ish rect per requirement at its area
    minimum, placed uniformly inside the boundary bounding box, one window
    per window-required space and one door per door adjacency."""
    issues = validate_program(p)
    if issues:
        raise GeneratorError("invalid program: " + "; ".join(issues))
    weights = weights or default_weights()
    bbox = p.boundary.bbox

    spaces_by_storey: dict[int, list[Space]] = {i: [] for i in range(p.storey_count)}
    rect_by_id: dict[str, Rect] = {}
    for req in p.space_reqs:
        r = _initial_rect(req, rng, bbox)
        rect_by_id[req.id] = r
        openings: list[Opening] = []
        if req.window_required:
            side = "S" if r.width >= p.min_window_width else "E"
            openings.append(
                _centered_opening("window", side, r, p.min_window_width, 1.2, 0.9)
            )
        spaces_by_storey[req.storey].append(
            Space(req.id, req.function, req.storey, r, tuple(openings))
        )

    for a_id, b_id, kind in p.adjacency_reqs:
        if kind != "door-connected":
            continue
        for storey, spaces in spaces_by_storey.items():
            for i, sp in enumerate(spaces):
                if sp.id == a_id and b_id in rect_by_id:
                    side = _facing_side(sp.rect, rect_by_id[b_id].centroid)
                    door = _centered_opening("door", side, sp.rect, p.min_door_width, 2.0, 0.0)
                    spaces[i] = replace(sp, openings=sp.openings + (door,))

    plans = tuple(
        FloorPlan(storey, tuple(spaces_by_storey[storey]))
        for storey in range(p.storey_count)
    )
    b = Building(
        boundary=p.boundary,
        storey_count=p.storey_count,
        storey_height=p.storey_height,
        plans=plans,
        party_edges=p.neighbor_sides,
    )
    perf, _ = evaluate_with_deviations(b, p)
    return Individual(b, perf, aggregate(perf, weights))


def _geometry_key(b: Building):
    return tuple(
        (
            s.id,
            s.storey,
            round(s.rect.x0, 9),
            round(s.rect.y0, 9),
            round(s.rect.x1, 9),
            round(s.rect.y1, 9),
            tuple(
                (o.kind, o.side, round(o.offset, 9), round(o.width, 9))
                for o in s.openings
            ),
        )
        for s in b.spaces()
    )


def evolve(
    p: DesignProgram,
    cfg: GeneratorConfig,
    weights: Optional[Weights] = None,
    on_generation: Optional[Callable[[int, int, float], None]] = None,
) -> list[Individual]:
    """(1+lambda) elitist evolution; returns improvements best-first.

    Each offspring applies 1..k sampled transforms to the incumbent, using
    a per-offspring RNG substream pre-split from the master stream so
    results do not depend on evaluation order. The incumbent is replaced
    only by a strictly better offspring; after stagnation_restart barren
    generations the search restarts from a fresh seed individual while the
    archive keeps the global best.
    """
    weights = weights or default_weights()
    rng = np.random.default_rng(cfg.seed)
    stats = ActionStats.initial(cfg.weight_floor)

    incumbent = init_individual(p, rng, weights)
    _, devs = evaluate_with_deviations(incumbent.building, p)
    evals = 1
    archive: dict = {_geometry_key(incumbent.building): incumbent}
    best = incumbent
    generation = 0
    stagnant = 0

    while evals < cfg.max_evaluations and incumbent.objective > 0.0:
        generation += 1
        offspring: list[tuple[float, Building, PerformanceVector, list, list[str]]] = []
        substream_seeds = rng.integers(0, 2**63 - 1, size=cfg.lam)
        for k in range(cfg.lam):
            if evals >= cfg.max_evaluations:
                break
            crng = np.random.default_rng(substream_seeds[k])
            building = incumbent.building
            kinds_used: list[str] = []
            n_tr = int(crng.integers(cfg.transforms_min, cfg.transforms_max + 1))
            for _ in range(n_tr):
                kind = propose_action(stats, crng)
                target = select_target(incumbent, devs, cfg.greediness, crng)
                mag = transform_magnitude(building, p, kind, target, crng)
                building, _applied = apply_transform(building, p, kind, target, mag)
                kinds_used.append(kind)
            perf, child_devs = evaluate_with_deviations(building, p)
            evals += 1
            obj = aggregate(perf, weights)
            offspring.append((obj, building, perf, child_devs, kinds_used))

        if not offspring:
            break

        improved_any = False
        best_child = min(offspring, key=lambda o: o[0])
        for obj, _b, _perf, _devs, kinds_used in offspring:
            improved = obj < incumbent.objective
            for kind in kinds_used:
                stats = update_stats(stats, kind, improved, cfg.ema_rate, cfg.weight_floor)

        if best_child[0] < incumbent.objective:
            obj, building, perf, child_devs, _ = best_child
            incumbent = Individual(building, perf, obj)
            devs = child_devs
            archive[_geometry_key(building)] = incumbent
            improved_any = True

        if incumbent.objective < best.objective:
            best = incumbent

        stagnant = 0 if improved_any else stagnant + 1
        if on_generation is not None:
            on_generation(generation, evals, best.objective)

        if stagnant >= cfg.stagnation_restart and evals < cfg.max_evaluations:
            incumbent = init_individual(p, rng, weights)
            _, devs = evaluate_with_deviations(incumbent.building, p)
            evals += 1
            archive[_geometry_key(incumbent.building)] = incumbent
            stagnant = 0

    ordered = sorted(archive.values(), key=lambda ind: ind.objective)
    return ordered
