"""The fifteen performance indicators, their aggregation, and nonconformity
ranking used by the generator's adaptive targeting.

All penalties are non-negative and expressed in natural units (m2 for areas,
m for distances, normalized ratios for relative deviations); weights mix
them into the scalar objective. The evaluation path is called hundreds of
thousands of times per generation run, so it works on flat coordinate
arrays and reports only nonzero deviations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from functools import lru_cache
from typing import Optional

import numpy as np

from . import kernels
from .geometry import compactness, sector_deviation, wall_azimuth
from .model import Building, DesignProgram, Space

INDICATOR_NAMES = (
    # floor plan group
    "floor_areas_limits",
    "floor_circulation",
    "floor_areas_maximization",
    "floor_boundary_usage",
    # space group
    "space_connectivity",
    "space_overlap",
    "space_orientation",
    "space_overflow",
    "space_compactness",
    "space_area_dims",
    "space_position",
    # openings group
    "opening_position",
    "opening_orientation",
    "opening_overlap",
    "opening_width_wfr",
)

# structural penalty for a required space with no instance: dominates any
# positional penalty so repair is always preferred
MISSING_SPACE_BASE = 100.0

# stair stacks of consecutive storeys may drift this much before the
# alignment penalty kicks in
STAIR_ALIGN_DEADBAND = 0.25

_EXPOSED_MIN = 0.01  # wall stretch (m) that counts as exterior exposure


@dataclass(frozen=True)
class PerformanceVector:
    floor_areas_limits: float = 0.0
    floor_circulation: float = 0.0
    floor_areas_maximization: float = 0.0
    floor_boundary_usage: float = 0.0
    space_connectivity: float = 0.0
    space_overlap: float = 0.0
    space_orientation: float = 0.0
    space_overflow: float = 0.0
    space_compactness: float = 0.0
    space_area_dims: float = 0.0
    space_position: float = 0.0
    opening_position: float = 0.0
    opening_orientation: float = 0.0
    opening_overlap: float = 0.0
    opening_width_wfr: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"indicator {f.name} must be finite and >= 0, got {v}")

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in INDICATOR_NAMES}

    @property
    def total(self) -> float:
        return sum(self.as_dict().values())


@dataclass(frozen=True)
class Weights:
    values: dict

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))
        missing = [n for n in INDICATOR_NAMES if n not in self.values]
        if missing:
            raise ValueError(f"weights missing indicators: {missing}")
        unknown = [n for n in self.values if n not in INDICATOR_NAMES]
        if unknown:
            raise ValueError(f"unknown indicator names in weights: {unknown}")
        for n, w in self.values.items():
            if not (math.isfinite(w) and w >= 0.0):
                raise ValueError(f"weight {n} must be finite and >= 0")

    def __getitem__(self, name: str) -> float:
        return self.values[name]


def default_weights() -> Weights:
    """Unit weights, with geometric validity (overlap, overflow) emphasized."""
    w = {name: 1.0 for name in INDICATOR_NAMES}
    w["space_overlap"] = 10.0
    w["space_overflow"] = 10.0
    return Weights(w)


@dataclass(frozen=True, order=True)
class ObjectRef:
    """A space, or one opening of a space, addressed for targeting."""

    space_id: str
    opening_index: Optional[int] = None

    @property
    def key(self) -> str:
        if self.opening_index is None:
            return self.space_id
        return f"{self.space_id}:{self.opening_index}"


@dataclass(frozen=True)
class ObjectDeviation:
    ref: ObjectRef
    deviation: float


def aggregate(vector: PerformanceVector, weights: Weights) -> float:
    """Weighted sum of the fifteen penalties."""
    return sum(weights[name] * getattr(vector, name) for name in INDICATOR_NAMES)


def nonconformity_ranking(devs: list[ObjectDeviation]) -> list[ObjectDeviation]:
    """Descending by deviation; ties broken by object id, lexicographic."""
    return sorted(devs, key=lambda d: (-d.deviation, d.ref.key))


def requirement_id_for_space(space_id: str) -> str:
    """Sliced siblings carry a ~k suffix and share the base requirement."""
    return space_id.split("~", 1)[0]


# ---------------------------------------------------------------------------
# program preprocessing (cached per program)
# ---------------------------------------------------------------------------


class _ProgramIndex:
    __slots__ = (
        "pieces",
        "req_by_id",
        "req_pos",
        "adjacency",
        "preferred_orient",
        "preferred_pos",
        "amin",
        "amax",
        "min_dim",
    )

    def __init__(self, p: DesignProgram):
        self.pieces = np.array(
            [[r.x0, r.y0, r.x1, r.y1] for r in p.boundary.pieces], dtype=np.float64
        )
        self.req_by_id = {r.id: r for r in p.space_reqs}
        self.req_pos = {r.id: i for i, r in enumerate(p.space_reqs)}
        self.amin = np.array([r.area_range[0] for r in p.space_reqs])
        self.amax = np.array([r.area_range[1] for r in p.space_reqs])
        self.min_dim = np.array([r.min_dimension for r in p.space_reqs])
        self.adjacency = tuple(p.adjacency_reqs)
        self.preferred_orient = [r for r in p.space_reqs if r.orientation_pref]
        self.preferred_pos = [r for r in p.space_reqs if r.position_pref]


@lru_cache(maxsize=64)
def _program_index(p: DesignProgram) -> _ProgramIndex:
    return _ProgramIndex(p)


class _BuildingArrays:
    """Flat per-evaluation geometry: one row per space, plan order."""

    __slots__ = ("spaces", "rows", "index", "storey_slices", "req_idx", "instances")

    def __init__(self, b: Building, idx: _ProgramIndex):
        self.spaces = b.spaces()
        n = len(self.spaces)
        rows = np.empty((n, 4))
        for i, s in enumerate(self.spaces):
            r = s.rect
            x0, y0 = r.min_corner.x, r.min_corner.y
            rows[i, 0] = x0
            rows[i, 1] = y0
            rows[i, 2] = x0 + r.width
            rows[i, 3] = y0 + r.height
        self.rows = rows
        self.index = {s.id: i for i, s in enumerate(self.spaces)}
        self.storey_slices = []
        start = 0
        for plan in b.plans:
            count = len(plan.spaces)
            self.storey_slices.append(slice(start, start + count))
            start += count
        self.req_idx = np.array(
            [
                idx.req_pos.get(requirement_id_for_space(s.id), -1)
                for s in self.spaces
            ],
            dtype=np.int64,
        )
        self.instances: dict[str, list[int]] = {}
        for i, s in enumerate(self.spaces):
            self.instances.setdefault(requirement_id_for_space(s.id), []).append(i)


# ---------------------------------------------------------------------------
# evaluators
# ---------------------------------------------------------------------------


def eval_floorplan_penalties(
    b: Building, p: DesignProgram
) -> tuple[float, float, float, float]:
    """(areas_limits, circulation, areas_maximization, boundary_usage).

    Gross area is checked per storey against the gross limit; construction
    area (the per-storey footprint union, summed) against the whole-building
    construction limit. Boundary usage measures a boundary drawn too small
    to host the per-storey construction allowance.
    """
    idx = _program_index(p)
    arrays = _BuildingArrays(b, idx)
    out = _floorplan_from_arrays(arrays, b, p)
    return out


def _floorplan_from_arrays(arrays: _BuildingArrays, b: Building, p: DesignProgram):
    areas_limits = 0.0
    circulation = 0.0
    areas_max = 0.0
    construction = 0.0
    rows = arrays.rows
    areas = (rows[:, 2] - rows[:, 0]) * (rows[:, 3] - rows[:, 1])
    for sl in arrays.storey_slices:
        gross = float(areas[sl].sum())
        areas_limits += max(0.0, gross - p.gross_area_limit)
        areas_max += max(0.0, p.gross_area_limit - gross)
        if sl.stop > sl.start:
            construction += kernels.union_area(rows[sl])
    for i, s in enumerate(arrays.spaces):
        if s.is_circulation:
            circulation += areas[i]
    areas_limits += max(0.0, construction - p.construction_area_limit)
    boundary_usage = max(
        0.0, p.construction_area_limit / p.storey_count - b.boundary.area
    )
    return areas_limits, circulation, areas_max, float(boundary_usage)


def _adjacency_penalty(contact: float, gap: float, required_width: float) -> float:
    if contact >= required_width - 1e-9:
        return 0.0
    if gap > 0.0:
        return gap
    return required_width  # touching, but contact shorter than a door


def _space_pass(b: Building, p: DesignProgram, arrays: _BuildingArrays, dev: dict):
    """Seven space-group penalties accumulated into dev (sparse, by key)."""
    idx = _program_index(p)
    rows = arrays.rows
    spaces = arrays.spaces
    n = len(spaces)

    overlap_total = 0.0
    overflow_total = 0.0
    orientation_total = 0.0
    compact_total = 0.0
    area_dims_total = 0.0
    position_total = 0.0
    connectivity_total = 0.0

    exposures_by_storey = {}
    for storey, sl in enumerate(arrays.storey_slices):
        if sl.stop == sl.start:
            continue
        sub = rows[sl]
        total, per = kernels.pairwise_overlap(sub)
        overlap_total += total
        if total > 0.0:
            for k in np.nonzero(per)[0]:
                i = sl.start + int(k)
                dev[spaces[i].id, None] = dev.get((spaces[i].id, None), 0.0) + float(per[k])
        outside = kernels.outside_areas(sub, idx.pieces)
        s_out = float(outside.sum())
        overflow_total += s_out
        if s_out > 0.0:
            for k in np.nonzero(outside)[0]:
                i = sl.start + int(k)
                dev[spaces[i].id, None] = dev.get((spaces[i].id, None), 0.0) + float(outside[k])

    # compactness and area/dimension terms, vectorized over all spaces
    w = rows[:, 2] - rows[:, 0]
    h = rows[:, 3] - rows[:, 1]
    areas = w * h
    per_compact = np.maximum(0.0, 1.0 - 16.0 * areas / (2.0 * (w + h)) ** 2)
    compact_total = float(per_compact.sum())
    for k in np.nonzero(per_compact > 1e-12)[0]:
        i = int(k)
        dev[spaces[i].id, None] = dev.get((spaces[i].id, None), 0.0) + float(per_compact[i])

    has_req = arrays.req_idx >= 0
    if has_req.any():
        ri = arrays.req_idx[has_req]
        a = areas[has_req]
        amin, amax = idx.amin[ri], idx.amax[ri]
        over = np.maximum(0.0, a - amax) / amax
        under = np.maximum(0.0, amin - a) / amin
        short = np.maximum(0.0, idx.min_dim[ri] - np.minimum(w[has_req], h[has_req]))
        per_area = over + under + short
        area_dims_total += float(per_area.sum())
        src = np.nonzero(has_req)[0]
        for k in np.nonzero(per_area > 1e-12)[0]:
            i = int(src[k])
            dev[spaces[i].id, None] = dev.get((spaces[i].id, None), 0.0) + float(per_area[k])

    # missing required spaces: structural penalty folded into area_dims
    for req in p.space_reqs:
        if req.id not in arrays.instances:
            area_dims_total += MISSING_SPACE_BASE + req.area_range[0]

    # orientation and position preferences (usually few)
    for req in idx.preferred_pos:
        for i in arrays.instances.get(req.id, ()):
            cx = (rows[i, 0] + rows[i, 2]) / 2.0
            cy = (rows[i, 1] + rows[i, 3]) / 2.0
            d = math.hypot(cx - req.position_pref.x, cy - req.position_pref.y)
            if d > 0.0:
                position_total += d
                dev[spaces[i].id, None] = dev.get((spaces[i].id, None), 0.0) + d
    if idx.preferred_orient:
        for storey, sl in enumerate(arrays.storey_slices):
            if sl.stop == sl.start:
                continue
            exposures_by_storey[storey] = kernels.side_exposures(rows[sl])
        for req in idx.preferred_orient:
            center, half = req.orientation_pref
            for i in arrays.instances.get(req.id, ()):
                s = spaces[i]
                exp = exposures_by_storey.get(s.storey)
                sl = arrays.storey_slices[s.storey]
                row = exp[i - sl.start]
                best = 1.0
                for k, side in enumerate(("N", "E", "S", "W")):
                    if row[k] > _EXPOSED_MIN:
                        az = wall_azimuth(side, b.orientation)
                        best = min(best, sector_deviation(az, center, half) / 90.0)
                if best > 0.0:
                    orientation_total += best
                    dev[s.id, None] = dev.get((s.id, None), 0.0) + best

    # required adjacencies: batch all instance pairs through one kernel call
    pair_rows = []
    pair_meta = []  # (adjacency index, i, j)
    for a_idx, (a_id, b_id, _kind) in enumerate(idx.adjacency):
        for i in arrays.instances.get(a_id, ()):
            for j in arrays.instances.get(b_id, ()):
                pair_rows.append((i, j))
                pair_meta.append(a_idx)
    if pair_rows:
        pairs = np.asarray(pair_rows, dtype=np.int64)
        contact, gap = kernels.contact_gap(rows, pairs)
        best: dict[int, tuple[float, int]] = {}
        for k, a_idx in enumerate(pair_meta):
            pen = _adjacency_penalty(float(contact[k]), float(gap[k]), p.min_door_width)
            if a_idx not in best or pen < best[a_idx][0]:
                best[a_idx] = (pen, k)
        for a_idx, (pen, k) in best.items():
            if pen > 0.0:
                connectivity_total += pen
                i, j = pair_rows[k]
                dev[spaces[i].id, None] = dev.get((spaces[i].id, None), 0.0) + pen
                dev[spaces[j].id, None] = dev.get((spaces[j].id, None), 0.0) + pen

    # stair stacks of consecutive storeys must align vertically
    stairs_by_storey: dict[int, list[int]] = {}
    for i, s in enumerate(spaces):
        if s.function == "stair":
            stairs_by_storey.setdefault(s.storey, []).append(i)
    for storey in range(b.storey_count - 1):
        lower = stairs_by_storey.get(storey, [])
        upper = stairs_by_storey.get(storey + 1, [])
        if not lower:
            continue
        for j in upper:
            cxj = (rows[j, 0] + rows[j, 2]) / 2.0
            cyj = (rows[j, 1] + rows[j, 3]) / 2.0
            best_d, best_i = None, None
            for i in lower:
                d = math.hypot(
                    cxj - (rows[i, 0] + rows[i, 2]) / 2.0,
                    cyj - (rows[i, 1] + rows[i, 3]) / 2.0,
                )
                if best_d is None or d < best_d:
                    best_d, best_i = d, i
            pen = max(0.0, best_d - STAIR_ALIGN_DEADBAND)
            if pen > 0.0:
                connectivity_total += pen
                dev[spaces[j].id, None] = dev.get((spaces[j].id, None), 0.0) + pen
                dev[spaces[best_i].id, None] = dev.get((spaces[best_i].id, None), 0.0) + pen

    return (
        connectivity_total,
        overlap_total,
        orientation_total,
        overflow_total,
        compact_total,
        area_dims_total,
        position_total,
    )


def _opening_pass(b: Building, p: DesignProgram, arrays: _BuildingArrays, dev: dict):
    """Four opening-group penalties accumulated into dev."""
    idx = _program_index(p)
    position_total = 0.0
    orientation_total = 0.0
    overlap_total = 0.0
    width_wfr_total = 0.0

    min_door = p.min_door_width
    min_window = p.min_window_width
    wfr_min = p.window_to_floor_ratio_min

    for s in arrays.spaces:
        req = idx.req_by_id.get(requirement_id_for_space(s.id))
        ops = s.openings
        if not ops:
            if req is not None and req.window_required:
                width_wfr_total += wfr_min
                dev[s.id, None] = dev.get((s.id, None), 0.0) + wfr_min
            continue

        win_area = 0.0
        windows = []
        by_wall: dict[str, list[tuple[int, float, float]]] = {}
        for i, op in enumerate(ops):
            if op.kind == "window":
                win_area += op.width * op.height
                windows.append((i, op))
                short = min_window - op.width
            else:
                short = min_door - op.width
            if short > 0.0:
                width_wfr_total += short
                dev[s.id, i] = dev.get((s.id, i), 0.0) + short
            if len(ops) > 1:
                by_wall.setdefault(op.side, []).append((i, op.offset, op.offset + op.width))

        for spans in by_wall.values():
            if len(spans) < 2:
                continue
            for ai in range(len(spans)):
                for bi in range(ai + 1, len(spans)):
                    ia, a0, a1 = spans[ai]
                    ib, b0, b1 = spans[bi]
                    ov = min(a1, b1) - max(a0, b0)
                    if ov > 0.0:
                        overlap_total += ov
                        dev[s.id, ia] = dev.get((s.id, ia), 0.0) + ov
                        dev[s.id, ib] = dev.get((s.id, ib), 0.0) + ov

        if req is None:
            continue
        if req.window_required:
            deficit = wfr_min - win_area / s.rect.area
            if deficit > 0.0:
                width_wfr_total += deficit
                if windows:
                    share = deficit / len(windows)
                    for i, _ in windows:
                        dev[s.id, i] = dev.get((s.id, i), 0.0) + share
                else:
                    dev[s.id, None] = dev.get((s.id, None), 0.0) + deficit
        if req.window_orientation_pref is not None and windows:
            center, half = req.window_orientation_pref
            for i, op in windows:
                az = wall_azimuth(op.side, b.orientation)
                d = min(1.0, sector_deviation(az, center, half) / 90.0)
                if d > 0.0:
                    orientation_total += d
                    dev[s.id, i] = dev.get((s.id, i), 0.0) + d
        if req.window_position_pref is not None and windows:
            pref = req.window_position_pref
            for i, op in windows:
                c = s.opening_center(op)
                d = math.hypot(c.x - pref.x, c.y - pref.y)
                if d > 0.0:
                    position_total += d
                    dev[s.id, i] = dev.get((s.id, i), 0.0) + d

    return position_total, orientation_total, overlap_total, width_wfr_total


def eval_space_penalties(b: Building, p: DesignProgram):
    """Seven space penalties plus the per-space deviation list."""
    arrays = _BuildingArrays(b, _program_index(p))
    dev: dict = {}
    penalties = _space_pass(b, p, arrays, dev)
    devs = [ObjectDeviation(ObjectRef(sid, oi), d) for (sid, oi), d in dev.items()]
    return penalties, devs


def eval_opening_penalties(b: Building, p: DesignProgram):
    """Four opening penalties plus the per-opening deviation list."""
    arrays = _BuildingArrays(b, _program_index(p))
    dev: dict = {}
    penalties = _opening_pass(b, p, arrays, dev)
    devs = [ObjectDeviation(ObjectRef(sid, oi), d) for (sid, oi), d in dev.items()]
    return penalties, devs


def evaluate_with_deviations(
    b: Building, p: DesignProgram
) -> tuple[PerformanceVector, list[ObjectDeviation]]:
    """Full assessment plus the ranked nonzero deviations.

    Conforming objects are omitted from the deviation list; consumers
    needing the full object universe (uniform fallbacks) enumerate the
    building directly.
    """
    idx = _program_index(p)
    arrays = _BuildingArrays(b, idx)
    dev: dict = {}
    fp = _floorplan_from_arrays(arrays, b, p)
    sp = _space_pass(b, p, arrays, dev)
    op = _opening_pass(b, p, arrays, dev)
    vector = PerformanceVector(
        floor_areas_limits=fp[0],
        floor_circulation=fp[1],
        floor_areas_maximization=fp[2],
        floor_boundary_usage=fp[3],
        space_connectivity=sp[0],
        space_overlap=sp[1],
        space_orientation=sp[2],
        space_overflow=sp[3],
        space_compactness=sp[4],
        space_area_dims=sp[5],
        space_position=sp[6],
        opening_position=op[0],
        opening_orientation=op[1],
        opening_overlap=op[2],
        opening_width_wfr=op[3],
    )
    devs = [ObjectDeviation(ObjectRef(sid, oi), d) for (sid, oi), d in dev.items()]
    return vector, nonconformity_ranking(devs)


def evaluate(b: Building, p: DesignProgram) -> PerformanceVector:
    """Full fifteen-indicator assessment of one candidate building."""
    vector, _ = evaluate_with_deviations(b, p)
    return vector
