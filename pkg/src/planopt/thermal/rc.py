"""Hourly single-node-per-space zone model with implicit inter-space coupling.

Each space is one thermal node. Backward-Euler updates solve all nodes
simultaneously every hour (see kernels.simulate_hours); the first week is
simulated twice and the warm-up pass discarded. The node temperature is
reported as the operative temperature.

Network construction rules:
  - wall stretches in contact with a same-storey space couple the two nodes
    through the interior wall assembly;
  - stretches lying on a party edge of the boundary are adiabatic mass;
  - everything else on a space's perimeter is exterior envelope;
  - storeys couple through the lower space's ceiling assembly over the
    plan-projected overlap; ground and roof are adiabatic;
  - natural ventilation adds vent_ach air changes when the space is
    occupied, warmer than outside, and above 24 degC (switched on the
    previous hour's temperature to keep each hourly system linear).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..geometry import overlap_area, wall_azimuth
from ..model import Assembly, Building, ConstructionSet, Space
from .solar import sun_series, window_gain_series
from .weather import WeatherYear

AIR_RHO_CP = 1.2 * 1005.0  # J/(m3 K)
VENT_T_MIN = 24.0
_COORD_TOL = 1e-6

# standard surface film resistances applied to every assembly
R_SURFACE = 0.13 + 0.04


class ThermalModelError(ValueError):
    pass


def assembly_u_value(a: Assembly) -> float:
    """Overall heat transfer coefficient, W/(m2 K)."""
    if a.is_glazing:
        return a.u_value
    return 1.0 / (R_SURFACE + sum(t / k for t, k, _, _ in a.layers))


def assembly_capacity(a: Assembly) -> float:
    """Areal heat capacity of the layers, J/(m2 K); glazing counts as zero."""
    if a.is_glazing:
        return 0.0
    return sum(t * rho * cp for t, _, rho, cp in a.layers)


@dataclass(frozen=True)
class Schedule:
    """Weekly hourly fractions, Monday 00:00 first; the year starts Monday."""

    fractions: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "fractions", tuple(float(f) for f in self.fractions))
        if len(self.fractions) != 168:
            raise ValueError("schedule needs exactly 168 hourly fractions")
        if any(not (0.0 <= f <= 1.0) for f in self.fractions):
            raise ValueError("schedule fractions must lie in [0, 1]")

    @staticmethod
    def constant(value: float = 1.0) -> "Schedule":
        return Schedule((value,) * 168)

    def hourly_year(self) -> np.ndarray:
        week = np.asarray(self.fractions)
        reps = int(np.ceil(8760 / 168))
        return np.tile(week, reps)[:8760]


@dataclass(frozen=True)
class ZoneUse:
    occupants: float = 0.0
    activity_gain: float = 90.0  # W per person
    equipment: float = 0.0  # W/m2
    lighting: float = 0.0  # W/m2
    occupancy: Schedule = field(default_factory=Schedule.constant)
    equipment_schedule: Schedule = field(default_factory=Schedule.constant)
    lighting_schedule: Schedule = field(default_factory=Schedule.constant)
    infiltration_ach: float = 0.6
    vent_ach: float = 2.0

    def __post_init__(self):
        for name in ("occupants", "activity_gain", "equipment", "lighting", "infiltration_ach", "vent_ach"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def default_zone_use() -> ZoneUse:
    """Lived-in residential defaults: always occupied, modest gains."""
    return ZoneUse(occupants=1.0, equipment=3.0, lighting=2.0)


@dataclass(frozen=True)
class SimResult:
    space_ids: tuple[str, ...]
    op_temp: np.ndarray  # (n, 8760) degC
    occupied: np.ndarray  # (n, 8760) bool

    def __post_init__(self):
        if self.op_temp.shape != (len(self.space_ids), 8760):
            raise ValueError("op_temp must be (n_spaces, 8760)")
        if self.occupied.shape != self.op_temp.shape:
            raise ValueError("occupied mask must match op_temp")

    def series(self, space_id: str) -> np.ndarray:
        return self.op_temp[self.space_ids.index(space_id)]


@dataclass
class ZoneNetwork:
    space_ids: tuple[str, ...]
    ua_ext: np.ndarray  # (n,) envelope conductance incl. glazing, W/K
    k_int: np.ndarray  # (n, n) inter-space conductances, W/K
    cap: np.ndarray  # (n,) J/K
    volume: np.ndarray  # (n,) m3
    windows: list  # (space index, Opening, wall azimuth, shgc)


def _effective_set(b: Building, s: Space) -> ConstructionSet:
    if not s.construction_overrides:
        return b.constructions
    merged = dict(b.constructions.elements)
    merged.update(s.construction_overrides)
    return ConstructionSet(merged)


def _subtract(intervals, cuts):
    """Remove cut intervals from a list of (a, b) intervals."""
    out = list(intervals)
    for c0, c1 in cuts:
        nxt = []
        for a, b in out:
            lo, hi = max(a, c0), min(b, c1)
            if hi <= lo + _COORD_TOL:
                nxt.append((a, b))
                continue
            if lo > a + _COORD_TOL:
                nxt.append((a, lo))
            if b > hi + _COORD_TOL:
                nxt.append((hi, b))
        out = nxt
    return out


def _side_geometry(s: Space, side: str):
    """(axis coordinate, along-interval, is_vertical) of one wall."""
    r = s.rect
    if side == "N":
        return r.y1, (r.x0, r.x1), False
    if side == "S":
        return r.y0, (r.x0, r.x1), False
    if side == "E":
        return r.x1, (r.y0, r.y1), True
    return r.x0, (r.y0, r.y1), True


def zone_network(b: Building, uses: dict | None = None) -> ZoneNetwork:
    """Assemble conductances, capacities and window table for a building."""
    spaces = b.spaces()
    n = len(spaces)
    index = {s.id: i for i, s in enumerate(spaces)}
    ua_ext = np.zeros(n)
    k_int = np.zeros((n, n))
    cap = np.zeros(n)
    volume = np.zeros(n)
    windows = []

    party_vert = []  # (x, y0, y1)
    party_horz = []  # (y, x0, x1)
    edges = b.boundary.edges()
    for e in b.party_edges:
        a, c = edges[e]
        if a.x == c.x:
            party_vert.append((a.x, min(a.y, c.y), max(a.y, c.y)))
        else:
            party_horz.append((a.y, min(a.x, c.x), max(a.x, c.x)))

    h = b.storey_height
    for plan in b.plans:
        for s in plan.spaces:
            i = index[s.id]
            cs = _effective_set(b, s)
            u_ext = assembly_u_value(cs["exterior_wall"])
            c_ext = assembly_capacity(cs["exterior_wall"])
            c_int = assembly_capacity(cs["interior_wall"])
            volume[i] = s.rect.area * h
            cap[i] = AIR_RHO_CP * volume[i]

            for side in ("N", "E", "S", "W"):
                coord, span, vertical = _side_geometry(s, side)
                contacts = []
                for other in plan.spaces:
                    if other.id == s.id:
                        continue
                    oc, ospan, overt = None, None, None
                    r = other.rect
                    if vertical:
                        facing = r.x0 if side == "E" else r.x1
                        if abs(facing - coord) <= _COORD_TOL:
                            lo, hi = max(span[0], r.y0), min(span[1], r.y1)
                            if hi > lo + _COORD_TOL:
                                contacts.append((lo, hi))
                    else:
                        facing = r.y0 if side == "N" else r.y1
                        if abs(facing - coord) <= _COORD_TOL:
                            lo, hi = max(span[0], r.x0), min(span[1], r.x1)
                            if hi > lo + _COORD_TOL:
                                contacts.append((lo, hi))
                contact_len = sum(hi - lo for lo, hi in contacts)
                remaining = _subtract([span], contacts)

                party_cuts = []
                party_edges_here = party_vert if vertical else party_horz
                for pcoord, plo, phi in party_edges_here:
                    if abs(pcoord - coord) <= _COORD_TOL:
                        for a0, a1 in remaining:
                            lo, hi = max(a0, plo), min(a1, phi)
                            if hi > lo + _COORD_TOL:
                                party_cuts.append((lo, hi))
                party_len = sum(hi - lo for lo, hi in party_cuts)
                exposed = _subtract(remaining, party_cuts)
                exposed_len = sum(hi - lo for lo, hi in exposed)

                cap[i] += contact_len * h * 0.5 * c_int
                cap[i] += party_len * h * c_ext

                opening_area = 0.0
                if exposed_len > _COORD_TOL:
                    for op in s.openings:
                        if op.side != side:
                            continue
                        opening_area += op.area
                        if op.kind == "window":
                            glz = cs["window"]
                            ua_ext[i] += op.area * assembly_u_value(glz)
                            windows.append(
                                (i, op, wall_azimuth(side, b.orientation), glz.shgc)
                            )
                        else:
                            ua_ext[i] += op.area * assembly_u_value(cs["door"])
                opaque = max(0.0, exposed_len * h - opening_area)
                ua_ext[i] += opaque * u_ext
                cap[i] += opaque * c_ext

            c_ceil = assembly_capacity(cs["ceiling"])
            c_pav = assembly_capacity(cs["pavement"])
            has_above = s.storey + 1 < b.storey_count
            has_below = s.storey > 0
            cap[i] += s.rect.area * c_ceil * (0.5 if has_above else 1.0)
            cap[i] += s.rect.area * c_pav * (0.5 if has_below else 1.0)

    # same-storey couplings through interior walls
    for plan in b.plans:
        ss = plan.spaces
        for ai in range(len(ss)):
            for bi in range(ai + 1, len(ss)):
                sa, sb = ss[ai], ss[bi]
                from ..geometry import shared_edge_length

                contact = shared_edge_length(sa.rect, sb.rect)
                if contact > _COORD_TOL:
                    ua = 2.0 / (
                        1.0 / assembly_u_value(_effective_set(b, sa)["interior_wall"])
                        + 1.0 / assembly_u_value(_effective_set(b, sb)["interior_wall"])
                    )
                    k = contact * h * ua
                    i, j = index[sa.id], index[sb.id]
                    k_int[i, j] += k
                    k_int[j, i] += k

    # storey-to-storey couplings through the lower ceiling
    for lower, upper in zip(b.plans, b.plans[1:]):
        for sa in lower.spaces:
            u_slab = assembly_u_value(_effective_set(b, sa)["ceiling"])
            for sb in upper.spaces:
                a = overlap_area(sa.rect, sb.rect)
                if a > _COORD_TOL:
                    i, j = index[sa.id], index[sb.id]
                    k_int[i, j] += a * u_slab
                    k_int[j, i] += a * u_slab

    return ZoneNetwork(
        tuple(s.id for s in spaces), ua_ext, k_int, cap, volume, windows
    )


def simulate(
    b: Building,
    uses: dict | None = None,
    weather: WeatherYear | None = None,
) -> SimResult:
    """Hourly operative temperatures for every space over the weather year."""
    if weather is None:
        raise ThermalModelError("a weather year is required")
    uses = uses or {}
    net = zone_network(b, uses)
    n = len(net.space_ids)
    if n == 0:
        raise ThermalModelError("building has no spaces")

    for i, sid in enumerate(net.space_ids):
        if net.ua_ext[i] <= _COORD_TOL and net.k_int[i].sum() <= _COORD_TOL:
            raise ThermalModelError(
                f"space {sid!r} is an isolated node: no exterior or interior coupling area"
            )

    spaces = b.spaces()
    q = np.zeros((n, 8760))
    occupied = np.zeros((n, 8760), dtype=bool)
    h_inf = np.zeros(n)
    h_vent = np.zeros(n)

    alt, az = _cached_sun(weather)
    for i, op, wall_az, shgc in net.windows:
        q[i] += window_gain_series(op, wall_az, shgc, alt, az, weather.dni, weather.dhi)

    for i, s in enumerate(spaces):
        use = uses.get(s.id, default_zone_use())
        occ = use.occupancy.hourly_year()
        q[i] += use.occupants * use.activity_gain * occ
        q[i] += s.rect.area * use.equipment * use.equipment_schedule.hourly_year()
        q[i] += s.rect.area * use.lighting * use.lighting_schedule.hourly_year()
        occupied[i] = occ > 0.0
        h_inf[i] = AIR_RHO_CP * net.volume[i] * use.infiltration_ach / 3600.0
        h_vent[i] = AIR_RHO_CP * net.volume[i] * use.vent_ach / 3600.0

    # warm-up: run the first week twice, discard the duplicate
    warm = 168
    t_out = np.concatenate([weather.dry_bulb[:warm], weather.dry_bulb])
    q_full = np.concatenate([q[:, :warm], q], axis=1)
    vent_full = np.concatenate([occupied[:, :warm], occupied], axis=1).astype(np.uint8)
    t0 = np.full(n, weather.dry_bulb[0])

    temps = kernels.simulate_hours(
        net.cap,
        net.ua_ext,
        net.k_int,
        h_inf,
        h_vent,
        vent_full,
        q_full,
        t_out,
        t0,
        3600.0,
        VENT_T_MIN,
    )
    return SimResult(net.space_ids, temps[:, warm:], occupied)


def _cached_sun(weather: WeatherYear):
    if weather._sun_cache is None:
        weather._sun_cache = sun_series(weather.location)
    return weather._sun_cache
