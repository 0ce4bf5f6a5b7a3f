"""Four-storey scenario program: two apartments per storey (a two-bedroom
and a three-bedroom) served by a single stair, used by the acceptance suite."""

from planopt.geometry import boundary_rect
from planopt.model import DesignProgram, SpaceRequirement


def _apartment(prefix: str, storey: int, bedrooms: int) -> list[SpaceRequirement]:
    reqs = [
        SpaceRequirement(f"{prefix}_living{storey}", "living", storey, (14.0, 26.0), 2.8, window_required=True),
        SpaceRequirement(f"{prefix}_kitchen{storey}", "kitchen", storey, (7.0, 14.0), 1.8),
        SpaceRequirement(f"{prefix}_bath{storey}", "bathroom", storey, (4.0, 8.0), 1.6),
    ]
    for i in range(1, bedrooms + 1):
        reqs.append(
            SpaceRequirement(
                f"{prefix}_bed{i}_{storey}", "bedroom", storey, (9.0, 16.0), 2.4, window_required=True
            )
        )
    return reqs


def _apartment_adjacencies(prefix: str, storey: int, bedrooms: int):
    living = f"{prefix}_living{storey}"
    pairs = [
        (living, f"{prefix}_kitchen{storey}", "door-connected"),
        (living, f"{prefix}_bath{storey}", "door-connected"),
    ]
    for i in range(1, bedrooms + 1):
        pairs.append((living, f"{prefix}_bed{i}_{storey}", "door-connected"))
    return pairs


def make_fig1_program(storeys: int = 4) -> DesignProgram:
    reqs: list[SpaceRequirement] = []
    adjacencies = []
    for storey in range(storeys):
        reqs += _apartment("a", storey, 2)
        reqs += _apartment("b", storey, 3)
        reqs.append(
            SpaceRequirement(f"stair{storey}", "stair", storey, (6.0, 14.0), 2.0)
        )
        adjacencies += _apartment_adjacencies("a", storey, 2)
        adjacencies += _apartment_adjacencies("b", storey, 3)
        adjacencies.append((f"stair{storey}", f"a_living{storey}", "door-connected"))
        adjacencies.append((f"stair{storey}", f"b_living{storey}", "door-connected"))
    # gross limit pinned to the per-storey minimum areas: no growth pressure,
    # the search is a pure packing and adjacency problem at minimum sizes
    per_storey_min = sum(r.area_range[0] for r in reqs if r.storey == 0)
    return DesignProgram(
        boundary=boundary_rect(0.0, 0.0, 20.0, 10.0),
        storey_count=storeys,
        storey_height=2.8,
        gross_area_limit=per_storey_min,
        construction_area_limit=per_storey_min * storeys,
        space_reqs=tuple(reqs),
        adjacency_reqs=tuple(adjacencies),
        neighbor_sides=(1, 3),  # east and west edges flank adjacent buildings
        min_door_width=0.8,
        min_window_width=1.0,
        window_to_floor_ratio_min=0.05,
    )


def fig1_acceptance_report(building, program) -> dict:
    """Check the scenario's acceptance conditions on a generated solution."""
    from planopt.geometry import overlap_area, outside_area, shared_edge_length
    from planopt.indicators import requirement_id_for_space

    spaces = building.spaces()
    by_req: dict[str, list] = {}
    for s in spaces:
        by_req.setdefault(requirement_id_for_space(s.id), []).append(s)

    overlap = 0.0
    for plan in building.plans:
        ss = plan.spaces
        for i in range(len(ss)):
            for j in range(i + 1, len(ss)):
                overlap += overlap_area(ss[i].rect, ss[j].rect)
    overflow = sum(outside_area(s.rect, program.boundary) for s in spaces)

    unmet = []
    for a_id, b_id, _ in program.adjacency_reqs:
        ok = False
        for sa in by_req.get(a_id, []):
            for sb in by_req.get(b_id, []):
                if shared_edge_length(sa.rect, sb.rect) >= program.min_door_width - 1e-9:
                    ok = True
        if not ok:
            unmet.append((a_id, b_id))

    out_of_range = []
    for req in program.space_reqs:
        for s in by_req.get(req.id, []):
            amin, amax = req.area_range
            if not (amin - 1e-9 <= s.rect.area <= amax + 1e-9):
                out_of_range.append((s.id, s.rect.area, req.area_range))
        if not by_req.get(req.id):
            out_of_range.append((req.id, None, req.area_range))

    stair_gaps = []
    for lower, upper in zip(building.plans, building.plans[1:]):
        lo = [s for s in lower.spaces if s.function == "stair"]
        up = [s for s in upper.spaces if s.function == "stair"]
        if lo and up:
            stair_gaps.append(
                min(
                    a.rect.centroid.distance_to(b.rect.centroid)
                    for a in lo
                    for b in up
                )
            )
        else:
            stair_gaps.append(float("inf"))

    return {
        "overlap": overlap,
        "overflow": overflow,
        "unmet_adjacencies": unmet,
        "out_of_range": out_of_range,
        "stair_gaps": stair_gaps,
    }
