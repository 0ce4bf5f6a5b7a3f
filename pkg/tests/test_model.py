import pytest

from planopt.geometry import Point2, boundary_rect, rect
from planopt.model import (
    Assembly,
    Building,
    ConstructionSet,
    DesignProgram,
    FloorPlan,
    ModelError,
    Opening,
    Space,
    SpaceRequirement,
    default_construction_set,
    validate_program,
)


def one_space_program(**overrides):
    kwargs = dict(
        boundary=boundary_rect(0, 0, 10, 10),
        storey_count=1,
        storey_height=2.8,
        gross_area_limit=100.0,
        construction_area_limit=100.0,
        space_reqs=(SpaceRequirement("a", "living", 0, (10.0, 20.0), 2.0),),
    )
    kwargs.update(overrides)
    return DesignProgram(**kwargs)


class TestOpening:
    def test_door_sill_must_be_zero(self):
        with pytest.raises(ModelError):
            Opening("door", "N", 0.0, 0.9, 2.0, sill=0.5)

    def test_negative_fin_rejected(self):
        with pytest.raises(ModelError):
            Opening("window", "S", 0.0, 1.0, 1.2, fin_depth_left=-0.1)

    def test_opening_must_fit_wall(self):
        win = Opening("window", "S", 3.5, 1.0, 1.2)
        with pytest.raises(ModelError):
            Space("a", "living", 0, rect(0, 0, 4, 4), (win,))

    def test_opening_center(self):
        s = Space(
            "a", "living", 0, rect(2, 3, 4, 4), (Opening("window", "E", 1.0, 2.0, 1.2),)
        )
        c = s.opening_center(s.openings[0])
        assert (c.x, c.y) == (6.0, 5.0)


class TestBuilding:
    def test_plan_count_must_match(self):
        with pytest.raises(ModelError):
            Building(
                boundary=boundary_rect(0, 0, 10, 10),
                storey_count=2,
                storey_height=2.8,
                plans=(FloorPlan(0, ()),),
            )

    def test_duplicate_ids_rejected(self):
        s = Space("a", "living", 0, rect(0, 0, 4, 4))
        with pytest.raises(ModelError):
            Building(
                boundary=boundary_rect(0, 0, 10, 10),
                storey_count=1,
                storey_height=2.8,
                plans=(FloorPlan(0, (s, s)),),
            )

    def test_replace_space(self):
        s = Space("a", "living", 0, rect(0, 0, 4, 4))
        b = Building(
            boundary=boundary_rect(0, 0, 10, 10),
            storey_count=1,
            storey_height=2.8,
            plans=(FloorPlan(0, (s,)),),
        )
        from dataclasses import replace

        b2 = b.replace_space("a", replace(s, rect=rect(1, 1, 4, 4)))
        assert b2.space("a").rect.x0 == 1.0
        assert b.space("a").rect.x0 == 0.0  # original untouched


class TestAssembly:
    def test_opaque_needs_layers(self):
        with pytest.raises(ModelError):
            Assembly()

    def test_glazing_shgc_range(self):
        with pytest.raises(ModelError):
            Assembly.glazing(2.8, 1.2)

    def test_construction_set_requires_all_kinds(self):
        cs = default_construction_set()
        broken = dict(cs.elements)
        del broken["ceiling"]
        with pytest.raises(ModelError):
            ConstructionSet(broken)


class TestValidateProgram:
    def test_clean_program(self):
        assert validate_program(one_space_program()) == []

    def test_unknown_adjacency_id(self):
        p = one_space_program(adjacency_reqs=(("a", "ghost", "adjacent"),))
        issues = validate_program(p)
        assert len(issues) == 1
        assert "ghost" in issues[0]

    def test_capacity_issue(self):
        p = one_space_program(
            gross_area_limit=100.0,
            space_reqs=(
                SpaceRequirement("a", "living", 0, (60.0, 80.0), 2.0),
                SpaceRequirement("b", "bedroom", 0, (60.0, 80.0), 2.0),
            ),
        )
        issues = validate_program(p)
        assert any("gross area limit" in i for i in issues)

    def test_duplicate_req_ids(self):
        p = one_space_program(
            space_reqs=(
                SpaceRequirement("a", "living", 0, (10.0, 20.0), 2.0),
                SpaceRequirement("a", "bedroom", 0, (10.0, 20.0), 2.0),
            )
        )
        assert any("duplicate" in i for i in validate_program(p))

    def test_storey_out_of_range(self):
        p = one_space_program(
            space_reqs=(SpaceRequirement("a", "living", 3, (10.0, 20.0), 2.0),)
        )
        assert any("storey" in i for i in validate_program(p))
