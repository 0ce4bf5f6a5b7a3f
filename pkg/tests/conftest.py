import sys
from pathlib import Path

import pytest

# make sibling test helper modules importable from any working directory
sys.path.insert(0, str(Path(__file__).parent))

from planopt.geometry import boundary_rect
from planopt.model import DesignProgram, SpaceRequirement


def make_toy1_program() -> DesignProgram:
    """One 4x4 space with a window requirement inside a 10x10 boundary.

    Limits are pinned to the single space's exact area, so the seed
    individual already satisfies every indicator and the objective is 0.
    """
    return DesignProgram(
        boundary=boundary_rect(0, 0, 10, 10),
        storey_count=1,
        storey_height=2.8,
        gross_area_limit=16.0,
        construction_area_limit=16.0,
        space_reqs=(
            SpaceRequirement(
                "room", "living", 0, (16.0, 16.0), 2.0, window_required=True
            ),
        ),
        min_door_width=0.8,
        min_window_width=1.4,
        window_to_floor_ratio_min=0.1,
    )


def make_toy3_program() -> DesignProgram:
    """Three connected spaces in a 12x12 boundary; a small real search task."""
    return DesignProgram(
        boundary=boundary_rect(0, 0, 12, 12),
        storey_count=1,
        storey_height=2.8,
        gross_area_limit=40.0,
        construction_area_limit=40.0,
        space_reqs=(
            SpaceRequirement("living", "living", 0, (12.0, 20.0), 2.5, window_required=True),
            SpaceRequirement("bed", "bedroom", 0, (9.0, 16.0), 2.5),
            SpaceRequirement("kitchen", "kitchen", 0, (6.0, 12.0), 2.0),
        ),
        adjacency_reqs=(
            ("living", "bed", "door-connected"),
            ("living", "kitchen", "door-connected"),
        ),
        min_door_width=0.8,
        min_window_width=1.0,
        window_to_floor_ratio_min=0.08,
    )


@pytest.fixture
def toy1_program():
    return make_toy1_program()


@pytest.fixture
def toy3_program():
    return make_toy3_program()
