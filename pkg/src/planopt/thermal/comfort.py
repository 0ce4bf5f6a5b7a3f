"""Comfort band models and the degree-hours discomfort objective.

Adaptive band centers follow the running mean outdoor temperature per the
EN 15251 and ASHRAE 55 adaptive relations; a fixed band is available for
non-adaptive assessment. Discomfort is integrated over occupied hours only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .weather import WeatherYear, running_mean_series

EN15251_HALF_WIDTH = {"I": 2.0, "II": 3.0, "III": 4.0}
ASHRAE55_HALF_WIDTH = {90: 2.5, 80: 3.5}


@dataclass(frozen=True)
class ComfortModel:
    kind: str  # "fixed" | "en15251" | "ashrae55"
    lower: Optional[float] = None
    upper: Optional[float] = None
    category: Optional[str] = None
    band: Optional[int] = None

    def __post_init__(self):
        if self.kind == "fixed":
            if self.lower is None or self.upper is None or self.lower >= self.upper:
                raise ValueError("fixed comfort model needs lower < upper")
        elif self.kind == "en15251":
            if self.category not in EN15251_HALF_WIDTH:
                raise ValueError("en15251 category must be I, II or III")
        elif self.kind == "ashrae55":
            if self.band not in ASHRAE55_HALF_WIDTH:
                raise ValueError("ashrae55 band must be 80 or 90")
        else:
            raise ValueError(f"unknown comfort model kind {self.kind!r}")

    @staticmethod
    def fixed(lower: float, upper: float) -> "ComfortModel":
        return ComfortModel("fixed", lower=lower, upper=upper)

    @staticmethod
    def en15251(category: str = "II") -> "ComfortModel":
        return ComfortModel("en15251", category=category)

    @staticmethod
    def ashrae55(band: int = 80) -> "ComfortModel":
        return ComfortModel("ashrae55", band=band)


def comfort_band(model: ComfortModel, trm: float) -> tuple[float, float]:
    """(lower, upper) comfort limits in degC for one running-mean value."""
    if model.kind == "fixed":
        return model.lower, model.upper
    if model.kind == "en15251":
        center = 0.33 * min(30.0, max(10.0, trm)) + 18.8
        half = EN15251_HALF_WIDTH[model.category]
    else:
        center = 0.31 * min(33.5, max(10.0, trm)) + 17.8
        half = ASHRAE55_HALF_WIDTH[model.band]
    return center - half, center + half


def comfort_band_series(model: ComfortModel, w: WeatherYear) -> np.ndarray:
    """Per-day (365, 2) array of lower/upper comfort limits."""
    out = np.empty((365, 2))
    if model.kind == "fixed":
        out[:, 0] = model.lower
        out[:, 1] = model.upper
        return out
    trm = running_mean_series(w)
    for d in range(365):
        out[d] = comfort_band(model, trm[d])
    return out


@dataclass(frozen=True)
class DiscomfortResult:
    """Heating/cooling degree-hours (K*h) per space and in total."""

    per_space: dict  # space id -> (heating_dh, cooling_dh)

    def __post_init__(self):
        object.__setattr__(
            self,
            "per_space",
            {k: (float(h), float(c)) for k, (h, c) in self.per_space.items()},
        )
        for sid, (h, c) in self.per_space.items():
            if h < 0 or c < 0:
                raise ValueError(f"negative degree-hours for {sid}")

    @property
    def total_heating(self) -> float:
        return sum(h for h, _ in self.per_space.values())

    @property
    def total_cooling(self) -> float:
        return sum(c for _, c in self.per_space.values())


def degree_hours(result, model: ComfortModel, w: WeatherYear) -> DiscomfortResult:
    """Integrate band excursions over each space's occupied hours.

    Each hour uses the comfort band of its day; heating degree-hours
    accumulate below the lower limit, cooling above the upper.
    """
    bands = comfort_band_series(model, w)
    lower = np.repeat(bands[:, 0], 24)
    upper = np.repeat(bands[:, 1], 24)
    per = {}
    for i, sid in enumerate(result.space_ids):
        t = result.op_temp[i]
        occ = result.occupied[i]
        heating = float(np.sum(np.maximum(0.0, lower - t) * occ))
        cooling = float(np.sum(np.maximum(0.0, t - upper) * occ))
        per[sid] = (heating, cooling)
    return DiscomfortResult(per)


def discomfort_objective(
    d: DiscomfortResult, w_heat: float = 1.0, w_cool: float = 1.0
) -> float:
    """Weighted total of heating and cooling degree-hours across spaces."""
    if w_heat < 0 or w_cool < 0:
        raise ValueError("discomfort weights must be >= 0")
    return w_heat * d.total_heating + w_cool * d.total_cooling
