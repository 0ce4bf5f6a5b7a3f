from .weather import WeatherYear, WeatherError, parse_epw, to_epw, make_synthetic_weather, running_mean, running_mean_series
from .solar import sun_position, incident_irradiance, shading_fraction
from .comfort import (
    ComfortModel,
    DiscomfortResult,
    comfort_band,
    comfort_band_series,
    degree_hours,
    discomfort_objective,
)
from .rc import (
    Schedule,
    SimResult,
    ThermalModelError,
    ZoneUse,
    assembly_u_value,
    default_zone_use,
    simulate,
)

__all__ = [
    "WeatherYear",
    "WeatherError",
    "parse_epw",
    "to_epw",
    "make_synthetic_weather",
    "running_mean",
    "running_mean_series",
    "sun_position",
    "incident_irradiance",
    "shading_fraction",
    "ComfortModel",
    "DiscomfortResult",
    "comfort_band",
    "comfort_band_series",
    "degree_hours",
    "discomfort_objective",
    "Schedule",
    "SimResult",
    "ThermalModelError",
    "ZoneUse",
    "assembly_u_value",
    "default_zone_use",
    "simulate",
]
