"""EPW weather ingestion and the daily running-mean outdoor temperature.

Only dry-bulb temperature, direct normal and diffuse horizontal irradiance
are consumed; all other EPW fields are carried through parsing untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..model import Location

HOURS_PER_YEAR = 8760

# EPW missing-data codes; records carrying them are rejected, not imputed
_MISSING_DRY_BULB = 99.9
_MISSING_RADIATION = 9999.0


class WeatherError(ValueError):
    """EPW ingestion failure, tagged with the offending line."""


@dataclass(eq=False)
class WeatherYear:
    location: Location
    dry_bulb: np.ndarray  # (8760,) degC
    dni: np.ndarray  # (8760,) W/m2 direct normal
    dhi: np.ndarray  # (8760,) W/m2 diffuse horizontal
    _sun_cache: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("dry_bulb", "dni", "dhi"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (HOURS_PER_YEAR,):
                raise WeatherError(f"{name} must have exactly {HOURS_PER_YEAR} values")
            setattr(self, name, arr)
        if (self.dni < 0).any() or (self.dhi < 0).any():
            raise WeatherError("irradiance values must be >= 0")

    def daily_means(self) -> np.ndarray:
        return self.dry_bulb.reshape(365, 24).mean(axis=1)


def parse_epw(text: str) -> WeatherYear:
    """Parse an EPW document: 8 header lines, then 8760 hourly records.

    Extracts the LOCATION header and, per record, fields 7 (dry bulb),
    15 (direct normal) and 16 (diffuse horizontal), 1-based.
    """
    lines = text.splitlines()
    if len(lines) < 9 or not lines[0].upper().startswith("LOCATION"):
        raise WeatherError("line 1: expected a LOCATION header")
    loc_parts = lines[0].split(",")
    if len(loc_parts) < 10:
        raise WeatherError("line 1: LOCATION header has too few fields")
    try:
        location = Location(
            latitude=float(loc_parts[6]),
            longitude=float(loc_parts[7]),
            timezone=float(loc_parts[8]),
            elevation=float(loc_parts[9]),
        )
    except ValueError as e:
        raise WeatherError(f"line 1: unparsable LOCATION numeric field ({e})") from None

    records = [ln for ln in lines[8:] if ln.strip()]
    if len(records) != HOURS_PER_YEAR:
        raise WeatherError(
            f"expected {HOURS_PER_YEAR} data records, got {len(records)}"
        )

    dry = np.empty(HOURS_PER_YEAR)
    dni = np.empty(HOURS_PER_YEAR)
    dhi = np.empty(HOURS_PER_YEAR)
    for i, ln in enumerate(records):
        line_no = i + 9
        parts = ln.split(",")
        if len(parts) < 16:
            raise WeatherError(f"line {line_no}: record has fewer than 16 fields")
        try:
            t = float(parts[6])
            dn = float(parts[14])
            dh = float(parts[15])
        except ValueError:
            raise WeatherError(f"line {line_no}: unparsable numeric field") from None
        if t == _MISSING_DRY_BULB:
            raise WeatherError(f"line {line_no}: missing dry-bulb value (99.9)")
        if dn == _MISSING_RADIATION or dh == _MISSING_RADIATION:
            raise WeatherError(f"line {line_no}: missing radiation value (9999)")
        dry[i] = t
        dni[i] = dn
        dhi[i] = dh
    return WeatherYear(location, dry, dni, dhi)


def to_epw(w: WeatherYear, city: str = "Synthetic") -> str:
    """Render a WeatherYear as a minimal EPW document our parser accepts."""
    loc = w.location
    out = [
        f"LOCATION,{city},-,-,synthetic,000000,{loc.latitude},{loc.longitude},"
        f"{loc.timezone},{loc.elevation}"
    ]
    out += [
        "DESIGN CONDITIONS,0",
        "TYPICAL/EXTREME PERIODS,0",
        "GROUND TEMPERATURES,0",
        "HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0",
        "COMMENTS 1,generated",
        "COMMENTS 2,",
        "DATA PERIODS,1,1,Data,Monday, 1/ 1,12/31",
    ]
    hour = 0
    for day in range(365):
        month, dom = _month_day(day + 1)
        for h in range(24):
            t = w.dry_bulb[hour]
            dn = w.dni[hour]
            dh = w.dhi[hour]
            out.append(
                f"1999,{month},{dom},{h + 1},0,-,"
                f"{t:.1f},10.0,50,101325,0,0,0,0,{dn:.0f},{dh:.0f},0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0"
            )
            hour += 1
    return "\n".join(out) + "\n"


_MONTH_LENGTHS = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


def _month_day(day_of_year: int) -> tuple[int, int]:
    d = day_of_year
    for m, n in enumerate(_MONTH_LENGTHS, start=1):
        if d <= n:
            return m, d
        d -= n
    raise ValueError(day_of_year)


def make_synthetic_weather(
    location: Location = Location(40.0, 0.0, 0.0, 0.0),
    mean_temp: float = 15.0,
    daily_amplitude: float = 5.0,
    annual_amplitude: float = 8.0,
    dni_peak: float = 800.0,
    dhi_peak: float = 100.0,
) -> WeatherYear:
    """Deterministic sinusoidal climate with clear-sky style solar.

    Direct normal follows the solar altitude (clamped sine), diffuse follows
    daylight hours; temperatures combine an annual and a diurnal wave.
    """
    from .solar import sun_position

    hours = np.arange(HOURS_PER_YEAR)
    day = hours // 24 + 1
    hod = hours % 24 + 0.5
    temp = (
        mean_temp
        - annual_amplitude * np.cos(2 * np.pi * (day - 15) / 365.0)
        - daily_amplitude * np.cos(2 * np.pi * (hod - 15.0) / 24.0)
    )
    alt = np.empty(HOURS_PER_YEAR)
    for h in range(HOURS_PER_YEAR):
        alt[h], _ = sun_position(
            location.latitude,
            location.longitude,
            location.timezone,
            int(day[h]),
            float(hod[h]),
        )
    sin_alt = np.clip(np.sin(np.radians(np.maximum(alt, 0.0))), 0.0, 1.0)
    dni = dni_peak * np.sqrt(sin_alt)
    dhi = dhi_peak * sin_alt
    return WeatherYear(location, temp, dni, dhi)


RUNNING_MEAN_ALPHA = 0.8


def running_mean_series(w: WeatherYear) -> np.ndarray:
    """Exponentially weighted running mean of daily outdoor temperature.

    trm(d) = (1 - a) * mean(d-1) + a * trm(d-1) with a = 0.8, seeded for
    day 1 with the plain mean of the 7 preceding days, wrapping the year.
    """
    daily = w.daily_means()
    trm = np.empty(365)
    trm[0] = daily[np.arange(-7, 0)].mean()
    for d in range(1, 365):
        trm[d] = (1 - RUNNING_MEAN_ALPHA) * daily[d - 1] + RUNNING_MEAN_ALPHA * trm[
            d - 1
        ]
    return trm


def running_mean(w: WeatherYear, day: int) -> float:
    """Running mean for a 1-based day of year."""
    if not (1 <= day <= 365):
        raise ValueError(f"day must be in 1..365, got {day}")
    return float(running_mean_series(w)[day - 1])
