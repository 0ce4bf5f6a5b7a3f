"""Solar position, irradiance on vertical walls, and external shading.

Declination uses Cooper's formula; azimuths are degrees clockwise from
north. Diffuse radiation is treated as an isotropic half-sky on vertical
surfaces and is never blocked by overhangs or fins.
"""

from __future__ import annotations

import math

import numpy as np

from ..model import Location, Opening


def declination(day_of_year: int) -> float:
    """Solar declination in degrees (Cooper)."""
    return 23.45 * math.sin(math.radians(360.0 * (284 + day_of_year) / 365.0))


def sun_position(
    latitude: float,
    longitude: float,
    timezone: float,
    day_of_year: int,
    hour: float,
) -> tuple[float, float]:
    """(altitude, azimuth) in degrees for a local clock hour.

    Solar time shifts the clock by 4 minutes per degree of longitude away
    from the timezone meridian; the hour angle is 15 deg per solar hour
    from noon.
    """
    solar_time = hour + (longitude - 15.0 * timezone) / 15.0
    hour_angle = math.radians(15.0 * (solar_time - 12.0))
    lat = math.radians(latitude)
    dec = math.radians(declination(day_of_year))
    sin_alt = math.sin(lat) * math.sin(dec) + math.cos(lat) * math.cos(dec) * math.cos(
        hour_angle
    )
    altitude = math.degrees(math.asin(max(-1.0, min(1.0, sin_alt))))
    azimuth = (
        math.degrees(
            math.atan2(
                math.sin(hour_angle),
                math.cos(hour_angle) * math.sin(lat) - math.tan(dec) * math.cos(lat),
            )
        )
        + 180.0
    ) % 360.0
    return altitude, azimuth


def sun_series(location: Location) -> tuple[np.ndarray, np.ndarray]:
    """Hourly (altitude, azimuth) arrays for a full year, mid-hour sampled."""
    alt = np.empty(8760)
    az = np.empty(8760)
    for h in range(8760):
        alt[h], az[h] = sun_position(
            location.latitude,
            location.longitude,
            location.timezone,
            h // 24 + 1,
            h % 24 + 0.5,
        )
    return alt, az


def incident_irradiance(
    altitude: float,
    azimuth: float,
    dni: float,
    dhi: float,
    surface_azimuth: float,
) -> float:
    """Irradiance on a vertical surface: beam projection plus half-sky diffuse."""
    direct = 0.0
    if altitude >= 0.0:  # horizon counts; only below-horizon sun is dropped
        rel = math.radians(azimuth - surface_azimuth)
        cos_theta = math.cos(math.radians(altitude)) * math.cos(rel)
        direct = dni * max(0.0, cos_theta)
    return direct + dhi / 2.0


def shading_fraction(opening: Opening, altitude: float, azimuth: float, wall_azimuth: float) -> float:
    """Fraction of direct radiation blocked by the overhang and fins.

    The overhang casts a band from the window head of depth * tan(profile
    angle); each fin casts a side band of depth * |tan(relative azimuth)|.
    The union of the bands, capped at the window, gives the fraction.
    """
    if opening.overhang_depth == 0.0 and opening.fin_depth_left == 0.0 and opening.fin_depth_right == 0.0:
        return 0.0
    if altitude <= 0.0:
        return 0.0
    rel = math.radians(azimuth - wall_azimuth)
    cos_rel = math.cos(rel)
    if cos_rel <= 1e-9:
        return 0.0  # sun behind the facade: no direct to block
    w, h = opening.width, opening.height
    tan_profile = math.tan(math.radians(altitude)) / cos_rel
    shaded_h = min(h, opening.overhang_depth * tan_profile)
    tan_rel = abs(math.tan(rel))
    shaded_w = min(w, (opening.fin_depth_left + opening.fin_depth_right) * tan_rel)
    area = shaded_h * w + shaded_w * h - shaded_h * shaded_w
    return min(1.0, area / (w * h))


def window_gain_series(
    opening: Opening,
    wall_az: float,
    shgc: float,
    alt: np.ndarray,
    az: np.ndarray,
    dni: np.ndarray,
    dhi: np.ndarray,
) -> np.ndarray:
    """Hourly solar heat gain (W) through one window, shading applied."""
    rel = np.radians(az - wall_az)
    cos_theta = np.cos(np.radians(alt)) * np.cos(rel)
    direct = dni * np.clip(cos_theta, 0.0, None)
    direct[alt < 0.0] = 0.0

    frac = np.zeros_like(direct)
    if opening.overhang_depth > 0.0 or opening.fin_depth_left > 0.0 or opening.fin_depth_right > 0.0:
        cos_rel = np.cos(rel)
        lit = (alt > 0.0) & (cos_rel > 1e-9)
        if lit.any():
            w, h = opening.width, opening.height
            tan_profile = np.tan(np.radians(alt[lit])) / cos_rel[lit]
            shaded_h = np.minimum(h, opening.overhang_depth * tan_profile)
            tan_rel = np.abs(np.tan(rel[lit]))
            shaded_w = np.minimum(
                w, (opening.fin_depth_left + opening.fin_depth_right) * tan_rel
            )
            area = shaded_h * w + shaded_w * h - shaded_h * shaded_w
            frac[lit] = np.minimum(1.0, area / (w * h))
    return opening.area * shgc * ((1.0 - frac) * direct + dhi / 2.0)
