"""Hot numeric kernels: rectangle set measures and the hourly zone solver.

Two interchangeable implementations live here. The loop-style kernels are
compiled with numba's @njit when available; a vectorized pure-numpy path is
kept as a fallback and for cross-checking. Selection is made once at import:

    PLANOPT_NO_NUMBA=1  forces the numpy path (also used when numba is
                        missing or fails to import).

Both paths are exposed in IMPLEMENTATIONS for the parity tests and the
benchmark in benchmarks/bench_kernels.py.

Rectangle arrays are float64 of shape (n, 4) laid out as x0, y0, x1, y1.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("PLANOPT_NO_NUMBA", "").lower() in ("1", "true", "yes")

if not _DISABLED:
    try:
        from numba import njit as _njit

        USE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False
else:
    USE_NUMBA = False

CONTACT_TOL = 1e-6  # coordinates are grid-snapped upstream; exact-contact slack


# ---------------------------------------------------------------------------
# loop-style kernels (numba targets)
# ---------------------------------------------------------------------------


def _pairwise_overlap_loop(rects):
    n = rects.shape[0]
    per = np.zeros(n)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            w = min(rects[i, 2], rects[j, 2]) - max(rects[i, 0], rects[j, 0])
            h = min(rects[i, 3], rects[j, 3]) - max(rects[i, 1], rects[j, 1])
            if w > 0.0 and h > 0.0:
                a = w * h
                total += a
                per[i] += a
                per[j] += a
    return total, per


def _outside_areas_loop(rects, pieces):
    n = rects.shape[0]
    m = pieces.shape[0]
    out = np.empty(n)
    for i in range(n):
        area = (rects[i, 2] - rects[i, 0]) * (rects[i, 3] - rects[i, 1])
        inside = 0.0
        for j in range(m):
            w = min(rects[i, 2], pieces[j, 2]) - max(rects[i, 0], pieces[j, 0])
            h = min(rects[i, 3], pieces[j, 3]) - max(rects[i, 1], pieces[j, 1])
            if w > 0.0 and h > 0.0:
                inside += w * h
        out[i] = max(0.0, area - inside)
    return out


def _contact_gap_loop(rects, pairs):
    k = pairs.shape[0]
    contact = np.zeros(k)
    gap = np.zeros(k)
    for p in range(k):
        i = pairs[p, 0]
        j = pairs[p, 1]
        wx = min(rects[i, 2], rects[j, 2]) - max(rects[i, 0], rects[j, 0])
        wy = min(rects[i, 3], rects[j, 3]) - max(rects[i, 1], rects[j, 1])
        if wx > 0.0 and wy > 0.0:
            contact[p] = 0.0  # interiors overlap
        elif abs(wx) <= CONTACT_TOL and wy > 0.0:
            contact[p] = wy
        elif abs(wy) <= CONTACT_TOL and wx > 0.0:
            contact[p] = wx
        dx = -wx if wx < 0.0 else 0.0
        dy = -wy if wy < 0.0 else 0.0
        gap[p] = (dx * dx + dy * dy) ** 0.5
    return contact, gap


def _side_exposures_loop(rects):
    # exposed wall length per side, order N, E, S, W
    n = rects.shape[0]
    out = np.empty((n, 4))
    for i in range(n):
        x0, y0, x1, y1 = rects[i, 0], rects[i, 1], rects[i, 2], rects[i, 3]
        cov_n = 0.0
        cov_e = 0.0
        cov_s = 0.0
        cov_w = 0.0
        for j in range(n):
            if j == i:
                continue
            ox = min(x1, rects[j, 2]) - max(x0, rects[j, 0])
            oy = min(y1, rects[j, 3]) - max(y0, rects[j, 1])
            if ox > 0.0:
                if abs(rects[j, 1] - y1) <= CONTACT_TOL:
                    cov_n += ox
                if abs(rects[j, 3] - y0) <= CONTACT_TOL:
                    cov_s += ox
            if oy > 0.0:
                if abs(rects[j, 0] - x1) <= CONTACT_TOL:
                    cov_e += oy
                if abs(rects[j, 2] - x0) <= CONTACT_TOL:
                    cov_w += oy
        out[i, 0] = max(0.0, (x1 - x0) - cov_n)
        out[i, 1] = max(0.0, (y1 - y0) - cov_e)
        out[i, 2] = max(0.0, (x1 - x0) - cov_s)
        out[i, 3] = max(0.0, (y1 - y0) - cov_w)
    return out


def _union_area_loop(rects):
    n = rects.shape[0]
    if n == 0:
        return 0.0
    xs = np.unique(np.concatenate((rects[:, 0], rects[:, 2])))
    ys = np.unique(np.concatenate((rects[:, 1], rects[:, 3])))
    total = 0.0
    for a in range(xs.shape[0] - 1):
        cx = (xs[a] + xs[a + 1]) / 2.0
        w = xs[a + 1] - xs[a]
        for b in range(ys.shape[0] - 1):
            cy = (ys[b] + ys[b + 1]) / 2.0
            for i in range(n):
                if rects[i, 0] < cx < rects[i, 2] and rects[i, 1] < cy < rects[i, 3]:
                    total += w * (ys[b + 1] - ys[b])
                    break
    return total


def _simulate_hours_loop(
    cap, ua_fix, k_int, h_inf, h_vent, vent_allowed, q, t_out, t0, dt, vent_t_min
):
    """Backward-Euler hourly update of the coupled single-node zones.

    Per hour, solves (C/dt + UA + H_air + sum_j K_ij) T_i - sum_j K_ij T_j =
    C/dt T_i_prev + (UA + H_air) T_out + Q_i for all zones simultaneously.
    The natural-ventilation boost switches on the previous hour's node
    temperature, which keeps the per-hour system linear.
    """
    n = cap.shape[0]
    steps = t_out.shape[0]
    temps = np.empty((n, steps))
    t_prev = t0.copy()
    a_mat = np.empty((n, n))
    rhs = np.empty(n)
    for t in range(steps):
        if n == 1:
            on = (
                vent_allowed[0, t] != 0
                and t_prev[0] > t_out[t]
                and t_prev[0] > vent_t_min
            )
            h_air = h_inf[0] + (h_vent[0] if on else 0.0)
            denom = cap[0] / dt + ua_fix[0] + h_air
            val = (
                cap[0] / dt * t_prev[0] + (ua_fix[0] + h_air) * t_out[t] + q[0, t]
            ) / denom
            temps[0, t] = val
            t_prev[0] = val
        else:
            for i in range(n):
                on = (
                    vent_allowed[i, t] != 0
                    and t_prev[i] > t_out[t]
                    and t_prev[i] > vent_t_min
                )
                h_air = h_inf[i] + (h_vent[i] if on else 0.0)
                diag = cap[i] / dt + ua_fix[i] + h_air
                for j in range(n):
                    a_mat[i, j] = -k_int[i, j]
                    diag += k_int[i, j]
                a_mat[i, i] = diag
                rhs[i] = (
                    cap[i] / dt * t_prev[i] + (ua_fix[i] + h_air) * t_out[t] + q[i, t]
                )
            sol = np.linalg.solve(a_mat, rhs)
            for i in range(n):
                temps[i, t] = sol[i]
                t_prev[i] = sol[i]
    return temps


# ---------------------------------------------------------------------------
# vectorized numpy fallbacks
# ---------------------------------------------------------------------------


def _pairwise_overlap_numpy(rects):
    n = rects.shape[0]
    if n < 2:
        return 0.0, np.zeros(n)
    w = np.minimum(rects[:, None, 2], rects[None, :, 2]) - np.maximum(
        rects[:, None, 0], rects[None, :, 0]
    )
    h = np.minimum(rects[:, None, 3], rects[None, :, 3]) - np.maximum(
        rects[:, None, 1], rects[None, :, 1]
    )
    a = np.clip(w, 0.0, None) * np.clip(h, 0.0, None)
    a[w <= 0.0] = 0.0
    a[h <= 0.0] = 0.0
    np.fill_diagonal(a, 0.0)
    per = a.sum(axis=1)
    return float(per.sum() / 2.0), per


def _outside_areas_numpy(rects, pieces):
    area = (rects[:, 2] - rects[:, 0]) * (rects[:, 3] - rects[:, 1])
    if pieces.shape[0] == 0:
        return area.copy()
    w = np.minimum(rects[:, None, 2], pieces[None, :, 2]) - np.maximum(
        rects[:, None, 0], pieces[None, :, 0]
    )
    h = np.minimum(rects[:, None, 3], pieces[None, :, 3]) - np.maximum(
        rects[:, None, 1], pieces[None, :, 1]
    )
    inside = (np.clip(w, 0.0, None) * np.clip(h, 0.0, None)).sum(axis=1)
    return np.maximum(0.0, area - inside)


def _contact_gap_numpy(rects, pairs):
    a = rects[pairs[:, 0]]
    b = rects[pairs[:, 1]]
    wx = np.minimum(a[:, 2], b[:, 2]) - np.maximum(a[:, 0], b[:, 0])
    wy = np.minimum(a[:, 3], b[:, 3]) - np.maximum(a[:, 1], b[:, 1])
    contact = np.zeros(len(pairs))
    vert = (np.abs(wx) <= CONTACT_TOL) & (wy > 0.0)
    horz = (np.abs(wy) <= CONTACT_TOL) & (wx > 0.0)
    contact[vert] = wy[vert]
    contact[horz] = wx[horz]
    contact[(wx > 0.0) & (wy > 0.0)] = 0.0
    gap = np.hypot(np.clip(-wx, 0.0, None), np.clip(-wy, 0.0, None))
    return contact, gap


def _side_exposures_numpy(rects):
    n = rects.shape[0]
    out = np.empty((n, 4))
    x0, y0, x1, y1 = rects[:, 0], rects[:, 1], rects[:, 2], rects[:, 3]
    ox = np.minimum(x1[:, None], x1[None, :]) - np.maximum(x0[:, None], x0[None, :])
    oy = np.minimum(y1[:, None], y1[None, :]) - np.maximum(y0[:, None], y0[None, :])
    ox = np.clip(ox, 0.0, None)
    oy = np.clip(oy, 0.0, None)
    np.fill_diagonal(ox, 0.0)
    np.fill_diagonal(oy, 0.0)
    touch_n = np.abs(y0[None, :] - y1[:, None]) <= CONTACT_TOL
    touch_s = np.abs(y1[None, :] - y0[:, None]) <= CONTACT_TOL
    touch_e = np.abs(x0[None, :] - x1[:, None]) <= CONTACT_TOL
    touch_w = np.abs(x1[None, :] - x0[:, None]) <= CONTACT_TOL
    out[:, 0] = np.maximum(0.0, (x1 - x0) - (ox * touch_n).sum(axis=1))
    out[:, 1] = np.maximum(0.0, (y1 - y0) - (oy * touch_e).sum(axis=1))
    out[:, 2] = np.maximum(0.0, (x1 - x0) - (ox * touch_s).sum(axis=1))
    out[:, 3] = np.maximum(0.0, (y1 - y0) - (oy * touch_w).sum(axis=1))
    return out


def _union_area_numpy(rects):
    n = rects.shape[0]
    if n == 0:
        return 0.0
    xs = np.unique(np.concatenate((rects[:, 0], rects[:, 2])))
    ys = np.unique(np.concatenate((rects[:, 1], rects[:, 3])))
    cx = (xs[:-1] + xs[1:]) / 2.0
    cy = (ys[:-1] + ys[1:]) / 2.0
    covered = (
        (rects[:, 0, None, None] < cx[None, :, None])
        & (cx[None, :, None] < rects[:, 2, None, None])
        & (rects[:, 1, None, None] < cy[None, None, :])
        & (cy[None, None, :] < rects[:, 3, None, None])
    ).any(axis=0)
    cell = np.outer(np.diff(xs), np.diff(ys))
    return float((cell * covered).sum())


def _simulate_hours_numpy(
    cap, ua_fix, k_int, h_inf, h_vent, vent_allowed, q, t_out, t0, dt, vent_t_min
):
    # identical algorithm, plain numpy; sequential by nature
    return _simulate_hours_loop(
        cap, ua_fix, k_int, h_inf, h_vent, vent_allowed, q, t_out, t0, dt, vent_t_min
    )


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

_NUMPY_IMPL = {
    "pairwise_overlap": _pairwise_overlap_numpy,
    "outside_areas": _outside_areas_numpy,
    "contact_gap": _contact_gap_numpy,
    "side_exposures": _side_exposures_numpy,
    "union_area": _union_area_numpy,
    "simulate_hours": _simulate_hours_numpy,
}

IMPLEMENTATIONS: dict[str, dict] = {"numpy": _NUMPY_IMPL}

if USE_NUMBA:
    _jit = _njit(cache=True)
    _NUMBA_IMPL = {
        "pairwise_overlap": _jit(_pairwise_overlap_loop),
        "outside_areas": _jit(_outside_areas_loop),
        "contact_gap": _jit(_contact_gap_loop),
        "side_exposures": _jit(_side_exposures_loop),
        "union_area": _jit(_union_area_loop),
        "simulate_hours": _jit(_simulate_hours_loop),
    }
    IMPLEMENTATIONS["numba"] = _NUMBA_IMPL
    _ACTIVE = _NUMBA_IMPL
else:
    _ACTIVE = _NUMPY_IMPL

pairwise_overlap = _ACTIVE["pairwise_overlap"]
outside_areas = _ACTIVE["outside_areas"]
contact_gap = _ACTIVE["contact_gap"]
side_exposures = _ACTIVE["side_exposures"]
union_area = _ACTIVE["union_area"]
simulate_hours = _ACTIVE["simulate_hours"]


def active_backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def warmup() -> None:
    """Trigger JIT compilation on tiny inputs so first real use is fast."""
    rects = np.array([[0.0, 0.0, 1.0, 1.0], [1.0, 0.0, 2.0, 1.0]])
    pairs = np.array([[0, 1]], dtype=np.int64)
    pairwise_overlap(rects)
    outside_areas(rects, rects)
    contact_gap(rects, pairs)
    side_exposures(rects)
    union_area(rects)
    simulate_hours(
        np.array([1e5]),
        np.array([50.0]),
        np.zeros((1, 1)),
        np.array([5.0]),
        np.array([10.0]),
        np.zeros((1, 3), dtype=np.uint8),
        np.zeros((1, 3)),
        np.array([10.0, 11.0, 12.0]),
        np.array([20.0]),
        3600.0,
        24.0,
    )
