"""Parity between the numba-compiled and pure-numpy kernel paths, and unit
checks against the scalar geometry reference implementations."""

import itertools

import numpy as np
import pytest

from planopt import kernels
from planopt.geometry import (
    boundary_rect,
    overlap_area,
    rect,
    rect_distance,
    shared_edge_length,
)


def rand_rects(rng, n, span=20.0):
    x0 = rng.uniform(-span / 2, span / 2, n)
    y0 = rng.uniform(-span / 2, span / 2, n)
    w = rng.uniform(0.3, 6.0, n)
    h = rng.uniform(0.3, 6.0, n)
    return np.column_stack([x0, y0, x0 + w, y0 + h])


def as_rect(row):
    return rect(row[0], row[1], row[2] - row[0], row[3] - row[1])


@pytest.fixture(scope="module")
def impls():
    return kernels.IMPLEMENTATIONS


class TestAgainstScalarReference:
    def test_pairwise_overlap(self):
        rng = np.random.default_rng(7)
        rects = rand_rects(rng, 12)
        total, per = kernels.pairwise_overlap(rects)
        ref = sum(
            overlap_area(as_rect(rects[i]), as_rect(rects[j]))
            for i, j in itertools.combinations(range(len(rects)), 2)
        )
        assert total == pytest.approx(ref, abs=1e-9)
        assert per.sum() == pytest.approx(2 * ref, abs=1e-9)

    def test_outside_areas(self):
        rng = np.random.default_rng(8)
        rects = rand_rects(rng, 10, span=30.0)
        b = boundary_rect(-5, -5, 10, 10)
        pieces = np.array([[p.x0, p.y0, p.x1, p.y1] for p in b.pieces])
        out = kernels.outside_areas(rects, pieces)
        from planopt.geometry import outside_area

        for i in range(len(rects)):
            assert out[i] == pytest.approx(outside_area(as_rect(rects[i]), b), abs=1e-9)

    def test_contact_gap(self):
        rows = np.array(
            [
                [0, 0, 4, 3],
                [4, 0, 7, 3],  # full edge contact with 0
                [9, 0, 10, 1],  # gap from everything
                [2, 1, 6, 5],  # overlaps 0
            ],
            dtype=float,
        )
        pairs = np.array(list(itertools.combinations(range(4), 2)), dtype=np.int64)
        contact, gap = kernels.contact_gap(rows, pairs)
        for k, (i, j) in enumerate(pairs):
            a, b = as_rect(rows[i]), as_rect(rows[j])
            assert contact[k] == pytest.approx(shared_edge_length(a, b), abs=1e-9)
            assert gap[k] == pytest.approx(rect_distance(a, b), abs=1e-9)

    def test_union_area_grid(self):
        rows = np.array([[0, 0, 4, 4], [2, 2, 6, 6], [10, 10, 11, 11]], dtype=float)
        # 16 + 16 - 4 + 1
        assert kernels.union_area(rows) == pytest.approx(29.0)

    def test_side_exposures_tiling(self):
        # two squares side by side: the shared wall is fully covered
        rows = np.array([[0, 0, 4, 4], [4, 0, 8, 4]], dtype=float)
        exp = kernels.side_exposures(rows)
        # order N, E, S, W
        assert exp[0] == pytest.approx([4.0, 0.0, 4.0, 4.0])
        assert exp[1] == pytest.approx([4.0, 4.0, 4.0, 0.0])


class TestPathParity:
    def test_both_paths_available_when_numba_enabled(self, impls):
        assert "numpy" in impls
        if kernels.USE_NUMBA:
            assert "numba" in impls

    @pytest.mark.parametrize("n", [0, 1, 2, 13, 40])
    def test_geometry_kernels_agree(self, impls, n):
        if "numba" not in impls:
            pytest.skip("numba disabled")
        rng = np.random.default_rng(n + 1)
        rects = rand_rects(rng, n)
        pieces = rand_rects(rng, 5)
        t_nb, per_nb = impls["numba"]["pairwise_overlap"](rects)
        t_np, per_np = impls["numpy"]["pairwise_overlap"](rects)
        assert t_nb == pytest.approx(t_np, abs=1e-9)
        np.testing.assert_allclose(per_nb, per_np, atol=1e-9)
        np.testing.assert_allclose(
            impls["numba"]["outside_areas"](rects, pieces),
            impls["numpy"]["outside_areas"](rects, pieces),
            atol=1e-9,
        )
        np.testing.assert_allclose(
            impls["numba"]["side_exposures"](rects),
            impls["numpy"]["side_exposures"](rects),
            atol=1e-9,
        )
        assert impls["numba"]["union_area"](rects) == pytest.approx(
            impls["numpy"]["union_area"](rects), abs=1e-9
        )
        if n >= 2:
            pairs = np.array(
                list(itertools.combinations(range(n), 2))[:30], dtype=np.int64
            )
            c_nb, g_nb = impls["numba"]["contact_gap"](rects, pairs)
            c_np, g_np = impls["numpy"]["contact_gap"](rects, pairs)
            np.testing.assert_allclose(c_nb, c_np, atol=1e-9)
            np.testing.assert_allclose(g_nb, g_np, atol=1e-9)

    def test_thermal_kernel_agrees(self, impls):
        if "numba" not in impls:
            pytest.skip("numba disabled")
        rng = np.random.default_rng(42)
        n, steps = 4, 200
        cap = rng.uniform(5e5, 5e6, n)
        ua = rng.uniform(20, 200, n)
        k_int = rng.uniform(0, 50, (n, n))
        k_int = (k_int + k_int.T) / 2
        np.fill_diagonal(k_int, 0.0)
        h_inf = rng.uniform(1, 20, n)
        h_vent = rng.uniform(10, 80, n)
        vent = (rng.random((n, steps)) > 0.5).astype(np.uint8)
        q = rng.uniform(0, 800, (n, steps))
        t_out = 10 + 10 * np.sin(np.arange(steps) / 24 * 2 * np.pi)
        t0 = np.full(n, 18.0)
        args = (cap, ua, k_int, h_inf, h_vent, vent, q, t_out, t0, 3600.0, 24.0)
        np.testing.assert_allclose(
            impls["numba"]["simulate_hours"](*args),
            impls["numpy"]["simulate_hours"](*args),
            atol=1e-9,
        )


class TestThermalKernel:
    def test_zero_coupling_holds_temperature(self):
        temps = kernels.simulate_hours(
            np.array([1e6]),
            np.array([0.0]),
            np.zeros((1, 1)),
            np.array([0.0]),
            np.array([0.0]),
            np.zeros((1, 48), dtype=np.uint8),
            np.zeros((1, 48)),
            np.full(48, -5.0),
            np.array([21.5]),
            3600.0,
            24.0,
        )
        np.testing.assert_allclose(temps[0], 21.5)

    def test_single_step_implicit_update(self):
        # C=1e6, UA=100, T0=20, Tout=10, Q=0 -> (C/dt*20 + 100*10)/(C/dt + 100)
        temps = kernels.simulate_hours(
            np.array([1e6]),
            np.array([100.0]),
            np.zeros((1, 1)),
            np.array([0.0]),
            np.array([0.0]),
            np.zeros((1, 1), dtype=np.uint8),
            np.zeros((1, 1)),
            np.array([10.0]),
            np.array([20.0]),
            3600.0,
            24.0,
        )
        expected = (1e6 / 3600 * 20 + 100 * 10) / (1e6 / 3600 + 100)
        assert temps[0, 0] == pytest.approx(expected, abs=1e-12)
        assert temps[0, 0] == pytest.approx(17.353, abs=1e-3)

    def test_steady_state_matches_analytic(self):
        steps = 24 * 30
        temps = kernels.simulate_hours(
            np.array([2e6]),
            np.array([100.0]),
            np.zeros((1, 1)),
            np.array([0.0]),
            np.array([0.0]),
            np.zeros((1, steps), dtype=np.uint8),
            np.full((1, steps), 500.0),
            np.full(steps, 10.0),
            np.array([20.0]),
            3600.0,
            24.0,
        )
        assert temps[0, -1] == pytest.approx(15.0, abs=0.01)

    def test_energy_balance_residual(self):
        rng = np.random.default_rng(3)
        n, steps = 5, 100
        cap = rng.uniform(5e5, 5e6, n)
        ua = rng.uniform(20, 200, n)
        k_int = rng.uniform(0, 50, (n, n))
        k_int = (k_int + k_int.T) / 2
        np.fill_diagonal(k_int, 0.0)
        h_inf = rng.uniform(1, 20, n)
        h_vent = rng.uniform(10, 80, n)
        vent = (rng.random((n, steps)) > 0.3).astype(np.uint8)
        q = rng.uniform(0, 800, (n, steps))
        t_out = 15 + 8 * np.sin(np.arange(steps) / 24 * 2 * np.pi)
        t0 = np.full(n, 18.0)
        dt = 3600.0
        temps = kernels.simulate_hours(
            cap, ua, k_int, h_inf, h_vent, vent, q, t_out, t0, dt, 24.0
        )
        t_prev = t0
        for t in range(steps):
            on = (vent[:, t] != 0) & (t_prev > t_out[t]) & (t_prev > 24.0)
            h_air = h_inf + np.where(on, h_vent, 0.0)
            tt = temps[:, t]
            coupling = (k_int * (tt[None, :] - tt[:, None])).sum(axis=1)
            residual = cap / dt * (tt - t_prev) - (ua + h_air) * (t_out[t] - tt) - coupling - q[:, t]
            assert np.abs(residual).max() <= 1e-6
            t_prev = tt

    def test_monotone_in_internal_gains(self):
        # comparison property of the diagonally dominant implicit system
        rng = np.random.default_rng(11)
        n, steps = 3, 72
        cap = rng.uniform(5e5, 3e6, n)
        ua = rng.uniform(30, 150, n)
        k_int = rng.uniform(0, 40, (n, n))
        k_int = (k_int + k_int.T) / 2
        np.fill_diagonal(k_int, 0.0)
        h_inf = rng.uniform(1, 10, n)
        zeros = np.zeros(n)
        vent = np.zeros((n, steps), dtype=np.uint8)  # vent off: pure linear system
        q = rng.uniform(0, 500, (n, steps))
        t_out = 12 + 6 * np.sin(np.arange(steps) / 24 * 2 * np.pi)
        t0 = np.full(n, 15.0)
        base = kernels.simulate_hours(
            cap, ua, k_int, h_inf, zeros, vent, q, t_out, t0, 3600.0, 24.0
        )
        boosted = kernels.simulate_hours(
            cap, ua, k_int, h_inf, zeros, vent, q + 100.0, t_out, t0, 3600.0, 24.0
        )
        assert (boosted >= base - 1e-12).all()
