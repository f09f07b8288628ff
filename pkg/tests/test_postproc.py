import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import darcybench as db
from darcybench import fdm
from darcybench.grids import GridSpec, HeadField


class TestNorms:
    def test_identical_fields_zero(self):
        grid = GridSpec.interval(1.0, 0.1)
        h = HeadField(grid, np.sin(grid.x_nodes()))
        assert db.l2_error_1d(h, np.sin) == 0.0

    def test_constant_offset(self):
        grid = GridSpec.interval(2.0, 0.1)
        c = 0.37
        h = HeadField(grid, np.full(grid.nx, c))
        expected = c * math.sqrt(grid.dx * grid.nx)
        assert db.l2_error_1d(h, lambda x: np.zeros_like(x)) == pytest.approx(expected)

    def test_matches_direct_summation(self):
        grid = GridSpec.interval(math.pi, math.pi / 32)
        vals = np.sin(grid.x_nodes()) + 0.01 * np.cos(7 * grid.x_nodes())
        h = HeadField(grid, vals)
        direct = math.sqrt(grid.dx * np.sum((vals - np.sin(grid.x_nodes())) ** 2))
        assert db.l2_error_1d(h, np.sin) == pytest.approx(direct, rel=1e-12)

    def test_2d_norm(self):
        grid = GridSpec.box(1.0, 0.5, 0.125)
        vals = np.ones((grid.nx, grid.ny))
        h = HeadField(grid, vals)
        expected = math.sqrt(grid.dx ** 2 * grid.nx * grid.ny)
        assert db.l2_error_2d(h, lambda x, y: 0.0 * x * y) == pytest.approx(expected)

    def test_linf(self):
        assert db.linf_error([1.0, 2.0, 3.0], [1.0, 2.5, 3.0]) == 0.5

    # |c| below ~1e-154 underflows in the squared sum; that regime is a
    # floating-point limit, not a property of the norm
    @given(c=st.one_of(st.just(0.0), st.floats(-1e6, 1e6).filter(lambda v: abs(v) > 1e-100)))
    @settings(max_examples=30, deadline=None)
    def test_absolute_homogeneity(self, c):
        grid = GridSpec.interval(1.0, 0.25)
        base = np.array([0.0, 1.0, -2.0, 0.5, 3.0])
        h = HeadField(grid, c * base)
        zero = lambda x: np.zeros_like(x)  # noqa: E731
        ref = HeadField(grid, base)
        assert db.l2_error_1d(h, zero) == pytest.approx(
            abs(c) * db.l2_error_1d(ref, zero), rel=1e-12, abs=1e-300)


class TestDarcyVelocity:
    def test_uniform_flow(self):
        model = db.RandomFieldModel(db.Correlation.GAUSSIAN, sigma2=0.0, mean_k=15.0)
        grid = GridSpec.box(20.0, 10.0, 0.5)
        h = HeadField(grid, np.broadcast_to(
            (1.0 - grid.x_nodes() / 20.0)[:, None], (grid.nx, grid.ny)).copy())
        k = np.full((grid.nx, grid.ny), 15.0)
        v = db.darcy_velocity(h, k, dimensionless=True, model=model, h_inflow=1.0)
        np.testing.assert_allclose(v.vx, 1.0, atol=1e-12)
        np.testing.assert_allclose(v.vy, 0.0, atol=1e-12)

    def test_rescaling_invariance(self):
        # jointly rescaling <K> and H leaves the dimensionless field unchanged
        grid = GridSpec.box(20.0, 10.0, 0.5)
        for scale in (1.0, 7.0):
            model = db.RandomFieldModel(db.Correlation.GAUSSIAN, sigma2=0.0,
                                        mean_k=15.0 * scale)
            h = HeadField(grid, np.broadcast_to(
                (scale * (1.0 - grid.x_nodes() / 20.0))[:, None],
                (grid.nx, grid.ny)).copy())
            k = np.full((grid.nx, grid.ny), 15.0 * scale)
            v = db.darcy_velocity(h, k, dimensionless=True, model=model,
                                  h_inflow=scale)
            np.testing.assert_allclose(v.vx, 1.0, atol=1e-12)

    def test_constant_head_zero_velocity(self):
        grid = GridSpec.interval(5.0, 0.5)
        h = HeadField(grid, np.full(grid.nx, 2.0))
        v = db.darcy_velocity(h, np.ones(grid.nx))
        np.testing.assert_allclose(v.vx, 0.0, atol=1e-14)
        assert v.vy is None

    def test_manufactured_gradient(self, const_modes, const_model):
        grid = GridSpec.box(4.0, 2.0, 0.01)
        xv, yv = grid.x_nodes(), grid.y_nodes()
        h = HeadField(grid, db.head_2d(xv[:, None], yv[None, :]))
        v = db.darcy_velocity(h, np.ones((grid.nx, grid.ny)))
        exact = -2.0 * np.cos(2 * xv[:, None] + yv[None, :])
        inner = np.s_[5:-5, 5:-5]
        assert np.max(np.abs(v.vx[inner] - exact[inner])) < 1e-3


class TestEocStudy:
    def test_degenerate_exact_solver_flagged(self):
        base = GridSpec.interval(1.0, 0.125)

        def exact_solver(grid):
            return HeadField(grid, 1.0 - grid.x_nodes() / 1.0)

        table = db.eoc_study(exact_solver, base, 4)
        assert table.flagged
        assert np.all(table.errors == 0.0)
        assert np.all(~np.isfinite(table.eoc))

    def test_sigma0_manufactured_second_order(self, const_modes, const_model):
        base = GridSpec.interval(10.0, 0.1)

        def solver(grid):
            return fdm.solve_head_1d(grid, const_modes, 16, const_model,
                                     case="manufactured")

        table = db.eoc_study(solver, base, 5)
        assert not table.flagged
        # reference-on-finest bias: expected orders 2.02, 2.07, 2.32
        assert np.all(table.eoc > 1.9)
        assert np.all(table.eoc < 2.5)

    def test_expected_reference_bias_pattern(self, gauss_modes, gauss_model):
        base = GridSpec.interval(20.0, 0.1)

        def solver(grid):
            return fdm.solve_head_1d(grid, gauss_modes, 100, gauss_model,
                                     case="homogeneous")

        table = db.eoc_study(solver, base, 6)
        # exact-arithmetic ratios (4^k - 1)/(4^(k-1) - 1) give
        # 2.01, 2.02, 2.07, 2.32 when the reference is the finest level
        np.testing.assert_allclose(table.eoc, [2.006, 2.017, 2.07, 2.32], atol=0.06)

    def test_partial_table_on_failure(self):
        base = GridSpec.interval(1.0, 0.125)
        calls = []

        def solver(grid):
            calls.append(grid.dx)
            if len(calls) == 4:
                raise RuntimeError("boom")
            rng = np.random.default_rng(len(calls))
            return HeadField(grid, 1.0 - grid.x_nodes() + 1e-3 * grid.dx ** 2
                             * rng.normal(size=grid.nx))

        table = db.eoc_study(solver, base, 5)
        assert table.flagged
        assert any("boom" in note for note in table.notes)
        assert table.errors.size == 2  # three solved levels, finest is reference

    def test_needs_three_levels(self):
        base = GridSpec.interval(1.0, 0.125)
        with pytest.raises(ValueError):
            db.eoc_study(lambda g: None, base, 2)

    def test_restriction_is_exact_node_matching(self):
        base = GridSpec.interval(1.0, 0.25)

        def solver(grid):
            return HeadField(grid, grid.x_nodes() ** 2)

        table = db.eoc_study(solver, base, 3)
        assert np.all(table.errors == 0.0)  # same function sampled exactly
