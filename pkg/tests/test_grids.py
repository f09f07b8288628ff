import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darcybench.grids import GridSpec, HeadField


class TestGridSpec:
    def test_interval(self):
        grid = GridSpec.interval(2.0, 0.25)
        assert grid.nx == 9
        np.testing.assert_allclose(grid.x_nodes(), np.arange(9) * 0.25)
        np.testing.assert_allclose(grid.x_midpoints(), np.arange(8) * 0.25 + 0.125)

    def test_box(self):
        grid = GridSpec.box(2.0, 1.0, 0.5)
        assert (grid.nx, grid.ny) == (5, 3)
        np.testing.assert_allclose(grid.y_nodes(), [0.0, 0.5, 1.0])

    def test_step_must_divide_length(self):
        with pytest.raises(ValueError):
            GridSpec.interval(1.0, 0.3)

    def test_minimum_nodes(self):
        with pytest.raises(ValueError):
            GridSpec.interval(1.0, 1.0)  # two nodes only

    def test_y_accessors_require_2d(self):
        grid = GridSpec.interval(1.0, 0.25)
        with pytest.raises(ValueError):
            grid.y_nodes()

    def test_with_dx_halving(self):
        grid = GridSpec.box(2.0, 1.0, 0.5)
        fine = grid.with_dx(0.25)
        assert fine.nx == 2 * grid.nx - 1
        assert fine.ny == 2 * grid.ny - 1

    @given(k=st.integers(2, 200), m=st.integers(1, 8))
    @settings(max_examples=40, deadline=None)
    def test_halving_keeps_divisibility(self, k, m):
        grid = GridSpec.interval(float(k), 0.5)
        fine = grid.with_dx(grid.dx / 2 ** m)
        assert fine.nx == (grid.nx - 1) * 2 ** m + 1


class TestHeadField:
    def test_shape_validation(self):
        grid = GridSpec.box(2.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            HeadField(grid, np.ones((3, 5)))

    def test_rejects_non_finite(self):
        grid = GridSpec.interval(1.0, 0.25)
        values = np.ones(grid.nx)
        values[2] = np.nan
        with pytest.raises(ValueError):
            HeadField(grid, values)
