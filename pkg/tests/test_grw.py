import numpy as np
import pytest

import darcybench as db
from darcybench import grw, manufactured, randfield
from darcybench.exceptions import ConfigurationError
from darcybench.grids import GridSpec


class TestStep1D:
    def test_frozen_dynamics(self):
        n = np.array([1.0, 0.7, 0.4, 0.2, 0.0])
        out = grw.grw_step_1d(n, np.zeros(3), np.zeros(3), 0.0, (1.0, 0.0))
        np.testing.assert_array_equal(out, n)

    def test_constant_k_linear_fixed_point(self):
        x = np.linspace(0, 1, 21)
        n = 1.0 - x
        r = np.full(19, 0.5)
        out = grw.grw_step_1d(n, r, r, 0.0, (1.0, 0.0))
        assert np.max(np.abs(out - n)) < 1e-14

    def test_contraction_of_perturbation(self):
        x = np.linspace(0, 1, 41)
        exact = 1.0 - x
        rng = np.random.default_rng(0)
        n = exact + 0.01 * rng.normal(size=x.size)
        n[0], n[-1] = 1.0, 0.0
        r = np.full(39, 0.45)
        dev = [np.max(np.abs(n - exact))]
        for _ in range(200):
            n = grw.grw_step_1d(n, r, r, 0.0, (1.0, 0.0))
            dev.append(np.max(np.abs(n - exact)))
        dev = np.array(dev)
        assert np.all(np.diff(dev) <= 1e-14)
        assert dev[-1] < 0.5 * dev[0]

    def test_r_cap_violation_names_node(self):
        n = np.zeros(5)
        r = np.array([0.7, 0.7, 0.2])
        with pytest.raises(ConfigurationError) as err:
            grw.grw_step_1d(n, r, r, 0.0, (0.0, 0.0))
        assert "node" in str(err.value)


class TestStep2D:
    def test_mass_conserved_when_isolated(self):
        # redistribution with all four faces sealed moves mass only between
        # interior cells, so the lattice sum is invariant
        rng = np.random.default_rng(1)
        n = rng.uniform(0.0, 1.0, size=(8, 6))
        # jump rates live on faces: both sides of a face see the same rate
        face_x = rng.uniform(0.01, 0.2, size=(7, 6))
        face_y = rng.uniform(0.01, 0.2, size=(6, 7))
        face_x[0, :] = face_x[-1, :] = 0.0
        face_y[:, 0] = face_y[:, -1] = 0.0
        before = n[1:-1, :].sum()
        core = grw._sweep_2d(n, face_x[:-1, :], face_x[1:, :],
                             face_y[:, :-1], face_y[:, 1:], 0.0, None, 0.1)
        assert core.sum() == pytest.approx(before, rel=1e-13)

    def test_r_cap_violation(self):
        n = np.zeros((5, 4))
        r = np.full((3, 4), 0.3)
        with pytest.raises(ConfigurationError):
            grw.grw_step_2d(n, r, r, r, r, 0.0, (np.zeros(4), np.zeros(4)), None, 0.1)


class TestRunToSteady:
    def test_constant_k_converges_to_linear(self, const_modes, const_model):
        grid = GridSpec.interval(20.0, 0.1)
        cfg = db.GrwConfig(t_max=100_000, steady_tol=1e-10)
        head, report = grw.run_to_steady_1d(grid, const_modes, 16, const_model,
                                            case="homogeneous", config=cfg,
                                            initial=np.full(grid.nx, 0.5))
        assert report.converged
        assert report.iterations <= 100_000
        exact = 1.0 - grid.x_nodes() / 20.0
        assert np.max(np.abs(head.values - exact)) < 1e-8

    def test_fixed_point_satisfies_three_point_stencil(self, gauss_modes, gauss_model):
        grid = GridSpec.interval(20.0, 0.1)
        cfg = db.GrwConfig(t_max=10_000_000, steady_tol=1e-8)
        head, report = grw.run_to_steady_1d(grid, gauss_modes, 100, gauss_model,
                                            case="manufactured", config=cfg)
        assert report.converged
        k_half = randfield.conductivity_lattice(gauss_modes, 100, gauss_model,
                                                0.05, 0.1, grid.nx - 1)
        f = manufactured.source_1d_lattice(gauss_modes, 100, gauss_model,
                                           0.1, 0.1, grid.nx - 2)
        v = head.values
        resid = (k_half[:-1] * v[:-2]
                 - (k_half[:-1] + k_half[1:]) * v[1:-1]
                 + k_half[1:] * v[2:]
                 - grid.dx ** 2 * f)
        assert np.max(np.abs(resid)) <= 10 * cfg.steady_tol

    def test_deterministic_reproducibility(self, gauss_modes, gauss_model):
        grid = GridSpec.interval(10.0, 0.1)
        cfg = db.GrwConfig(t_max=200_000, steady_tol=1e-9)
        h1, r1 = grw.run_to_steady_1d(grid, gauss_modes, 50, gauss_model,
                                      case="manufactured", config=cfg)
        h2, r2 = grw.run_to_steady_1d(grid, gauss_modes, 50, gauss_model,
                                      case="manufactured", config=cfg)
        assert np.array_equal(h1.values, h2.values)
        assert r1.iterations == r2.iterations
        assert np.array_equal(r1.history, r2.history)

    def test_non_stationary_flagged_not_raised(self, gauss_modes, gauss_model):
        grid = GridSpec.interval(10.0, 0.1)
        cfg = db.GrwConfig(t_max=50, check_every=10, steady_tol=1e-14)
        head, report = grw.run_to_steady_1d(grid, gauss_modes, 50, gauss_model,
                                            case="homogeneous", config=cfg)
        assert not report.converged
        assert report.iterations == 50
        assert np.all(np.isfinite(head.values))

    def test_2d_mass_approaches_plateau(self, gauss_modes, gauss_model):
        grid = GridSpec.box(4.0, 2.0, 0.1)
        cfg = db.GrwConfig(t_max=1_000_000, steady_tol=1e-9)
        head, report = grw.run_to_steady_2d(grid, gauss_modes, 100, gauss_model,
                                            case="homogeneous", config=cfg)
        assert report.converged
        mass = report.history[:, 1]
        normalized = mass / mass[-1]
        assert abs(normalized[-1] - 1.0) < 1e-12
        assert abs(normalized[-2] - 1.0) < 1e-6

    def test_2d_fixed_point_matches_fdm(self, gauss_modes, gauss_model):
        grid = GridSpec.box(4.0, 2.0, 0.1)
        cfg = db.GrwConfig(t_max=1_000_000, steady_tol=1e-10)
        head, report = grw.run_to_steady_2d(grid, gauss_modes, 100, gauss_model,
                                            case="homogeneous", config=cfg)
        fdm_head = db.solve_head_2d(grid, gauss_modes, 100, gauss_model,
                                    case="homogeneous")
        assert np.max(np.abs(head.values - fdm_head.values)) < 1e-6

    def test_bad_r_max_rejected(self, const_modes, const_model):
        grid = GridSpec.interval(10.0, 0.1)
        with pytest.raises(ConfigurationError):
            grw.run_to_steady_1d(grid, const_modes, 16, const_model,
                                 config=db.GrwConfig(r_max=1.5))
        grid2 = GridSpec.box(2.0, 1.0, 0.1)
        with pytest.raises(ConfigurationError):
            grw.run_to_steady_2d(grid2, const_modes, 16, const_model,
                                 config=db.GrwConfig(r_max=0.3))

    def test_history_csv(self, tmp_path, gauss_modes, gauss_model):
        grid = GridSpec.interval(10.0, 0.1)
        cfg = db.GrwConfig(t_max=5000, steady_tol=1e-6, check_every=100)
        _, report = grw.run_to_steady_1d(grid, gauss_modes, 50, gauss_model,
                                         case="homogeneous", config=cfg)
        path = tmp_path / "hist.csv"
        grw.write_history(report.history, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "iteration,total_mass,max_change"
        assert len(lines) == report.history.shape[0] + 1
