import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import darcybench as db
from darcybench import manufactured

from conftest import BASE_SEED


def test_head_1d_values():
    assert manufactured.head_1d(0.0) == 3.0
    assert manufactured.head_1d(math.pi / 2) == pytest.approx(4.0)
    assert manufactured.head_1d(200.0) == pytest.approx(3.0 + math.sin(200.0))


def test_head_2d_values():
    assert manufactured.head_2d(0.0, 0.0) == pytest.approx(1.0)
    assert manufactured.head_2d(math.pi / 4, 0.0) == pytest.approx(2.0)
    gx, gy = manufactured.head_2d_gradient(1.3, 0.0)
    assert gy == pytest.approx(math.cos(2.6))  # Neumann data at y = 0


def test_case_2d_boundary_functions(gauss_modes, gauss_model):
    case = manufactured.case_2d(gauss_modes, 50, gauss_model, 20.0, 10.0)
    y = np.linspace(0, 10, 5)
    np.testing.assert_allclose(case.dirichlet_left(y), 1.0 + np.sin(y))
    np.testing.assert_allclose(case.dirichlet_right(y), 1.0 + np.sin(40.0 + y))
    x = np.linspace(0, 20, 5)
    np.testing.assert_allclose(case.neumann_bottom(x), np.cos(2 * x))
    np.testing.assert_allclose(case.neumann_top(x), np.cos(2 * x + 10.0))


def test_source_1d_constant_k(const_modes, const_model):
    x = np.linspace(0, 6, 13)
    f = manufactured.source_1d(const_modes, 16, const_model, x)
    np.testing.assert_allclose(f, -np.sin(x), atol=1e-15)


def test_source_2d_constant_k(const_modes, const_model):
    x = np.linspace(0, 6, 7)
    y = np.linspace(0, 3, 7)
    f = manufactured.source_2d(const_modes, 16, const_model, x, y)
    np.testing.assert_allclose(f, -5.0 * np.sin(2 * x + y), atol=1e-14)


def test_source_1d_finite_difference_oracle(gauss_model):
    # compare against a central difference of the analytic product K(x) cos(x)
    model = gauss_model.with_sigma2(1.0)
    modes = db.sample_modes(model, 100, seed=BASE_SEED)
    delta = 1e-5
    rng = np.random.default_rng(9)
    x = rng.uniform(1.0, 40.0, size=50)

    def flux(z):
        return db.conductivity(modes, 100, model, z, 1.0) * np.cos(z)

    fd = (flux(x + delta) - flux(x - delta)) / (2 * delta)
    f = manufactured.source_1d(modes, 100, model, x)
    assert np.max(np.abs(f - fd)) < 1e-4


@pytest.mark.parametrize("kind", ["gaussian", "exponential"])
@pytest.mark.parametrize("n,sigma2", [(100, 0.1), (100, 1.0), (1000, 0.1), (1000, 1.0)])
def test_residual_identity_2d(kind, n, sigma2):
    # |f - div(K grad h)| via 4th-order central differences of the analytic
    # fluxes; independent of the implemented gradient path
    model = db.RandomFieldModel(db.Correlation.parse(kind), sigma2=sigma2)
    modes = db.sample_modes(model, n, seed=BASE_SEED)
    delta = 1e-4
    rng = np.random.default_rng(17)
    x = rng.uniform(1.0, 19.0, size=100)
    y = rng.uniform(1.0, 9.0, size=100)

    def flux_x(xx, yy):
        gx, _ = manufactured.head_2d_gradient(xx, yy)
        return db.conductivity(modes, n, model, xx, yy) * gx

    def flux_y(xx, yy):
        _, gy = manufactured.head_2d_gradient(xx, yy)
        return db.conductivity(modes, n, model, xx, yy) * gy

    def d4(fn, xx, yy, axis):
        if axis == 0:
            vals = [fn(xx + s * delta, yy) for s in (-2, -1, 1, 2)]
        else:
            vals = [fn(xx, yy + s * delta) for s in (-2, -1, 1, 2)]
        return (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * delta)

    div = d4(flux_x, x, y, 0) + d4(flux_y, x, y, 1)
    f = manufactured.source_2d(modes, n, model, x, y)
    rel = np.abs(f - div) / np.maximum(1.0, np.abs(f))
    assert np.max(rel) <= 1e-3


def _source_2d_verbatim(modes, n, model, x, y):
    """Direct transcription of the published four-term source expression."""
    c1 = model.geometric_mean
    c2 = math.sqrt(model.sigma2) * math.sqrt(2.0 / n)
    x = np.atleast_1d(np.asarray(x, dtype=float))[:, None]
    y = np.atleast_1d(np.asarray(y, dtype=float))[:, None]
    k1 = modes.k1[None, :n]
    k2 = modes.k2[None, :n]
    phi = modes.phi[None, :n]
    ang = phi + 2.0 * (x * k1 + y * k2) * math.pi
    expo = np.exp(c2 * np.cos(ang).sum(axis=1))
    s1 = (-2.0 * math.pi * k1 * np.sin(ang)).sum(axis=1)
    s2 = (-2.0 * math.pi * k2 * np.sin(ang)).sum(axis=1)
    phase = (2.0 * x + y).ravel()
    return (2.0 * c1 * c2 * s1 * expo * np.cos(phase)
            - 5.0 * c1 * expo * np.sin(phase)
            + c1 * c2 * s2 * expo * np.cos(phase))


def test_source_2d_matches_verbatim_expansion(gauss_modes, gauss_model):
    model = gauss_model.with_sigma2(2.0)
    rng = np.random.default_rng(3)
    x = rng.uniform(0, 20, 40)
    y = rng.uniform(0, 10, 40)
    f_fact = manufactured.source_2d(gauss_modes, 200, model, x, y)
    f_verb = _source_2d_verbatim(gauss_modes, 200, model, x, y)
    np.testing.assert_allclose(f_fact, f_verb, rtol=1e-11, atol=1e-13)


def test_source_grid_matches_points(exp_modes, exp_model):
    xv = np.linspace(0.0, 20.0, 11)
    yv = np.linspace(0.0, 10.0, 7)
    table = manufactured.source_2d_grid(exp_modes, 150, exp_model, xv, yv)
    pointwise = manufactured.source_2d(exp_modes, 150, exp_model,
                                       xv[:, None], yv[None, :])
    np.testing.assert_allclose(table, pointwise, rtol=1e-10, atol=1e-12)


def test_source_1d_lattice_matches_points(gauss_modes, gauss_model):
    f_lat = manufactured.source_1d_lattice(gauss_modes, 120, gauss_model, 0.5, 0.25, 30)
    x = 0.5 + np.arange(30) * 0.25
    f_pts = manufactured.source_1d(gauss_modes, 120, gauss_model, x)
    np.testing.assert_allclose(f_lat, f_pts, rtol=1e-10, atol=1e-12)


@given(x=st.floats(-1e3, 1e3), y=st.floats(-1e3, 1e3))
@settings(max_examples=50, deadline=None)
def test_sources_finite_everywhere(x, y):
    model = db.RandomFieldModel(db.Correlation.EXPONENTIAL, sigma2=4.0)
    modes = db.sample_modes(model, 32, seed=5)
    assert np.isfinite(manufactured.source_2d(modes, 32, model, x, y))
    assert np.isfinite(manufactured.source_1d(modes, 32, model, x))
    assert np.isfinite(manufactured.head_2d(x, y))
