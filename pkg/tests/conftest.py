import numpy as np
import pytest

import darcybench as db

BASE_SEED = 20260810


@pytest.fixture(scope="session")
def gauss_model():
    return db.RandomFieldModel(db.Correlation.GAUSSIAN, sigma2=0.1)


@pytest.fixture(scope="session")
def exp_model():
    return db.RandomFieldModel(db.Correlation.EXPONENTIAL, sigma2=0.1)


@pytest.fixture(scope="session")
def gauss_modes(gauss_model):
    return db.sample_modes(gauss_model, 10_000, seed=BASE_SEED)


@pytest.fixture(scope="session")
def exp_modes(exp_model):
    return db.sample_modes(exp_model, 10_000, seed=BASE_SEED)


@pytest.fixture(scope="session")
def const_model():
    """sigma2 = 0: the homogeneous limit with K identically mean_k."""
    return db.RandomFieldModel(db.Correlation.GAUSSIAN, sigma2=0.0, mean_k=1.0)


@pytest.fixture(scope="session")
def const_modes(const_model):
    return db.sample_modes(const_model, 16, seed=3)


def single_mode_set(k1=0.0, k2=0.0, phi=0.0, sigma2=1.0):
    model = db.RandomFieldModel(db.Correlation.GAUSSIAN, sigma2=sigma2)
    return db.ModeSet(np.array([k1]), np.array([k2]), np.array([phi]), seed=0, model=model)
