"""Shared fixtures; the heavy Monte Carlo fields are session-scoped so the
module examples and the acceptance criteria reuse one computation."""

from __future__ import annotations

import time

import numpy as np
import pytest

import ginibre_density as gd

MC_GRID = gd.GridSpec((-1.5, 1.5, -1.5, 1.5), 61, 61)
MC_N = 256
MC_SAMPLES = 50
MC_SEED = 20240811
WORKERS = 2

# wall-clock spent in each heavy session fixture, for the runtime budgets
FIXTURE_SECONDS: dict[str, float] = {}


def _timed(name, fn):
    t0 = time.monotonic()
    out = fn()
    FIXTURE_SECONDS[name] = time.monotonic() - t0
    return out


def mc_config(n=MC_N, samples=MC_SAMPLES, grid=MC_GRID, seed=MC_SEED):
    return gd.McConfig(n=n, samples=samples, grid=grid, seed=seed, workers=WORKERS)


@pytest.fixture(scope="session")
def zero_256():
    return np.zeros((MC_N, MC_N), dtype=np.complex128)


@pytest.fixture(scope="session")
def jordan_256():
    return gd.build_deformation(gd.EnsembleSpec(kind="jordan", n=MC_N))


@pytest.fixture(scope="session")
def emp_zero_256(zero_256):
    return _timed("emp_zero_256", lambda: gd.empirical_density(zero_256, mc_config()))


@pytest.fixture(scope="session")
def emp_jordan_256(jordan_256):
    return _timed("emp_jordan_256",
                  lambda: gd.empirical_density(jordan_256, mc_config()))


@pytest.fixture(scope="session")
def pred_eps_zero_256(zero_256, emp_zero_256):
    return _timed("pred_eps_zero_256",
                  lambda: gd.predict_field(zero_256, emp_zero_256.grid, mode="eps",
                                           eps=MC_N ** -0.5, workers=WORKERS))


@pytest.fixture(scope="session")
def pred_eps_jordan_256(jordan_256, emp_jordan_256):
    return _timed("pred_eps_jordan_256",
                  lambda: gd.predict_field(jordan_256, emp_jordan_256.grid, mode="eps",
                                           eps=MC_N ** -0.5, workers=WORKERS))
