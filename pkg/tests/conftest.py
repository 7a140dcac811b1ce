"""
Shared fixtures: case-study geometry and fields, computed once per session
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from slitpaths.detection import WaveComponents, perfect_distributions
from slitpaths.geometry import QuadratureSpec, make_geometry, make_grid
from slitpaths.propagators import compute_wave_components

SMALL_CONFIG = """\
source_distance = "1mm"
screen_distance = "1mm"
slit_separation = "2000nm"
slit_width = "500nm"
lambda = "810nm"
y_min = "-1.75mm"
y_max = "1.75mm"
n_points = 201
symmetric = true
"""


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep SLITPATHS_* settings from the developer's shell out of the tests"""
    for key in list(os.environ):
        if key.startswith('SLITPATHS_'):
            monkeypatch.delenv(key)


@pytest.fixture(scope='session')
def geom():
    return make_geometry(1e-3, 1e-3, 2000e-9, 500e-9, 810e-9)


@pytest.fixture(scope='session')
def study_grid():
    return make_grid(-1.75e-3, 1.75e-3, 7001, symmetric=True)


@pytest.fixture(scope='session')
def quad():
    return QuadratureSpec()


@pytest.fixture(scope='session')
def study_components(geom, study_grid, quad):
    return compute_wave_components(geom, study_grid, quad)


@pytest.fixture(scope='session')
def study_distributions(study_components):
    return perfect_distributions(study_components)


@pytest.fixture
def random_components():
    """Factory for random complex fields on a small grid"""
    def build(rng, n_points=16):
        grid = make_grid(-1.0, 1.0, n_points)
        shape = (3, n_points)
        values = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        values *= rng.uniform(0.01, 10.0, size=(3, 1))
        return WaveComponents(grid, *values)
    return build


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / 'small.toml'
    path.write_text(SMALL_CONFIG)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
