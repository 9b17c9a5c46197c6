import numpy as np
import pytest

import torusgeom as tg
from torusgeom import sampling


@pytest.fixture(scope="session")
def grid():
    return tg.Grid(64)


@pytest.fixture(scope="session")
def flat(grid):
    return tg.flat_metric(grid)


def make_setup(grid, seed, harmonic=False):
    """Random (g, X, h) triple; volume alternates flat/random across seeds."""
    if seed % 3 == 1:
        vol = sampling.random_volume_form(grid, seed + 300)
    else:
        vol = sampling.flat_volume_form(grid)
    g = sampling.random_compatible_metric(grid, seed, volume=vol)
    h = sampling.random_tangent(g, seed + 1)
    harm = sampling.random_harmonic(seed + 5) if harmonic else (0.0, 0.0)
    X = tg.div_free_from_stream(sampling.random_stream(grid, seed + 2), harm, vol)
    return g, X, h


def pair_scale(g, X, h):
    return max(tg.riemann.l2_norm_vector(X.vector, g) * tg.riemann.l2_norm_sym2(h.h, g), 1e-30)


def sup(arr):
    return float(np.max(np.abs(arr)))
