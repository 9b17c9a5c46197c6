import numpy as np
import pytest

import torusgeom as tg
from torusgeom.fields import Grid, ScalarField, TwoForm

from conftest import sup


def test_grid_rejects_small_or_odd():
    with pytest.raises(ValueError):
        Grid(6)
    with pytest.raises(ValueError):
        Grid(33)


def test_scalar_field_shape_checked(grid):
    with pytest.raises(ValueError):
        ScalarField(grid, np.zeros((4, 4)))


def test_partial_of_constant_is_zero(grid):
    f = tg.constant_field(grid, 1.0)
    assert sup(tg.partial(f, 1).values) == 0.0
    assert sup(tg.partial(f, 2).values) == 0.0


def test_partial_trig_closed_form():
    grid = Grid(32)
    f = tg.field_from_function(grid, lambda X, Y: np.sin(2 * np.pi * X))
    want = tg.field_from_function(grid, lambda X, Y: 2 * np.pi * np.cos(2 * np.pi * X))
    assert sup(tg.partial(f, 1).values - want.values) <= 1e-12


def test_partial_matches_high_resolution_oracle(grid):
    # oracle: the same operator at 4x resolution, restricted to the coarse lattice
    fn = lambda X, Y: np.exp(np.sin(2 * np.pi * X) * np.cos(2 * np.pi * Y))
    fine = Grid(256)
    coarse = tg.partial(tg.field_from_function(grid, fn), 2)
    reference = tg.partial(tg.field_from_function(fine, fn), 2)
    assert sup(coarse.values - reference.values[::4, ::4]) <= 1e-10


def test_partial_rejects_bad_axis(grid):
    with pytest.raises(ValueError):
        tg.partial(tg.constant_field(grid, 0.0), 3)


def test_partials_commute(grid):
    f = tg.random_band_limited(grid, 4, 10, 0.7)
    d12 = tg.partial(tg.partial(f, 1), 2)
    d21 = tg.partial(tg.partial(f, 2), 1)
    assert sup(d12.values - d21.values) <= 1e-11 * f.max_abs()


def test_integrate_constant(grid):
    assert tg.integrate(TwoForm(tg.constant_field(grid, 2.5))) == pytest.approx(2.5, abs=1e-15)


def test_integrate_single_mode_cancels(grid):
    w = TwoForm(tg.field_from_function(grid, lambda X, Y: np.sin(2 * np.pi * X)))
    assert abs(tg.integrate(w)) <= 1e-14


def test_integrate_product_matches_high_resolution_oracle(grid):
    fine = Grid(256)
    coarse_val = tg.integrate(
        TwoForm(tg.random_band_limited(grid, 5, 10, 0.6) * tg.random_band_limited(grid, 6, 10, 0.6))
    )
    fine_val = tg.integrate(
        TwoForm(tg.random_band_limited(fine, 5, 10, 0.6) * tg.random_band_limited(fine, 6, 10, 0.6))
    )
    assert abs(coarse_val - fine_val) <= 1e-12


def test_integrate_derivative_has_no_boundary_term(grid):
    f = tg.random_band_limited(grid, 7, 10, 0.7)
    assert abs(tg.integrate(TwoForm(tg.partial(f, 1)))) <= 1e-12


def test_parseval(grid):
    f = tg.random_band_limited(grid, 11, 10, 0.7)
    coef = np.fft.fft2(f.values) / grid.n**2
    lhs = tg.integrate(TwoForm(f * f))
    assert abs(lhs - float(np.sum(np.abs(coef) ** 2))) <= 1e-11


def test_random_band_limited_kmax0_is_constant(grid):
    f = tg.random_band_limited(grid, 2, 0, 0.5)
    assert np.ptp(f.values) == 0.0


def test_random_band_limited_deterministic(grid):
    a = tg.random_band_limited(grid, 9, 4, 0.5)
    b = tg.random_band_limited(grid, 9, 4, 0.5)
    assert np.array_equal(a.values, b.values)


def test_random_band_limited_spectrum_support(grid):
    # oracle: FFT of the output vanishes outside the |k|_inf <= kmax box
    kmax = 4
    spec = np.fft.fft2(tg.random_band_limited(grid, 1, kmax, 0.5).values)
    outside = np.ones((grid.n, grid.n), dtype=bool)
    for p in range(-kmax, kmax + 1):
        for q in range(-kmax, kmax + 1):
            outside[p % grid.n, q % grid.n] = False
    assert sup(spec[outside]) <= 1e-12 * sup(spec)


def test_random_band_limited_zero_mean_option(grid):
    f = tg.random_band_limited(grid, 3, 4, 0.5, zero_mean=True)
    assert abs(f.mean()) <= 1e-14


def test_random_band_limited_rejects_large_kmax(grid):
    with pytest.raises(ValueError):
        tg.random_band_limited(grid, 0, grid.n // 4, 0.5)


def test_interpolate_reproduces_lattice_samples(grid):
    f = tg.random_band_limited(grid, 13, 12, 0.7)
    for a, b in [(0, 0), (5, 9), (33, 60)]:
        got = tg.interpolate(f, (a / grid.n, b / grid.n))
        assert abs(got - f.values[a, b]) <= 1e-13


def test_interpolate_cosine_closed_form(grid):
    f = tg.field_from_function(grid, lambda X, Y: np.cos(2 * np.pi * Y))
    assert abs(tg.interpolate(f, (0.3, 0.25))) <= 1e-13


def test_interpolate_matches_mode_sum_oracle(grid):
    f = tg.random_band_limited(grid, 17, 6, 0.5)
    pts = np.random.default_rng(0).random((100, 2))
    spec = np.fft.fft2(f.values) / grid.n**2
    freqs = np.fft.fftfreq(grid.n) * grid.n

    def mode_sum(p):
        ex = np.exp(2j * np.pi * freqs * p[0])
        ey = np.exp(2j * np.pi * freqs * p[1])
        ex[grid.n // 2] = np.cos(np.pi * grid.n * p[0])
        ey[grid.n // 2] = np.cos(np.pi * grid.n * p[1])
        return float(np.real(ex @ spec @ ey))

    got = tg.interpolate(f, pts)
    want = np.array([mode_sum(p) for p in pts])
    assert sup(got - want) <= 1e-12


def test_region_integral_closed_form(grid):
    # int sin(2 pi x) cos(2 pi y) over [a,b] x [c,d]
    f = tg.field_from_function(grid, lambda X, Y: np.sin(2 * np.pi * X) * np.cos(2 * np.pi * Y))
    a, b, c, d = 0.1, 0.45, 0.2, 0.8
    got = tg.region_integral(f, (a, b, c, d), order=32)
    want = (
        (np.cos(2 * np.pi * a) - np.cos(2 * np.pi * b))
        * (np.sin(2 * np.pi * d) - np.sin(2 * np.pi * c))
        / (2 * np.pi) ** 2
    )
    assert abs(got - want) <= 1e-12
