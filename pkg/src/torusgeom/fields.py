"""Periodic grids and spectral tensor fields on the unit torus [0,1)^2.

All fields are sampled on an N x N lattice x_a = a/N, y_b = b/N (no duplicated
endpoint) and interpreted as smooth 1-periodic functions.  Differentiation,
interpolation and quadrature are Fourier-based, so they are exact for
band-limited data and spectrally accurate for analytic data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _as_float_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Grid:
    """Uniform periodic lattice with n points per axis (n even, >= 8)."""

    n: int

    def __post_init__(self):
        if self.n < 8 or self.n % 2 != 0:
            raise ValueError(f"grid needs n even and >= 8, got n={self.n}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.n

    def axis_points(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    def meshes(self):
        """Coordinate arrays X, Y of shape (n, n), indexing 'ij'."""
        a = self.axis_points()
        return np.meshgrid(a, a, indexing="ij")

    def int_freqs(self) -> np.ndarray:
        """Integer Fourier frequencies in FFT order (0..n/2-1, -n/2..-1)."""
        return (np.fft.fftfreq(self.n) * self.n).astype(np.int64)


def _check_same_grid(*fields):
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValueError(f"grid mismatch: {f.grid} vs {grid}")
    return grid


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real samples of a smooth doubly 1-periodic function."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = _as_float_array(self.values)
        if vals.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"expected shape {(self.grid.n,) * 2}, got {vals.shape}")
        object.__setattr__(self, "values", vals)

    # Pointwise arithmetic; other may be a ScalarField or a scalar.
    def _binop(self, other, op):
        if isinstance(other, ScalarField):
            _check_same_grid(self, other)
            return ScalarField(self.grid, op(self.values, other.values))
        return ScalarField(self.grid, op(self.values, other))

    def __add__(self, other):
        return self._binop(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, np.subtract)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, np.divide)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: b / a)

    def __neg__(self):
        return ScalarField(self.grid, -self.values)

    def mean(self) -> float:
        return float(np.mean(self.values))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def constant_field(grid: Grid, value: float) -> ScalarField:
    return ScalarField(grid, np.full((grid.n, grid.n), float(value)))


def field_from_function(grid: Grid, fn) -> ScalarField:
    """Sample fn(x, y) on the lattice; fn must accept meshgrid arrays."""
    X, Y = grid.meshes()
    return ScalarField(grid, fn(X, Y))


@dataclass(frozen=True, eq=False)
class VectorField:
    """Contravariant components X^1, X^2."""

    x1: ScalarField
    x2: ScalarField

    def __post_init__(self):
        _check_same_grid(self.x1, self.x2)

    @property
    def grid(self) -> Grid:
        return self.x1.grid

    def stack(self) -> np.ndarray:
        return np.stack([self.x1.values, self.x2.values])


@dataclass(frozen=True, eq=False)
class OneForm:
    """Covariant components a_1, a_2."""

    a1: ScalarField
    a2: ScalarField

    def __post_init__(self):
        _check_same_grid(self.a1, self.a2)

    @property
    def grid(self) -> Grid:
        return self.a1.grid

    def stack(self) -> np.ndarray:
        return np.stack([self.a1.values, self.a2.values])


@dataclass(frozen=True, eq=False)
class SymTensor2:
    """Symmetric covariant 2-tensor, components h_11, h_12 (= h_21), h_22."""

    c11: ScalarField
    c12: ScalarField
    c22: ScalarField

    def __post_init__(self):
        _check_same_grid(self.c11, self.c12, self.c22)

    @property
    def grid(self) -> Grid:
        return self.c11.grid

    def stack(self) -> np.ndarray:
        """Component-first array of shape (2, 2, n, n)."""
        a, b, c = self.c11.values, self.c12.values, self.c22.values
        return np.stack([np.stack([a, b]), np.stack([b, c])])

    @classmethod
    def from_stack(cls, grid: Grid, arr: np.ndarray) -> "SymTensor2":
        return cls(
            ScalarField(grid, arr[0, 0]),
            ScalarField(grid, arr[0, 1]),
            ScalarField(grid, arr[1, 1]),
        )

    def max_abs(self) -> float:
        return max(self.c11.max_abs(), self.c12.max_abs(), self.c22.max_abs())


@dataclass(frozen=True, eq=False)
class ContraSymTensor2:
    """Symmetric contravariant 2-tensor, components h^11, h^12, h^22."""

    c11: ScalarField
    c12: ScalarField
    c22: ScalarField

    def __post_init__(self):
        _check_same_grid(self.c11, self.c12, self.c22)

    @property
    def grid(self) -> Grid:
        return self.c11.grid

    def stack(self) -> np.ndarray:
        a, b, c = self.c11.values, self.c12.values, self.c22.values
        return np.stack([np.stack([a, b]), np.stack([b, c])])

    @classmethod
    def from_stack(cls, grid: Grid, arr: np.ndarray) -> "ContraSymTensor2":
        return cls(
            ScalarField(grid, arr[0, 0]),
            ScalarField(grid, arr[0, 1]),
            ScalarField(grid, arr[1, 1]),
        )


@dataclass(frozen=True, eq=False)
class MixedTensor:
    """(1,1)-tensor T^i_j, four components, upper index first."""

    t11: ScalarField
    t12: ScalarField
    t21: ScalarField
    t22: ScalarField

    def __post_init__(self):
        _check_same_grid(self.t11, self.t12, self.t21, self.t22)

    @property
    def grid(self) -> Grid:
        return self.t11.grid

    def stack(self) -> np.ndarray:
        return np.stack(
            [
                np.stack([self.t11.values, self.t12.values]),
                np.stack([self.t21.values, self.t22.values]),
            ]
        )

    @classmethod
    def from_stack(cls, grid: Grid, arr: np.ndarray) -> "MixedTensor":
        return cls(*(ScalarField(grid, arr[i, j]) for i in range(2) for j in range(2)))


@dataclass(frozen=True, eq=False)
class TwoForm:
    """2-form w = c12 dx^dy, stored by its single coefficient."""

    c12: ScalarField

    @property
    def grid(self) -> Grid:
        return self.c12.grid


def partial(f: ScalarField, axis: int) -> ScalarField:
    """Spectral partial derivative along axis 1 (x) or 2 (y).

    Exact for band-limited fields with max wavenumber < n/2; the Nyquist
    mode is dropped (its odd derivative is not representable on the grid).
    """
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    n = f.grid.n
    ik = 2j * np.pi * np.fft.fftfreq(n) * n
    ik[n // 2] = 0.0
    spec = np.fft.fft2(f.values)
    spec *= ik[:, None] if axis == 1 else ik[None, :]
    return ScalarField(f.grid, np.fft.ifft2(spec).real)


def integrate(w: TwoForm) -> float:
    """Integral of w over the torus; the lattice mean is exact quadrature
    for trig polynomials below the Nyquist frequency."""
    return w.c12.mean()


def laplacian_flat(f: ScalarField) -> ScalarField:
    """Flat Laplacian d11 + d22 (one FFT round trip)."""
    n = f.grid.n
    k = 2.0 * np.pi * np.fft.fftfreq(n) * n
    k2 = k[:, None] ** 2 + k[None, :] ** 2
    spec = np.fft.fft2(f.values) * (-k2)
    return ScalarField(f.grid, np.fft.ifft2(spec).real)


def random_band_limited(
    grid: Grid, seed: int, kmax: int, decay: float, zero_mean: bool = False
) -> ScalarField:
    """Random real field with Fourier support in |k|_inf <= kmax.

    Coefficient magnitudes scale like decay^|k|; the draw order is fixed by
    (seed, kmax, decay) only, so the same seed produces samples of the same
    continuum function on every grid size (used by the convergence suites).
    """
    n = grid.n
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    if kmax >= n // 4:
        raise ValueError(
            f"kmax={kmax} too large for n={n}: need kmax < n/4 so products "
            "of two fields stay resolvable"
        )
    rng = np.random.default_rng(seed)
    spec = np.zeros((n, n), dtype=complex)
    dc = rng.standard_normal()
    spec[0, 0] = 0.0 if zero_mean else dc
    # half-space of modes: p > 0, or p == 0 and q > 0; conjugates fill the rest
    for p in range(0, kmax + 1):
        qlo = 1 if p == 0 else -kmax
        for q in range(qlo, kmax + 1):
            re, im = rng.standard_normal(2)
            c = 0.5 * (re + 1j * im) * decay ** math.hypot(p, q)
            spec[p % n, q % n] += c
            spec[(-p) % n, (-q) % n] += np.conj(c)
    values = np.fft.ifft2(spec).real * n * n
    return ScalarField(grid, values)


class Interpolator:
    """Trigonometric interpolation of one or more fields at arbitrary points.

    Packs the Fourier coefficients once; evaluation at m points costs one
    (m x n) @ (n x n) product per field.  The Nyquist column is evaluated as
    a cosine so the interpolant is real and reproduces the lattice samples.
    """

    def __init__(self, fields):
        fields = list(fields)
        self.grid = _check_same_grid(*fields)
        n = self.grid.n
        coeffs = np.stack([np.fft.fft2(f.values) / (n * n) for f in fields])
        self._nfields = len(fields)
        # packed (n, nfields * n) so evaluation is a single matmul
        self._packed = np.ascontiguousarray(
            coeffs.transpose(1, 0, 2).reshape(n, self._nfields * n)
        )

    def _basis(self, coords: np.ndarray) -> np.ndarray:
        # e[:, j] = exp(2 pi i f_j x) in FFT frequency order, built by
        # recurrence (much cheaper than one exp per mode); Nyquist as cosine
        n = self.grid.n
        z = np.exp(2j * np.pi * coords)
        e = np.empty((coords.shape[0], n), dtype=complex)
        e[:, 0] = 1.0
        for k in range(1, n // 2):
            np.multiply(e[:, k - 1], z, out=e[:, k])
        e[:, n // 2 + 1 :] = np.conj(e[:, 1 : n // 2][:, ::-1])
        e[:, n // 2] = (e[:, n // 2 - 1] * z).real
        return e

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Evaluate all fields at points of shape (m, 2); returns (nfields, m)."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        n = self.grid.n
        ex = self._basis(pts[:, 0])
        ey = self._basis(pts[:, 1])
        tmp = (ex @ self._packed).reshape(pts.shape[0], self._nfields, n)
        return np.einsum("mfl,ml->fm", tmp, ey).real


def interpolate(f: ScalarField, point) -> float | np.ndarray:
    """Fourier interpolation of f at a point (x, y) or an (m, 2) array."""
    pts = np.asarray(point, dtype=np.float64)
    single = pts.ndim == 1
    vals = Interpolator([f])(pts)[0]
    return float(vals[0]) if single else vals


def region_integral(f: ScalarField, rect, order: int = 32) -> float:
    """Gauss-Legendre integral of f(x, y) dx dy over an axis-aligned rectangle.

    rect = (x0, x1, y0, y1) in lifted coordinates (may exceed [0,1)).
    Spectrally convergent for analytic f since the interpolant is entire.
    """
    x0, x1, y0, y1 = rect
    nodes, weights = np.polynomial.legendre.leggauss(order)
    xs = 0.5 * (x1 - x0) * (nodes + 1.0) + x0
    ys = 0.5 * (y1 - y0) * (nodes + 1.0) + y0
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    vals = Interpolator([f])(pts)[0].reshape(order, order)
    w2 = np.outer(weights, weights)
    return float((vals * w2).sum() * 0.25 * (x1 - x0) * (y1 - y0))
