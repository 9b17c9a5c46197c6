"""Metrics compatible with a volume form, Levi-Civita data and curvature.

Orientation convention used throughout: the area 2-form has matrix
mu_ij = f * eps_ij with eps_12 = +1, i.e. mu = f dx^dy with f > 0.
A metric is compatible when sqrt(det g) = f pointwise; then nabla mu = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (
    Grid,
    MixedTensor,
    OneForm,
    ScalarField,
    SymTensor2,
    ContraSymTensor2,
    TwoForm,
    VectorField,
    _check_same_grid,
    integrate,
    partial,
)

EPS_12 = 1.0  # sign of eps_12; flipping it flips the sign of Omega and alpha


def _partial_raw(arr: np.ndarray, axis: int) -> np.ndarray:
    """Spectral partial of a stacked array (..., n, n) along x (1) or y (2)."""
    n = arr.shape[-1]
    ik = 2j * np.pi * np.fft.fftfreq(n) * n
    ik[n // 2] = 0.0
    spec = np.fft.fft2(arr)
    spec *= ik[:, None] if axis == 1 else ik[None, :]
    return np.fft.ifft2(spec).real


def _grad_raw(arr: np.ndarray) -> np.ndarray:
    """Stack (d_1, d_2) of a stacked array; derivative index first."""
    return np.stack([_partial_raw(arr, 1), _partial_raw(arr, 2)])


@dataclass(frozen=True, eq=False)
class VolumeForm:
    """Area form mu = f dx^dy with strictly positive density f."""

    density: ScalarField

    def __post_init__(self):
        fmin = float(np.min(self.density.values))
        if fmin <= 0.0:
            a, b = np.unravel_index(np.argmin(self.density.values), self.density.values.shape)
            raise ValueError(f"volume density must be positive; min {fmin} at lattice ({a}, {b})")

    @property
    def grid(self) -> Grid:
        return self.density.grid

    def total(self) -> float:
        return integrate(TwoForm(self.density))

    def matrix(self) -> np.ndarray:
        """mu_ij as a (2, 2, n, n) array."""
        f = self.density.values
        z = np.zeros_like(f)
        return np.stack([np.stack([z, EPS_12 * f]), np.stack([-EPS_12 * f, z])])


@dataclass(frozen=True, eq=False)
class Metric:
    """Riemannian metric with sqrt(det g) pinned to the volume density.

    Positive-definiteness is enforced at construction; compatibility is
    guaranteed by the factories (project_compatible, metric_path) and can be
    re-checked through compatibility_residual().
    """

    g11: ScalarField
    g12: ScalarField
    g22: ScalarField
    volume: VolumeForm

    def __post_init__(self):
        _check_same_grid(self.g11, self.g12, self.g22, self.volume.density)
        a = self.g11.values
        det = self.det_values()
        if np.min(a) <= 0.0 or np.min(det) <= 0.0:
            bad = np.argmin(np.where(a <= 0, a, det))
            i, j = np.unravel_index(bad, a.shape)
            raise ValueError(
                f"metric not positive-definite at lattice ({i}, {j}): "
                f"g11={a[i, j]:.6g}, det={det[i, j]:.6g}"
            )
        object.__setattr__(self, "_cache", {})

    @property
    def grid(self) -> Grid:
        return self.g11.grid

    def det_values(self) -> np.ndarray:
        return self.g11.values * self.g22.values - self.g12.values**2

    def stack(self) -> np.ndarray:
        a, b, c = self.g11.values, self.g12.values, self.g22.values
        return np.stack([np.stack([a, b]), np.stack([b, c])])

    def inverse_stack(self) -> np.ndarray:
        """g^{ij} as a (2, 2, n, n) array."""
        if "inv" not in self._cache:
            det = self.det_values()
            a, b, c = self.g11.values, self.g12.values, self.g22.values
            self._cache["inv"] = np.stack([np.stack([c, -b]), np.stack([-b, a])]) / det
        return self._cache["inv"]

    def compatibility_residual(self) -> float:
        """sup |sqrt(det g) - f| / sup |f|."""
        f = self.volume.density.values
        return float(np.max(np.abs(np.sqrt(self.det_values()) - f)) / np.max(np.abs(f)))

    def christoffel(self) -> "Christoffel":
        if "gamma" not in self._cache:
            self._cache["gamma"] = _christoffel_impl(self)
        return self._cache["gamma"]

    def scalar_curvature(self) -> ScalarField:
        if "scal" not in self._cache:
            self._cache["scal"] = _scalar_curvature_impl(self)
        return self._cache["scal"]

    def ricci_stack(self) -> np.ndarray:
        if "ricci" not in self._cache:
            self._cache["ricci"] = _ricci_impl(self)
        return self._cache["ricci"]


@dataclass(frozen=True, eq=False)
class Christoffel:
    """Levi-Civita symbols Gamma^k_ij, symmetric in (i, j)."""

    c111: ScalarField
    c112: ScalarField
    c122: ScalarField
    c211: ScalarField
    c212: ScalarField
    c222: ScalarField

    @property
    def grid(self) -> Grid:
        return self.c111.grid

    def stack(self) -> np.ndarray:
        """Gamma[k, i, j] of shape (2, 2, 2, n, n)."""
        g1 = np.stack(
            [
                np.stack([self.c111.values, self.c112.values]),
                np.stack([self.c112.values, self.c122.values]),
            ]
        )
        g2 = np.stack(
            [
                np.stack([self.c211.values, self.c212.values]),
                np.stack([self.c212.values, self.c222.values]),
            ]
        )
        return np.stack([g1, g2])

    @classmethod
    def from_stack(cls, grid: Grid, arr: np.ndarray) -> "Christoffel":
        return cls(
            ScalarField(grid, arr[0, 0, 0]),
            ScalarField(grid, arr[0, 0, 1]),
            ScalarField(grid, arr[0, 1, 1]),
            ScalarField(grid, arr[1, 0, 0]),
            ScalarField(grid, arr[1, 0, 1]),
            ScalarField(grid, arr[1, 1, 1]),
        )


def project_compatible(g_raw: SymTensor2, mu: VolumeForm) -> Metric:
    """Conformally rescale a positive-definite tensor so sqrt(det g) = f.

    Returns (f / sqrt(det g_raw)) * g_raw, which has determinant f^2 exactly;
    idempotent on already compatible metrics.
    """
    _check_same_grid(g_raw.c11, mu.density)
    a, b, c = g_raw.c11.values, g_raw.c12.values, g_raw.c22.values
    det = a * c - b * b
    if np.min(a) <= 0.0 or np.min(det) <= 0.0:
        bad = np.argmin(np.where(a <= 0, a, det))
        i, j = np.unravel_index(bad, a.shape)
        x, y = i / g_raw.grid.n, j / g_raw.grid.n
        raise ValueError(
            f"input tensor not positive-definite at ({x:.4f}, {y:.4f}) "
            f"[lattice ({i}, {j})]: g11={a[i, j]:.6g}, det={det[i, j]:.6g}"
        )
    scale = mu.density.values / np.sqrt(det)
    grid = g_raw.grid
    return Metric(
        ScalarField(grid, scale * a),
        ScalarField(grid, scale * b),
        ScalarField(grid, scale * c),
        mu,
    )


def flat_metric(grid: Grid, density: float = 1.0) -> Metric:
    """Euclidean metric scaled to match a constant volume density."""
    from .fields import constant_field

    mu = VolumeForm(constant_field(grid, density))
    one = constant_field(grid, density)  # det = density^2, sqrt = f
    zero = constant_field(grid, 0.0)
    return Metric(one, zero, one, mu)


def _christoffel_impl(g: Metric) -> Christoffel:
    gs = g.stack()
    ginv = g.inverse_stack()
    dg = _grad_raw(gs)  # dg[m, p, q] = d_m g_pq
    # T[l, i, j] = d_i g_lj + d_j g_li - d_l g_ij
    a = dg.transpose(1, 0, 2, 3, 4)  # a[l, i, j] = d_i g_lj
    T = a + a.transpose(0, 2, 1, 3, 4) - dg
    gamma = 0.5 * np.einsum("klab,lijab->kijab", ginv, T)
    return Christoffel.from_stack(g.grid, gamma)


def christoffel(g: Metric) -> Christoffel:
    """Levi-Civita connection coefficients of g (cached on the metric)."""
    return g.christoffel()


def metricity_residual(g: Metric) -> float:
    """sup |nabla_k g_ij| over all components; ~0 certifies Levi-Civita."""
    gs = g.stack()
    G = g.christoffel().stack()
    dg = _grad_raw(gs)
    corr = np.einsum("lkiab,ljab->kijab", G, gs) + np.einsum("lkjab,ilab->kijab", G, gs)
    return float(np.max(np.abs(dg - corr)))


def _scalar_curvature_impl(g: Metric) -> ScalarField:
    G = g.christoffel().stack()
    # R^l_{212} = d_1 Gamma^l_22 - d_2 Gamma^l_12 + Gamma^l_1m Gamma^m_22
    #             - Gamma^l_2m Gamma^m_12
    d1_g22 = _partial_raw(G[:, 1, 1], 1)
    d2_g12 = _partial_raw(G[:, 0, 1], 2)
    quad = np.einsum("lmab,mab->lab", G[:, 0], G[:, 1, 1]) - np.einsum(
        "lmab,mab->lab", G[:, 1], G[:, 0, 1]
    )
    r_up = d1_g22 - d2_g12 + quad
    r1212 = g.g11.values * r_up[0] + g.g12.values * r_up[1]
    return ScalarField(g.grid, 2.0 * r1212 / g.det_values())


def scalar_curvature(g: Metric) -> ScalarField:
    """Scalar curvature S (twice the Gauss curvature), from R_1212."""
    return g.scalar_curvature()


def _ricci_impl(g: Metric) -> np.ndarray:
    G = g.christoffel().stack()
    # R_kj = d_i Gamma^i_jk - d_j Gamma^i_ik + Gamma^i_im Gamma^m_jk
    #        - Gamma^i_jm Gamma^m_ik   (every term symmetric in j, k)
    term1 = _partial_raw(G[0], 1) + _partial_raw(G[1], 2)  # d_i Gamma^i_jk
    trG = np.einsum("iimab->mab", G)  # Gamma^i_im
    term2 = _grad_raw(trG)  # d_j Gamma^i_ik at [j, k]
    term3 = np.einsum("mab,mjkab->jkab", trG, G)
    term4 = np.einsum("ijmab,mikab->kjab", G, G)
    return term1 - term2 + term3 - term4


def ricci_relation_residual(g: Metric) -> float:
    """sup |R_ij - (S/2) g_ij| / sup |S| (the 2D Ricci identity)."""
    ric = g.ricci_stack()
    s = g.scalar_curvature().values
    defect = ric - 0.5 * s * g.stack()
    return float(np.max(np.abs(defect)) / max(np.max(np.abs(s)), 1e-30))


def cov_deriv_vector(X: VectorField, g: Metric) -> np.ndarray:
    """nabla_i X^k as array [i, k]."""
    Xs = X.stack()
    G = g.christoffel().stack()
    dX = _grad_raw(Xs)  # [i, k]
    return dX + np.einsum("kilab,lab->ikab", G, Xs)


def cov_deriv_oneform(b: OneForm, g: Metric) -> np.ndarray:
    """nabla_i b_j as array [i, j]."""
    bs = b.stack()
    G = g.christoffel().stack()
    db = _grad_raw(bs)  # [i, j]
    return db - np.einsum("lijab,lab->ijab", G, bs)


def covariant_divergence(h: ContraSymTensor2, g: Metric) -> VectorField:
    """nabla_j h^{kj} for a symmetric contravariant 2-tensor."""
    hs = h.stack()
    G = g.christoffel().stack()
    d1 = _partial_raw(hs[:, 0], 1) + _partial_raw(hs[:, 1], 2)  # d_j h^{kj}
    d2 = np.einsum("kjlab,ljab->kab", G, hs)
    d3 = np.einsum("jjlab,klab->kab", G, hs)
    out = d1 + d2 + d3
    grid = g.grid
    return VectorField(ScalarField(grid, out[0]), ScalarField(grid, out[1]))


def divergence_vector(Y: VectorField, g: Metric) -> ScalarField:
    """Covariant divergence nabla_k Y^k."""
    Ys = Y.stack()
    G = g.christoffel().stack()
    div = _partial_raw(Ys[0], 1) + _partial_raw(Ys[1], 2)
    div = div + np.einsum("kklab,lab->ab", G, Ys)
    return ScalarField(g.grid, div)


def trace_sym2(h: SymTensor2, g: Metric) -> ScalarField:
    """g^{ij} h_ij."""
    tr = np.einsum("ijab,ijab->ab", g.inverse_stack(), h.stack())
    return ScalarField(g.grid, tr)


def raise_sym2(h: SymTensor2, g: Metric) -> ContraSymTensor2:
    """h^{ij} = g^{ik} g^{jl} h_kl."""
    ginv = g.inverse_stack()
    up = np.einsum("ikab,jlab,klab->ijab", ginv, ginv, h.stack())
    return ContraSymTensor2.from_stack(g.grid, up)


def lower_vector(X: VectorField, g: Metric) -> OneForm:
    low = np.einsum("ijab,jab->iab", g.stack(), X.stack())
    return OneForm(ScalarField(g.grid, low[0]), ScalarField(g.grid, low[1]))


def raise_oneform(a: OneForm, g: Metric) -> VectorField:
    up = np.einsum("ijab,jab->iab", g.inverse_stack(), a.stack())
    return VectorField(ScalarField(g.grid, up[0]), ScalarField(g.grid, up[1]))


def l2_norm_vector(X: VectorField, g: Metric) -> float:
    """sqrt( int g(X, X) mu )."""
    xs = X.stack()
    f = g.volume.density.values
    return float(np.sqrt(np.mean(np.einsum("ijab,iab,jab->ab", g.stack(), xs, xs) * f)))


def l2_norm_sym2(h: SymTensor2, g: Metric) -> float:
    """sqrt( int |h|_g^2 mu ) with both indices raised by g."""
    hup = raise_sym2(h, g).stack()
    f = g.volume.density.values
    return float(np.sqrt(np.mean(np.einsum("ijab,ijab->ab", hup, h.stack()) * f)))


def complex_structure(g: Metric) -> MixedTensor:
    """Almost complex structure I with mu(X, IX) > 0; I = -(g^{-1} mu).

    For the flat metric with unit density this is rotation by +pi/2,
    the matrix [[0, -1], [1, 0]].
    """
    I = -np.einsum("ikab,kjab->ijab", g.inverse_stack(), g.volume.matrix())
    return MixedTensor.from_stack(g.grid, I)


def laplace_beltrami(u: ScalarField, g: Metric) -> ScalarField:
    """Analyst's Laplace-Beltrami operator (negative spectrum on the torus)."""
    f = g.volume.density.values
    du = np.stack([partial(u, 1).values, partial(u, 2).values])
    w = np.einsum("ijab,jab->iab", g.inverse_stack(), du)
    div = _partial_raw(f * w[0], 1) + _partial_raw(f * w[1], 2)
    return ScalarField(g.grid, div / f)


def metric_lie_derivative(X: VectorField, g: Metric) -> SymTensor2:
    """(L_X g)_ij by the coordinate formula (no connection used)."""
    gs = g.stack()
    Xs = X.stack()
    dg = _grad_raw(gs)
    dX = _grad_raw(Xs)  # [i, k] = d_i X^k
    term1 = np.einsum("kab,kijab->ijab", Xs, dg)
    term2 = np.einsum("kjab,ikab->ijab", gs, dX)
    term3 = np.einsum("ikab,jkab->ijab", gs, dX)
    return SymTensor2.from_stack(g.grid, term1 + term2 + term3)


def metric_lie_derivative_nabla(X: VectorField, g: Metric) -> SymTensor2:
    """(L_X g)_ij = nabla_i X_j + nabla_j X_i (uses that g is parallel)."""
    nab = cov_deriv_oneform(lower_vector(X, g), g)
    return SymTensor2.from_stack(g.grid, nab + nab.transpose(1, 0, 2, 3))


def linearized_scalar_curvature(g: Metric, h: SymTensor2) -> ScalarField:
    """Derivative of g -> S_g in the direction h (full three-term formula).

    Equals -Lap(tr_g h) + nabla_i nabla_j h^{ij} - R_ij h^{ij} with the
    analyst's Laplacian; for g-trace-free h it reduces to the double
    divergence alone (the Ricci term is pure trace in 2D).
    """
    tr = trace_sym2(h, g)
    lap_tr = laplace_beltrami(tr, g)
    hup = raise_sym2(h, g)
    divdiv = divergence_vector(covariant_divergence(hup, g), g)
    ric_h = np.einsum("ijab,ijab->ab", g.ricci_stack(), hup.stack())
    return ScalarField(g.grid, -lap_tr.values + divdiv.values - ric_h)
