"""Divergence-free fields, flows of volume-preserving maps, and Lemma-1 data.

A divergence-free field is encoded by its flux 1-form X . mu = d(psi) +
a dx + b dy (stream function plus harmonic part); with eps_12 = +1 the
components are X^1 = (d2 psi + b)/f and X^2 = -(d1 psi + a)/f.  Group
elements near the identity are realized as RK4 flows of such fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import (
    Grid,
    Interpolator,
    OneForm,
    ScalarField,
    SymTensor2,
    VectorField,
    partial,
)
from .riemann import (
    Metric,
    VolumeForm,
    _grad_raw,
    cov_deriv_vector,
    covariant_divergence,
    metric_lie_derivative,
    raise_sym2,
    trace_sym2,
)
from .symplectic import TangentVector, tracefree_project

FLOW_MAX_DT = 1e-2
FLOW_VOLUME_LIMIT = 1e-4


@dataclass(frozen=True, eq=False)
class DivFreeField:
    """mu-divergence-free vector field with stream and harmonic data."""

    stream: ScalarField
    harmonic: tuple[float, float]
    volume: VolumeForm

    def __post_init__(self):
        if abs(self.stream.mean()) > 1e-12 * max(self.stream.max_abs(), 1.0):
            raise ValueError("stream function must have zero mean")
        a, b = self.harmonic
        f = self.volume.density.values
        flux1 = partial(self.stream, 1).values + a
        flux2 = partial(self.stream, 2).values + b
        vec = VectorField(
            ScalarField(self.grid, flux2 / f), ScalarField(self.grid, -flux1 / f)
        )
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "_flux", np.stack([flux1, flux2]))

    @property
    def grid(self) -> Grid:
        return self.stream.grid

    def closedness_residual(self) -> float:
        """sup |d(X . mu)|; zero up to the spectral commutator."""
        from .riemann import _partial_raw

        d = _partial_raw(self._flux[1], 1) - _partial_raw(self._flux[0], 2)
        return float(np.max(np.abs(d)))

    def scaled(self, c: float) -> "DivFreeField":
        a, b = self.harmonic
        return DivFreeField(
            ScalarField(self.grid, c * self.stream.values), (c * a, c * b), self.volume
        )


def div_free_from_stream(
    psi: ScalarField, harmonic: tuple[float, float], mu: VolumeForm
) -> DivFreeField:
    """Build the unique X with X . mu = d(psi) + harmonic_1 dx + harmonic_2 dy."""
    field = DivFreeField(psi, (float(harmonic[0]), float(harmonic[1])), mu)
    res = field.closedness_residual()
    if res > 1e-11 * max(psi.max_abs(), abs(harmonic[0]), abs(harmonic[1]), 1.0):
        raise ValueError(f"divergence-free reconstruction failed: d(X.mu) = {res:.3e}")
    return field


def fundamental_vector(X: DivFreeField, g: Metric, trace_tol: float = 1e-9) -> TangentVector:
    """Infinitesimal action X.g = -L_X g; g-trace-free for compatible g.

    The trace is asserted, not projected: a residual above trace_tol means
    the compatibility precondition is broken.  The default tolerance is for
    desk-scale grids (N >= 64); coarse grids alias harder and may pass a
    looser bound explicitly.
    """
    lie = metric_lie_derivative(X.vector, g)
    h = SymTensor2.from_stack(g.grid, -lie.stack())
    scale = max(h.max_abs(), 1e-30)
    tr = trace_sym2(h, g).max_abs()
    if tr > trace_tol * max(scale, 1.0):
        raise ValueError(
            f"-L_X g has g-trace {tr:.3e}; metric is not volume-compatible "
            "or X is not divergence-free"
        )
    return TangentVector(g, h, max(trace_tol, 1e-10))


def pairing_kappa(X: DivFreeField, alpha: OneForm) -> float:
    """Duality pairing int (X . alpha) mu; descends to classes mod exact forms."""
    f = X.volume.density.values
    xs = X.vector.stack()
    return float(np.mean((xs[0] * alpha.a1.values + xs[1] * alpha.a2.values) * f))


def lemma1_rhs(g: Metric, X: DivFreeField, h: TangentVector) -> float:
    """- int X^i mu_ik (nabla_j h^{kj}) mu  (h raised twice by g)."""
    y = covariant_divergence(raise_sym2(h.h, g), g).stack()
    xs = X.vector.stack()
    f = g.volume.density.values
    return float(-np.mean(f * f * (xs[0] * y[1] - xs[1] * y[0])))


def skew_defect_mu_h(g: Metric, h: TangentVector) -> float:
    """sup of the antisymmetric part of mu_ik h^k_j (zero for trace-free h)."""
    mixed = np.einsum(
        "ikab,klab,ljab->ijab", g.volume.matrix(), g.inverse_stack(), h.h.stack()
    )
    return float(np.max(np.abs(mixed[0, 1] - mixed[1, 0])))


def integration_by_parts_residual(g: Metric, X: DivFreeField, h: TangentVector) -> float:
    """| int (nabla_j X^i) mu_ik h^{kj} mu + int X^i mu_ik nabla_j h^{kj} mu |."""
    nab = cov_deriv_vector(X.vector, g)  # [j, i] = nabla_j X^i
    hup = raise_sym2(h.h, g).stack()
    mu = g.volume.matrix()
    f = g.volume.density.values
    lhs = float(np.mean(np.einsum("jiab,ikab,kjab->ab", nab, mu, hup) * f))
    return abs(lhs - lemma1_rhs(g, X, h))


@dataclass(frozen=True, eq=False)
class DiscreteDiffeo:
    """Volume-preserving map sampled on the lattice, with its inverse.

    forward/inverse hold the images of the lattice points in lifted
    coordinates, shape (2, n, n).  The inverse is computed by reverse-time
    flow, not by map inversion.  det_forward, when present, is det DPhi at
    the lattice from the variational (tangent-map) flow, which is RK4-limited
    rather than limited by re-differentiating the sampled map.
    """

    grid: Grid
    forward: np.ndarray
    inverse: np.ndarray
    volume: VolumeForm
    det_forward: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "forward", np.asarray(self.forward, dtype=np.float64))
        object.__setattr__(self, "inverse", np.asarray(self.inverse, dtype=np.float64))

    def _mesh(self) -> np.ndarray:
        X, Y = self.grid.meshes()
        return np.stack([X, Y])

    def _displacement_fields(self, samples: np.ndarray):
        mesh = self._mesh()
        d = samples - mesh
        return [ScalarField(self.grid, d[0]), ScalarField(self.grid, d[1])]

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Evaluate the forward map at arbitrary points (m, 2)."""
        disp = Interpolator(self._displacement_fields(self.forward))(points)
        return np.asarray(points) + disp.T

    def apply_inverse(self, points: np.ndarray) -> np.ndarray:
        disp = Interpolator(self._displacement_fields(self.inverse))(points)
        return np.asarray(points) + disp.T

    def volume_defect(self) -> float:
        """sup |f(Phi(x)) det DPhi(x) - f(x)| / sup f.

        Uses the variational-flow determinant when available; otherwise the
        Jacobian comes from spectral derivatives of the sampled displacement
        (which adds a resampling error on top of the RK4 one).
        """
        if self.det_forward is not None:
            det = self.det_forward
        else:
            d = self.forward - self._mesh()
            grad = _grad_raw(d)  # [i, k] = d_i of displacement component k
            jac = grad.transpose(1, 0, 2, 3).copy()  # [k, i]
            jac[0, 0] += 1.0
            jac[1, 1] += 1.0
            det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        f = self.volume.density
        f_phi = Interpolator([f])(self.forward.reshape(2, -1).T)[0].reshape(f.values.shape)
        return float(np.max(np.abs(f_phi * det - f.values)) / np.max(np.abs(f.values)))

    def roundtrip_residual(self) -> float:
        """sup distance of Phi(Phi^-1(x)) from x."""
        pts = self.apply(self.inverse.reshape(2, -1).T)
        mesh = self._mesh().reshape(2, -1).T
        diff = pts - mesh
        diff -= np.round(diff)
        return float(np.max(np.abs(diff)))


def _rk4_flow(
    interp: Interpolator, points: np.ndarray, t: float, nsteps: int, tangent: bool = False
):
    """RK4 trajectories of the interpolated velocity; optionally carries the
    tangent map J along each trajectory (variational equation J' = DX J)."""
    h = t / nsteps
    p = points.copy()
    m = p.shape[0]
    jac = np.tile(np.eye(2), (m, 1, 1)) if tangent else None

    def vel(q):
        vals = interp(q)
        v = vals[:2].T
        if not tangent:
            return v, None
        dx = np.empty((m, 2, 2))
        dx[:, 0, 0] = vals[2]  # d1 X^1
        dx[:, 0, 1] = vals[3]  # d2 X^1
        dx[:, 1, 0] = vals[4]
        dx[:, 1, 1] = vals[5]
        return v, dx

    for _ in range(nsteps):
        k1, d1 = vel(p)
        k2, d2 = vel(p + 0.5 * h * k1)
        k3, d3 = vel(p + 0.5 * h * k2)
        k4, d4 = vel(p + h * k3)
        if tangent:
            j1 = d1 @ jac
            j2 = d2 @ (jac + 0.5 * h * j1)
            j3 = d3 @ (jac + 0.5 * h * j2)
            j4 = d4 @ (jac + h * j3)
            jac = jac + (h / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4)
        p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return p, jac


def flow(X: DivFreeField, t: float, dt: float) -> DiscreteDiffeo:
    """Integrate the lattice along X for time t with RK4 steps of size <= dt."""
    if dt > FLOW_MAX_DT + 1e-15:
        raise ValueError(f"flow step dt={dt} exceeds the limit {FLOW_MAX_DT}")
    if dt <= 0.0:
        raise ValueError("flow step dt must be positive")
    grid = X.grid
    x1, x2 = X.vector.x1, X.vector.x2
    interp = Interpolator(
        [x1, x2, partial(x1, 1), partial(x1, 2), partial(x2, 1), partial(x2, 2)]
    )
    Xm, Ym = grid.meshes()
    pts = np.column_stack([Xm.ravel(), Ym.ravel()])
    nsteps = max(1, math.ceil(abs(t) / dt)) if t != 0.0 else 1
    fwd, jac = _rk4_flow(interp, pts, t, nsteps, tangent=True)
    inv, _ = _rk4_flow(interp, pts, -t, nsteps)
    det = np.linalg.det(jac).reshape(grid.n, grid.n)
    phi = DiscreteDiffeo(
        grid,
        fwd.T.reshape(2, grid.n, grid.n),
        inv.T.reshape(2, grid.n, grid.n),
        X.volume,
        det_forward=det,
    )
    defect = phi.volume_defect()
    if defect > FLOW_VOLUME_LIMIT:
        raise ValueError(
            f"flow volume defect {defect:.3e} exceeds {FLOW_VOLUME_LIMIT}; reduce dt"
        )
    return phi


def _pushforward_sym2_stack(phi: DiscreteDiffeo, comps: list[ScalarField]) -> np.ndarray:
    """Common kernel: (phi_* T)_ij = J^k_i J^l_j T_kl(phi^-1), J = D(phi^-1)."""
    grid = phi.grid
    mesh = phi._mesh()
    dinv = phi.inverse - mesh
    grad = _grad_raw(dinv)  # [i, k]
    jac = grad.transpose(1, 0, 2, 3).copy()  # [k, i]
    jac[0, 0] += 1.0
    jac[1, 1] += 1.0
    pulled = Interpolator(comps)(phi.inverse.reshape(2, -1).T)
    n = grid.n
    a, b, c = (pulled[i].reshape(n, n) for i in range(3))
    tpull = np.stack([np.stack([a, b]), np.stack([b, c])])
    return np.einsum("kiab,ljab,klab->ijab", jac, jac, tpull)


def pushforward_metric(phi: DiscreteDiffeo, g: Metric, compat_tol: float = 1e-5) -> Metric:
    """Push g forward along phi; the result is re-certified compatible.

    The certification tolerance is RK4-limited (defaults to 1e-5) rather
    than the spectral floor used for exactly constructed metrics.
    """
    arr = _pushforward_sym2_stack(phi, [g.g11, g.g12, g.g22])
    a01 = 0.5 * (arr[0, 1] + arr[1, 0])
    grid = phi.grid
    out = Metric(
        ScalarField(grid, arr[0, 0]),
        ScalarField(grid, a01),
        ScalarField(grid, arr[1, 1]),
        g.volume,
    )
    res = out.compatibility_residual()
    if res > compat_tol:
        raise ValueError(
            f"pushforward lost compatibility: residual {res:.3e} > {compat_tol}"
        )
    return out


def pushforward_tangent(
    phi: DiscreteDiffeo, h: TangentVector, g_push: Metric
) -> TangentVector:
    """Push a tangent tensor forward and re-project trace-free at phi_* g."""
    arr = _pushforward_sym2_stack(phi, [h.h.c11, h.h.c12, h.h.c22])
    sym = SymTensor2.from_stack(phi.grid, 0.5 * (arr + arr.transpose(1, 0, 2, 3)))
    return tracefree_project(sym, g_push)
