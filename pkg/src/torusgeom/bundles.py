"""Circle-bundle classes on the torus, frame holonomy, and the momentum identity.

A gauge class of circle bundles with connection is modeled by its curvature
2-form together with the holonomy angles along the two generator loops based
at the origin; this triple (plus the Chern integer) is a complete invariant
on the torus.  The group law adds curvatures and holonomy angles.

Convention constants: frame transport of the tangent bundle around a
positively oriented contractible loop rotates by + int_Sigma (S/2) mu (fixed
empirically by the shrinking-loop check), while the canonical bundle carries
curvature -S mu.  Hence the canonical-bundle holonomy angle is -KAPPA_CONV
times the transported frame angle with KAPPA_CONV = CURV_NORM = 2; all
convention-free identities (d alpha, the divergence identity, the momentum
residual) are independent of this pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import Grid, Interpolator, OneForm, ScalarField, TwoForm, integrate
from .riemann import (
    Metric,
    VolumeForm,
    covariant_divergence,
    divergence_vector,
    cov_deriv_oneform,
    raise_sym2,
    scalar_curvature,
)
from .symplectic import TangentVector, metric_path
from .diffeo import DivFreeField, fundamental_vector, pairing_kappa
from .symplectic import omega

KAPPA_CONV = 2.0
CURV_NORM = 2.0
QUANTIZATION_TOL = 1e-8
TWO_PI = 2.0 * math.pi


def _canon_angle(theta: float) -> float:
    return float(theta % TWO_PI)


@dataclass(frozen=True, eq=False)
class Loop:
    """Closed polyline on the torus in lifted coordinates.

    points has shape (m+1, 2) with points[-1] = points[0] + winding for an
    integer winding pair; the loop is contractible iff the winding is (0, 0).
    All loops used by the verification suites (squares, generators) are exact
    polylines, so no resampling error enters the transport ODE.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError("loop needs an (m+1, 2) array of vertices")
        gap = pts[-1] - pts[0]
        if np.max(np.abs(gap - np.round(gap))) > 1e-9:
            raise ValueError("loop is not closed modulo Z^2")
        object.__setattr__(self, "points", pts)

    @property
    def winding(self) -> tuple[int, int]:
        gap = self.points[-1] - self.points[0]
        return int(round(gap[0])), int(round(gap[1]))

    @property
    def contractible(self) -> bool:
        return self.winding == (0, 0)

    @classmethod
    def square(cls, center: tuple[float, float], side: float) -> "Loop":
        """Counterclockwise square loop (positively oriented for dx^dy)."""
        cx, cy = center
        s = side / 2.0
        return cls(
            np.array(
                [
                    [cx - s, cy - s],
                    [cx + s, cy - s],
                    [cx + s, cy + s],
                    [cx - s, cy + s],
                    [cx - s, cy - s],
                ]
            )
        )

    @classmethod
    def generator(cls, axis: int, basepoint: tuple[float, float] = (0.0, 0.0)) -> "Loop":
        """Straight generator loop winding once along axis 1 (x) or 2 (y)."""
        if axis not in (1, 2):
            raise ValueError("axis must be 1 or 2")
        p = np.asarray(basepoint, dtype=np.float64)
        step = np.array([1.0, 0.0]) if axis == 1 else np.array([0.0, 1.0])
        return cls(np.stack([p, p + step]))


@dataclass(frozen=True, eq=False)
class CircleBundleClass:
    """Torus model of a circle bundle with connection, up to gauge."""

    curvature: TwoForm
    holA: float
    holB: float
    chern: int

    def __post_init__(self):
        object.__setattr__(self, "holA", _canon_angle(self.holA))
        object.__setattr__(self, "holB", _canon_angle(self.holB))
        total = integrate(self.curvature)
        if abs(total - TWO_PI * self.chern) > QUANTIZATION_TOL:
            raise ValueError(
                f"curvature integral {total:.3e} is not 2*pi*{self.chern} "
                f"within {QUANTIZATION_TOL}"
            )

    @property
    def grid(self) -> Grid:
        return self.curvature.grid


def identity_class(grid: Grid) -> CircleBundleClass:
    """The trivial bundle with the flat connection."""
    zero = ScalarField(grid, np.zeros((grid.n, grid.n)))
    return CircleBundleClass(TwoForm(zero), 0.0, 0.0, 0)


def constant_curvature_class(
    mu: VolumeForm, chern: int, holA: float = 0.0, holB: float = 0.0
) -> CircleBundleClass:
    """Class with curvature 2*pi*chern * mu / vol(mu); handy test input."""
    scale = TWO_PI * chern / mu.total()
    return CircleBundleClass(
        TwoForm(ScalarField(mu.grid, scale * mu.density.values)), holA, holB, chern
    )


def kobayashi_add(c1: CircleBundleClass, c2: CircleBundleClass) -> CircleBundleClass:
    """Group law: curvatures add, holonomies multiply (angles add), cherns add."""
    if c1.grid != c2.grid:
        raise ValueError(f"grid mismatch: {c1.grid} vs {c2.grid}")
    curv = TwoForm(ScalarField(c1.grid, c1.curvature.c12.values + c2.curvature.c12.values))
    return CircleBundleClass(curv, c1.holA + c2.holA, c1.holB + c2.holB, c1.chern + c2.chern)


def kobayashi_neg(c: CircleBundleClass) -> CircleBundleClass:
    """Inverse class (same bundle with the opposite circle action)."""
    curv = TwoForm(ScalarField(c.grid, -c.curvature.c12.values))
    return CircleBundleClass(curv, -c.holA, -c.holB, -c.chern)


def connection_alpha(g: Metric, h: TangentVector) -> OneForm:
    """Representative alpha_i = mu_ik nabla_j h^{kj} of the log-derivative class."""
    y = covariant_divergence(raise_sym2(h.h, g), g).stack()
    f = g.volume.density.values
    return OneForm(ScalarField(g.grid, f * y[1]), ScalarField(g.grid, -f * y[0]))


def dalpha_defect(g: Metric, h: TangentVector) -> ScalarField:
    """Pointwise defect (d alpha)_12 + f * nabla_k nabla_l h^{kl}; ~0 always."""
    from .riemann import _partial_raw

    alpha = connection_alpha(g, h)
    divdiv = divergence_vector(covariant_divergence(raise_sym2(h.h, g), g), g)
    dalpha = _partial_raw(alpha.a2.values, 1) - _partial_raw(alpha.a1.values, 2)
    f = g.volume.density.values
    return ScalarField(g.grid, dalpha + f * divdiv.values)


def divergence_identity_defect(g: Metric, Y) -> TwoForm:
    """Defect of nabla_i(Y^k mu_kj) - nabla_j(Y^k mu_ki) = (nabla_k Y^k) mu_ij."""
    f = g.volume.density.values
    ys = Y.stack()
    beta = OneForm(ScalarField(g.grid, -f * ys[1]), ScalarField(g.grid, f * ys[0]))
    nab = cov_deriv_oneform(beta, g)
    div = divergence_vector(Y, g).values
    return TwoForm(ScalarField(g.grid, nab[0, 1] - nab[1, 0] - div * f))


def _edge_transport_tables(g: Metric, loop: Loop, dt: float):
    """Interpolated Christoffels and metric along each polyline edge."""
    gamma = g.christoffel()
    interp_gamma = Interpolator(
        [gamma.c111, gamma.c112, gamma.c122, gamma.c211, gamma.c212, gamma.c222]
    )
    interp_g = Interpolator([g.g11, g.g12, g.g22])
    edges = []
    pts = loop.points
    for a, b in zip(pts[:-1], pts[1:]):
        tang = b - a
        length = float(np.hypot(*tang))
        if length == 0.0:
            continue
        ne = max(1, math.ceil(length / dt))
        u = np.arange(2 * ne + 1) / (2 * ne)
        stage_pts = a[None, :] + u[:, None] * tang[None, :]
        c = interp_gamma(stage_pts)
        # M^k_j = -Gamma^k_{ij} cdot^i at every stage point
        m = np.empty((2, 2, 2 * ne + 1))
        m[0, 0] = -(c[0] * tang[0] + c[1] * tang[1])
        m[0, 1] = -(c[1] * tang[0] + c[2] * tang[1])
        m[1, 0] = -(c[3] * tang[0] + c[4] * tang[1])
        m[1, 1] = -(c[4] * tang[0] + c[5] * tang[1])
        gvals = interp_g(stage_pts[::2])  # endpoints only, for the frame angle
        edges.append((ne, m, gvals))
    return edges


def _frame_angle(gv: np.ndarray, v: np.ndarray) -> float:
    """Angle of v against the Gram-Schmidt frame (E1 along d/dx)."""
    g11, g12, g22 = gv
    f = math.sqrt(max(g11 * g22 - g12 * g12, 0.0))
    return math.atan2(f * v[1], v[0] * g11 + v[1] * g12)


def frame_transport(g: Metric, loop: Loop, dt: float = 2e-3) -> float:
    """Net rotation angle of parallel transport around a closed loop.

    Integrates v' = -Gamma(c) c' v with RK4 (Christoffels trig-interpolated
    along the path, which is fixed, so all stage values are precomputed in
    one batch) and accumulates the angle of v against the g-orthonormal
    reference frame continuously, so the result is not reduced mod 2*pi.
    For a positively oriented contractible loop it converges to the enclosed
    integral of the Gauss curvature S/2.
    """
    edges = _edge_transport_tables(g, loop, dt)
    if not edges:
        raise ValueError("loop has no extent")
    g0 = edges[0][2][:, 0]
    v = np.array([1.0 / math.sqrt(g0[0]), 0.0])
    chi_prev = _frame_angle(g0, v)
    total = 0.0
    for ne, m, gvals in edges:
        h = 1.0 / ne
        for s in range(ne):
            m0 = m[:, :, 2 * s]
            mh = m[:, :, 2 * s + 1]
            m1 = m[:, :, 2 * s + 2]
            k1 = m0 @ v
            k2 = mh @ (v + 0.5 * h * k1)
            k3 = mh @ (v + 0.5 * h * k2)
            k4 = m1 @ (v + h * k3)
            v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            chi = _frame_angle(gvals[:, s + 1], v)
            delta = (chi - chi_prev + math.pi) % TWO_PI - math.pi
            total += delta
            chi_prev = chi
    return float(total)


def canonical_class(g: Metric, dt: float = 2e-3) -> CircleBundleClass:
    """The canonical circle bundle of (g, mu) as a gauge class.

    Curvature is -KAPPA_CONV * (S / CURV_NORM) * mu = -S mu; the generator
    holonomies come from frame transport along the two straight generators
    through the origin.  On the torus the Chern integer is forced to 0 by
    Gauss-Bonnet, which doubles as a transport sanity check.
    """
    s = scalar_curvature(g)
    f = g.volume.density.values
    curv = TwoForm(ScalarField(g.grid, -KAPPA_CONV * (s.values / CURV_NORM) * f))
    theta_a = frame_transport(g, Loop.generator(1), dt)
    theta_b = frame_transport(g, Loop.generator(2), dt)
    total = integrate(curv)
    chern = int(round(total / TWO_PI))
    if abs(total - TWO_PI * chern) > QUANTIZATION_TOL:
        raise ValueError(
            f"canonical curvature integral {total:.3e} violates quantization; "
            "frame transport is inconsistent with the curvature normalization"
        )
    return CircleBundleClass(curv, -KAPPA_CONV * theta_a, -KAPPA_CONV * theta_b, chern)


def momentum_residual(g: Metric, X: DivFreeField, h: TangentVector) -> float:
    """Omega_g(X.g, h) + kappa(X, alpha_h); zero is the momentum-map identity."""
    lhs = omega(g, fundamental_vector(X, g), h)
    return lhs + pairing_kappa(X, connection_alpha(g, h))


def loop_integral_oneform(alpha: OneForm, loop: Loop, order: int = 24) -> float:
    """Line integral of a 1-form along a polyline loop (Gauss-Legendre per edge)."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    u = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    interp = Interpolator([alpha.a1, alpha.a2])
    total = 0.0
    pts = loop.points
    for a, b in zip(pts[:-1], pts[1:]):
        tang = b - a
        if np.hypot(*tang) == 0.0:
            continue
        stage = a[None, :] + u[:, None] * tang[None, :]
        vals = interp(stage)
        total += float(np.dot(w, vals[0] * tang[0] + vals[1] * tang[1]))
    return total


def holonomy_derivative_check(
    g: Metric, h: TangentVector, loop: Loop, eps: float, dt: float = 2e-3
) -> tuple[float, float]:
    """(d/dt of the canonical holonomy angle along metric_path, int_gamma alpha).

    Only contractible loops are accepted; the finite difference uses central
    steps at eps and eps/2 with one Richardson extrapolation.  The two values
    agree by the log-derivative identity for the canonical bundle.
    """
    if not loop.contractible:
        raise ValueError(f"loop winds {loop.winding}; the check needs a contractible loop")

    def hol_angle(t: float) -> float:
        gt = metric_path(g, h, t) if t != 0.0 else g
        return -KAPPA_CONV * frame_transport(gt, loop, dt)

    def central(e: float) -> float:
        return (hol_angle(e) - hol_angle(-e)) / (2.0 * e)

    fd = (4.0 * central(eps / 2.0) - central(eps)) / 3.0
    line = loop_integral_oneform(connection_alpha(g, h), loop)
    return float(fd), float(line)
