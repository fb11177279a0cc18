"""
Jacobi fields along geodesics and the curvature read off geodesic discs.

A Jacobi field is stored with its covariant derivative psi = D_t phi and
solves the first order system

    phi' = psi - A(x, x') phi
    psi' = R(x; x', phi) x' - A(x, x') psi
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from beartype import beartype
from beartype.typing import Callable, List, Optional

import numpy as np

from riemchart.calculus import (
    ARRAY_TYPE,
    POINT_TYPE,
    SCALAR_TYPE,
    as_vector,
    kth_difference_quotient,
)
from riemchart.errors import ArgumentError, DomainError
from riemchart.geodesic import Curve, Lift, integrate_geodesic
from riemchart.metric import MetricField, sectional_curvature
from riemchart.util import format_vector, rk4_march

__all__ = [
    "JacobiField",
    "ParallelismReport",
    "integrate_jacobi",
    "jacobi_from_variation",
    "jacobi_residual",
    "vanishing_jacobi_family",
    "geodesic_circle_length",
    "curvature_from_circle_lengths",
    "h_expansion_check",
    "parallelism_criterion",
]

logger = logging.getLogger(__name__)

ORTHONORMAL_TOL = 1e-8

# periodic first derivative, eighth order, offsets -4..4
_FAN_STENCIL = np.array(
    [1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280]
)


@beartype
@dataclass(frozen=True, eq=False)
class JacobiField:
    """values phi(t_i) and covariant derivatives D_t phi(t_i)"""

    times: ARRAY_TYPE
    values: ARRAY_TYPE
    derivatives: ARRAY_TYPE

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        V = np.asarray(self.values, dtype=float)
        D = np.asarray(self.derivatives, dtype=float)
        if V.ndim != 2 or V.shape != D.shape or V.shape[0] != t.size:
            raise ArgumentError(
                "Jacobi field arrays {:s}, {:s} do not fit {:d} nodes".format(
                    str(V.shape), str(D.shape), t.size
                )
            )
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", V)
        object.__setattr__(self, "derivatives", D)

    def __len__(self) -> int:
        return self.times.size

    def as_lift(self) -> Lift:
        return Lift(self.times, self.values)

    def norms(self, g: MetricField, x: Curve) -> np.ndarray:
        return np.array([g.norm(p, w) for p, w in zip(x.points, self.values)])


@beartype
@dataclass
class ParallelismReport:
    parallel: bool = True
    defects: List[float] = field(default_factory=list)
    direct: float = 0.0
    direct_parallel: bool = True
    rank: int = 0

    @property
    def agrees(self) -> bool:
        return self.parallel == self.direct_parallel


def _check_aligned(x: Curve, n_nodes: int, what: str):
    if n_nodes != x.times.size:
        raise ArgumentError(
            "{:s} has {:d} nodes, curve has {:d}".format(what, n_nodes, x.times.size)
        )


@beartype
def integrate_jacobi(
    g: MetricField,
    x: Curve,
    phi0: POINT_TYPE,
    dphi0: POINT_TYPE,
    t0: Optional[SCALAR_TYPE] = None,
) -> JacobiField:
    """Jacobi field with phi(t0) = phi0 and D_t phi(t0) = dphi0 along x"""
    n = g.space.dim
    A = g.connection
    R = g.curvature
    i0 = 0 if t0 is None else x.node_index(t0)
    y0 = np.concatenate(
        [as_vector(phi0, n, "phi0"), as_vector(dphi0, n, "derivative of phi0")]
    )

    def rhs(t, y):
        p = x.evaluate(t)
        u = x.velocity_at(t)
        phi, psi = y[:n], y[n:]
        Au = A(p, u)
        return np.concatenate([psi - Au @ phi, R(p, u, phi) @ u - Au @ psi])

    ys, _, _, _ = rk4_march(rhs, y0, x.times, i0)
    return JacobiField(x.times, ys[:, :n], ys[:, n:])


@beartype
def jacobi_from_variation(
    g: MetricField,
    family: Callable,
    dtheta: SCALAR_TYPE = 1e-4,
    x: Optional[Curve] = None,
) -> JacobiField:
    """
    phi = d x_theta / d theta at theta = 0 by centred differences of the
    family, with D_t phi = D_theta x' = d x'_theta / d theta + A(x, phi) x'.
    """
    if not dtheta > 0:
        raise ArgumentError("theta step must be > 0")
    base = family(0.0) if x is None else x
    plus = family(float(dtheta))
    minus = family(-float(dtheta))
    for c in (plus, minus):
        _check_aligned(base, c.times.size, "family member")
    phi = (plus.points - minus.points) / (2 * dtheta)
    dvel = (plus.velocities - minus.velocities) / (2 * dtheta)
    A = g.connection
    psi = np.array(
        [
            dv + A(p, w) @ u
            for p, u, w, dv in zip(base.points, base.velocities, phi, dvel)
        ]
    )
    return JacobiField(base.times, phi, psi)


@beartype
def jacobi_residual(g: MetricField, x: Curve, J: JacobiField) -> float:
    """
    max over interior nodes of |phi' + A phi - D_t phi| and
    |(D_t phi)' + A D_t phi - R(x; x', phi) x'|, time derivatives by centred
    differences
    """
    _check_aligned(x, len(J), "Jacobi field")
    if x.n_steps < 2:
        raise ArgumentError("Jacobi residual needs at least three nodes")
    A = g.connection
    R = g.curvature
    h = 2 * x.dt
    worst = 0.0
    for i in range(1, x.n_steps):
        p, u = x.points[i], x.velocities[i]
        phi, psi = J.values[i], J.derivatives[i]
        Au = A(p, u)
        first = (J.values[i + 1] - J.values[i - 1]) / h + Au @ phi - psi
        second = (
            (J.derivatives[i + 1] - J.derivatives[i - 1]) / h
            + Au @ psi
            - R(p, u, phi) @ u
        )
        worst = max(worst, float(np.linalg.norm(first)))
        worst = max(worst, float(np.linalg.norm(second)))
    return worst


@beartype
def vanishing_jacobi_family(
    g: MetricField, x: Curve, tau: SCALAR_TYPE, dtheta: SCALAR_TYPE = 1e-4
) -> List[JacobiField]:
    """
    One Jacobi field per chart direction e_k with phi(tau) = 0 and
    D_t phi(tau) = e_k, each from the geodesics through x(tau) with initial
    velocity x'(tau) + theta e_k.
    """
    i0 = x.node_index(tau)
    p = x.points[i0]
    u = x.velocities[i0]
    A = g.connection
    fields = []
    for e in np.eye(g.space.dim):

        def family(theta, e=e):
            return integrate_geodesic(
                A, p, u + theta * e, x.span, x.dt, t_initial=x.times[i0]
            )

        fields.append(jacobi_from_variation(g, family, dtheta))
    return fields


def _check_frame(g: MetricField, v: np.ndarray, frame) -> np.ndarray:
    n = g.space.dim
    F = np.asarray(frame, dtype=float)
    if F.shape != (2, n):
        raise ArgumentError(
            "frame must be two vectors of dimension {:d}, got {:s}".format(
                n, str(F.shape)
            )
        )
    gram = F @ g(v) @ F.T
    defect = float(np.max(np.abs(gram - np.eye(2))))
    if defect > ORTHONORMAL_TOL:
        raise ArgumentError(
            "frame {:s}, {:s} is not orthonormal at {:s}, defect {:g}".format(
                format_vector(F[0]), format_vector(F[1]), format_vector(v), defect
            )
        )
    return F


@beartype
def geodesic_circle_length(
    g: MetricField,
    v: POINT_TYPE,
    frame: ARRAY_TYPE,
    r: SCALAR_TYPE,
    n_theta: int = 256,
    dt: SCALAR_TYPE = 1e-3,
) -> float:
    """
    Length of theta -> e(r cos theta, r sin theta), e the geodesic fan from v
    in the plane of the frame. d/d theta is taken across neighbouring rays.
    """
    x = g.space.check(v)
    F = _check_frame(g, x, frame)
    if not r > 0:
        raise ArgumentError("radius must be > 0, got {:g}".format(float(r)))
    if n_theta < _FAN_STENCIL.size:
        raise ArgumentError(
            "need at least {:d} rays, got {:d}".format(_FAN_STENCIL.size, n_theta)
        )
    A = g.connection
    thetas = 2 * np.pi * np.arange(n_theta) / n_theta
    ends = np.empty((n_theta, g.space.dim))
    for j, theta in enumerate(thetas):
        xi = np.cos(theta) * F[0] + np.sin(theta) * F[1]
        try:
            ray = integrate_geodesic(A, x, xi, (0.0, float(r)), dt)
        except DomainError as e:
            raise DomainError(
                "ray {:d} at angle {:g} of the fan at {:s} leaves the domain "
                "before radius {:g}".format(j, theta, format_vector(x), float(r)),
                point=e.point,
            )
        ends[j] = ray.points[-1]
    dtheta = 2 * np.pi / n_theta
    tangent = sum(
        c * np.roll(ends, -m, axis=0)
        for m, c in zip(range(-4, 5), _FAN_STENCIL)
        if c != 0.0
    )
    tangent = tangent / dtheta
    speeds = [g.norm(p, w) for p, w in zip(ends, tangent)]
    length = float(np.sum(speeds) * dtheta)
    logger.debug("circle radius %g length %.17g", float(r), length)
    return length


@beartype
def curvature_from_circle_lengths(radii: ARRAY_TYPE, lengths: ARRAY_TYPE) -> float:
    """slope K of 1 - L(r) / (2 pi r) against r^2 / 6, through the origin"""
    r = np.asarray(radii, dtype=float).reshape(-1)
    L = np.asarray(lengths, dtype=float).reshape(-1)
    if r.size != L.size:
        raise ArgumentError("{:d} radii for {:d} lengths".format(r.size, L.size))
    if np.any(r <= 0) or np.unique(r).size < 2:
        raise ArgumentError(
            "need at least two distinct positive radii, got {:s}".format(
                format_vector(r)
            )
        )
    s = r**2 / 6
    y = 1 - L / (2 * np.pi * r)
    return float(s @ y / (s @ s))


@beartype
def h_expansion_check(
    g: MetricField,
    v: POINT_TYPE,
    frame: ARRAY_TYPE,
    r: SCALAR_TYPE,
    dt: SCALAR_TYPE = 1e-3,
    K: Optional[SCALAR_TYPE] = None,
) -> float:
    """
    |h(r) - r^2 (1 - K r^2 / 3)| / r^4 with h = g(phi, phi) for the Jacobi
    field phi(0) = 0, D_t phi(0) = eta along the ray with velocity xi.
    """
    x = g.space.check(v)
    F = _check_frame(g, x, frame)
    if not r > 0:
        raise ArgumentError("radius must be > 0, got {:g}".format(float(r)))
    if K is None:
        K = sectional_curvature(g, x, F[0], F[1])
    ray = integrate_geodesic(g.connection, x, F[0], (0.0, float(r)), dt)
    J = integrate_jacobi(g, ray, np.zeros(g.space.dim), F[1])
    h = g.inner(ray.points[-1], J.values[-1], J.values[-1])
    r = float(r)
    return abs(h - r**2 * (1 - K * r**2 / 3)) / r**4


@beartype
def parallelism_criterion(
    g: MetricField,
    x: Curve,
    xi: Lift,
    tau: SCALAR_TYPE,
    H: ARRAY_TYPE,
    tol: SCALAR_TYPE = 1e-4,
    stride: int = 4,
    direct_tol: SCALAR_TYPE = 1e-6,
) -> ParallelismReport:
    """
    xi is parallel at tau iff d^2/dt^2 g(x, xi, eta) vanishes at tau for the
    Jacobi fields eta with eta(tau) = 0. Each second derivative is taken
    with the stencil t = tau - s, tau, tau + s on grid nodes and divided by
    |D_t eta(tau)| and compared with tol. The direct test |D_t xi(tau)| <=
    direct_tol is reported alongside, with xi' from a fourth order centred
    difference when the grid allows.
    """
    _check_aligned(x, len(xi), "lift")
    n = g.space.dim
    i0 = x.node_index(tau)
    if stride < 1 or i0 - stride < 0 or i0 + stride > x.n_steps:
        raise ArgumentError(
            "stencil of stride {:d} around node {:d} leaves the grid".format(stride, i0)
        )
    if len(H) == 0:
        raise ArgumentError("no Jacobi fields given")
    for eta in H:
        _check_aligned(x, len(eta), "Jacobi field")
    p = x.points[i0]
    starts = np.array([eta.derivatives[i0] for eta in H])
    rank_tol = 1e-8 * max(1.0, float(np.abs(starts).max()))
    rank = int(np.linalg.matrix_rank(starts, tol=rank_tol))
    if rank < n:
        raise ArgumentError(
            "derivatives of the Jacobi fields at {:g} span rank {:d} < {:d}".format(
                float(tau), rank, n
            )
        )
    report = ParallelismReport(rank=rank)
    for k, eta in enumerate(H):
        scale = g.norm(p, eta.derivatives[i0])
        if g.norm(p, eta.values[i0]) > 1e-6 * max(1.0, scale):
            raise ArgumentError(
                "Jacobi field {:d} does not vanish at {:g}".format(k, float(tau))
            )
        pairing = [g.inner(q, a, b) for q, a, b in zip(x.points, xi.values, eta.values)]

        def sample(t):
            return pairing[x.node_index(t)]

        second = kth_difference_quotient(sample, x.times[i0 - stride], stride * x.dt, 2)
        report.defects.append(abs(float(second)) / scale)
    report.parallel = bool(max(report.defects) <= tol)
    A = g.connection
    Dxi = _node_derivative(xi.values, i0, x.dt) + A(p, x.velocities[i0]) @ xi.values[i0]
    report.direct = g.norm(p, Dxi)
    report.direct_parallel = bool(report.direct <= direct_tol)
    logger.debug(
        "parallelism at %g: defects %s direct %g",
        float(tau),
        format_vector(report.defects),
        report.direct,
    )
    return report


def _node_derivative(values: np.ndarray, i: int, h: float) -> np.ndarray:
    if 2 <= i <= len(values) - 3:
        V = values[i - 2 : i + 3]
        return (V[0] - 8 * V[1] + 8 * V[3] - V[4]) / (12 * h)
    return (values[i + 1] - values[i - 1]) / (2 * h)
