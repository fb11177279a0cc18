"""
Riemannian metrics on a chart and the geometry they determine.

The Levi-Civita connection is resolved from the three cyclic compatibility
equations on the constant frame of the chart,

    2 g(A(v,xi)eta, zeta) = xi g(eta,zeta) + eta g(xi,zeta) - zeta g(xi,eta),

which gives the Christoffel array Gamma[k, i, j] with A(v, e_i) e_j =
Gamma[:, i, j]. The Gram system is solved by Cholesky factorization.
"""

from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass, field
from functools import cached_property

from beartype import beartype
from beartype.typing import List, Optional

import numpy as np
import scipy.linalg

from riemchart.calculus import (
    ARRAY_TYPE,
    POINT_TYPE,
    ChartSpace,
    MapField,
    as_vector,
    directional_derivative,
    jacobian,
)
from riemchart.connection import ConnectionForm, curvature_form
from riemchart.errors import (
    ArgumentError,
    IllConditionedWarning,
    MetricError,
)
from riemchart.forms import RForm
from riemchart.util import format_vector

__all__ = [
    "MetricField",
    "IsometryCandidate",
    "IsometryReport",
    "christoffel",
    "levi_civita",
    "riemann_tensor",
    "sectional_curvature",
    "isometry_residual",
    "torsion_residual",
    "compatibility_residual",
    "full_differential_residual",
]

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
DEGENERATE_PLANE_TOL = 1e-12
CONDITION_WARN = 1e10


@dataclass(frozen=True, eq=False)
class MetricField(MapField):
    """
    A metric g(v, xi, eta) = xi^T G(v) eta given by its Gram matrix G(v).
    """

    @beartype
    def __call__(self, v: POINT_TYPE) -> np.ndarray:
        x = self.space.check(v)
        n = self.space.dim
        G = np.asarray(self.eval(x), dtype=float)
        if G.size != n * n:
            raise MetricError(
                "Gram matrix at {:s} has {:d} entries, expected {:d}".format(
                    format_vector(x), G.size, n * n
                ),
                point=x,
            )
        G = G.reshape(n, n)
        asym = float(np.max(np.abs(G - G.T)))
        if asym > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(G)))):
            raise MetricError(
                "Gram matrix at {:s} is not symmetric, defect {:g}".format(
                    format_vector(x), asym
                ),
                point=x,
            )
        return (G + G.T) / 2

    def gram(self, v: POINT_TYPE) -> np.ndarray:
        return self(v)

    @beartype
    def inner(self, v: POINT_TYPE, xi: POINT_TYPE, eta: POINT_TYPE) -> float:
        n = self.space.dim
        return float(as_vector(xi, n) @ self(v) @ as_vector(eta, n))

    @beartype
    def norm(self, v: POINT_TYPE, xi: POINT_TYPE) -> float:
        q = self.inner(v, xi, xi)
        if q < 0:
            raise MetricError(
                "negative squared length {:g} at {:s}".format(q, format_vector(v)),
                point=self.space.point(v),
            )
        return float(np.sqrt(q))

    @cached_property
    def connection(self) -> ConnectionForm:
        return levi_civita(self)

    @cached_property
    def curvature(self) -> RForm:
        return curvature_form(self.connection)


def _cholesky_solve(G: np.ndarray, rhs: np.ndarray, x: np.ndarray) -> np.ndarray:
    try:
        factor = scipy.linalg.cho_factor(G)
    except scipy.linalg.LinAlgError:
        eig = np.linalg.eigvalsh(G)
        if eig[0] <= 0:
            raise MetricError(
                "metric not positive definite at {:s}, smallest eigenvalue {:g}".format(
                    format_vector(x), eig[0]
                ),
                point=x,
            )
        cond = float(eig[-1] / eig[0])
        warnings.warn(
            "Cholesky failed at {:s}, pivoted solve, condition {:g}".format(
                format_vector(x), cond
            ),
            IllConditionedWarning,
        )
        return scipy.linalg.solve(G, rhs)
    eig = np.linalg.eigvalsh(G)
    cond = float(eig[-1] / eig[0])
    if cond > CONDITION_WARN:
        warnings.warn(
            "Gram matrix at {:s} ill conditioned, condition {:g}".format(
                format_vector(x), cond
            ),
            IllConditionedWarning,
        )
    return scipy.linalg.cho_solve(factor, rhs)


@beartype
def christoffel(g: MetricField, v: POINT_TYPE) -> np.ndarray:
    """Gamma[k, i, j] with A(v, e_i) e_j = Gamma[:, i, j]"""
    x = g.space.check(v)
    n = g.space.dim
    G = g(x)
    dG = np.stack([directional_derivative(g, x, e) for e in np.eye(n)])
    # lower[l, i, j] = (d_i G_lj + d_j G_li - d_l G_ij) / 2
    lower = 0.5 * (np.transpose(dG, (1, 0, 2)) + np.transpose(dG, (1, 2, 0)) - dG)
    return _cholesky_solve(G, lower.reshape(n, n * n), x).reshape(n, n, n)


@beartype
def levi_civita(g: MetricField) -> ConnectionForm:
    n = g.space.dim

    def eval(v, xi):
        return np.einsum("kij,i->kj", christoffel(g, v), xi)

    form = RForm(1, eval, g.space, (n, n), g.stencil.widened())
    return ConnectionForm(form, metric=g)


@beartype
def riemann_tensor(
    g: MetricField,
    v: POINT_TYPE,
    xi: POINT_TYPE,
    eta: POINT_TYPE,
    zeta: POINT_TYPE,
    theta: POINT_TYPE,
) -> float:
    """g(v, R(v, xi, eta) zeta, theta)"""
    n = g.space.dim
    R = g.curvature(v, xi, eta)
    return g.inner(v, R @ as_vector(zeta, n), theta)


@beartype
def sectional_curvature(
    g: MetricField, v: POINT_TYPE, xi: POINT_TYPE, eta: POINT_TYPE
) -> float:
    x = g.space.check(v)
    n = g.space.dim
    xi = as_vector(xi, n)
    eta = as_vector(eta, n)
    a = g.inner(x, xi, xi)
    b = g.inner(x, eta, eta)
    c = g.inner(x, xi, eta)
    if a * b - c * c < DEGENERATE_PLANE_TOL * a * b or a * b == 0:
        raise ArgumentError(
            "plane spanned by {:s}, {:s} at {:s} is degenerate".format(
                format_vector(xi), format_vector(eta), format_vector(x)
            )
        )
    # modified Gram-Schmidt in g_v
    e1 = xi / np.sqrt(a)
    w = eta - g.inner(x, eta, e1) * e1
    e2 = w / g.norm(x, w)
    return riemann_tensor(g, x, e1, e2, e2, e1)


@beartype
@dataclass(frozen=True)
class IsometryCandidate:
    """F maps the source chart into the target chart"""

    F: MapField
    source: MetricField
    target: MetricField


@beartype
@dataclass
class IsometryReport:
    metric_defect: float = 0.0
    connection_defect: float = 0.0
    curvature_defect: float = 0.0
    flagged: List[int] = field(default_factory=list)

    def passes(self, tol: float) -> bool:
        return (
            max(self.metric_defect, self.connection_defect, self.curvature_defect)
            <= tol
        )


@beartype
def isometry_residual(
    c: IsometryCandidate,
    samples: ARRAY_TYPE,
    curvature: bool = True,
) -> IsometryReport:
    """
    Metric, connection and curvature transformation defects of F on the chart
    basis at each sample point. Samples where F_* is singular are flagged.
    """
    F = c.F
    n = F.space.dim
    A_s = c.source.connection
    A_t = c.target.connection
    eye = np.eye(n)
    jac = MapField(lambda w: jacobian(F, w), F.space, F.stencil.widened())
    report = IsometryReport()
    for k, v in enumerate(samples):
        x = F.space.check(v)
        J = jacobian(F, x)
        if np.linalg.cond(J) > 1e12:
            logger.info("F_* singular at sample %d %s", k, format_vector(x))
            report.flagged.append(k)
            continue
        Fx = np.reshape(F(x), -1)
        for xi in eye:
            report.metric_defect = max(
                report.metric_defect,
                abs(c.target.norm(Fx, J @ xi) - c.source.norm(x, xi)),
            )
            dJ = np.reshape(directional_derivative(jac, x, xi), (n, n))
            lhs = np.linalg.solve(J, A_t(Fx, J @ xi) @ J + dJ)
            report.connection_defect = max(
                report.connection_defect, float(np.max(np.abs(lhs - A_s(x, xi))))
            )
        if not curvature:
            continue
        for i, j in itertools.combinations(range(n), 2):
            R_t = c.target.curvature(Fx, J @ eye[i], J @ eye[j])
            R_s = c.source.curvature(x, eye[i], eye[j])
            report.curvature_defect = max(
                report.curvature_defect, float(np.max(np.abs(R_t @ J - J @ R_s)))
            )
    return report


@beartype
def torsion_residual(
    D: ConnectionForm, v: POINT_TYPE, xi: POINT_TYPE, eta: POINT_TYPE
) -> float:
    """|A(v, xi) eta - A(v, eta) xi|"""
    n = D.space.dim
    xi = as_vector(xi, n)
    eta = as_vector(eta, n)
    return float(np.max(np.abs(D(v, xi) @ eta - D(v, eta) @ xi)))


@beartype
def compatibility_residual(
    g: MetricField,
    D: ConnectionForm,
    v: POINT_TYPE,
    xi: POINT_TYPE,
    eta: POINT_TYPE,
    zeta: POINT_TYPE,
) -> float:
    """|xi g(., eta, zeta) - g(A(xi)eta, zeta) - g(eta, A(xi)zeta)| at v"""
    x = g.space.check(v)
    n = g.space.dim
    eta = as_vector(eta, n)
    zeta = as_vector(zeta, n)
    pairing = MapField(lambda w: g.inner(w, eta, zeta), g.space, g.stencil)
    lhs = float(directional_derivative(pairing, x, xi))
    A = D(x, xi)
    rhs = g.inner(x, A @ eta, zeta) + g.inner(x, eta, A @ zeta)
    return abs(lhs - rhs)


@beartype
def full_differential_residual(
    g: MetricField,
    D: ConnectionForm,
    v: POINT_TYPE,
    eta: POINT_TYPE,
    zeta: POINT_TYPE,
    xi: POINT_TYPE,
    lam: POINT_TYPE,
    mu: POINT_TYPE,
) -> float:
    """
    dg(v, eta, zeta; xi, lam, mu) against
    g(A(xi)eta, zeta) + g(eta, A(xi)zeta) + g(lam, zeta) + g(eta, mu),
    with g seen as a function on the product of the chart with two copies
    of the coordinate space.
    """
    n = g.space.dim
    x = g.space.check(v)
    eta, zeta, xi, lam, mu = (as_vector(u, n) for u in (eta, zeta, xi, lam, mu))
    product = ChartSpace(
        3 * n, lambda p: g.space.contains(p[:n]), g.space.name + " x V x V"
    )
    g3 = MapField(
        lambda p: g.inner(p[:n], p[n : 2 * n], p[2 * n :]), product, g.stencil
    )
    lhs = float(
        directional_derivative(
            g3, np.concatenate([x, eta, zeta]), np.concatenate([xi, lam, mu])
        )
    )
    A = D(x, xi)
    rhs = (
        g.inner(x, A @ eta, zeta)
        + g.inner(x, eta, A @ zeta)
        + g.inner(x, lam, zeta)
        + g.inner(x, eta, mu)
    )
    return abs(lhs - rhs)
