"""
Connections D = d + A on the trivial bundle over a chart.

A connection is represented by its operator valued 1-form A, so that
D_xi phi = d phi(xi) + A(., xi) phi.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

from beartype import beartype
from beartype.typing import Optional

import numpy as np
import scipy.linalg

from riemchart.calculus import (
    ARRAY_TYPE,
    POINT_TYPE,
    ChartSpace,
    MapField,
    StencilConfig,
    as_vector,
    directional_derivative,
)
from riemchart.errors import ArgumentError, IllConditionedWarning, NumericError
from riemchart.forms import RForm, exterior_derivative, pullback, wedge_1forms
from riemchart.util import format_vector

__all__ = [
    "ConnectionForm",
    "covariant_derivative",
    "curvature_form",
    "curvature_commutator",
    "gauge_transform",
    "pullback_connection",
    "chain_rule_residual",
    "solve_operator",
]

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12


@beartype
@dataclass(frozen=True)
class ConnectionForm:
    """
    form: degree 1 form with (m, m) operator values
    metric: the metric the connection was built from, if any
    """

    form: RForm
    metric: Optional[MapField] = None

    def __post_init__(self):
        shape = self.form.value_shape
        if self.form.degree != 1 or len(shape) != 2 or shape[0] != shape[1]:
            raise ArgumentError(
                "connection form must be a 1-form with square operator values, "
                "got degree {:d} shape {:s}".format(self.form.degree, str(shape))
            )

    @classmethod
    def constant(
        cls,
        space: ChartSpace,
        matrices: ARRAY_TYPE,
        stencil: Optional[StencilConfig] = None,
    ) -> ConnectionForm:
        """A(v, xi) = sum_i xi^i M_i"""
        mats = np.asarray(matrices, dtype=float)
        if mats.ndim != 3 or mats.shape[0] != space.dim:
            raise ArgumentError(
                "need {:d} square matrices, got shape {:s}".format(
                    space.dim, str(mats.shape)
                )
            )
        form = RForm(
            1,
            lambda v, xi: np.einsum("i,ijk->jk", xi, mats),
            space,
            mats.shape[1:],
            stencil if stencil is not None else StencilConfig(),
        )
        return cls(form)

    @classmethod
    def flat(cls, space: ChartSpace, fiber_dim: Optional[int] = None) -> ConnectionForm:
        m = space.dim if fiber_dim is None else fiber_dim
        return cls.constant(space, np.zeros((space.dim, m, m)))

    @property
    def space(self) -> ChartSpace:
        return self.form.space

    @property
    def fiber_dim(self) -> int:
        return self.form.value_shape[0]

    def __call__(self, v: POINT_TYPE, xi: POINT_TYPE) -> np.ndarray:
        return self.form(v, xi)


@beartype
def solve_operator(
    M: np.ndarray, rhs: np.ndarray, what: str = "operator"
) -> np.ndarray:
    """M^-1 rhs by dense solve, refusing singular M"""
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NumericError(
            "{:s} is singular, condition estimate {:g}".format(what, cond),
            condition=cond,
        )
    if cond > CONDITION_LIMIT * 1e-4:
        warnings.warn(
            "{:s} is ill conditioned, condition estimate {:g}".format(what, cond),
            IllConditionedWarning,
        )
    try:
        return scipy.linalg.solve(M, rhs)
    except scipy.linalg.LinAlgError as e:
        raise NumericError(
            "{:s} solve failed: {:s}".format(what, str(e)), condition=cond
        )


@beartype
def covariant_derivative(
    D: ConnectionForm, phi: MapField, v: POINT_TYPE, xi: POINT_TYPE
) -> np.ndarray:
    """D_xi phi(v) = dphi(v, xi) + A(v, xi) phi(v)"""
    x = D.space.check(v)
    return np.reshape(directional_derivative(phi, x, xi), -1) + D(x, xi) @ np.reshape(
        phi(x), -1
    )


@beartype
def curvature_form(D: ConnectionForm) -> RForm:
    """R = dA + A^A"""
    return exterior_derivative(D.form) + wedge_1forms(D.form, D.form)


@beartype
def curvature_commutator(
    D: ConnectionForm, phi: MapField, v: POINT_TYPE, xi: POINT_TYPE, eta: POINT_TYPE
) -> np.ndarray:
    """D_xi D_eta phi - D_eta D_xi phi with xi, eta constant fields"""
    x = D.space.check(v)
    xi = as_vector(xi, D.space.dim)
    eta = as_vector(eta, D.space.dim)
    stencil = phi.stencil.at_level(max(phi.stencil.level, D.form.stencil.level) + 1)

    def along(direction):
        return MapField(
            lambda w: covariant_derivative(D, phi, w, direction), phi.space, stencil
        )

    return covariant_derivative(D, along(eta), x, xi) - covariant_derivative(
        D, along(xi), x, eta
    )


@beartype
def gauge_transform(D: ConnectionForm, gamma: MapField) -> ConnectionForm:
    """A^gamma = gamma^-1 d gamma + gamma^-1 A gamma"""
    m = D.fiber_dim

    def eval(v, xi):
        g = np.reshape(gamma(v), (m, m))
        dg = np.reshape(directional_derivative(gamma, v, xi), (m, m))
        return solve_operator(
            g, dg + D(v, xi) @ g, "gauge at {:s}".format(format_vector(v))
        )

    level = max(D.form.stencil.level, gamma.stencil.level + 1)
    form = RForm(1, eval, D.space, (m, m), D.form.stencil.at_level(level))
    return ConnectionForm(form)


@beartype
def pullback_connection(D: ConnectionForm, F: MapField) -> ConnectionForm:
    """A^F = F*A"""
    return ConnectionForm(pullback(F, D.form))


@beartype
def chain_rule_residual(
    D: ConnectionForm, F: MapField, phi: MapField, v: POINT_TYPE, xi: POINT_TYPE
) -> float:
    """|D^F (F*phi)(v, xi) - D phi(F(v), F_* xi)|"""
    DF = pullback_connection(D, F)
    pulled = MapField(lambda w: phi(np.reshape(F(w), -1)), F.space, F.stencil)
    x = F.space.check(v)
    lhs = covariant_derivative(DF, pulled, x, xi)
    Fx = np.reshape(F(x), -1)
    pushed = np.reshape(directional_derivative(F, x, xi), -1)
    rhs = covariant_derivative(D, phi, Fx, pushed)
    return float(np.max(np.abs(lhs - rhs)))
