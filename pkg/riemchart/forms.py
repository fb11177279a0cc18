"""
Alternating r-forms on a chart, with values that are scalars, vectors or
operators stored as dense arrays in the chart basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

from beartype import beartype
from beartype.typing import Callable, Tuple

import numpy as np

from riemchart.calculus import (
    ARRAY_TYPE,
    POINT_TYPE,
    SCALAR_TYPE,
    ChartSpace,
    MapField,
    StencilConfig,
    as_vector,
    directional_derivative,
)
from riemchart.errors import ArgumentError, DomainError
from riemchart.util import format_vector

__all__ = [
    "RForm",
    "exterior_derivative",
    "pullback",
    "wedge_1forms",
    "alternation_defect",
    "linearity_defect",
]


@beartype
@dataclass(frozen=True)
class RForm:
    """
    degree: number of vector arguments
    eval: (v, xi_1, ..., xi_r) -> value of shape value_shape
    """

    degree: int
    eval: Callable
    space: ChartSpace
    value_shape: Tuple[int, ...] = ()
    stencil: StencilConfig = field(default_factory=StencilConfig)

    def __post_init__(self):
        if self.degree < 0:
            raise ArgumentError("form degree must be >= 0")

    @classmethod
    def from_field(cls, f: MapField, value_shape: Tuple[int, ...] = ()) -> RForm:
        """the 0-form of a map field"""
        return cls(0, lambda v: f(v), f.space, value_shape, f.stencil)

    def __call__(self, v: POINT_TYPE, *xis: POINT_TYPE) -> np.ndarray:
        if len(xis) != self.degree:
            raise ArgumentError(
                "{:d}-form called with {:d} vectors".format(self.degree, len(xis))
            )
        x = self.space.check(v)
        xis = [as_vector(xi, self.space.dim) for xi in xis]
        value = np.asarray(self.eval(x, *xis), dtype=float)
        return value.reshape(self.value_shape)

    def _check_compatible(self, other: RForm):
        if (
            other.degree != self.degree
            or other.value_shape != self.value_shape
            or other.space.dim != self.space.dim
        ):
            raise ArgumentError(
                "cannot combine {:d}-form {:s} with {:d}-form {:s}".format(
                    self.degree,
                    str(self.value_shape),
                    other.degree,
                    str(other.value_shape),
                )
            )

    def _stencil_with(self, other: RForm) -> StencilConfig:
        return self.stencil.at_level(max(self.stencil.level, other.stencil.level))

    def __add__(self, other: RForm) -> RForm:
        self._check_compatible(other)
        return replace(
            self,
            eval=lambda v, *xis: self(v, *xis) + other(v, *xis),
            stencil=self._stencil_with(other),
        )

    def __sub__(self, other: RForm) -> RForm:
        self._check_compatible(other)
        return replace(
            self,
            eval=lambda v, *xis: self(v, *xis) - other(v, *xis),
            stencil=self._stencil_with(other),
        )

    def __rmul__(self, s: SCALAR_TYPE) -> RForm:
        return replace(self, eval=lambda v, *xis: s * self(v, *xis))

    def __neg__(self) -> RForm:
        return (-1.0) * self


@beartype
def exterior_derivative(A: RForm) -> RForm:
    """
    dA(v, xi_0..xi_r) = sum_j (-1)^j xi_j A(., xi_0..^xi_j..xi_r)(v)
    with constant xi. The result differentiates with a widened stencil.
    """

    def eval(v, *xis):
        total = np.zeros(A.value_shape)
        for j, xi in enumerate(xis):
            rest = xis[:j] + xis[j + 1 :]
            coefficient = MapField(lambda w, rest=rest: A(w, *rest), A.space, A.stencil)
            total = total + (-1) ** j * directional_derivative(coefficient, v, xi)
        return total

    return RForm(A.degree + 1, eval, A.space, A.value_shape, A.stencil.widened())


@beartype
def pullback(F: MapField, B: RForm) -> RForm:
    """(F*B)(v, xi..) = B(F(v), F_* xi, ..)"""
    if F.target is not None and F.target.dim != B.space.dim:
        raise ArgumentError(
            "map into dimension {:d} cannot pull back a form on dimension {:d}".format(
                F.target.dim, B.space.dim
            )
        )

    def eval(v, *xis):
        Fv = np.reshape(F(v), -1)
        if not B.space.contains(Fv):
            raise DomainError(
                "image {:s} of {:s} is outside {:s}".format(
                    format_vector(Fv), format_vector(v), B.space.name
                ),
                point=Fv,
            )
        pushed = [np.reshape(directional_derivative(F, v, xi), -1) for xi in xis]
        return B(Fv, *pushed)

    # derivatives of F*B see the first derivative of F when degree > 0
    level = max(B.stencil.level, F.stencil.level + (1 if B.degree > 0 else 0))
    return RForm(B.degree, eval, F.space, B.value_shape, B.stencil.at_level(level))


@beartype
def wedge_1forms(A: RForm, B: RForm) -> RForm:
    """(A^B)(v, xi, eta) = A(v,xi)B(v,eta) - A(v,eta)B(v,xi)"""
    if A.degree != 1 or B.degree != 1:
        raise ArgumentError(
            "wedge needs two 1-forms, got degrees {:d}, {:d}".format(A.degree, B.degree)
        )
    if A.space.dim != B.space.dim:
        raise ArgumentError("wedge of forms on different chart dimensions")
    if A.value_shape == () and B.value_shape == ():
        shape = ()
    elif (
        len(A.value_shape) == 2
        and len(B.value_shape) == 2
        and A.value_shape[1] == B.value_shape[0]
    ):
        shape = (A.value_shape[0], B.value_shape[1])
    else:
        raise ArgumentError(
            "values {:s} and {:s} do not compose".format(
                str(A.value_shape), str(B.value_shape)
            )
        )

    def eval(v, xi, eta):
        if shape == ():
            return A(v, xi) * B(v, eta) - A(v, eta) * B(v, xi)
        return A(v, xi) @ B(v, eta) - A(v, eta) @ B(v, xi)

    level = max(A.stencil.level, B.stencil.level)
    return RForm(2, eval, A.space, shape, A.stencil.at_level(level))


@beartype
def alternation_defect(A: RForm, v: POINT_TYPE, xis: ARRAY_TYPE) -> float:
    """max over argument swaps of |A(.., xi_i, .., xi_j, ..) + A(swapped)|"""
    base = A(v, *xis)
    worst = 0.0
    for i, j in itertools.combinations(range(len(xis)), 2):
        swapped = list(xis)
        swapped[i], swapped[j] = swapped[j], swapped[i]
        worst = max(worst, float(np.max(np.abs(base + A(v, *swapped)))))
    return worst


@beartype
def linearity_defect(
    A: RForm,
    v: POINT_TYPE,
    xis: ARRAY_TYPE,
    slot: int,
    other: POINT_TYPE,
    alpha: SCALAR_TYPE = 2.0,
    beta: SCALAR_TYPE = -0.5,
) -> float:
    """|A(.. alpha xi + beta other ..) - alpha A(.. xi ..) - beta A(.. other ..)|"""
    if not 0 <= slot < len(xis):
        raise ArgumentError("slot {:d} out of range".format(slot))
    xi = np.asarray(xis[slot], dtype=float)
    other = np.asarray(other, dtype=float)

    def at(w):
        args = list(xis)
        args[slot] = w
        return A(v, *args)

    lhs = at(alpha * xi + beta * other)
    rhs = alpha * at(xi) + beta * at(other)
    return float(np.max(np.abs(lhs - rhs)))
