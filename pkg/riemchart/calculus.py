"""
Finite difference calculus on an open subset of a coordinate space.

A chart space is the pair (dimension, domain predicate). Fields are pure
evaluators on a chart space carrying the stencil used to differentiate them.
Fields produced by differentiation carry a stencil one level wider, so that
nested differences keep roundoff under control.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace

from beartype import beartype
from beartype.typing import Callable, List, Optional, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.special

from riemchart.errors import ArgumentError, DomainError, NumericError
from riemchart.util import format_vector

__all__ = [
    "SCALAR_TYPE",
    "POINT_TYPE",
    "VALUE_TYPE",
    "ARRAY_TYPE",
    "ChartSpace",
    "StencilConfig",
    "MapField",
    "ReconstructionNodes",
    "as_vector",
    "directional_derivative",
    "jacobian",
    "kth_difference_quotient",
    "build_reconstruction_nodes",
    "mixed_partial_from_directional",
    "nested_partial",
    "close",
]

logger = logging.getLogger(__name__)

SCALAR_TYPE = Union[float, int, np.floating, np.integer]
POINT_TYPE = Union[np.ndarray, list, tuple, float, int, np.floating]
VALUE_TYPE = Union[np.ndarray, float, np.floating]
ARRAY_TYPE = Union[np.ndarray, list, tuple]

EPS = float(np.finfo(float).eps)


def _everywhere(v) -> bool:
    return True


@beartype
def as_vector(v: POINT_TYPE, dim: int, what: str = "vector") -> np.ndarray:
    x = np.asarray(v, dtype=float).reshape(-1)
    if x.shape != (dim,):
        raise ArgumentError(
            "{:s} has {:d} components, expected {:d}".format(what, x.size, dim)
        )
    return x


@beartype
@dataclass(frozen=True)
class ChartSpace:
    dim: int
    in_domain: Callable = _everywhere
    name: str = "chart"

    def __post_init__(self):
        if self.dim < 1:
            raise ArgumentError(
                "chart dimension must be >= 1, got {:d}".format(self.dim)
            )

    def point(self, v: POINT_TYPE) -> np.ndarray:
        return as_vector(v, self.dim, "point")

    def contains(self, v: POINT_TYPE) -> bool:
        x = self.point(v)
        return bool(np.all(np.isfinite(x))) and bool(self.in_domain(x))

    def check(self, v: POINT_TYPE) -> np.ndarray:
        x = self.point(v)
        if not self.contains(x):
            raise DomainError(
                "point {:s} is outside the domain of {:s}".format(
                    format_vector(x), self.name
                ),
                point=x,
            )
        return x


@beartype
@dataclass(frozen=True)
class StencilConfig:
    """
    Differentiation stencil.

    step: fixed step h, or None for the scaled default
    scheme: "central" or "forward" (second order one sided)
    order: accuracy order, 2 for both schemes
    level: nesting depth the step is tuned for
    """

    step: Optional[float] = None
    scheme: str = "central"
    order: int = 2
    level: int = 1

    def __post_init__(self):
        if self.step is not None and not self.step > 0:
            raise ArgumentError("stencil step must be > 0, got {:g}".format(self.step))
        if self.scheme not in ("central", "forward"):
            raise ArgumentError("unknown stencil scheme {:s}".format(self.scheme))
        if self.order != 2:
            raise ArgumentError("only order 2 stencils are supported")
        if self.level < 1:
            raise ArgumentError("stencil level must be >= 1")

    def step_at(self, v: np.ndarray) -> float:
        # level d: h_d = h_1^(3/(d+2)), h_1 = eps^(1/3) by default
        if self.step is None:
            scale = max(1.0, float(np.max(np.abs(v)))) if v.size else 1.0
            return EPS ** (1.0 / (self.level + 2)) * scale
        return self.step ** (3.0 / (self.level + 2))

    def widened(self, by: int = 1) -> StencilConfig:
        return replace(self, level=self.level + by)

    def at_level(self, level: int) -> StencilConfig:
        return replace(self, level=max(level, 1))


@beartype
@dataclass(frozen=True)
class MapField:
    """
    A smooth map on a chart space. Values are scalars, vectors or operators.
    """

    eval: Callable
    space: ChartSpace
    stencil: StencilConfig = field(default_factory=StencilConfig)
    target: Optional[ChartSpace] = None

    def __call__(self, v: POINT_TYPE) -> np.ndarray:
        x = self.space.check(v)
        return np.asarray(self.eval(x), dtype=float)

    def with_stencil(self, stencil: StencilConfig) -> MapField:
        return replace(self, stencil=stencil)


@beartype
def directional_derivative(
    f: MapField, v: POINT_TYPE, xi: POINT_TYPE
) -> VALUE_TYPE:
    """
    df(v, xi) by central differences, one sided when the domain blocks a side
    """
    x = f.space.check(v)
    xi = as_vector(xi, f.space.dim, "direction")
    scale = float(np.max(np.abs(xi)))
    if scale == 0:
        return np.zeros_like(f(x))
    h = f.stencil.step_at(x)
    d = xi / scale
    contains = f.space.contains
    if f.stencil.scheme == "central":
        xp = x + h * d
        xm = x - h * d
        if contains(xp) and contains(xm):
            return scale * (f(xp) - f(xm)) / (2 * h)
    for sign in (1.0, -1.0):
        x1 = x + sign * h * d
        x2 = x + 2 * sign * h * d
        if contains(x1) and contains(x2):
            return sign * scale * (-3 * f(x) + 4 * f(x1) - f(x2)) / (2 * h)
    raise DomainError(
        "no admissible stencil at {:s} along {:s} with step {:g}".format(
            format_vector(x), format_vector(xi), h
        ),
        point=x,
    )


@beartype
def jacobian(f: MapField, v: POINT_TYPE) -> np.ndarray:
    """matrix of f_* at v, column i is df(v, e_i)"""
    x = f.space.check(v)
    eye = np.eye(f.space.dim)
    cols = [np.reshape(directional_derivative(f, x, e), -1) for e in eye]
    return np.stack(cols, axis=1)


@beartype
def kth_difference_quotient(
    h: Callable, tau: SCALAR_TYPE, sigma: SCALAR_TYPE, k: int
) -> VALUE_TYPE:
    """
    sum_j (-1)^(k-j) C(k,j) h(tau + j sigma) / sigma^k, j = 0..k
    """
    if sigma == 0:
        raise ArgumentError("difference quotient step sigma must be nonzero")
    if k < 1:
        raise ArgumentError(
            "difference quotient order must be >= 1, got {:d}".format(k)
        )
    if isinstance(h, MapField):
        if h.space.dim != 1:
            raise ArgumentError("difference quotient needs a field on an interval")

        def call(t):
            return h(np.array([t]))
    else:
        call = h
    total = 0.0
    for j in range(k + 1):
        c = (-1) ** (k - j) * scipy.special.comb(k, j, exact=True)
        total = total + c * np.asarray(call(float(tau + j * sigma)), dtype=float)
    total = total / float(sigma) ** k
    if np.ndim(total) == 0:
        return float(total)
    return total


@beartype
@dataclass(frozen=True)
class ReconstructionNodes:
    """
    Interpolation nodes T and coefficients a with
    p(t) = sum_alpha sum_rho a[alpha, rho] p(rho) t^alpha, deg p <= order.
    """

    dim: int
    order: int
    nodes: np.ndarray
    multiindices: Tuple[Tuple[int, ...], ...]
    coefficients: np.ndarray

    def index(self, multiindex: Tuple[int, ...]) -> int:
        try:
            return self.multiindices.index(tuple(multiindex))
        except ValueError:
            raise ArgumentError(
                "multiindex {:s} not in table of order {:d}".format(
                    str(multiindex), self.order
                )
            )


def _simplex_grid(dim: int, order: int) -> List[Tuple[int, ...]]:
    grid = [
        rho
        for rho in itertools.product(range(order + 1), repeat=dim)
        if sum(rho) <= order
    ]
    return sorted(grid, key=lambda rho: (sum(rho), tuple(-r for r in rho)))


def _vandermonde(nodes: np.ndarray, multiindices) -> np.ndarray:
    return np.array(
        [[np.prod(rho**np.array(alpha)) for alpha in multiindices] for rho in nodes]
    )


@beartype
def build_reconstruction_nodes(dim: int, order: int) -> ReconstructionNodes:
    if dim < 1 or order < 1:
        raise ArgumentError(
            "reconstruction needs dim >= 1 and order >= 1, got {:d}, {:d}".format(
                dim, order
            )
        )
    multiindices = tuple(_simplex_grid(dim, order))
    grid = np.array(multiindices, dtype=float)
    layouts = [("simplex", grid), ("centred simplex", grid - order / (dim + 1))]
    cond = np.inf
    for label, nodes in layouts:
        V = _vandermonde(nodes, multiindices)
        cond = float(np.linalg.cond(V))
        try:
            a = scipy.linalg.solve(V, np.eye(len(multiindices)))
        except (scipy.linalg.LinAlgError, ValueError):
            logger.debug("%s layout singular for dim %d order %d", label, dim, order)
            continue
        # a @ p(nodes) returns monomial coefficients, check on the monomial basis
        check = a @ V
        if np.max(np.abs(check - np.eye(len(multiindices)))) <= 1e-8 * max(1.0, cond):
            return ReconstructionNodes(dim, order, nodes, multiindices, a)
        logger.debug("%s layout failed monomial check, cond %g", label, cond)
    raise NumericError(
        "no unisolvent node layout for dim {:d} order {:d}".format(dim, order),
        condition=cond,
    )


@beartype
def mixed_partial_from_directional(
    u: MapField,
    v: POINT_TYPE,
    multiindex: Union[Tuple[int, ...], List[int]],
    nodes: Optional[ReconstructionNodes] = None,
) -> VALUE_TYPE:
    """
    d^alpha u(v) from k-th directional derivatives along the nodes.

    The interpolation table recovers the coefficient of t^alpha in
    rho -> d_rho^k u(v), which is (k!/alpha!) d^alpha u(v).
    """
    x = u.space.check(v)
    alpha = tuple(int(j) for j in multiindex)
    if len(alpha) != u.space.dim or min(alpha) < 0:
        raise ArgumentError("bad multiindex {:s}".format(str(alpha)))
    k = sum(alpha)
    if k < 1:
        return u(x)
    if nodes is None:
        nodes = build_reconstruction_nodes(u.space.dim, k)
    elif nodes.dim != u.space.dim or nodes.order != k:
        raise ArgumentError(
            "nodes built for dim {:d} order {:d}, need dim {:d} order {:d}".format(
                nodes.dim, nodes.order, u.space.dim, k
            )
        )
    row = nodes.coefficients[nodes.index(alpha)]
    h = u.stencil.at_level(k).step_at(x)
    total = 0.0
    for rho, a in zip(nodes.nodes, row):
        size = float(np.max(np.abs(rho)))
        if a == 0 or size == 0:
            continue
        sigma = h / size
        line = lambda t, rho=rho: u(x + t * rho)
        total = total + a * np.asarray(
            kth_difference_quotient(line, -k * sigma / 2, sigma, k), dtype=float
        )
    factor = math.prod(math.factorial(j) for j in alpha) / math.factorial(k)
    total = factor * total
    if np.ndim(total) == 0:
        return float(total)
    return total


@beartype
def nested_partial(
    u: MapField, v: POINT_TYPE, multiindex: Union[Tuple[int, ...], List[int]]
) -> VALUE_TYPE:
    """d^alpha u(v) by iterated central differences along the chart axes"""
    x = u.space.check(v)
    alpha = tuple(int(j) for j in multiindex)
    if len(alpha) != u.space.dim or min(alpha) < 0:
        raise ArgumentError("bad multiindex {:s}".format(str(alpha)))
    axes = [i for i, j in enumerate(alpha) for _ in range(j)]
    h = u.stencil.at_level(max(len(axes), 1)).step_at(x)
    eye = np.eye(u.space.dim)

    def diff(axes, p):
        if not axes:
            return u(p)
        e = h * eye[axes[0]]
        return (diff(axes[1:], p + e) - diff(axes[1:], p - e)) / (2 * h)

    total = diff(axes, x)
    if np.ndim(total) == 0:
        return float(total)
    return total


@beartype
def close(a, b, tol: float) -> bool:
    """relative comparison above magnitude one, absolute below"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)
    return bool(np.max(np.abs(a - b)) <= tol * scale) if a.size else True
