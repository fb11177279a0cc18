from __future__ import annotations

import re
from dataclasses import dataclass, field

import casadi as ca
import numpy as np

from beartype import beartype
from beartype.typing import Callable, Dict, Optional, Tuple

from riemchart.calculus import (
    POINT_TYPE,
    SCALAR_TYPE,
    ChartSpace,
    MapField,
    StencilConfig,
    as_vector,
    directional_derivative,
    nested_partial,
)
from riemchart.errors import ArgumentError
from riemchart.geodesic import Curve
from riemchart.metric import MetricField

__all__ = [
    "ModelSpace",
    "casadi_evaluator",
    "metric_from_casadi",
    "brioschi_curvature",
    "rotation_map",
]


@beartype
@dataclass(frozen=True, eq=False)
class ModelSpace:
    """
    A metric with the closed forms known about it.

    geodesic_oracle: (v0, xi0, t) -> (x(t), x'(t))
    isometries: label -> map of the chart into itself
    """

    name: str
    metric: MetricField
    known_curvature: Optional[float] = None
    geodesic_oracle: Optional[Callable] = None
    isometries: Dict[str, MapField] = field(default_factory=dict)

    @property
    def space(self) -> ChartSpace:
        return self.metric.space

    @property
    def dim(self) -> int:
        return self.metric.space.dim

    def default_point(self) -> np.ndarray:
        """the origin, or the last unit vector when the origin is excluded"""
        v = np.zeros(self.dim)
        if self.space.contains(v):
            return v
        v[-1] = 1.0
        return self.space.check(v)

    def orthonormal_frame(
        self, v: POINT_TYPE, xi: POINT_TYPE, eta: POINT_TYPE
    ) -> np.ndarray:
        """Gram-Schmidt of (xi, eta) in g_v"""
        x = self.space.check(v)
        e1 = as_vector(xi, self.dim)
        e1 = e1 / self.metric.norm(x, e1)
        e2 = as_vector(eta, self.dim)
        e2 = e2 - self.metric.inner(x, e2, e1) * e1
        length = self.metric.norm(x, e2)
        if length < 1e-12:
            raise ArgumentError("plane vectors are parallel")
        return np.stack([e1, e2 / length])

    def oracle_curve(
        self,
        v0: POINT_TYPE,
        xi0: POINT_TYPE,
        t_span: Tuple[SCALAR_TYPE, SCALAR_TYPE],
        n: int,
    ) -> Curve:
        """oracle geodesic sampled on n + 1 nodes with analytic velocities"""
        if self.geodesic_oracle is None:
            raise ArgumentError("{:s} has no geodesic oracle".format(self.name))
        times = np.linspace(t_span[0], t_span[1], n + 1)
        states = [self.geodesic_oracle(v0, xi0, float(t)) for t in times]
        points = np.array([np.reshape(p, -1) for p, _ in states])
        velocities = np.array([np.reshape(u, -1) for _, u in states])
        return Curve(times, points, velocities, self.space)


def casadi_evaluator(name: str, x: ca.SX, expr: ca.SX) -> Callable:
    # casadi names are letters, digits and single underscores
    name = "_".join(re.findall(r"[0-9a-zA-Z]+", name)) or "f"
    if not name[0].isalpha():
        name = "f_" + name
    f = ca.Function(name, [x], [expr], ["v"], [name])
    shape = expr.shape

    def evaluate(v):
        value = np.array(f(v))
        if shape[1] == 1:
            return value.reshape(-1) if shape[0] > 1 else value.item()
        return value

    return evaluate


@beartype
def metric_from_casadi(
    name: str,
    x: ca.SX,
    gram: ca.SX,
    in_domain: Optional[Callable] = None,
    stencil: Optional[StencilConfig] = None,
) -> MetricField:
    n = x.shape[0]
    if gram.shape != (n, n):
        raise ArgumentError(
            "Gram expression has shape {:s}, expected {:s}".format(
                str(gram.shape), str((n, n))
            )
        )
    space = ChartSpace(n, in_domain, name) if in_domain else ChartSpace(n, name=name)
    return MetricField(
        casadi_evaluator("gram_" + name, x, gram),
        space,
        stencil if stencil is not None else StencilConfig(),
    )


@beartype
def brioschi_curvature(g: MetricField, v: POINT_TYPE) -> float:
    """
    Gaussian curvature of a 2-D metric from E, F, G and their derivatives,

        K = (det M1 - det M2) / (EG - F^2)^2
    """
    if g.space.dim != 2:
        raise ArgumentError(
            "Brioschi formula needs a 2-D metric, got {:d}".format(g.space.dim)
        )
    x = g.space.check(v)
    coeff = {
        name: MapField(lambda w, i=i, j=j: g(w)[i, j], g.space, g.stencil)
        for name, (i, j) in {"E": (0, 0), "F": (0, 1), "G": (1, 1)}.items()
    }
    e_u, e_v = np.eye(2)
    d = {}
    for name, f in coeff.items():
        d[name + "_u"] = float(directional_derivative(f, x, e_u))
        d[name + "_v"] = float(directional_derivative(f, x, e_v))
    E_vv = float(nested_partial(coeff["E"], x, (0, 2)))
    F_uv = float(nested_partial(coeff["F"], x, (1, 1)))
    G_uu = float(nested_partial(coeff["G"], x, (2, 0)))
    Gm = g(x)
    E, F, G = Gm[0, 0], Gm[0, 1], Gm[1, 1]
    M1 = np.array(
        [
            [
                -0.5 * E_vv + F_uv - 0.5 * G_uu,
                0.5 * d["E_u"],
                d["F_u"] - 0.5 * d["E_v"],
            ],
            [d["F_v"] - 0.5 * d["G_u"], E, F],
            [0.5 * d["G_v"], F, G],
        ]
    )
    M2 = np.array(
        [
            [0.0, 0.5 * d["E_v"], 0.5 * d["G_u"]],
            [0.5 * d["E_v"], E, F],
            [0.5 * d["G_u"], F, G],
        ]
    )
    return float((np.linalg.det(M1) - np.linalg.det(M2)) / (E * G - F * F) ** 2)


def rotation_map(space: ChartSpace, angle: float, axes=(0, 1)) -> MapField:
    """rotation of the chart coordinates in the plane of two axes"""
    n = space.dim
    R = np.eye(n)
    i, j = axes
    c, s = np.cos(angle), np.sin(angle)
    R[i, i], R[i, j], R[j, i], R[j, j] = c, -s, s, c
    return MapField(lambda v: R @ as_vector(v, n), space, target=space)
