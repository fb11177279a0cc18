"""
The round sphere in the stereographic chart from the north pole,

    P(v) = (2 v, |v|^2 - 1) / (1 + |v|^2),

which pulls the unit sphere metric back to G = 4 I / (1 + |v|^2)^2.
"""

import casadi as ca
import numpy as np

from beartype import beartype

from riemchart.calculus import as_vector
from riemchart.gallery.base import ModelSpace, metric_from_casadi, rotation_map

__all__ = ["sphere_stereographic", "stereographic_inverse", "stereographic_chart"]


def stereographic_inverse(v: np.ndarray) -> np.ndarray:
    """chart point to the unit sphere in R^(n+1)"""
    s = 1 + v @ v
    return np.concatenate([2 * v, [v @ v - 1]]) / s


def _inverse_differential(v: np.ndarray, xi: np.ndarray) -> np.ndarray:
    s = 1 + v @ v
    ds = 2 * v @ xi
    return np.concatenate([2 * xi / s - 2 * v * ds / s**2, [2 * ds / s**2]])


def stereographic_chart(q: np.ndarray, dq: np.ndarray):
    """sphere point and tangent back to the chart"""
    n = q.size - 1
    den = 1 - q[n]
    v = q[:n] / den
    xi = dq[:n] / den + q[:n] * dq[n] / den**2
    return v, xi


@beartype
def sphere_stereographic(n: int = 2) -> ModelSpace:
    x = ca.SX.sym("x", n)
    gram = 4 / (1 + ca.dot(x, x)) ** 2 * ca.SX.eye(n)
    g = metric_from_casadi("sphere", x, gram)

    def oracle(v0, xi0, t):
        v0 = as_vector(v0, n)
        xi0 = as_vector(xi0, n)
        p = stereographic_inverse(v0)
        w = _inverse_differential(v0, xi0)
        speed = np.linalg.norm(w)
        if speed == 0:
            return v0, xi0
        # great circle through p with velocity w
        q = np.cos(speed * t) * p + np.sin(speed * t) * w / speed
        dq = -speed * np.sin(speed * t) * p + np.cos(speed * t) * w
        return stereographic_chart(q, dq)

    isometries = {}
    if n >= 2:
        isometries["rotation"] = rotation_map(g.space, 0.7)
    return ModelSpace("sphere", g, 1.0, oracle, isometries)
