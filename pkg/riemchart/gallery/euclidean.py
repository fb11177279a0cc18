import casadi as ca
import numpy as np

from beartype import beartype

from riemchart.calculus import MapField, as_vector
from riemchart.gallery.base import ModelSpace, metric_from_casadi, rotation_map

__all__ = ["euclidean"]


@beartype
def euclidean(n: int = 2) -> ModelSpace:
    """G = I on R^n, straight lines for geodesics"""
    x = ca.SX.sym("x", n)
    g = metric_from_casadi("euclidean{:d}".format(n), x, ca.SX.eye(n))
    shift = np.linspace(0.5, -0.5, n)

    def oracle(v0, xi0, t):
        v0 = as_vector(v0, n)
        xi0 = as_vector(xi0, n)
        return v0 + t * xi0, xi0

    isometries = {
        "translation": MapField(lambda v: v + shift, g.space, target=g.space),
    }
    if n >= 2:
        isometries["rotation"] = rotation_map(g.space, 0.7)
    return ModelSpace(g.space.name, g, 0.0, oracle, isometries)
