"""
A finite function space: a point phi holds samples of a function on n grid
nodes and g_phi(xi, eta) = sum_i xi_i eta_i w_i(phi) / n.
"""

import casadi as ca
import numpy as np

from beartype import beartype
from beartype.typing import Callable, Union

from riemchart.calculus import SCALAR_TYPE, ChartSpace, MapField
from riemchart.errors import ArgumentError
from riemchart.gallery.base import ModelSpace, metric_from_casadi
from riemchart.metric import MetricField

__all__ = ["function_space_toy", "constant_shift", "TOY_WEIGHTS"]

TOY_WEIGHTS = ("exp", "neighbor")


@beartype
def function_space_toy(n: int = 2, weight: Union[str, Callable] = "exp") -> ModelSpace:
    """
    weight "exp": w_i = e^phi_i, a product of 1-D metrics, flat
    weight "neighbor": w_i = exp((phi_(i-1) + phi_(i+1)) / 2), periodic
    a callable s -> w(s) is applied to each sample
    """
    if n < 1:
        raise ArgumentError("toy grid needs n >= 1, got {:d}".format(n))
    name = "toy{:d}".format(n)
    if callable(weight):
        space = ChartSpace(n, name=name)

        def gram(v):
            return np.diag([float(weight(s)) for s in v]) / n

        return ModelSpace(name, MetricField(gram, space))
    x = ca.SX.sym("phi", n)
    if weight == "exp":
        w = [ca.exp(x[i]) for i in range(n)]
    elif weight == "neighbor":
        if n < 2:
            raise ArgumentError("neighbor weight needs n >= 2")
        w = [ca.exp((x[(i - 1) % n] + x[(i + 1) % n]) / 2) for i in range(n)]
    else:
        raise ArgumentError(
            "unknown weight {:s}, expected one of {:s}".format(weight, str(TOY_WEIGHTS))
        )
    g = metric_from_casadi(name, x, ca.diag(ca.vertcat(*w)) / n)
    return ModelSpace(name, g)


@beartype
def constant_shift(model: ModelSpace, c: SCALAR_TYPE = 0.5) -> MapField:
    """phi -> phi + c (1, .., 1), which scales the exp metric by e^c"""
    shift = c * np.ones(model.dim)
    return MapField(lambda v: v + shift, model.space, target=model.space)
