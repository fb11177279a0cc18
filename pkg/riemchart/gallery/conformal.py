import casadi as ca
import numpy as np

from beartype import beartype
from beartype.typing import Callable, Union

from riemchart.calculus import ChartSpace
from riemchart.gallery.base import ModelSpace, casadi_evaluator, metric_from_casadi
from riemchart.metric import MetricField
from riemchart.symbolic import compile_scalar

__all__ = ["conformal2d"]

NAMES = ("x", "y")


@beartype
def conformal2d(lam: Union[str, Callable], name: str = "") -> ModelSpace:
    """
    G = lam(v)^2 I on the part of the plane where lam > 0.

    lam is an expression in x, y or a callable on points.
    """
    if callable(lam):
        label = name or "conformal"

        def positive(v):
            value = float(lam(v))
            return bool(np.isfinite(value) and value > 0)

        space = ChartSpace(2, positive, label)
        g = MetricField(lambda v: float(lam(v)) ** 2 * np.eye(2), space)
        return ModelSpace(label, g)

    label = name or "conformal:" + lam
    x = ca.SX.sym("x", 2)
    expr = compile_scalar(lam, x, NAMES)
    factor = casadi_evaluator("conformal_factor", x, expr)

    def positive(v):
        value = float(factor(v))
        return bool(np.isfinite(value) and value > 0)

    g = metric_from_casadi(label, x, expr**2 * ca.SX.eye(2), positive)
    return ModelSpace(label, g)
