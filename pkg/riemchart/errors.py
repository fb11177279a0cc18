"""
Exceptions and warnings raised by the chart calculus.

Argument problems are ValueErrors so callers validating input can catch them
without importing this module; numerical breakdowns carry the data needed to
inspect what went wrong.
"""

from beartype.typing import Any, Optional

import numpy as np

__all__ = [
    "RiemchartError",
    "ArgumentError",
    "DomainError",
    "PartialCurveError",
    "MetricError",
    "NumericError",
    "ConvergenceError",
    "IllConditionedWarning",
    "DriftWarning",
]


class RiemchartError(Exception):
    pass


class ArgumentError(RiemchartError, ValueError):
    pass


class DomainError(RiemchartError, ValueError):
    """a point left the chart domain"""

    def __init__(self, msg: str, point: Optional[np.ndarray] = None):
        super().__init__(msg)
        self.point = point


class PartialCurveError(DomainError):
    """an integrated curve left the domain, curve holds the valid part"""

    def __init__(
        self,
        msg: str,
        point: Optional[np.ndarray] = None,
        curve: Any = None,
        state: Optional[np.ndarray] = None,
    ):
        super().__init__(msg, point)
        self.curve = curve
        self.state = state


class MetricError(RiemchartError, ValueError):
    def __init__(self, msg: str, point: Optional[np.ndarray] = None):
        super().__init__(msg)
        self.point = point


class NumericError(RiemchartError, ArithmeticError):
    def __init__(self, msg: str, condition: float = np.inf):
        super().__init__(msg)
        self.condition = condition


class ConvergenceError(RiemchartError, RuntimeError):
    def __init__(self, msg: str, best: Any = None, residual: float = np.inf):
        super().__init__(msg)
        self.best = best
        self.residual = residual


class IllConditionedWarning(RuntimeWarning):
    pass


class DriftWarning(RuntimeWarning):
    pass
