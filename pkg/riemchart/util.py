from beartype import beartype
from beartype.typing import Callable, Optional, Union

import numpy as np

__all__ = ["rk4", "rk4_march", "StepExit", "format_vector"]


class StepExit(Exception):
    """raised by a right hand side or node check to stop a march at point"""

    def __init__(self, point: np.ndarray):
        super().__init__()
        self.point = point


@beartype
def rk4(
    f: Callable, t: Union[float, int, np.floating], y: np.ndarray, h: float
) -> np.ndarray:
    """Runge Kuta 4th order integrator"""
    k1 = h * f(t, y)
    k2 = h * f(t + h / 2, y + k1 / 2)
    k3 = h * f(t + h / 2, y + k2 / 2)
    k4 = h * f(t + h, y + k3)
    return y + (k1 + 2 * k2 + 2 * k3 + k4) / 6


@beartype
def rk4_march(
    f: Callable,
    y0: np.ndarray,
    times: np.ndarray,
    i0: int,
    check: Optional[Callable] = None,
):
    """
    Fixed step RK4 over the grid times, forward and backward from node i0.

    Returns the states, the first and last valid node, and the first exit
    point if a StepExit stopped either march. Both directions are always
    marched. Nodes outside the valid range are nan.
    """
    ys = np.full((times.size, y0.size), np.nan)
    ys[i0] = y0
    hi, forward_exit = _march(f, ys, times, range(i0, times.size - 1), 1, check)
    lo, backward_exit = _march(f, ys, times, range(i0, 0, -1), -1, check)
    ys[:lo] = np.nan
    ys[hi + 1 :] = np.nan
    return ys, lo, hi, forward_exit if forward_exit is not None else backward_exit


def _march(f, ys, times, nodes, step, check):
    last = nodes.start
    try:
        for i in nodes:
            ys[i + step] = rk4(f, times[i], ys[i], float(times[i + step] - times[i]))
            if check is not None:
                check(ys[i + step])
            last = i + step
    except StepExit as e:
        return last, e.point
    return last, None


def format_vector(v) -> str:
    return "[" + ", ".join("{:.6g}".format(float(x)) for x in np.ravel(v)) + "]"
