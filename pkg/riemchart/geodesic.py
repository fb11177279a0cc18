"""
Curves, parallel lifts and geodesics.

Lifts and geodesics are integrated with the fixed step RK4 scheme of
riemchart.util on a uniform grid. Each stage point is checked against the
chart domain. The energy functional is minimized over polygons by gradient
descent in the discrete H^1_0 inner product weighted by the metric.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from functools import cached_property

from beartype import beartype
from beartype.typing import List, Optional, Tuple

import numpy as np
import scipy.integrate
import scipy.interpolate
import scipy.linalg

from riemchart.calculus import (
    ARRAY_TYPE,
    POINT_TYPE,
    SCALAR_TYPE,
    ChartSpace,
    MapField,
    as_vector,
    directional_derivative,
    jacobian,
)
from riemchart.connection import ConnectionForm
from riemchart.errors import (
    ArgumentError,
    ConvergenceError,
    DomainError,
    DriftWarning,
    PartialCurveError,
)
from riemchart.metric import MetricField
from riemchart.util import StepExit, format_vector, rk4, rk4_march

__all__ = [
    "DEFAULT_TOLERANCES",
    "Curve",
    "Lift",
    "LiftLimitReport",
    "EnergyDescent",
    "integrate_geodesic",
    "parallel_lift",
    "parallel_transport",
    "lift_limit_check",
    "energy",
    "energy_differential",
    "discrete_energy",
    "discrete_geodesic_residual",
    "minimize_energy",
    "shoot_bvp",
    "map_curve",
    "geodesic_residual",
]

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {
    "drift": 1e-6,
    "grid": 1e-9,
    "endpoint": 1e-10,
    "energy_tol": 1e-8,
    "energy_max_iter": 100000,
    "armijo": 1e-4,
    "min_step": 1e-14,
    "shoot_tol": 1e-8,
    "shoot_max_iter": 50,
    "shoot_steps": 100,
}


@beartype
@dataclass(frozen=True, eq=False)
class Curve:
    """
    A path sampled on a uniform grid, points[i] = x(times[i]) and
    velocities[i] = x'(times[i]). Between nodes the curve is the cubic
    Hermite interpolant.
    """

    times: ARRAY_TYPE
    points: ARRAY_TYPE
    velocities: ARRAY_TYPE
    space: ChartSpace

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        n = self.space.dim
        P = np.asarray(self.points, dtype=float).reshape(t.size, n)
        U = np.asarray(self.velocities, dtype=float).reshape(t.size, n)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "velocities", U)
        if t.size < 2:
            raise ArgumentError("a curve needs at least two nodes")
        steps = np.diff(t)
        if np.any(steps <= 0):
            raise ArgumentError("curve times must be strictly increasing")
        if np.max(np.abs(steps - steps.mean())) > DEFAULT_TOLERANCES["grid"] * max(
            1.0, float(np.max(np.abs(t)))
        ):
            raise ArgumentError("curve times must be uniform")
        for i, p in enumerate(P):
            if not self.space.contains(p):
                raise DomainError(
                    "curve node {:d} at {:s} is outside {:s}".format(
                        i, format_vector(p), self.space.name
                    ),
                    point=p,
                )

    @classmethod
    def from_points(
        cls, times: np.ndarray, points: np.ndarray, space: ChartSpace
    ) -> Curve:
        """velocities by centred differences of the points"""
        t = np.asarray(times, dtype=float)
        P = np.asarray(points, dtype=float).reshape(t.size, space.dim)
        edge_order = 2 if t.size > 2 else 1
        U = np.gradient(P, t, axis=0, edge_order=edge_order)
        return cls(t, P, U, space)

    @property
    def n_steps(self) -> int:
        return self.times.size - 1

    @property
    def dt(self) -> float:
        return float((self.times[-1] - self.times[0]) / self.n_steps)

    @property
    def span(self) -> Tuple[float, float]:
        return float(self.times[0]), float(self.times[-1])

    @cached_property
    def _spline(self):
        return scipy.interpolate.CubicHermiteSpline(
            self.times, self.points, self.velocities, axis=0
        )

    @cached_property
    def _velocity_spline(self):
        return self._spline.derivative()

    def evaluate(self, t: SCALAR_TYPE) -> np.ndarray:
        return np.asarray(self._spline(float(t)), dtype=float)

    def velocity_at(self, t: SCALAR_TYPE) -> np.ndarray:
        return np.asarray(self._velocity_spline(float(t)), dtype=float)

    def node_index(self, t: SCALAR_TYPE) -> int:
        i = int(round((float(t) - self.times[0]) / self.dt))
        if not 0 <= i <= self.n_steps or abs(self.times[i] - t) > 1e-6 * self.dt:
            raise ArgumentError("time {:g} is not a node of the curve grid".format(t))
        return i

    def contains_time(self, t: SCALAR_TYPE) -> bool:
        slack = 1e-9 * self.dt
        return bool(self.times[0] - slack <= t <= self.times[-1] + slack)


@beartype
@dataclass(frozen=True, eq=False)
class Lift:
    """vectors values[i] attached at times[i] of a carrier curve"""

    times: ARRAY_TYPE
    values: ARRAY_TYPE

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        V = np.asarray(self.values, dtype=float)
        if V.ndim != 2 or V.shape[0] != t.size:
            raise ArgumentError(
                "lift has {:d} values for {:d} grid nodes".format(V.shape[0], t.size)
            )
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", V)

    @cached_property
    def _spline(self):
        return scipy.interpolate.CubicSpline(self.times, self.values, axis=0)

    def at(self, t: SCALAR_TYPE) -> np.ndarray:
        return np.asarray(self._spline(float(t)), dtype=float)

    def __len__(self) -> int:
        return self.times.size


@beartype
@dataclass
class LiftLimitReport:
    defects: List[float] = field(default_factory=list)

    @property
    def limit(self) -> float:
        return self.defects[-1]


def _grid(t_span: ARRAY_TYPE, dt, t_initial) -> Tuple[np.ndarray, int]:
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not dt > 0:
        raise ArgumentError("time step must be > 0, got {:g}".format(float(dt)))
    if not t1 > t0:
        raise ArgumentError("empty time span [{:g}, {:g}]".format(t0, t1))
    n = max(1, int(round((t1 - t0) / dt)))
    times = np.linspace(t0, t1, n + 1)
    if t_initial is None:
        return times, 0
    h = times[1] - times[0]
    i0 = int(round((float(t_initial) - t0) / h))
    if not 0 <= i0 <= n or abs(times[i0] - t_initial) > 1e-6 * h:
        raise ArgumentError(
            "initial time {:g} is not a node of the grid".format(float(t_initial))
        )
    return times, i0


@beartype
def integrate_geodesic(
    A: ConnectionForm,
    v0: POINT_TYPE,
    xi0: POINT_TYPE,
    t_span: ARRAY_TYPE,
    dt: SCALAR_TYPE,
    t_initial: Optional[SCALAR_TYPE] = None,
) -> Curve:
    """
    Solve x'' + A(x, x')x' = 0 with x(t_initial) = v0, x'(t_initial) = xi0,
    t_initial defaulting to the start of the span.
    """
    space = A.space
    n = space.dim
    x0 = space.check(v0)
    u0 = as_vector(xi0, n, "initial velocity")
    times, i0 = _grid(t_span, dt, t_initial)

    def rhs(t, y):
        x = y[:n]
        if not space.contains(x):
            raise StepExit(x)
        u = y[n:]
        return np.concatenate([u, -A(x, u) @ u])

    def node_check(y):
        if not space.contains(y[:n]):
            raise StepExit(y[:n])

    ys, lo, hi, exit_point = rk4_march(
        rhs, np.concatenate([x0, u0]), times, i0, node_check
    )
    if exit_point is not None:
        partial = None
        if hi > lo:
            valid = ys[lo : hi + 1]
            partial = Curve(times[lo : hi + 1], valid[:, :n], valid[:, n:], space)
        state = ys[hi] if hi < times.size - 1 else ys[lo]
        raise PartialCurveError(
            "geodesic from {:s} with velocity {:s} left {:s} near {:s}".format(
                format_vector(x0),
                format_vector(u0),
                space.name,
                format_vector(exit_point),
            ),
            point=exit_point,
            curve=partial,
            state=state,
        )
    curve = Curve(times, ys[:, :n], ys[:, n:], space)
    if A.metric is not None:
        _check_drift(A.metric, curve.points, curve.velocities, curve.velocities, i0)
    return curve


def _check_drift(metric, points, left, right, i0, what="speed"):
    q = np.array([metric.inner(p, a, b) for p, a, b in zip(points, left, right)])
    if q[i0] <= 0:
        return 0.0
    drift = float(np.max(np.abs(q - q[i0])) / q[i0])
    logger.debug("%s drift %g", what, drift)
    if drift > DEFAULT_TOLERANCES["drift"]:
        warnings.warn(
            "{:s} drift {:g} exceeds {:g}, reduce the time step".format(
                what, drift, DEFAULT_TOLERANCES["drift"]
            ),
            DriftWarning,
        )
    return drift


@beartype
def parallel_lift(
    A: ConnectionForm, x: Curve, xi0: POINT_TYPE, t0: Optional[SCALAR_TYPE] = None
) -> Lift:
    """solve xi' + A(x, x')xi = 0 on the grid of x with xi(t0) = xi0"""
    xi0 = as_vector(xi0, A.fiber_dim, "initial vector")
    i0 = 0 if t0 is None else x.node_index(t0)

    def rhs(t, xi):
        return -A(x.evaluate(t), x.velocity_at(t)) @ xi

    ys, _, _, _ = rk4_march(rhs, xi0, x.times, i0)
    lift = Lift(x.times, ys)
    if A.metric is not None:
        _check_drift(A.metric, x.points, ys, ys, i0, "transported norm")
    return lift


@beartype
def parallel_transport(
    A: ConnectionForm, x: Curve, xi0: POINT_TYPE, t0: SCALAR_TYPE, t1: SCALAR_TYPE
) -> np.ndarray:
    """transport of xi0 from x(t0) to x(t1)"""
    xi = as_vector(xi0, A.fiber_dim, "initial vector")
    for t in (t0, t1):
        if not x.contains_time(t):
            raise ArgumentError(
                "time {:g} outside curve span [{:g}, {:g}]".format(float(t), *x.span)
            )
    if t1 == t0:
        return xi
    m = max(1, int(round(abs(t1 - t0) / x.dt)))
    h = float(t1 - t0) / m

    def rhs(t, xi):
        return -A(x.evaluate(t), x.velocity_at(t)) @ xi

    for k in range(m):
        xi = rk4(rhs, float(t0) + k * h, xi, h)
    return xi


@beartype
def lift_limit_check(
    A: ConnectionForm, curves: ARRAY_TYPE, lifts: ARRAY_TYPE
) -> LiftLimitReport:
    """
    Defect of xi(t) - xi(t_0) + int_{t_0}^t A(x, x') xi for each member of a
    refinement family, the last member being the limit data.
    """
    if len(curves) != len(lifts) or len(curves) == 0:
        raise ArgumentError("need matching non empty families of curves and lifts")
    report = LiftLimitReport()
    for x, xi in zip(curves, lifts):
        if len(xi) != x.times.size:
            raise ArgumentError("lift is not aligned with its curve")
        integrand = np.array(
            [A(p, u) @ w for p, u, w in zip(x.points, x.velocities, xi.values)]
        )
        integral = scipy.integrate.cumulative_trapezoid(
            integrand, x.times, axis=0, initial=0
        )
        defect = xi.values - xi.values[0] + integral
        report.defects.append(float(np.max(np.linalg.norm(defect, axis=1))))
    return report


@beartype
def energy(g: MetricField, x: Curve) -> float:
    """(1/2) int g(x, x', x') by the trapezoid rule"""
    q = np.array([g.inner(p, u, u) for p, u in zip(x.points, x.velocities)])
    return float(0.5 * scipy.integrate.trapezoid(q, x.times))


@beartype
def energy_differential(g: MetricField, A: ConnectionForm, x: Curve, y: Lift) -> float:
    """dE(x, y) = int g(x, y' + A(x, x')y, x') for y vanishing at both ends"""
    if len(y) != x.times.size:
        raise ArgumentError("variation is not aligned with the curve")
    scale = max(1.0, float(np.max(np.abs(y.values))))
    ends = max(np.max(np.abs(y.values[0])), np.max(np.abs(y.values[-1])))
    if ends > DEFAULT_TOLERANCES["endpoint"] * scale:
        raise ArgumentError(
            "variation must vanish at both ends, endpoint size {:g}".format(ends)
        )
    edge_order = 2 if x.times.size > 2 else 1
    ydot = np.gradient(y.values, x.times, axis=0, edge_order=edge_order)
    integrand = [
        g.inner(p, yd + A(p, u) @ w, u)
        for p, u, w, yd in zip(x.points, x.velocities, y.values, ydot)
    ]
    return float(scipy.integrate.trapezoid(integrand, x.times))


def _segments(points: np.ndarray, dt: float):
    return (points[1:] + points[:-1]) / 2, np.diff(points, axis=0) / dt


@beartype
def discrete_energy(g: MetricField, points: np.ndarray, dt: SCALAR_TYPE) -> float:
    """midpoint rule energy of a polygon with nodes dt apart"""
    mids, d = _segments(points, float(dt))
    return float(0.5 * dt * sum(g.inner(m, u, u) for m, u in zip(mids, d)))


def _discrete_gradient(g, points: np.ndarray, dt: float) -> np.ndarray:
    """gradient of the discrete energy with respect to the interior nodes"""
    mids, d = _segments(points, dt)
    n = points.shape[1]
    eye = np.eye(n)
    q = np.empty_like(d)
    Gd = np.empty_like(d)
    for k, (m, u) in enumerate(zip(mids, d)):
        Gd[k] = g(m) @ u
        q[k] = [u @ directional_derivative(g, m, e) @ u for e in eye]
    return 0.25 * dt * (q[:-1] + q[1:]) + Gd[:-1] - Gd[1:]


def _nodal_residual(g, points: np.ndarray, grad: np.ndarray, dt: float) -> float:
    if grad.size == 0:
        return 0.0
    r = [np.linalg.solve(g(p), w) for p, w in zip(points[1:-1], grad)]
    return float(np.max(np.abs(r)) / dt)


@beartype
def discrete_geodesic_residual(g: MetricField, x: Curve) -> float:
    """sup of G^-1 dE/dx_i / dt over the interior nodes"""
    grad = _discrete_gradient(g, x.points, x.dt)
    return _nodal_residual(g, x.points, grad, x.dt)


@beartype
class EnergyDescent:
    """
    Gradient descent of the discrete energy over the interior nodes of a
    polygon from a to b. The descent direction is the Riesz representative of
    the nodal gradient in the metric weighted discrete H^1_0 inner product.
    history holds (iteration, energy, residual) per iterate.
    """

    def __init__(
        self,
        g: MetricField,
        a: POINT_TYPE,
        b: POINT_TYPE,
        n: int,
        tol: SCALAR_TYPE = DEFAULT_TOLERANCES["energy_tol"],
        max_iter: int = DEFAULT_TOLERANCES["energy_max_iter"],
    ):
        if n < 1:
            raise ArgumentError("grid size must be >= 1, got {:d}".format(n))
        if not tol > 0:
            raise ArgumentError("tolerance must be > 0")
        self.g = g
        self.a = g.space.check(a)
        self.b = g.space.check(b)
        self.n = n
        self.tol = float(tol)
        self.max_iter = max_iter
        self.times = np.linspace(0.0, 1.0, n + 1)
        self.dt = 1.0 / n
        self.history: List[Tuple[int, float, float]] = []

    def initial_points(self, x_init: Optional[Curve]) -> np.ndarray:
        if x_init is None:
            s = self.times[:, None]
            return (1 - s) * self.a + s * self.b
        if not (
            np.allclose(x_init.points[0], self.a, atol=1e-9)
            and np.allclose(x_init.points[-1], self.b, atol=1e-9)
        ):
            raise ArgumentError("initial curve does not connect the end points")
        t0, t1 = x_init.span
        return np.array([x_init.evaluate(t0 + s * (t1 - t0)) for s in self.times])

    def direction(self, points: np.ndarray, grad: np.ndarray) -> np.ndarray:
        n_int, dim = grad.shape
        K = np.zeros((n_int * dim, n_int * dim))
        mids, _ = _segments(points, self.dt)
        for k, m in enumerate(mids):
            G = self.g(m) / self.dt
            nodes = [i for i in (k - 1, k) if 0 <= i < n_int]
            for i in nodes:
                for j in nodes:
                    sign = 1.0 if i == j else -1.0
                    K[i * dim : (i + 1) * dim, j * dim : (j + 1) * dim] += sign * G
        factor = scipy.linalg.cho_factor(K)
        return scipy.linalg.cho_solve(factor, grad.reshape(-1)).reshape(grad.shape)

    def _admissible(self, points: np.ndarray) -> bool:
        return all(self.g.space.contains(p) for p in points[1:-1])

    def curve(self, points: np.ndarray) -> Curve:
        return Curve.from_points(self.times, points, self.g.space)

    def run(self, x_init: Optional[Curve] = None) -> Curve:
        P = self.initial_points(x_init)
        self.history = []
        eps = float(np.finfo(float).eps)
        for it in range(self.max_iter + 1):
            grad = _discrete_gradient(self.g, P, self.dt)
            E = discrete_energy(self.g, P, self.dt)
            r = _nodal_residual(self.g, P, grad, self.dt)
            self.history.append((it, E, r))
            logger.debug("energy descent %d: E %.17g residual %g", it, E, r)
            if r <= self.tol:
                logger.info("energy descent converged in %d iterations", it)
                return self.curve(P)
            if it == self.max_iter:
                break
            p = self.direction(P, grad)
            slope = float(np.sum(grad * p))
            allowance = 1e3 * eps * max(1.0, abs(E))
            alpha = 1.0
            while True:
                trial = P.copy()
                trial[1:-1] -= alpha * p
                if self._admissible(trial):
                    E_trial = discrete_energy(self.g, trial, self.dt)
                    decrease = DEFAULT_TOLERANCES["armijo"] * alpha * slope
                    if E_trial <= E - decrease + allowance:
                        break
                else:
                    logger.debug("step %g leaves the domain", alpha)
                alpha /= 2
                if alpha < DEFAULT_TOLERANCES["min_step"]:
                    raise ConvergenceError(
                        "line search failed at iteration {:d}, residual {:g}".format(
                            it, r
                        ),
                        best=self.curve(P),
                        residual=r,
                    )
            P = trial
        raise ConvergenceError(
            "energy descent did not converge in {:d} iterations, residual {:g}".format(
                self.max_iter, self.history[-1][2]
            ),
            best=self.curve(P),
            residual=self.history[-1][2],
        )


@beartype
def minimize_energy(
    g: MetricField,
    a: POINT_TYPE,
    b: POINT_TYPE,
    n: int,
    x_init: Optional[Curve] = None,
    tol: SCALAR_TYPE = DEFAULT_TOLERANCES["energy_tol"],
    max_iter: int = DEFAULT_TOLERANCES["energy_max_iter"],
) -> Curve:
    """energy critical polygon from a to b on n segments of [0, 1]"""
    return EnergyDescent(g, a, b, n, tol, max_iter).run(x_init)


@beartype
def shoot_bvp(
    A: ConnectionForm,
    g: MetricField,
    a: POINT_TYPE,
    b: POINT_TYPE,
    tol: SCALAR_TYPE = DEFAULT_TOLERANCES["shoot_tol"],
    n_steps: int = DEFAULT_TOLERANCES["shoot_steps"],
    max_iter: int = DEFAULT_TOLERANCES["shoot_max_iter"],
) -> Curve:
    """
    Geodesic from a to b on [0, 1] by damped Newton iteration on the initial
    velocity, the Jacobian of the endpoint map taken by finite differences.
    """
    x_a = g.space.check(a)
    x_b = g.space.check(b)
    n = g.space.dim
    dt = 1.0 / n_steps

    def shoot(xi):
        return integrate_geodesic(A, x_a, xi, (0.0, 1.0), dt)

    xi = x_b - x_a
    try:
        curve = shoot(xi)
    except DomainError as e:
        raise ConvergenceError(
            "initial chord velocity leaves the domain: {:s}".format(str(e)),
            best=getattr(e, "curve", None),
            residual=float("inf"),
        )
    r = curve.points[-1] - x_b
    res = float(np.linalg.norm(r))
    endpoint = MapField(
        lambda w: shoot(w).points[-1],
        ChartSpace(n, name="initial velocities"),
        A.form.stencil,
    )
    for it in range(max_iter):
        logger.debug("shooting %d: velocity %s residual %g", it, format_vector(xi), res)
        if res <= tol:
            logger.info("shooting converged in %d iterations", it)
            return curve
        try:
            J = jacobian(endpoint, xi)
        except DomainError as e:
            raise ConvergenceError(
                "endpoint map not differentiable: {:s}".format(str(e)),
                best=curve,
                residual=res,
            )
        delta = np.linalg.lstsq(J, -r, rcond=None)[0]
        alpha = 1.0
        while alpha >= 2.0**-20:
            try:
                trial = shoot(xi + alpha * delta)
            except DomainError:
                alpha /= 2
                continue
            r_trial = trial.points[-1] - x_b
            if np.linalg.norm(r_trial) < res:
                xi = xi + alpha * delta
                curve, r, res = trial, r_trial, float(np.linalg.norm(r_trial))
                break
            alpha /= 2
        else:
            raise ConvergenceError(
                "shooting stalled at residual {:g}".format(res),
                best=curve,
                residual=res,
            )
    if res <= tol:
        return curve
    raise ConvergenceError(
        "shooting did not converge in {:d} iterations, residual {:g}".format(
            max_iter, res
        ),
        best=curve,
        residual=res,
    )


@beartype
def map_curve(
    F: MapField, x: Curve, lift: Optional[Lift] = None
) -> Tuple[Curve, Optional[Lift]]:
    """image F o x with velocities and lift pushed forward by F_*"""
    if F.target is None:
        raise ArgumentError("map has no target chart")
    points = np.array([np.reshape(F(p), -1) for p in x.points])
    velocities = np.array(
        [
            np.reshape(directional_derivative(F, p, u), -1)
            for p, u in zip(x.points, x.velocities)
        ]
    )
    image = Curve(x.times, points, velocities, F.target)
    if lift is None:
        return image, None
    values = np.array(
        [
            np.reshape(directional_derivative(F, p, w), -1)
            for p, w in zip(x.points, lift.values)
        ]
    )
    return image, Lift(lift.times, values)


@beartype
def geodesic_residual(A: ConnectionForm, x: Curve) -> float:
    """max over interior nodes of |x'' + A(x, x')x'|, x'' from velocities"""
    if x.n_steps < 2:
        raise ArgumentError("geodesic residual needs at least three nodes")
    U = x.velocities
    acc = (U[2:] - U[:-2]) / (2 * x.dt)
    r = [a + A(p, u) @ u for a, p, u in zip(acc, x.points[1:-1], U[1:-1])]
    return float(np.max(np.linalg.norm(r, axis=1)))
