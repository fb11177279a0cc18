"""
Parameter defaults and runners behind the command line.

Each runner takes a parameter dict, merges it over the defaults of its
command and returns a pandas DataFrame.
"""

import logging
import multiprocessing as mp

import numpy as np
import pandas as pd

from beartype import beartype
from beartype.typing import Dict, Tuple

from riemchart.errors import ArgumentError, DomainError
from riemchart.gallery import ModelSpace, brioschi_curvature, get_model
from riemchart.geodesic import EnergyDescent, integrate_geodesic
from riemchart.jacobi import curvature_from_circle_lengths, geodesic_circle_length
from riemchart.metric import sectional_curvature

__all__ = [
    "DEFAULT_PARAMS",
    "COMMANDS",
    "init_params",
    "validate_params",
    "run_curvature",
    "run_geodesic",
    "run_circle",
    "run_energy_min",
    "run",
]

logger = logging.getLogger(__name__)

DEFAULT_PARAMS = {
    "curvature": {
        "space": "halfplane",
        "point": None,
        "plane": None,
    },
    "geodesic": {
        "space": "halfplane",
        "v0": None,
        "xi0": None,
        "T": 1.0,
        "dt": 1e-3,
    },
    "circle": {
        "space": "sphere",
        "center": None,
        "radii": [0.05, 0.1, 0.15, 0.2],
        "n_theta": 256,
        "dt": 1e-3,
        "processes": 1,
    },
    "energy-min": {
        "space": "halfplane",
        "a": [-1.0, 1.0],
        "b": [1.0, 1.0],
        "N": 64,
        "tol": 1e-8,
        "max_iter": 100000,
    },
}

COMMANDS = tuple(DEFAULT_PARAMS.keys())


@beartype
def init_params(command: str, params: Dict) -> Dict:
    if command not in DEFAULT_PARAMS:
        raise ArgumentError(
            "unknown command {:s}, expected one of {:s}".format(
                command, ", ".join(COMMANDS)
            )
        )
    p = dict(DEFAULT_PARAMS[command])
    for k, v in params.items():
        if k not in p.keys():
            raise KeyError(k)
        p[k] = v
    return p


def _positive(p: Dict, key: str):
    value = p[key]
    if not isinstance(value, (int, float)) or not value > 0:
        raise ArgumentError("{:s} must be > 0, got {:s}".format(key, str(value)))


def _point(model: ModelSpace, value, key: str) -> np.ndarray:
    if value is None:
        return model.default_point()
    x = np.asarray(value, dtype=float).reshape(-1)
    if x.size != model.dim:
        raise ArgumentError(
            "{:s} has {:d} components, {:s} has dimension {:d}".format(
                key, x.size, model.name, model.dim
            )
        )
    if not model.space.contains(x):
        raise ArgumentError(
            "{:s} = {:s} is outside {:s}".format(key, str(list(x)), model.name)
        )
    return x


def _vector(model: ModelSpace, value, default: int, key: str) -> np.ndarray:
    if value is None:
        return np.eye(model.dim)[default]
    x = np.asarray(value, dtype=float).reshape(-1)
    if x.size != model.dim:
        raise ArgumentError(
            "{:s} has {:d} components, expected {:d}".format(key, x.size, model.dim)
        )
    return x


@beartype
def validate_params(command: str, p: Dict) -> Tuple[ModelSpace, Dict]:
    """
    Check every parameter of a merged dict before computing. Returns the
    model and the parameters with points and vectors resolved to arrays.
    """
    model = get_model(p["space"])
    q = dict(p)
    if command == "curvature":
        if model.dim < 2:
            raise ArgumentError("curvature needs dimension >= 2")
        q["point"] = _point(model, p["point"], "point")
        plane = p["plane"] if p["plane"] is not None else [None, None]
        if len(plane) != 2:
            raise ArgumentError("plane needs two vectors")
        q["plane"] = [
            _vector(model, plane[0], 0, "plane[0]"),
            _vector(model, plane[1], 1, "plane[1]"),
        ]
    elif command == "geodesic":
        _positive(p, "T")
        _positive(p, "dt")
        q["v0"] = _point(model, p["v0"], "v0")
        q["xi0"] = _vector(model, p["xi0"], 0, "xi0")
    elif command == "circle":
        if model.dim < 2:
            raise ArgumentError("circle needs dimension >= 2")
        _positive(p, "dt")
        q["center"] = _point(model, p["center"], "center")
        radii = [float(r) for r in p["radii"]]
        if len(radii) == 0 or min(radii) <= 0:
            raise ArgumentError(
                "radii must be a non empty list of positive numbers, got {:s}".format(
                    str(p["radii"])
                )
            )
        q["radii"] = radii
        if p["n_theta"] < 9:
            raise ArgumentError("n_theta must be >= 9, got {:d}".format(p["n_theta"]))
        if p["processes"] < 1:
            raise ArgumentError("processes must be >= 1")
    elif command == "energy-min":
        q["a"] = _point(model, p["a"], "a")
        q["b"] = _point(model, p["b"], "b")
        if p["N"] < 1:
            raise ArgumentError("N must be >= 1, got {:d}".format(p["N"]))
        _positive(p, "tol")
        if p["max_iter"] < 1:
            raise ArgumentError("max_iter must be >= 1")
    return model, q


def _coords(prefix: str, v: np.ndarray) -> Dict:
    return {"{:s}{:d}".format(prefix, i): float(c) for i, c in enumerate(v)}


@beartype
def run_curvature(params: Dict) -> pd.DataFrame:
    p = init_params("curvature", params)
    model, q = validate_params("curvature", p)
    g = model.metric
    x = q["point"]
    xi, eta = q["plane"]
    K_tensor = sectional_curvature(g, x, xi, eta)
    K_brioschi = brioschi_curvature(g, x) if model.dim == 2 else float("nan")
    if model.known_curvature is not None:
        defect = abs(K_tensor - model.known_curvature)
    else:
        defect = abs(K_tensor - K_brioschi)
    row = {**_coords("x", x), "K_tensor": K_tensor, "K_brioschi": K_brioschi}
    row["defect"] = defect
    return pd.DataFrame([row])


@beartype
def run_geodesic(params: Dict) -> pd.DataFrame:
    p = init_params("geodesic", params)
    model, q = validate_params("geodesic", p)
    g = model.metric
    curve = integrate_geodesic(g.connection, q["v0"], q["xi0"], (0.0, p["T"]), p["dt"])
    rows = [
        {"t": float(t), **_coords("x", x), **_coords("dx", u), "speed": g.norm(x, u)}
        for t, x, u in zip(curve.times, curve.points, curve.velocities)
    ]
    return pd.DataFrame(rows)


def _circle_worker(args) -> Tuple[float, float, str]:
    space, center, frame, r, n_theta, dt = args
    model = get_model(space)
    try:
        length = geodesic_circle_length(model.metric, center, frame, r, n_theta, dt)
    except DomainError as e:
        logger.warning("radius %g: %s", r, str(e))
        return r, float("nan"), "domain"
    return r, length, "ok"


@beartype
def run_circle(params: Dict) -> pd.DataFrame:
    """
    One row per radius up to the first radius whose fan leaves the domain,
    that row flagged with status "domain". K_fit is fitted on the ok rows.
    """
    p = init_params("circle", params)
    model, q = validate_params("circle", p)
    g = model.metric
    center = q["center"]
    eye = np.eye(model.dim)
    frame = model.orthonormal_frame(center, eye[0], eye[1])
    K = model.known_curvature
    if K is None:
        K = sectional_curvature(g, center, frame[0], frame[1])
    jobs = [(p["space"], center, frame, r, p["n_theta"], p["dt"]) for r in q["radii"]]
    if p["processes"] == 1:
        results = []
        for job in jobs:
            results.append(_circle_worker(job))
            if results[-1][2] != "ok":
                break
    else:
        with mp.Pool(p["processes"]) as pool:
            results = pool.map(_circle_worker, jobs)
    rows = []
    for r, length, status in results:
        expansion = 2 * np.pi * r * (1 - K * r**2 / 6)
        rows.append(
            {
                "r": r,
                "L": length,
                "defect": abs(length - expansion),
                "status": status,
            }
        )
        if status != "ok":
            break
    frame_ = pd.DataFrame(rows)
    ok = frame_[frame_["status"] == "ok"]
    if len(np.unique(ok["r"])) >= 2:
        frame_["K_fit"] = curvature_from_circle_lengths(
            ok["r"].to_numpy(), ok["L"].to_numpy()
        )
    else:
        frame_["K_fit"] = float("nan")
    return frame_


@beartype
def run_energy_min(params: Dict) -> pd.DataFrame:
    """iterate rows (iteration, energy, residual) then curve rows (t, x)"""
    p = init_params("energy-min", params)
    model, q = validate_params("energy-min", p)
    descent = EnergyDescent(
        model.metric, q["a"], q["b"], p["N"], p["tol"], p["max_iter"]
    )
    curve = descent.run()
    nan = float("nan")
    blank = _coords("x", np.full(model.dim, nan))
    rows = [
        {
            "kind": "iterate",
            "iteration": it,
            "energy": E,
            "residual": r,
            "t": nan,
            **blank,
        }
        for it, E, r in descent.history
    ]
    rows += [
        {
            "kind": "curve",
            "iteration": nan,
            "energy": nan,
            "residual": nan,
            "t": float(t),
            **_coords("x", x),
        }
        for t, x in zip(curve.times, curve.points)
    ]
    return pd.DataFrame(rows)


RUNNERS = {
    "curvature": run_curvature,
    "geodesic": run_geodesic,
    "circle": run_circle,
    "energy-min": run_energy_min,
}


@beartype
def run(command: str, params: Dict) -> pd.DataFrame:
    if command not in RUNNERS:
        raise ArgumentError("unknown command {:s}".format(command))
    logger.info("running %s", command)
    return RUNNERS[command](params)
