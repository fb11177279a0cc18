"""
riemchart command line.

    riemchart curvature --space halfplane --point 0,1 --plane e1,e2
    riemchart geodesic --space halfplane --v0 0,1 --xi0 1,0 --T 1 --dt 1e-3
    riemchart circle --space sphere --radii 0.05,0.1,0.15,0.2
    riemchart energy-min --space halfplane --a=-1,1 --b=1,1 --N 64

Exit status is 0 on success, 2 for invalid arguments and 3 when a
computation leaves the chart domain or fails to converge.
"""

import argparse
import json
import logging
import sys

import numpy as np
import pandas as pd

from beartype.typing import List, Optional, Sequence

from riemchart import experiments
from riemchart.errors import (
    ArgumentError,
    ConvergenceError,
    DomainError,
    MetricError,
    NumericError,
)

__all__ = ["main", "build_parser", "parse_vector", "parse_plane"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_RUNTIME = 3

CSV_FLOAT_FORMAT = "%.17g"


def parse_vector(text: str) -> List[float]:
    try:
        return [float(c) for c in text.split(",")]
    except ValueError:
        raise ArgumentError("cannot read a vector from {:s}".format(text))


def parse_plane(text: str) -> List:
    """e<i>,e<j> for chart basis vectors, or two vectors separated by ;"""
    if ";" in text:
        parts = text.split(";")
        if len(parts) != 2:
            raise ArgumentError("plane needs two vectors, got {:s}".format(text))
        return [parse_vector(p) for p in parts]
    labels = text.split(",")
    if len(labels) != 2 or not all(s.startswith("e") for s in labels):
        raise ArgumentError(
            "plane must be e<i>,e<j> or two vectors u1,u2;w1,w2, got {:s}".format(text)
        )
    try:
        return [int(s[1:]) for s in labels]
    except ValueError:
        raise ArgumentError("bad basis label in {:s}".format(text))


def _basis_plane(indices: List, dim: int) -> List:
    if all(isinstance(i, int) for i in indices):
        if not all(1 <= i <= dim for i in indices):
            raise ArgumentError(
                "basis labels {:s} outside 1..{:d}".format(str(indices), dim)
            )
        return [np.eye(dim)[i - 1].tolist() for i in indices]
    return indices


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--space",
        default=None,
        help="gallery model name or conformal:<expression in x, y>",
    )
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output path, stdout if absent")
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="riemchart", description="Riemannian geometry on a single chart."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curvature", parents=[common], help="sectional curvature")
    p.add_argument("--point", type=parse_vector, default=None)
    p.add_argument("--plane", type=parse_plane, default=None)

    p = sub.add_parser("geodesic", parents=[common], help="integrate a geodesic")
    p.add_argument("--v0", type=parse_vector, default=None)
    p.add_argument("--xi0", type=parse_vector, default=None)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)

    p = sub.add_parser("circle", parents=[common], help="geodesic circle lengths")
    p.add_argument("--center", type=parse_vector, default=None)
    p.add_argument("--radii", type=parse_vector, default=None)
    p.add_argument("--n-theta", dest="n_theta", type=int, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--processes", type=int, default=None)

    p = sub.add_parser("energy-min", parents=[common], help="minimize energy")
    p.add_argument("--a", type=parse_vector, default=None)
    p.add_argument("--b", type=parse_vector, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    return parser


def _params(args: argparse.Namespace) -> dict:
    skip = {"command", "format", "out", "verbose"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def _records(frame: pd.DataFrame) -> List[dict]:
    clean = frame.astype(object).where(frame.notna(), None)
    return clean.to_dict(orient="records")


def _json_default(o):
    if hasattr(o, "item"):
        return o.item()
    if hasattr(o, "tolist"):
        return o.tolist()
    return str(o)


def write_table(
    frame: pd.DataFrame,
    fmt: str,
    out: Optional[str],
    command: str,
    params: dict,
    status: str,
):
    if fmt == "csv":
        text = frame.to_csv(float_format=CSV_FLOAT_FORMAT, index=False)
    else:
        payload = {
            "command": command,
            "params": params,
            "status": status,
            "rows": _records(frame),
        }
        text = json.dumps(payload, indent=2, default=_json_default) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as f:
            f.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        params = experiments.init_params(args.command, _params(args))
        if args.command == "curvature" and params["plane"] is not None:
            model, _ = experiments.validate_params(
                "curvature", dict(params, plane=None)
            )
            params["plane"] = _basis_plane(params["plane"], model.dim)
        frame = experiments.run(args.command, params)
    except (ArgumentError, KeyError) as e:
        logger.error("invalid arguments: %s", str(e))
        return EXIT_ARGUMENT
    except (DomainError, ConvergenceError, NumericError, MetricError) as e:
        logger.error("%s failed: %s", args.command, str(e))
        return EXIT_RUNTIME
    status = "ok"
    if "status" in frame.columns and (frame["status"] != "ok").any():
        status = "failed"
    write_table(frame, args.format, args.out, args.command, params, status)
    if status != "ok":
        logger.error("%s stopped early, partial results written", args.command)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
