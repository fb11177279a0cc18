"""
Isometries of the hyperbolic plane: real Mobius maps of the upper half-plane
and the automorphisms of the Poincare disc.
"""

import casadi as ca
import numpy as np

from beartype import beartype
from beartype.typing import Tuple

from riemchart.calculus import SCALAR_TYPE, ChartSpace, MapField
from riemchart.errors import ArgumentError, DomainError
from riemchart.gallery.base import casadi_evaluator
from riemchart.util import format_vector

__all__ = [
    "HALFPLANE",
    "DISC",
    "MOBIUS_KINDS",
    "in_halfplane",
    "in_disc",
    "mobius",
    "disc_automorphism",
    "mobius_isometries",
]

DETERMINANT_TOL = 1e-12


def in_halfplane(v) -> bool:
    return bool(v[1] > 0)


def in_disc(v) -> bool:
    return bool(v @ v < 1)


HALFPLANE = ChartSpace(2, in_halfplane, "halfplane")
DISC = ChartSpace(2, in_disc, "disc")

MOBIUS_KINDS = ("translation", "dilation", "inversion", "rotation-of-disc")


@beartype
def mobius(
    a: SCALAR_TYPE, b: SCALAR_TYPE, c: SCALAR_TYPE, d: SCALAR_TYPE
) -> MapField:
    """z -> (a z + b) / (c z + d) on the half-plane, ad - bc = 1"""
    a, b, c, d = (float(s) for s in (a, b, c, d))
    det = a * d - b * c
    if abs(det - 1) > DETERMINANT_TOL:
        raise ArgumentError(
            "Mobius coefficients need ad - bc = 1, got {:.17g}".format(float(det))
        )
    x = ca.SX.sym("x", 2)
    X, Y = x[0], x[1]
    den = (c * X + d) ** 2 + c**2 * Y**2
    re = (a * c * (X**2 + Y**2) + (a * d + b * c) * X + b * d) / den
    f = casadi_evaluator("mobius", x, ca.vertcat(re, Y / den))

    def eval(v):
        if (c * v[0] + d) ** 2 + (c * v[1]) ** 2 == 0:
            raise DomainError(
                "{:s} is the pole of the Mobius map".format(format_vector(v)), point=v
            )
        return f(v)

    return MapField(eval, HALFPLANE, target=HALFPLANE)


@beartype
def disc_automorphism(
    alpha: SCALAR_TYPE = 0.0, p: Tuple[SCALAR_TYPE, SCALAR_TYPE] = (0.0, 0.0)
) -> MapField:
    """z -> e^(i alpha) (z - p) / (1 - conj(p) z)"""
    pc = complex(p[0], p[1])
    if abs(pc) >= 1:
        raise DomainError(
            "centre {:s} puts the pole inside the closed disc".format(format_vector(p)),
            point=np.array(p, dtype=float),
        )
    rot = np.exp(1j * alpha)

    def eval(v):
        z = complex(v[0], v[1])
        w = rot * (z - pc) / (1 - pc.conjugate() * z)
        return np.array([w.real, w.imag])

    return MapField(eval, DISC, target=DISC)


@beartype
def mobius_isometries(
    kind: str,
    alpha: SCALAR_TYPE = 0.4,
    p: Tuple[SCALAR_TYPE, SCALAR_TYPE] = (0.3, 0.2),
) -> MapField:
    if kind == "translation":
        return mobius(1, 1, 0, 1)
    elif kind == "dilation":
        return mobius(np.sqrt(2), 0, 0, 1 / np.sqrt(2))
    elif kind == "inversion":
        return mobius(0, -1, 1, 0)
    elif kind == "rotation-of-disc":
        return disc_automorphism(alpha, p)
    raise ArgumentError(
        "unknown isometry {:s}, expected one of {:s}".format(kind, str(MOBIUS_KINDS))
    )
