"""
The hyperbolic plane in the upper half-plane and Poincare disc charts.

Half-plane geodesics are Mobius images of t -> i e^(lam t), the rotation
about i chosen to match the initial direction. Disc geodesics are carried
over by the Cayley transform w = i (1 + z) / (1 - z).
"""

import casadi as ca
import numpy as np

from beartype import beartype

from riemchart.calculus import as_vector
from riemchart.gallery.base import ModelSpace, metric_from_casadi
from riemchart.gallery.mobius import (
    disc_automorphism,
    in_disc,
    in_halfplane,
    mobius_isometries,
)

__all__ = ["hyperbolic_halfplane", "poincare_disc", "cayley", "cayley_inverse"]


def _complex(v) -> complex:
    return complex(v[0], v[1])


def _pair(z: complex) -> np.ndarray:
    return np.array([z.real, z.imag])


def halfplane_geodesic(v0, xi0, t):
    z0 = _complex(as_vector(v0, 2))
    xi = _complex(as_vector(xi0, 2))
    if xi == 0:
        return _pair(z0), _pair(xi)
    y0 = z0.imag
    lam = abs(xi) / y0
    phi = np.angle(xi) - np.pi / 2
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    w = 1j * np.exp(lam * t)
    den = -s * w + c
    z = z0.real + y0 * (c * w + s) / den
    dz = y0 * lam * w / den**2
    return _pair(z), _pair(dz)


def cayley(z: complex, dz: complex = 0j):
    """disc to half-plane, with the pushed tangent"""
    return 1j * (1 + z) / (1 - z), 2j / (1 - z) ** 2 * dz


def cayley_inverse(w: complex, dw: complex = 0j):
    return (w - 1j) / (w + 1j), 2j / (w + 1j) ** 2 * dw


def disc_geodesic(v0, xi0, t):
    w0, dw0 = cayley(_complex(as_vector(v0, 2)), _complex(as_vector(xi0, 2)))
    w, dw = halfplane_geodesic(_pair(w0), _pair(dw0), t)
    z, dz = cayley_inverse(_complex(w), _complex(dw))
    return _pair(z), _pair(dz)


@beartype
def hyperbolic_halfplane() -> ModelSpace:
    """G = I / y^2 on y > 0"""
    x = ca.SX.sym("x", 2)
    g = metric_from_casadi("halfplane", x, ca.SX.eye(2) / x[1] ** 2, in_halfplane)
    isometries = {
        kind: mobius_isometries(kind)
        for kind in ("translation", "dilation", "inversion")
    }
    return ModelSpace("halfplane", g, -1.0, halfplane_geodesic, isometries)


@beartype
def poincare_disc() -> ModelSpace:
    """G = 4 I / (1 - |v|^2)^2 on |v| < 1"""
    x = ca.SX.sym("x", 2)
    gram = 4 / (1 - ca.dot(x, x)) ** 2 * ca.SX.eye(2)
    g = metric_from_casadi("disc", x, gram, in_disc)
    isometries = {
        "rotation": disc_automorphism(0.4),
        "rotation-of-disc": mobius_isometries("rotation-of-disc"),
    }
    return ModelSpace("disc", g, -1.0, disc_geodesic, isometries)
