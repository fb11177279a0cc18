"""
Model geometries with closed form data, addressable by name.
"""

from beartype import beartype
from beartype.typing import Callable, Dict

from riemchart.errors import ArgumentError
from riemchart.gallery.base import *
from riemchart.gallery.conformal import *
from riemchart.gallery.euclidean import *
from riemchart.gallery.hyperbolic import *
from riemchart.gallery.mobius import *
from riemchart.gallery.sphere import *
from riemchart.gallery.toy import *

CONFORMAL_PREFIX = "conformal:"

MODELS: Dict[str, Callable[[], ModelSpace]] = {
    "euclidean2": lambda: euclidean(2),
    "euclidean3": lambda: euclidean(3),
    "sphere": sphere_stereographic,
    "halfplane": hyperbolic_halfplane,
    "disc": poincare_disc,
    "toy": lambda: function_space_toy(2),
    "toy-neighbor": lambda: function_space_toy(2, "neighbor"),
}


@beartype
def get_model(name: str) -> ModelSpace:
    """a registered model, or conformal:<expression in x, y>"""
    if name.startswith(CONFORMAL_PREFIX):
        return conformal2d(name[len(CONFORMAL_PREFIX) :])
    try:
        factory = MODELS[name]
    except KeyError:
        raise ArgumentError(
            "unknown space {:s}, expected one of {:s} or {:s}<expression>".format(
                name, ", ".join(sorted(MODELS)), CONFORMAL_PREFIX
            )
        )
    return factory()
