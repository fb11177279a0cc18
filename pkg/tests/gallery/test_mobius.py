from tests.common import ProfiledTestCase, close, rng
from beartype import beartype

import numpy as np

from riemchart.errors import ArgumentError, DomainError
from riemchart.gallery import hyperbolic_halfplane, poincare_disc
from riemchart.gallery.mobius import (
    MOBIUS_KINDS,
    disc_automorphism,
    mobius,
    mobius_isometries,
)
from riemchart.geodesic import geodesic_residual, map_curve
from riemchart.metric import IsometryCandidate, isometry_residual


@beartype
class Test_Mobius(ProfiledTestCase):
    def test_values(self):
        self.assertTrue(close(mobius_isometries("translation")([0.3, 0.7]), [1.3, 0.7]))
        self.assertTrue(close(mobius_isometries("dilation")([0.3, 0.7]), [0.6, 1.4]))
        inversion = mobius_isometries("inversion")
        self.assertTrue(close(inversion([0.0, 1.0]), [0.0, 1.0]))
        self.assertTrue(close(inversion([1.0, 1.0]), [-0.5, 0.5]))

    def test_determinant(self):
        with self.assertRaises(ArgumentError):
            mobius(1, 1, 1, 1)

    def test_outside(self):
        with self.assertRaises(DomainError):
            mobius(0, -1, 1, 0)([0.0, 0.0])

    def test_disc(self):
        F = disc_automorphism(0.0, (0.3, 0.2))
        self.assertTrue(close(F([0.3, 0.2]), [0.0, 0.0], 1e-15))
        R = disc_automorphism(np.pi / 2)
        self.assertTrue(close(R([0.5, 0.0]), [0.0, 0.5], 1e-15))
        with self.assertRaises(DomainError):
            disc_automorphism(0.0, (0.6, 0.8))

    def test_unknown(self):
        with self.assertRaises(ArgumentError):
            mobius_isometries("reflection")


@beartype
class Test_Isometries(ProfiledTestCase):
    def test_residual(self):
        gen = rng(41)
        half = hyperbolic_halfplane()
        disc = poincare_disc()
        for kind in MOBIUS_KINDS:
            F = mobius_isometries(kind)
            if kind == "rotation-of-disc":
                g = disc.metric
                samples = [gen.uniform(-0.5, 0.5, size=2) for _ in range(3)]
            else:
                g = half.metric
                samples = [
                    np.array([gen.uniform(-1, 1), gen.uniform(0.5, 2)])
                    for _ in range(3)
                ]
            report = isometry_residual(IsometryCandidate(F, g, g), samples)
            self.assertTrue(report.passes(1e-4), (kind, report))

    def test_geodesic_images(self):
        model = hyperbolic_halfplane()
        A = model.metric.connection
        starts = [([0.0, 1.0], [1.0, 0.0]), ([0.5, 0.7], [0.3, 0.4])]
        for kind in ("translation", "dilation", "inversion"):
            F = mobius_isometries(kind)
            for v0, xi0 in starts:
                x = model.oracle_curve(v0, xi0, (0.0, 1.0), 1000)
                image, _ = map_curve(F, x)
                self.assertLess(geodesic_residual(A, image), 1e-5, kind)
