from tests.common import ProfiledTestCase, close, rng
from beartype import beartype

import warnings

import numpy as np

from riemchart.calculus import ChartSpace, MapField
from riemchart.errors import ArgumentError, IllConditionedWarning, MetricError
from riemchart.metric import (
    IsometryCandidate,
    MetricField,
    christoffel,
    compatibility_residual,
    full_differential_residual,
    isometry_residual,
    riemann_tensor,
    sectional_curvature,
    torsion_residual,
)


def halfplane():
    space = ChartSpace(2, lambda v: v[1] > 0, "halfplane")
    return MetricField(lambda v: np.eye(2) / v[1] ** 2, space)


def sphere():
    return MetricField(lambda v: 4 * np.eye(2) / (1 + v @ v) ** 2, ChartSpace(2))


def warped3():
    return MetricField(
        lambda v: np.diag([1 + v[1] ** 2, 1 + v[2] ** 2, np.exp(v[0])]),
        ChartSpace(3),
    )


@beartype
class Test_LeviCivita(ProfiledTestCase):
    def setUp(self):
        super().setUp()
        self.g = halfplane()

    def test_christoffel(self):
        y = 2.0
        gamma = christoffel(self.g, [0.3, y])
        expected = np.zeros((2, 2, 2))
        expected[0, 0, 1] = expected[0, 1, 0] = -1 / y
        expected[1, 0, 0] = 1 / y
        expected[1, 1, 1] = -1 / y
        self.assertTrue(close(gamma, expected, 1e-8))

    def test_connection_form(self):
        A = self.g.connection
        self.assertIs(A.metric, self.g)
        self.assertTrue(close(A([0.0, 1.0], [1.0, 0.0]), [[0, -1], [1, 0]], 1e-8))

    def test_torsion_free(self):
        gen = rng(21)
        for g in (self.g, warped3()):
            n = g.space.dim
            for _ in range(3):
                v = gen.uniform(0.5, 1.5, size=n)
                xi, eta = gen.normal(size=(2, n))
                self.assertLess(torsion_residual(g.connection, v, xi, eta), 1e-10)

    def test_compatible(self):
        gen = rng(22)
        for g in (self.g, sphere(), warped3()):
            n = g.space.dim
            for _ in range(3):
                v = gen.uniform(0.5, 1.5, size=n)
                xi, eta, zeta = gen.normal(size=(3, n))
                self.assertLess(
                    compatibility_residual(g, g.connection, v, xi, eta, zeta), 1e-5
                )

    def test_full_differential(self):
        gen = rng(23)
        g = warped3()
        for _ in range(3):
            v = gen.uniform(-1, 1, size=3)
            vectors = gen.normal(size=(5, 3))
            self.assertLess(
                full_differential_residual(g, g.connection, v, *vectors), 1e-5
            )


@beartype
class Test_Curvature(ProfiledTestCase):
    def test_halfplane(self):
        g = halfplane()
        gen = rng(24)
        for _ in range(10):
            v = np.array([gen.uniform(-2, 2), gen.uniform(0.5, 2)])
            xi, eta = gen.normal(size=(2, 2))
            self.assertAlmostEqual(sectional_curvature(g, v, xi, eta), -1, delta=1e-3)

    def test_sphere(self):
        g = sphere()
        gen = rng(25)
        for _ in range(10):
            v = gen.uniform(-1.5, 1.5, size=2)
            self.assertAlmostEqual(
                sectional_curvature(g, v, [1, 0], [1, 1]), 1, delta=1e-3
            )

    def test_flat(self):
        g = MetricField(lambda v: np.array([[2.0, 1.0], [1.0, 3.0]]), ChartSpace(2))
        self.assertEqual(sectional_curvature(g, [0.4, 0.1], [1, 0], [0, 1]), 0.0)

    def test_symmetries(self):
        g = warped3()
        gen = rng(26)
        v = gen.uniform(-0.5, 0.5, size=3)
        xi, eta, zeta, theta = gen.normal(size=(4, 3))
        R = riemann_tensor(g, v, xi, eta, zeta, theta)
        swapped = [
            -riemann_tensor(g, v, eta, xi, zeta, theta),
            -riemann_tensor(g, v, xi, eta, theta, zeta),
            riemann_tensor(g, v, zeta, theta, xi, eta),
        ]
        for other in swapped:
            self.assertAlmostEqual(R, other, delta=1e-5)

    def test_first_bianchi(self):
        g = warped3()
        gen = rng(28)
        for _ in range(3):
            v = gen.uniform(-0.5, 0.5, size=3)
            xi, eta, zeta, theta = gen.normal(size=(4, 3))
            cyclic = (
                riemann_tensor(g, v, xi, eta, zeta, theta)
                + riemann_tensor(g, v, eta, zeta, xi, theta)
                + riemann_tensor(g, v, zeta, xi, eta, theta)
            )
            self.assertAlmostEqual(cyclic, 0.0, delta=1e-5)

    def test_plane_basis(self):
        g = warped3()
        gen = rng(29)
        M = np.array([[2.0, 1.0], [-1.0, 0.5]])
        for _ in range(3):
            v = gen.uniform(-0.5, 0.5, size=3)
            xi, eta = gen.normal(size=(2, 3))
            K = sectional_curvature(g, v, xi, eta)
            a, b = M @ np.stack([xi, eta])
            self.assertAlmostEqual(sectional_curvature(g, v, a, b), K, delta=1e-5)

    def test_degenerate_plane(self):
        with self.assertRaises(ArgumentError):
            sectional_curvature(halfplane(), [0, 1], [1, 2], [2, 4])
        with self.assertRaises(ArgumentError):
            sectional_curvature(halfplane(), [0, 1], [0, 0], [1, 0])


@beartype
class Test_MetricErrors(ProfiledTestCase):
    def test_not_symmetric(self):
        g = MetricField(lambda v: np.array([[1.0, 0.5], [0.0, 1.0]]), ChartSpace(2))
        with self.assertRaises(MetricError):
            g([0.0, 0.0])

    def test_wrong_size(self):
        g = MetricField(lambda v: np.eye(3), ChartSpace(2))
        with self.assertRaises(MetricError):
            g([0.0, 0.0])

    def test_indefinite(self):
        g = MetricField(lambda v: np.diag([1.0, -1.0]), ChartSpace(2))
        with self.assertRaises(MetricError):
            christoffel(g, [0.0, 0.0])
        with self.assertRaises(MetricError):
            g.norm([0.0, 0.0], [0.0, 1.0])

    def test_ill_conditioned(self):
        g = MetricField(lambda v: np.diag([1.0, 1e-11]), ChartSpace(2))
        with self.assertWarns(IllConditionedWarning):
            christoffel(g, [0.0, 0.0])

    def test_well_conditioned_is_quiet(self):
        g = MetricField(lambda v: np.diag([1.0, 4.0 + v[0] ** 2]), ChartSpace(2))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            gamma = christoffel(g, [0.5, 0.0])
        self.assertTrue(close(gamma[1, 0, 1], 0.5 / 4.25, 1e-8))


@beartype
class Test_Isometry(ProfiledTestCase):
    def setUp(self):
        super().setUp()
        self.g = halfplane()
        gen = rng(27)
        self.samples = [
            np.array([gen.uniform(-1, 1), gen.uniform(0.5, 2)]) for _ in range(3)
        ]

    def test_translation_and_dilation(self):
        for F in (
            MapField(lambda v: v + np.array([1.0, 0.0]), self.g.space),
            MapField(lambda v: 2 * v, self.g.space),
        ):
            candidate = IsometryCandidate(F, self.g, self.g)
            report = isometry_residual(candidate, self.samples)
            self.assertTrue(report.passes(1e-4), report)
            self.assertEqual(report.flagged, [])

    def test_not_isometry(self):
        F = MapField(lambda v: v + np.array([0.0, 0.5]), self.g.space)
        report = isometry_residual(IsometryCandidate(F, self.g, self.g), self.samples)
        self.assertGreater(report.metric_defect, 1e-2)
        self.assertFalse(report.passes(1e-4))

    def test_singular_sample(self):
        F = MapField(lambda v: np.array([0.0, 1.0 + v[1]]), self.g.space)
        report = isometry_residual(
            IsometryCandidate(F, self.g, self.g), [np.array([0.0, 1.0])], False
        )
        self.assertEqual(report.flagged, [0])
