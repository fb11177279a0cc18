from tests.common import ProfiledTestCase, close, rng, sample_points
from beartype import beartype

import numpy as np

from riemchart.errors import ArgumentError, DomainError
from riemchart.gallery import (
    MODELS,
    conformal2d,
    euclidean,
    get_model,
    hyperbolic_halfplane,
    sphere_stereographic,
)
from riemchart.geodesic import Lift, integrate_geodesic, parallel_lift
from riemchart.jacobi import (
    JacobiField,
    curvature_from_circle_lengths,
    geodesic_circle_length,
    h_expansion_check,
    integrate_jacobi,
    jacobi_from_variation,
    jacobi_residual,
    parallelism_criterion,
    vanishing_jacobi_family,
)

RADII = np.array([0.05, 0.1, 0.15, 0.2])


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@beartype
class Test_JacobiField(ProfiledTestCase):
    def test_flat(self):
        E = euclidean(2)
        x = integrate_geodesic(E.metric.connection, [0, 0], [1, 0], (0.0, 1.0), 0.1)
        J = integrate_jacobi(E.metric, x, [0.5, 0.0], [0.0, 2.0])
        expected = np.stack([np.full(11, 0.5), 2 * x.times], axis=1)
        self.assertTrue(close(J.values, expected, 1e-12))
        self.assertTrue(close(J.derivatives, np.tile([0.0, 2.0], (11, 1)), 1e-12))

    def test_sphere_sine(self):
        model = sphere_stereographic()
        g = model.metric
        # G = 4 I at the origin, so unit vectors have chart length 1/2
        x = integrate_geodesic(g.connection, [0, 0], [0.5, 0], (0.0, np.pi / 2), 1e-2)
        J = integrate_jacobi(g, x, [0, 0], [0, 0.5])
        self.assertTrue(close(J.norms(g, x), np.sin(x.times), 1e-5))

    def test_halfplane_sinh(self):
        model = hyperbolic_halfplane()
        g = model.metric
        x = integrate_geodesic(g.connection, [0, 1], [1, 0], (0.0, 1.0), 1e-2)
        J = integrate_jacobi(g, x, [0, 0], [0, 1])
        self.assertTrue(close(J.norms(g, x), np.sinh(x.times), 1e-5))
        self.assertLess(jacobi_residual(g, x, J), 1e-4)

    def test_from_middle(self):
        model = hyperbolic_halfplane()
        g = model.metric
        x = integrate_geodesic(g.connection, [0, 1], [1, 0], (-1.0, 1.0), 1e-2, 0.0)
        J = integrate_jacobi(g, x, [0, 0], [0, 1], 0.0)
        self.assertTrue(close(J.norms(g, x), np.abs(np.sinh(x.times)), 1e-5))

    def test_shapes(self):
        with self.assertRaises(ArgumentError):
            JacobiField(np.zeros(3), np.zeros((3, 2)), np.zeros((2, 2)))


@beartype
class Test_Variation(ProfiledTestCase):
    def setUp(self):
        super().setUp()
        self.model = sphere_stereographic()
        self.g = self.model.metric
        self.A = self.g.connection

    def family(self, theta):
        xi = rotation(theta) @ np.array([0.5, 0.0])
        return integrate_geodesic(self.A, [0, 0], xi, (0.0, 1.0), 1e-2)

    def test_flat_family(self):
        E = euclidean(2)

        def family(theta):
            return E.oracle_curve([0, 0], [1, theta], (0.0, 1.0), 10)

        J = jacobi_from_variation(E.metric, family)
        t = np.linspace(0, 1, 11)
        self.assertTrue(close(J.values, np.stack([0 * t, t], axis=1), 1e-9))
        self.assertTrue(close(J.derivatives, np.tile([0, 1.0], (11, 1)), 1e-9))

    def test_matches_integration(self):
        J = jacobi_from_variation(self.g, self.family)
        x = self.family(0.0)
        K = integrate_jacobi(self.g, x, [0, 0], [0, 0.5])
        self.assertTrue(close(J.values, K.values, 1e-4))
        self.assertTrue(close(J.derivatives, K.derivatives, 1e-4))
        self.assertLess(jacobi_residual(self.g, x, J), 1e-4)

    def test_constant_family(self):
        J = jacobi_from_variation(self.g, lambda theta: self.family(0.0))
        self.assertTrue(close(J.values, 0 * J.values, 1e-14))

    def test_bad_step(self):
        with self.assertRaises(ArgumentError):
            jacobi_from_variation(self.g, self.family, 0.0)

    def test_vanishing_family(self):
        x = self.family(0.0)
        fields = vanishing_jacobi_family(self.g, x, 0.5)
        self.assertEqual(len(fields), 2)
        i0 = x.node_index(0.5)
        for k, J in enumerate(fields):
            self.assertTrue(close(J.values[i0], [0.0, 0.0], 1e-8))
            self.assertTrue(close(J.derivatives[i0], np.eye(2)[k], 1e-6))


@beartype
class Test_CircleLength(ProfiledTestCase):
    def test_flat(self):
        E = euclidean(2)
        L = geodesic_circle_length(E.metric, [0.3, 0.1], np.eye(2), 0.5, 64, 0.01)
        self.assertAlmostEqual(L, 2 * np.pi * 0.5, delta=1e-9)

    def test_sphere(self):
        g = sphere_stereographic().metric
        frame = 0.5 * np.eye(2)
        L = geodesic_circle_length(g, [0, 0], frame, 0.3, 64, 0.01)
        self.assertAlmostEqual(L, 2 * np.pi * np.sin(0.3), delta=1e-4)

    def test_halfplane(self):
        g = hyperbolic_halfplane().metric
        L = geodesic_circle_length(g, [0, 1], np.eye(2), 0.3, 64, 0.01)
        self.assertAlmostEqual(L, 2 * np.pi * np.sinh(0.3), delta=1e-4)

    def test_fit(self):
        cases = [
            (sphere_stereographic(), [0, 0], 0.5 * np.eye(2)),
            (hyperbolic_halfplane(), [0, 1], np.eye(2)),
            (euclidean(2), [0.3, -0.2], np.eye(2)),
        ]
        for model, v, frame in cases:
            lengths = np.array(
                [
                    geodesic_circle_length(model.metric, v, frame, r, 64, 0.01)
                    for r in RADII
                ]
            )
            known = model.known_curvature
            K = curvature_from_circle_lengths(RADII, lengths)
            self.assertAlmostEqual(K, known, delta=0.02, msg=model.name)
            defects = np.abs(lengths - 2 * np.pi * RADII * (1 - known * RADII**2 / 6))
            if known == 0:
                self.assertLess(np.max(defects), 1e-9, model.name)
            else:
                self.assertGreaterEqual(defects[3] / defects[1], 24, model.name)

    def test_fit_closed_forms(self):
        r = RADII
        self.assertAlmostEqual(curvature_from_circle_lengths(r, 2 * np.pi * r), 0.0)
        for K, L in ((1, 2 * np.pi * np.sin(r)), (-1, 2 * np.pi * np.sinh(r))):
            self.assertAlmostEqual(curvature_from_circle_lengths(r, L), K, delta=0.02)
        with self.assertRaises(ArgumentError):
            curvature_from_circle_lengths([0.1, 0.1], [0.6, 0.6])
        with self.assertRaises(ArgumentError):
            curvature_from_circle_lengths([0.1, 0.2], [0.6])

    def test_leaves_domain(self):
        model = conformal2d("1 - x**2 - y**2")
        frame = np.eye(2)
        with self.assertRaises(DomainError) as cm:
            geodesic_circle_length(model.metric, [0, 0], frame, 1.0, 16, 0.01)
        self.assertIn("ray", str(cm.exception))

    def test_arguments(self):
        g = euclidean(2).metric
        with self.assertRaises(ArgumentError):
            geodesic_circle_length(g, [0, 0], [[1, 0], [1, 1]], 0.1, 16, 0.01)
        with self.assertRaises(ArgumentError):
            geodesic_circle_length(g, [0, 0], np.eye(2), 0.1, 8, 0.01)
        with self.assertRaises(ArgumentError):
            geodesic_circle_length(g, [0, 0], np.eye(2), 0.0, 16, 0.01)


@beartype
class Test_HExpansion(ProfiledTestCase):
    def test_flat(self):
        g = euclidean(2).metric
        self.assertLess(h_expansion_check(g, [0, 0], np.eye(2), 0.2), 1e-8)

    def test_sphere(self):
        g = sphere_stereographic().metric
        frame = 0.5 * np.eye(2)
        for r in (0.1, 0.2):
            defect = h_expansion_check(g, [0, 0], frame, r, K=1.0)
            self.assertAlmostEqual(defect, 2 * r**2 / 45 - r**4 / 315, delta=1e-5)


@beartype
class Test_Parallelism(ProfiledTestCase):
    def setUp(self):
        super().setUp()
        self.model = hyperbolic_halfplane()
        self.g = self.model.metric
        A = self.g.connection
        self.x = integrate_geodesic(A, [0, 1], [1, 0], (0.0, 1.0), 5e-3)
        self.H = vanishing_jacobi_family(self.g, self.x, 0.5)

    def test_parallel(self):
        xi = parallel_lift(self.g.connection, self.x, [0.3, 1.0])
        report = parallelism_criterion(self.g, self.x, xi, 0.5, self.H, stride=2)
        self.assertTrue(report.parallel, report)
        self.assertTrue(report.direct_parallel, report)
        self.assertTrue(report.agrees)
        self.assertEqual(report.rank, 2)

    def test_not_parallel(self):
        P = parallel_lift(self.g.connection, self.x, [0.3, 1.0])
        xi = Lift(P.times, P.values * (self.x.times - 0.5 + 1)[:, None])
        report = parallelism_criterion(self.g, self.x, xi, 0.5, self.H, stride=2)
        self.assertFalse(report.parallel)
        self.assertFalse(report.direct_parallel)
        self.assertTrue(report.agrees)

    def test_needs_full_rank(self):
        xi = parallel_lift(self.g.connection, self.x, [1.0, 0.0])
        with self.assertRaises(ArgumentError):
            parallelism_criterion(self.g, self.x, xi, 0.5, self.H[:1], stride=2)

    def test_needs_vanishing(self):
        xi = parallel_lift(self.g.connection, self.x, [1.0, 0.0])
        J = integrate_jacobi(self.g, self.x, [0, 1], [1, 0])
        H = [J, self.H[1]]
        with self.assertRaises(ArgumentError):
            parallelism_criterion(self.g, self.x, xi, 0.5, H, stride=2)

    def test_stencil_inside_grid(self):
        xi = parallel_lift(self.g.connection, self.x, [1.0, 0.0])
        with self.assertRaises(ArgumentError):
            parallelism_criterion(self.g, self.x, xi, 0.0, self.H)


@beartype
class Test_ParallelismGallery(ProfiledTestCase):
    def unit(self, g, v, w):
        return w / g.norm(v, w)

    def test_agrees_with_direct_test(self):
        gen = rng(51)
        for name in MODELS:
            model = get_model(name)
            g = model.metric
            A = g.connection
            for v in sample_points(model, gen, 20):
                u = self.unit(g, v, gen.normal(size=model.dim))
                x = integrate_geodesic(A, v, u, (0.0, 0.1), 2.5e-3)
                tau = x.times[gen.integers(2, x.n_steps - 1)]
                H = vanishing_jacobi_family(g, x, tau)
                P = parallel_lift(A, x, self.unit(g, v, gen.normal(size=model.dim)))
                report = parallelism_criterion(g, x, P, tau, H, stride=2)
                self.assertTrue(report.parallel, (name, report))
                self.assertTrue(report.direct_parallel, (name, report))
                self.assertTrue(report.agrees)
                size = gen.uniform(1e-3, 1e-1)
                w = size * self.unit(g, v, gen.normal(size=model.dim))
                W = parallel_lift(A, x, w)
                xi = Lift(P.times, P.values + (x.times - tau)[:, None] * W.values)
                report = parallelism_criterion(g, x, xi, tau, H, stride=2)
                self.assertGreaterEqual(report.direct, 0.99 * size)
                self.assertFalse(report.parallel, (name, report))
                self.assertFalse(report.direct_parallel, (name, report))
                self.assertTrue(report.agrees)
