from tests.common import ProfiledTestCase
from beartype import beartype

import casadi as ca
import numpy as np
import sympy

from riemchart.errors import ArgumentError
from riemchart.symbolic import compile_scalar, parse_expression, sympy_to_casadi


@beartype
class Test_Symbolic(ProfiledTestCase):
    def setUp(self):
        super().setUp()
        self.x = ca.SX.sym("x", 2)

    def evaluate(self, expr, v):
        f = ca.Function("f", [self.x], [expr])
        return float(f(v))

    def test_sympy_to_casadi(self):
        x = sympy.symbols("x")
        y = sympy.sin(x) + 2
        f_ca, symbols = sympy_to_casadi(y)
        f = ca.Function("f", [symbols["x"]], [f_ca])
        self.assertAlmostEqual(float(f(0.3)), np.sin(0.3) + 2, places=14)

    def test_rational_and_constants(self):
        expr = compile_scalar("pi*x/2 + E - sqrt(y)", self.x, ("x", "y"))
        value = self.evaluate(expr, [0.5, 4.0])
        self.assertAlmostEqual(value, np.pi / 4 + np.e - 2, places=14)

    def test_compile_scalar(self):
        expr = compile_scalar("exp(y)*(1 + x**2)", self.x, ("x", "y"))
        value = self.evaluate(expr, [0.3, -0.2])
        self.assertAlmostEqual(value, np.exp(-0.2) * 1.09, places=14)

    def test_float_literal(self):
        expr = compile_scalar("0.25*cosh(x) + tanh(y)", self.x, ("x", "y"))
        value = self.evaluate(expr, [1.0, 2.0])
        self.assertAlmostEqual(value, 0.25 * np.cosh(1.0) + np.tanh(2.0), places=14)

    def test_unknown_symbol(self):
        with self.assertRaises(ArgumentError):
            parse_expression("x + z", ("x", "y"))

    def test_bad_syntax(self):
        with self.assertRaises(ArgumentError):
            compile_scalar("x +* y", self.x, ("x", "y"))

    def test_unsupported_function(self):
        with self.assertRaises(ArgumentError):
            compile_scalar("gamma(x)", self.x, ("x", "y"))

    def test_symbol_table(self):
        x, y = sympy.symbols("x y")
        known = {"x": self.x[0]}
        expr, symbols = sympy_to_casadi(x * y + 1, known)
        self.assertIs(symbols, known)
        self.assertIs(symbols["x"], known["x"])
        self.assertEqual(sorted(symbols), ["x", "y"])
        f = ca.Function("f", [self.x, symbols["y"]], [expr])
        self.assertAlmostEqual(float(f([2.0, 0.0], 3.0)), 7.0, places=14)
