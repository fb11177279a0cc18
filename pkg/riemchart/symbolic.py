"""
Translation of sympy expressions into casadi, used to compile user supplied
conformal factors and weight rules into fast evaluators.
"""

import casadi as ca
import sympy

from riemchart.errors import ArgumentError

__all__ = ["sympy_to_casadi", "parse_expression", "compile_scalar"]

_UNARY = {
    "sin": ca.sin,
    "cos": ca.cos,
    "tan": ca.tan,
    "atan": ca.arctan,
    "exp": ca.exp,
    "log": ca.log,
    "sinh": ca.sinh,
    "cosh": ca.cosh,
    "tanh": ca.tanh,
    "Abs": ca.fabs,
}


def sympy_to_casadi(f, symbols=None):
    """casadi expression of f and the symbol table, extended with new symbols"""
    if symbols is None:
        symbols = {}
    return _sympy_parser(f, symbols), symbols


def _sympy_parser(f, symbols):
    prs = lambda f: _sympy_parser(f, symbols)
    f_type = type(f)
    if isinstance(f, sympy.Add):
        s = 0
        for arg in f.args:
            s += prs(arg)
        return s
    elif isinstance(f, sympy.Mul):
        prod = 1
        for arg in f.args:
            prod *= prs(arg)
        return prod
    elif isinstance(f, sympy.Pow):
        base, power = f.args
        base_ca = prs(base)
        if power == sympy.S.Half:
            return ca.sqrt(base_ca)
        return base_ca ** prs(power)
    elif isinstance(f, sympy.Symbol):
        if str(f) not in symbols:
            symbols[str(f)] = ca.SX.sym(str(f))
        return symbols[str(f)]
    elif isinstance(f, int):
        return f
    elif isinstance(f, sympy.Integer):
        return int(f)
    elif isinstance(f, sympy.Rational):
        return prs(f.p) / prs(f.q)
    elif isinstance(f, sympy.Float):
        return float(f)
    elif f is sympy.pi:
        return ca.pi
    elif f is sympy.E:
        return ca.exp(1)
    elif str(f_type) in _UNARY:
        return _UNARY[str(f_type)](prs(f.args[0]))
    else:
        raise NotImplementedError(
            "unhandled type: {:s} {:s}".format(str(f_type), str(f))
        )


def parse_expression(text: str, names):
    """parse text with sympy, rejecting free symbols outside names"""
    try:
        expr = sympy.sympify(text, locals={n: sympy.Symbol(n) for n in names})
    except (sympy.SympifyError, SyntaxError, TypeError) as e:
        raise ArgumentError("cannot parse expression {:s}: {:s}".format(text, str(e)))
    unknown = sorted(str(s) for s in expr.free_symbols if str(s) not in names)
    if unknown:
        raise ArgumentError(
            "expression {:s} uses unknown symbols {:s}, allowed {:s}".format(
                text, str(unknown), str(list(names))
            )
        )
    return expr


def compile_scalar(text: str, x: ca.SX, names) -> ca.SX:
    """compile a scalar expression in the named components of x"""
    expr = parse_expression(text, names)
    symbols = {n: x[i] for i, n in enumerate(names)}
    try:
        f_ca, _ = sympy_to_casadi(expr, symbols=symbols)
    except NotImplementedError as e:
        raise ArgumentError(str(e))
    return ca.SX(f_ca)
