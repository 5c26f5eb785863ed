"""Shared helpers for the test suite."""

from __future__ import annotations

import sympy as sp

from impasse_lab.polynomial import Poly
from impasse_lab.systemfile import fixture_names, load_fixture

SX, SY, SZ = sp.symbols("x y z")
SYMS = {"x": SX, "y": SY, "z": SZ}


def to_sympy(p: Poly) -> sp.Expr:
    """Independent conversion of a Poly into a sympy expression."""
    expr = sp.Integer(0)
    for exps, c in p.terms.items():
        term = sp.Rational(c.numerator, c.denominator)
        for name, k in zip(p.variables, exps):
            term *= SYMS.get(name, sp.Symbol(name)) ** k
        expr += term
    return sp.expand(expr)


def surface_fixtures():
    return [n for n in fixture_names() if load_fixture(n).mode.value == "surface"]


# acceptance criteria report one line each at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {msg}")
