"""Parse and print polynomial expressions.

Accepted syntax::

    expr     := term (("+" | "-") term)*
    term     := factor ("*" factor)*
    factor   := "-" factor | base ("^" INT)?
    base     := RATIONAL | INT | IDENT | "(" expr ")"
    RATIONAL := INT "/" INT

Multiplication must be explicit.  A unary minus binds looser than ``^``, so
``-y^2`` means ``-(y^2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ExprSyntaxError, NonIntegerExponent, UnknownVariable, ZeroDenominator
from .polynomial import Poly

__all__ = ["ExprSource", "parse_poly", "print_poly", "parse_many"]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass(frozen=True)
class ExprSource:
    """Expression text plus the variables it may mention."""

    text: str
    variables: tuple[str, ...] = ("x", "y", "z")

    def __post_init__(self):
        variables = tuple(self.variables)
        if not variables:
            raise ValueError("variable list must be non-empty")
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variables in {variables!r}")
        object.__setattr__(self, "variables", variables)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "int", "ident", "op", "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(_Tok("int", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(_Tok("ident", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*^/()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", start,
                                      ("number", "variable", "(", "-"))
            toks.append(_Tok("op", ch, start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text.rstrip()) if text.strip() else 0))
    return toks


class _Parser:
    def __init__(self, src: ExprSource):
        self.src = src
        self.toks = _tokenize(src.text)
        self.i = 0
        self.allowed = set(src.variables)

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _fail(self, expected: Sequence[str]):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"unexpected {found}", t.pos, tuple(expected))

    def _accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def parse(self) -> Poly:
        if self.tok.kind == "end":
            self._fail(["expression"])
        p = self.expr()
        if self.tok.kind != "end":
            self._fail(["operator", "end of input"])
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            sign = self.tok.text
            self.i += 1
            q = self.term()
            p = p + q if sign == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.factor()
        while self._accept("*"):
            p = p * self.factor()
        return p

    def factor(self) -> Poly:
        if self._accept("-"):
            return -self.factor()
        p = self.base()
        if self._accept("^"):
            t = self.tok
            if t.kind == "int":
                self.i += 1
                nxt = self.tok
                if nxt.kind == "op" and nxt.text == "/":
                    raise NonIntegerExponent("exponent must be a non-negative integer", t.pos)
                return p ** int(t.text)
            if t.kind == "op" and t.text in "-(":
                raise NonIntegerExponent("exponent must be a non-negative integer literal", t.pos)
            if t.kind == "ident":
                raise NonIntegerExponent("symbolic exponents are not supported", t.pos)
            self._fail(["integer exponent"])
        return p

    def base(self) -> Poly:
        t = self.tok
        variables = self.src.variables
        if t.kind == "int":
            self.i += 1
            value = Fraction(int(t.text))
            if self.tok.kind == "op" and self.tok.text == "/":
                self.i += 1
                d = self.tok
                if d.kind != "int":
                    self._fail(["integer denominator"])
                self.i += 1
                if int(d.text) == 0:
                    raise ZeroDenominator("zero denominator in rational literal", d.pos)
                value = value / int(d.text)
            return Poly.constant(value, variables)
        if t.kind == "ident":
            if t.text not in self.allowed:
                raise UnknownVariable(t.text, t.pos)
            self.i += 1
            return Poly.variable(t.text, variables)
        if self._accept("("):
            p = self.expr()
            if not self._accept(")"):
                self._fail([")"])
            return p
        self._fail(["number", "variable", "("])


def parse_poly(src: ExprSource | str, variables: Sequence[str] | None = None) -> Poly:
    """Parse an expression into its canonical :class:`Poly`.

    Parameters
    ----------
    src : ExprSource or str
        The expression.  A bare string is paired with ``variables``
        (default ``("x", "y", "z")``).
    variables : sequence of str, optional
        Allowed identifiers when ``src`` is a string.

    Examples
    --------
    >>> print(parse_poly("2*x*z + 1 - y^2"))
    2*x*z - y^2 + 1
    """
    if isinstance(src, str):
        src = ExprSource(src, tuple(variables) if variables else ("x", "y", "z"))
    elif variables is not None:
        raise TypeError("variables given twice")
    return _Parser(src).parse()


def parse_many(texts: Sequence[str], variables: Sequence[str]) -> list[Poly]:
    return [parse_poly(ExprSource(t, tuple(variables))) for t in texts]


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def print_poly(p: Poly) -> str:
    """Canonical text: descending graded lex order, x most significant.

    Unit coefficients are omitted and rationals are written ``p/q``.
    """
    if p.is_zero():
        return "0"
    parts = []
    for exps, c in p.sorted_terms():
        factors = []
        for name, k in zip(p.variables, exps):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        mag = abs(c)
        if not factors:
            body = _format_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _format_coeff(mag) + "*" + "*".join(factors)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)

