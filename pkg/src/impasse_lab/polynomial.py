"""Exact sparse multivariate polynomials with rational coefficients.

A :class:`Poly` maps exponent tuples to nonzero :class:`fractions.Fraction`
coefficients over an ordered tuple of variable names.  Variables are always
kept in the canonical order ``x < y < z < w < eps`` (other names sort after,
alphabetically), and binary operations embed both operands into the union of
their variable sets, so ``Poly.variable("x") * Poly.variable("z")`` just works.

Values are immutable once constructed.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product as _cartesian
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence

__all__ = [
    "CANONICAL_ORDER",
    "NEG_INF",
    "Poly",
    "gcd",
    "gcd_bivariate",
    "merge_variables",
    "rational_content",
]

CANONICAL_ORDER = ("x", "y", "z", "w", "eps")

#: Degree of the zero polynomial.
NEG_INF = float("-inf")


def _var_key(name: str):
    try:
        return (0, CANONICAL_ORDER.index(name), name)
    except ValueError:
        return (1, 0, name)


def merge_variables(*groups: Iterable[str]) -> tuple[str, ...]:
    names: set[str] = set()
    for group in groups:
        names.update(group)
    return tuple(sorted(names, key=_var_key))


def _grlex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


class Poly:
    """Sparse polynomial over Q.

    Parameters
    ----------
    terms : mapping of exponent tuple -> rational
        Zero coefficients are dropped.  Tuples follow ``variables``.
    variables : sequence of str
        Variable names; reordered canonically on construction.
    """

    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, ...], object] | None = None,
                 variables: Sequence[str] = ()):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variables in {variables!r}")
        order = sorted(range(len(variables)), key=lambda i: _var_key(variables[i]))
        self.variables = tuple(variables[i] for i in order)
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(variables):
                raise ValueError(f"exponent tuple {exps} does not match variables {variables}")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            c = _as_fraction(coeff)
            if c:
                key = tuple(exps[i] for i in order)
                c = clean.get(key, 0) + c
                if c:
                    clean[key] = c
                else:
                    clean.pop(key, None)
        self._terms = clean
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, c, variables: Sequence[str] = ()) -> "Poly":
        return cls({(0,) * len(variables): c}, variables)

    @classmethod
    def zero(cls, variables: Sequence[str] = ()) -> "Poly":
        return cls({}, variables)

    @classmethod
    def variable(cls, name: str, variables: Sequence[str] | None = None) -> "Poly":
        variables = merge_variables(variables or (), (name,))
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls({exps: 1}, variables)

    @classmethod
    def monomial(cls, powers: Mapping[str, int], coeff=1,
                 variables: Sequence[str] | None = None) -> "Poly":
        variables = merge_variables(variables or (), powers)
        exps = tuple(powers.get(v, 0) for v in variables)
        return cls({exps: coeff}, variables)

    @classmethod
    def _raw(cls, terms: dict, variables: tuple[str, ...]) -> "Poly":
        # trusted fast path: canonical variables, nonzero Fraction coefficients
        p = object.__new__(cls)
        p.variables = variables
        p._terms = terms
        p._hash = None
        return p

    # -- basic queries -----------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> Fraction:
        """Coefficient of the constant monomial."""
        return self._terms.get((0,) * len(self.variables), Fraction(0))

    def degree(self):
        """Total degree; ``NEG_INF`` for the zero polynomial."""
        if not self._terms:
            return NEG_INF
        return max(sum(e) for e in self._terms)

    def degree_in(self, var: str):
        if var not in self.variables:
            return 0 if self._terms else NEG_INF
        if not self._terms:
            return NEG_INF
        i = self.variables.index(var)
        return max(e[i] for e in self._terms)

    def used_variables(self) -> tuple[str, ...]:
        used = [v for i, v in enumerate(self.variables) if any(e[i] for e in self._terms)]
        return tuple(used)

    def free_of(self, var: str) -> bool:
        return var not in self.used_variables()

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in canonical (descending graded lexicographic) order."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def leading_term(self) -> tuple[tuple[int, ...], Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self._terms, key=_grlex_key)
        return exps, self._terms[exps]

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    # -- variable-set management -------------------------------------------

    def embed(self, variables: Sequence[str]) -> "Poly":
        """Re-express over a superset of the current variables."""
        variables = merge_variables(variables)
        if variables == self.variables:
            return self
        missing = set(self.variables) - set(variables)
        if missing:
            used = set(self.used_variables())
            if used & missing:
                raise ValueError(f"cannot drop variables {sorted(used & missing)} in use")
        index = [self.variables.index(v) if v in self.variables else None for v in variables]
        terms = {tuple(e[i] if i is not None else 0 for i in index): c
                 for e, c in self._terms.items()}
        return Poly._raw(terms, variables)

    def restrict(self, variables: Sequence[str] | None = None) -> "Poly":
        """Drop unused variables (or re-express over ``variables``)."""
        if variables is None:
            variables = self.used_variables()
        return self.embed(variables)

    def _aligned(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if self.variables == other.variables:
            return self, other
        union = merge_variables(self.variables, other.variables)
        return self.embed(union), other.embed(union)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly.constant(_as_fraction(other), self.variables)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "Poly":
        if not isinstance(other, (Poly, int, Fraction, Rational)):
            return NotImplemented
        a, b = self._aligned(self._coerce(other))
        terms = dict(a._terms)
        for e, c in b._terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Poly._raw(terms, a.variables)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({e: -c for e, c in self._terms.items()}, self.variables)

    def __pos__(self) -> "Poly":
        return self

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, (Poly, int, Fraction, Rational)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction, Rational)):
            c = _as_fraction(other)
            if not c:
                return Poly.zero(self.variables)
            return Poly._raw({e: v * c for e, v in self._terms.items()}, self.variables)
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self._aligned(other)
        terms: dict[tuple[int, ...], Fraction] = {}
        for ea, ca in a._terms.items():
            for eb, cb in b._terms.items():
                e = tuple(i + j for i, j in zip(ea, eb))
                s = terms.get(e, 0) + ca * cb
                if s:
                    terms[e] = s
                else:
                    terms.pop(e, None)
        return Poly._raw(terms, a.variables)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.is_constant() and other:
                other = other.constant_value()
            else:
                return self.exact_div(other)
        c = _as_fraction(other)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (1 / c)

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial exponent must be a non-negative integer")
        result = Poly.constant(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison --------------------------------------------------------

    def _named(self) -> frozenset:
        return frozenset(
            (tuple((v, k) for v, k in zip(self.variables, e) if k), c)
            for e, c in self._terms.items()
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Rational)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, Poly):
            return NotImplemented
        return self._named() == other._named()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._named())
        return self._hash

    # -- calculus and structure --------------------------------------------

    def diff(self, var: str) -> "Poly":
        """Formal partial derivative."""
        if var not in self.variables:
            return Poly.zero(self.variables)
        i = self.variables.index(var)
        terms = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                terms[ne] = c * e[i]
        return Poly._raw(terms, self.variables)

    partial_derivative = diff

    def gradient(self, variables: Sequence[str] | None = None) -> tuple["Poly", ...]:
        return tuple(self.diff(v) for v in (variables or self.variables))

    def coefficients_in(self, var: str) -> list["Poly"]:
        """Coefficients ``[c_0, ..., c_k]`` with ``self == sum(c_i * var**i)``.

        The coefficients are expressed over the remaining variables.
        """
        rest = tuple(v for v in self.variables if v != var)
        if var not in self.variables:
            return [self] if self else []
        i = self.variables.index(var)
        k = self.degree_in(var)
        if k == NEG_INF:
            return []
        buckets: list[dict] = [{} for _ in range(k + 1)]
        for e, c in self._terms.items():
            buckets[e[i]][e[:i] + e[i + 1:]] = c
        return [Poly._raw(b, rest) for b in buckets]

    decompose_in_variable = coefficients_in

    def homogeneous_parts(self) -> list["Poly"]:
        """``[P_0, ..., P_m]`` with ``P_j`` homogeneous of degree j; ``[]`` for zero."""
        if not self._terms:
            return []
        parts: list[dict] = [{} for _ in range(self.degree() + 1)]
        for e, c in self._terms.items():
            parts[sum(e)][e] = c
        return [Poly._raw(p, self.variables) for p in parts]

    def top_homogeneous_part(self) -> "Poly":
        parts = self.homogeneous_parts()
        return parts[-1] if parts else self

    def substitute(self, mapping: Mapping[str, object]) -> "Poly":
        """Compose: replace variables by polynomials or numbers."""
        mapping = {k: v for k, v in mapping.items() if k in self.variables}
        if not mapping:
            return self
        keep = tuple(v for v in self.variables if v not in mapping)
        pieces = {k: (v if isinstance(v, Poly) else Poly.constant(_as_fraction(v)))
                  for k, v in mapping.items()}
        target = merge_variables(keep, *(p.variables for p in pieces.values()))
        pieces = {k: p.embed(target) for k, p in pieces.items()}
        power_cache: dict[tuple[str, int], Poly] = {}

        def power(name, k):
            key = (name, k)
            if key not in power_cache:
                power_cache[key] = pieces[name] ** k
            return power_cache[key]

        result = Poly.zero(target)
        for e, c in self._terms.items():
            mono = {v: k for v, k in zip(self.variables, e) if v not in mapping and k}
            term = Poly.monomial(mono, c, target)
            for v, k in zip(self.variables, e):
                if v in mapping and k:
                    term = term * power(v, k)
            result = result + term
        return result

    def rename(self, mapping: Mapping[str, str]) -> "Poly":
        names = tuple(mapping.get(v, v) for v in self.variables)
        if len(set(names)) != len(names):
            raise ValueError(f"renaming {mapping} collides in {self.variables}")
        return Poly(self._terms, names)

    # -- rational content and division -------------------------------------

    def content(self) -> Fraction:
        """Positive rational gcd of the coefficients (0 for the zero polynomial)."""
        return rational_content(self._terms.values())

    def primitive(self) -> "Poly":
        """Integer coefficients with gcd 1 and positive leading coefficient."""
        if not self._terms:
            return self
        p = self / self.content()
        return -p if p.leading_coefficient() < 0 else p

    def divmod(self, divisor: "Poly") -> tuple["Poly", "Poly"]:
        """Multivariate division by a single polynomial in graded lex order.

        The remainder is zero exactly when ``divisor`` divides ``self``.
        """
        a, d = self._aligned(divisor)
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lt_d, lc_d = d.leading_term()
        rem_terms: dict = {}
        quot: dict = {}
        p = dict(a._terms)
        while p:
            lt = max(p, key=_grlex_key)
            c = p[lt]
            if all(i >= j for i, j in zip(lt, lt_d)):
                m = tuple(i - j for i, j in zip(lt, lt_d))
                mc = c / lc_d
                quot[m] = quot.get(m, 0) + mc
                for e, cd in d._terms.items():
                    ne = tuple(i + j for i, j in zip(e, m))
                    s = p.get(ne, 0) - mc * cd
                    if s:
                        p[ne] = s
                    else:
                        p.pop(ne, None)
            else:
                rem_terms[lt] = c
                del p[lt]
        quot = {e: c for e, c in quot.items() if c}
        return Poly._raw(quot, a.variables), Poly._raw(rem_terms, a.variables)

    def exact_div(self, divisor: "Poly") -> "Poly":
        q, r = self.divmod(divisor)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def divides(self, other: "Poly") -> bool:
        return not other.divmod(self)[1]

    # -- evaluation --------------------------------------------------------

    def _point_tuple(self, point) -> tuple:
        if isinstance(point, Mapping):
            missing = [v for v in self.used_variables() if v not in point]
            if missing:
                raise ValueError(f"no value supplied for {missing}")
            return tuple(point.get(v, 0) for v in self.variables)
        point = tuple(point)
        if len(point) != len(self.variables):
            raise ValueError(
                f"point has dimension {len(point)}, polynomial has variables {self.variables}")
        return point

    def evaluate(self, point):
        """Horner evaluation; exact for rational points, binary64 for floats."""
        pt = self._point_tuple(point)
        if not self._terms:
            return Fraction(0) if all(isinstance(v, (int, Fraction)) for v in pt) else 0.0
        exact = all(isinstance(v, (int, Fraction)) for v in pt)
        terms = {e: (c if exact else float(c)) for e, c in self._terms.items()}
        return _horner(terms, pt, 0)

    def __call__(self, *args, **kwargs):
        if kwargs:
            return self.evaluate(kwargs)
        if len(args) == 1 and (isinstance(args[0], Mapping) or hasattr(args[0], "__len__")):
            return self.evaluate(args[0])
        return self.evaluate(args)

    def to_function(self, variables: Sequence[str] | None = None) -> Callable:
        """Vectorised binary64 evaluator ``f(*coords)`` (numpy-broadcasting)."""
        variables = tuple(variables) if variables is not None else self.variables
        missing = set(self.used_variables()) - set(variables)
        if missing:
            raise ValueError(f"evaluator lacks variables {sorted(missing)}")
        idx = {v: i for i, v in enumerate(variables)}
        compiled = []
        for e, c in self._terms.items():
            factors = tuple((idx[v], k) for v, k in zip(self.variables, e) if k)
            compiled.append((float(c), factors))

        def f(*coords):
            out = 0.0
            for c, factors in compiled:
                term = c
                for i, k in factors:
                    term = term * (coords[i] if k == 1 else coords[i] ** k)
                out = out + term
            return out

        return f

    # -- printing ----------------------------------------------------------

    def __str__(self) -> str:
        from .expr import print_poly
        return print_poly(self)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r}, variables={self.variables!r})"


def _horner(terms: dict, point: tuple, i: int):
    # nested Horner in variable i over the remaining ones
    if i == len(point):
        return next(iter(terms.values())) if terms else 0
    groups: dict[int, dict] = {}
    for e, c in terms.items():
        groups.setdefault(e[i], {})[e] = c
    acc = 0
    xi = point[i]
    for k in range(max(groups), -1, -1):
        acc = acc * xi
        if k in groups:
            acc = acc + _horner(groups[k], point, i + 1)
    return acc


def rational_content(values: Iterable) -> Fraction:
    nums, dens = [], []
    for v in values:
        v = _as_fraction(v)
        if v:
            nums.append(abs(v.numerator))
            dens.append(v.denominator)
    if not nums:
        return Fraction(0)
    return Fraction(math.gcd(*nums), math.lcm(*dens))


# -- gcd --------------------------------------------------------------------

def _normalize(p: Poly) -> Poly:
    return p.primitive() if p else p


def _gcd_univariate(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, a.divmod(b)[1]
    return _normalize(a)


def _content_in(p: Poly, main: str) -> Poly:
    g = Poly.zero(tuple(v for v in p.variables if v != main))
    for c in p.coefficients_in(main):
        g = _gcd_univariate(g, c) if g else _normalize(c)
        if g.is_constant() and g:
            break
    return g


def _prem(a: Poly, b: Poly, main: str) -> Poly:
    db = b.degree_in(main)
    lcb = b.coefficients_in(main)[-1].embed(b.variables)
    v = Poly.variable(main, b.variables)
    r = a
    while r and r.degree_in(main) >= db:
        dr = r.degree_in(main)
        lcr = r.coefficients_in(main)[-1].embed(r.variables)
        r = lcb * r - lcr * v ** (dr - db) * b
    return r


def gcd_bivariate(a: Poly, b: Poly) -> Poly:
    """Primitive gcd of polynomials in at most two variables.

    Content in the second variable is removed with univariate Euclid over Q;
    primitive parts run through a primitive pseudo-remainder sequence.  The
    result has integer coefficients, content 1 and positive leading
    coefficient; ``gcd(0, 0) == 0``.
    """
    a, b = a._aligned(b)
    used = merge_variables(a.used_variables(), b.used_variables())
    if len(used) > 2:
        raise ValueError(f"gcd_bivariate needs at most two variables, got {used}")
    if not a:
        return _normalize(b)
    if not b:
        return _normalize(a)
    if not used:
        return Poly.constant(1, a.variables)
    if len(used) == 1:
        return _gcd_univariate(a, b).embed(a.variables)
    main = used[-1]
    ca, cb = _content_in(a, main), _content_in(b, main)
    c = _gcd_univariate(ca, cb).embed(a.variables)
    pa = a.exact_div(ca.embed(a.variables))
    pb = b.exact_div(cb.embed(a.variables))
    if pa.degree_in(main) < pb.degree_in(main):
        pa, pb = pb, pa
    while pb and pb.degree_in(main) > 0:
        r = _prem(pa, pb, main)
        if r:
            r = r.exact_div(_content_in(r, main).embed(r.variables))
        pa, pb = pb, r
    if pb:
        g = Poly.constant(1, a.variables)
    else:
        g = pa.exact_div(_content_in(pa, main).embed(pa.variables))
    return _normalize(c * g)


gcd = gcd_bivariate


def iter_monomials(variables: Sequence[str], max_degree: int):
    """Exponent tuples of total degree <= ``max_degree``."""
    n = len(variables)
    for exps in _cartesian(range(max_degree + 1), repeat=n):
        if sum(exps) <= max_degree:
            yield exps
