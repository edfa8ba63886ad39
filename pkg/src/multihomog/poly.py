"""Exact multivariate polynomials and truncated power series (jets) over Q.

Exponent vectors are tuples of non-negative ints.  Coefficients are
:class:`gmpy2.mpq`, which compares, hashes and mixes freely with
:class:`fractions.Fraction`.  Every object is immutable after construction.

Variables are indexed from 0.  For up to three variables they print as
``x, y, z``; beyond that as ``x1 .. xn``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from gmpy2 import lcm as _lcm
from gmpy2 import mpz as _mpz

from .errors import (
    DimensionError,
    InvalidChangeError,
    NotAUnitError,
    NotDivisibleError,
    PolynomialSyntaxError,
)
from .rational import Q

Exponent = Tuple[int, ...]

MAX_VARIABLES = 6


def _as_fraction(c) -> Q:
    if type(c) is Q:
        return c
    if isinstance(c, (int, Rational, type(_mpz(0)))):
        return Q(c)
    raise TypeError(f"coefficient {c!r} is not rational")


def term_key(e: Exponent):
    """Graded lexicographic sort key (lowest total degree first, then x before y)."""
    return (sum(e), tuple(-a for a in e))


def variable_names(nvars: int) -> List[str]:
    if nvars <= 3:
        return ["x", "y", "z"][:nvars]
    return [f"x{i + 1}" for i in range(nvars)]


def monomials_of_degree(nvars: int, d: int) -> List[Exponent]:
    """All exponent vectors of total degree ``d``, in canonical order."""
    if nvars == 0:
        return [()] if d == 0 else []
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(prefix + (left,))
            return
        for a in range(left, -1, -1):
            rec(prefix + (a,), left - a, slots - 1)

    rec((), d, nvars)
    return out


def monomials_up_to(nvars: int, d: int, start: int = 0) -> List[Exponent]:
    out = []
    for k in range(start, d + 1):
        out.extend(monomials_of_degree(nvars, k))
    return out


# Products are accumulated on integer numerators over a common denominator and
# normalized to rationals once at the end; this is far cheaper than summing
# rationals term by term when the coefficients are large.


def _integer_form(a: Mapping) -> Tuple[int, List[Tuple[int, Exponent, int]]]:
    """Common denominator and integer numerators, sorted by degree."""
    den = _mpz(1)
    for c in a.values():
        d = c.denominator
        if d != 1:
            den = _lcm(den, d)
    items = [(sum(e), e, c.numerator * (den // c.denominator)) for e, c in a.items()]
    items.sort(key=lambda t: t[0])
    return den, items


def _int_items(d: Mapping) -> List[Tuple[int, Exponent, int]]:
    items = [(sum(e), e, c) for e, c in d.items()]
    items.sort(key=lambda t: t[0])
    return items


_SHIFT = 20  # bits per exponent in a packed monomial key


def _pack(e: Exponent) -> int:
    k = 0
    for i, a in enumerate(e):
        k |= a << (_SHIFT * i)
    return k


def _unpack(k: int, n: int) -> Exponent:
    mask = (1 << _SHIFT) - 1
    return tuple((k >> (_SHIFT * i)) & mask for i in range(n))


def _int_mul(ai, bl, cap: Optional[int], acc: Optional[Dict] = None, scale: int = 1) -> Dict[Exponent, int]:
    """acc += scale * a * b on integer term lists, truncated at total degree ``cap``."""
    if acc is None:
        acc = {}
    if not ai or not bl:
        return acc
    n = len(ai[0][1])
    # exponents are packed into one int so that multiplying monomials is one addition
    pb = [(dB, _pack(eb), cb) for dB, eb, cb in bl]
    b0 = pb[0][0]
    loc: Dict[int, int] = {}
    get = loc.get
    for dA, ea, ca in ai:
        if cap is not None and dA + b0 > cap:
            break
        if scale != 1:
            ca = ca * scale
        ka = _pack(ea)
        for dB, kb, cb in pb:
            if cap is not None and dA + dB > cap:
                break
            k = ka + kb
            loc[k] = get(k, 0) + ca * cb
    aget = acc.get
    for k, v in loc.items():
        e = _unpack(k, n)
        acc[e] = aget(e, 0) + v
    return acc


def _normalize(acc: Mapping, den) -> Dict[Exponent, Q]:
    return {e: Q(v, den) for e, v in acc.items() if v}


def _mul_terms(a: Mapping, b: Mapping, cap: Optional[int]) -> Dict[Exponent, Q]:
    if not a or not b:
        return {}
    da, ai = _integer_form(a)
    db, bl = _integer_form(b)
    return _normalize(_int_mul(ai, bl, cap), da * db)


def sum_of_products(pairs: Sequence[Tuple["Polynomial", "Polynomial", int]], nvars: int, cap: Optional[int] = None) -> "Polynomial":
    """sum s * a * b over (a, b, s) in ``pairs`` (s an integer), truncated at ``cap``."""
    forms = []
    for a, b, sgn in pairs:
        if sgn and a._terms and b._terms:
            da, ai = _integer_form(a._terms)
            db, bl = _integer_form(b._terms)
            forms.append((da * db, ai, bl, sgn))
    if not forms:
        return Polynomial.zero(nvars)
    den = _mpz(1)
    for d, *_ in forms:
        den = _lcm(den, d)
    acc: Dict[Exponent, int] = {}
    for d, ai, bl, sgn in forms:
        _int_mul(ai, bl, cap, acc, sgn * (den // d))
    return Polynomial._raw(nvars, _normalize(acc, den))


class Polynomial:
    """Sparse polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Optional[Mapping] = None):
        self.nvars = nvars
        clean: Dict[Exponent, Q] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars:
                    raise DimensionError(f"exponent {e} does not have {nvars} entries")
                if any(a < 0 for a in e):
                    raise ValueError(f"negative exponent in {e}")
                c = _as_fraction(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
                    if not clean[e]:
                        del clean[e]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Exponent, Q]) -> "Polynomial":
        p = cls.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    # construction helpers
    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        c = _as_fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        if not 0 <= i < nvars:
            raise DimensionError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): Q(1)})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff=1) -> "Polynomial":
        return cls(len(exponent), {tuple(exponent): coeff})

    @classmethod
    def parse(cls, text: str, nvars: Optional[int] = None) -> "Polynomial":
        return parse_polynomial(text, nvars)

    # basic queries
    @property
    def terms(self) -> Dict[Exponent, Q]:
        return dict(self._terms)

    def items(self) -> List[Tuple[Exponent, Q]]:
        """Terms in canonical (graded lexicographic) order."""
        return sorted(self._terms.items(), key=lambda t: term_key(t[0]))

    def coefficient(self, e: Sequence[int]) -> Q:
        return self._terms.get(tuple(e), Q(0))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    @property
    def order(self) -> Optional[int]:
        """Lowest total degree of a term (the m-adic order); None for zero."""
        return min((sum(e) for e in self._terms), default=None)

    def constant_term(self) -> Q:
        return self._terms.get((0,) * self.nvars, Q(0))

    def _check(self, other: "Polynomial"):
        if self.nvars != other.nvars:
            raise DimensionError(f"{self.nvars} vs {other.nvars} variables")

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.nvars, other)
        self._check(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = _as_fraction(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        return Polynomial._raw(self.nvars, _mul_terms(self._terms, other._terms, None))

    __rmul__ = __mul__

    def mul_truncated(self, other: "Polynomial", cap: int) -> "Polynomial":
        self._check(other)
        return Polynomial._raw(self.nvars, _mul_terms(self._terms, other._terms, cap))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction, Q)):
            return self._terms == ({(0,) * self.nvars: Q(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # calculus and gradings
    def diff(self, i: int) -> "Polynomial":
        if not 0 <= i < self.nvars:
            raise DimensionError(f"variable index {i} out of range for {self.nvars} variables")
        out = {}
        for e, c in self._terms.items():
            a = e[i]
            if a:
                ne = e[:i] + (a - 1,) + e[i + 1:]
                out[ne] = c * a
        return Polynomial._raw(self.nvars, out)

    def gradient(self) -> List["Polynomial"]:
        return [self.diff(i) for i in range(self.nvars)]

    def truncate(self, cap: int) -> "Polynomial":
        """Drop every term of total degree > cap."""
        return Polynomial._raw(self.nvars, {e: c for e, c in self._terms.items() if sum(e) <= cap})

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial._raw(self.nvars, {e: c for e, c in self._terms.items() if sum(e) == d})

    def initial_form(self) -> "Polynomial":
        o = self.order
        return self if o is None else self.homogeneous_part(o)

    def weighted_components(self, w: Sequence[int]) -> Dict[int, "Polynomial"]:
        if len(w) != self.nvars:
            raise DimensionError(f"weight vector of length {len(w)} for {self.nvars} variables")
        parts: Dict[int, Dict[Exponent, Q]] = {}
        for e, c in self._terms.items():
            d = sum(a * b for a, b in zip(w, e))
            parts.setdefault(d, {})[e] = c
        return {d: Polynomial._raw(self.nvars, t) for d, t in sorted(parts.items())}

    def joint_weight_components(self, weights: Sequence[Sequence[int]]) -> Dict[Tuple[int, ...], "Polynomial"]:
        """Split by the joint weight ``(<W_1,a>, ..., <W_s,a>)`` of each exponent ``a``."""
        parts: Dict[Tuple[int, ...], Dict[Exponent, Q]] = {}
        for e, c in self._terms.items():
            key = tuple(sum(a * b for a, b in zip(row, e)) for row in weights)
            parts.setdefault(key, {})[e] = c
        return {k: Polynomial._raw(self.nvars, t) for k, t in sorted(parts.items())}

    def content_normalized(self) -> "Polynomial":
        """Scale to coprime integer coefficients with a positive leading term (canonical order)."""
        if not self._terms:
            return self
        den = 1
        for c in self._terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        g = 0
        for c in self._terms.values():
            g = gcd(g, int(c * den))
        lead = self.items()[0][1]
        s = den if lead > 0 else -den
        return self.scale(Q(s, g))

    def map_coefficients(self, fn) -> "Polynomial":
        return Polynomial(self.nvars, {e: fn(c) for e, c in self._terms.items()})

    def permute_variables(self, perm: Sequence[int]) -> "Polynomial":
        """Return p(x_{perm[0]}, ..., x_{perm[n-1]}); new variable i is old variable perm[i]."""
        out = {}
        for e, c in self._terms.items():
            out[tuple(e[perm[i]] for i in range(self.nvars))] = c
        return Polynomial._raw(self.nvars, out)

    def divide_exact(self, divisor: "Polynomial") -> "Polynomial":
        """Exact quotient, by leading-term division; raises NotDivisibleError otherwise."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lead_e, lead_c = divisor.items()[-1]
        rem = dict(self._terms)
        q: Dict[Exponent, Q] = {}
        dterms = list(divisor._terms.items())
        while rem:
            e = max(rem, key=term_key)
            c = rem[e]
            diffe = tuple(a - b for a, b in zip(e, lead_e))
            if any(a < 0 for a in diffe):
                raise NotDivisibleError(f"{self} is not divisible by {divisor}")
            qc = c / lead_c
            q[diffe] = q.get(diffe, 0) + qc
            for de, dc in dterms:
                ne = tuple(a + b for a, b in zip(diffe, de))
                v = rem.get(ne, 0) - qc * dc
                if v:
                    rem[ne] = v
                else:
                    rem.pop(ne, None)
        return Polynomial(self.nvars, q)

    # substitution
    def evaluate(self, point: Sequence) -> Q:
        total = Q(0)
        for e, c in self._terms.items():
            v = c
            for x, a in zip(point, e):
                if a:
                    v *= Q(x) ** a
            total += v
        return total

    def substitute(self, images: Sequence["Polynomial"], cap: Optional[int] = None) -> "Polynomial":
        """p(images[0], ..., images[n-1]), optionally truncated at total degree ``cap``."""
        if len(images) != self.nvars:
            raise DimensionError(f"{len(images)} images for {self.nvars} variables")
        if not self._terms:
            m = images[0].nvars if images else 0
            return Polynomial.zero(m)
        m = images[0].nvars
        one = Polynomial.constant(m, 1)
        cache: Dict[Tuple[int, int], Polynomial] = {}

        def power(i, a):
            if a == 0:
                return one
            key = (i, a)
            if key not in cache:
                prev = power(i, a - 1)
                cache[key] = prev * images[i] if cap is None else prev.mul_truncated(images[i], cap)
            return cache[key]

        forms: Dict[Tuple[int, int], tuple] = {}

        def form(i, a):
            key = (i, a)
            if key not in forms:
                forms[key] = _integer_form(power(i, a)._terms)
            return forms[key]

        parts = []
        for e, c in self._terms.items():
            den = _mpz(c.denominator)
            term = [(0, (0,) * m, _mpz(c.numerator))]
            for i, a in enumerate(e):
                if a:
                    d, items = form(i, a)
                    den = den * d
                    term = _int_items(_int_mul(term, items, cap))
                    if not term:
                        break
            if term:
                parts.append((den, term))
        common = _mpz(1)
        for d, _ in parts:
            common = _lcm(common, d)
        acc: Dict[Exponent, int] = {}
        get = acc.get
        for d, term in parts:
            k = common // d
            for _, te, tc in term:
                acc[te] = get(te, 0) + tc * k
        out = _normalize(acc, common)
        return Polynomial._raw(m, out)

    # printing
    def to_string(self, names: Optional[Sequence[str]] = None) -> str:
        names = list(names) if names is not None else variable_names(self.nvars)
        if not self._terms:
            return "0"
        pieces = []
        for e, c in self.items():
            mono = "*".join(
                (names[i] if a == 1 else f"{names[i]}^{a}") for i, a in enumerate(e) if a
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not pieces:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append((" - " if c < 0 else " + ") + body)
        return "".join(pieces)

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.to_string()!r})"


class Jet:
    """Class of a polynomial modulo m^(order+1): only terms of degree <= order are kept.

    Binary operations on jets of different orders return the smaller order.
    """

    __slots__ = ("poly", "order")

    def __init__(self, poly: Polynomial, order: int):
        if order < 0:
            raise ValueError("jet order must be non-negative")
        self.poly = poly.truncate(order) if poly.degree > order else poly
        self.order = order

    @classmethod
    def zero(cls, nvars: int, order: int) -> "Jet":
        return cls(Polynomial.zero(nvars), order)

    @classmethod
    def one(cls, nvars: int, order: int) -> "Jet":
        return cls(Polynomial.constant(nvars, 1), order)

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise DimensionError(f"{self.nvars} vs {other.nvars} variables")
            return other
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionError(f"{self.nvars} vs {other.nvars} variables")
            return Jet(other, self.order)
        return Jet(Polynomial.constant(self.nvars, other), self.order)

    def __add__(self, other):
        other = self._coerce(other)
        n = min(self.order, other.order)
        return Jet(self.poly.truncate(n) + other.poly.truncate(n), n)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.poly, self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (Jet, Polynomial)):
            return Jet(self.poly.scale(other), self.order)
        other = self._coerce(other)
        n = min(self.order, other.order)
        return Jet(self.poly.mul_truncated(other.poly, n), n)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self.order == other.order and self.poly == other.poly

    def __hash__(self):
        return hash((self.poly, self.order))

    def truncate(self, order: int) -> "Jet":
        return Jet(self.poly, min(order, self.order))

    def congruent(self, other: "Jet") -> bool:
        """Equality modulo the coarser of the two truncations."""
        n = min(self.order, other.order)
        return self.poly.truncate(n) == other.poly.truncate(n)

    def diff(self, i: int) -> "Jet":
        # the derivative of a class mod m^(N+1) is only defined mod m^N
        return Jet(self.poly.diff(i), max(self.order - 1, 0))

    def is_unit(self) -> bool:
        return self.poly.constant_term() != 0

    def __repr__(self):
        return f"Jet({self.poly.to_string()!r}, order={self.order})"

    def __str__(self):
        return f"{self.poly} + O({self.order + 1})"


def jet_arithmetic(a: Jet, b: Jet, op: str) -> Jet:
    """Functional form of jet add/sub/mul, for symmetry with the CLI grammar."""
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    raise ValueError(f"unknown jet operation {op!r}")


def partial_derivative(p: Polynomial, i: int) -> Polynomial:
    return p.diff(i)


def weighted_components(p: Polynomial, w: Sequence[int]) -> Dict[int, Polynomial]:
    return p.weighted_components(w)


def series_divide(a: Jet, b: Jet) -> Jet:
    """Find ``q`` with ``q*b == a`` modulo m^(N+1), N = min(a.order, b.order).

    ``q`` is returned as a jet of order ``N - ord(b)``; that is all the
    precision the congruence determines.
    """
    if a.nvars != b.nvars:
        raise DimensionError(f"{a.nvars} vs {b.nvars} variables")
    N = min(a.order, b.order)
    bp = b.poly.truncate(N)
    o = bp.order
    if o is None:
        raise NotDivisibleError("division by a zero jet")
    b0 = bp.homogeneous_part(o)
    rem = a.poly.truncate(N)
    if rem.order is not None and rem.order < o:
        raise NotDivisibleError(f"order of {a} is below the order of the divisor")
    q = Polynomial.zero(a.nvars)
    for e in range(o, N + 1):
        part = rem.homogeneous_part(e)
        if part.is_zero():
            continue
        qe = part.divide_exact(b0)
        q = q + qe
        rem = rem - qe.mul_truncated(bp, N)
    if not rem.truncate(N).is_zero():
        raise NotDivisibleError("residual after division")
    return Jet(q, N - o)


def invert_unit(u: Jet) -> Jet:
    if u.poly.constant_term() == 0:
        raise NotAUnitError(f"{u} has zero constant term")
    return series_divide(Jet.one(u.nvars, u.order), u)


class CoordinateChangeJet:
    """n component jets y_i(x) with zero constant term and invertible linear part.

    ``compose(f, change)`` computes f(y_1(x), ..., y_n(x)).
    """

    __slots__ = ("components", "order")

    def __init__(self, components: Sequence, order: int):
        comps = []
        for c in components:
            c = c.poly if isinstance(c, Jet) else c
            comps.append(c.truncate(order))
        if not comps:
            raise InvalidChangeError("a coordinate change needs at least one component")
        n = comps[0].nvars
        if len(comps) != n or any(c.nvars != n for c in comps):
            raise DimensionError("a coordinate change needs n components in n variables")
        for i, c in enumerate(comps):
            if c.constant_term() != 0:
                raise InvalidChangeError(f"component {i} has a nonzero constant term")
        self.components: Tuple[Polynomial, ...] = tuple(comps)
        self.order = order
        from .exactlinalg import QMatrix

        if QMatrix(self.linear_matrix()).rank() < n:
            raise InvalidChangeError("linear part of the change is singular")

    @property
    def nvars(self) -> int:
        return len(self.components)

    @classmethod
    def identity(cls, nvars: int, order: int) -> "CoordinateChangeJet":
        return cls([Polynomial.variable(nvars, i) for i in range(nvars)], order)

    @classmethod
    def linear(cls, matrix, order: int) -> "CoordinateChangeJet":
        """x -> P x, i.e. component i is sum_j P[i][j] x_j."""
        n = len(matrix)
        comps = []
        for i in range(n):
            comps.append(Polynomial(n, {tuple(int(k == j) for k in range(n)): matrix[i][j] for j in range(n)}))
        return cls(comps, order)

    def linear_matrix(self) -> List[List[Q]]:
        """Row i holds the coefficients of x_0..x_{n-1} in component i."""
        n = self.nvars
        rows = []
        for c in self.components:
            rows.append([c.coefficient(tuple(int(k == j) for k in range(n))) for j in range(n)])
        return rows

    @property
    def tangent_to_identity(self) -> bool:
        n = self.nvars
        return all(
            self.linear_matrix()[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n)
        )

    def is_identity(self) -> bool:
        return all(c == Polynomial.variable(self.nvars, i) for i, c in enumerate(self.components))

    def then(self, other: "CoordinateChangeJet") -> "CoordinateChangeJet":
        """The change x -> self(other(x)); pulling back by it equals pulling back by self, then by other."""
        if other.nvars != self.nvars:
            raise DimensionError("changes act on different numbers of variables")
        N = min(self.order, other.order)
        return CoordinateChangeJet(
            [c.substitute(other.components, N) for c in self.components], N
        )

    def inverse(self) -> "CoordinateChangeJet":
        """Compositional inverse to the same order (fixed-point iteration on the nonlinear part)."""
        from .exactlinalg import QMatrix

        n, N = self.nvars, self.order
        L = QMatrix(self.linear_matrix())
        Linv = L.inverse()
        x = [Polynomial.variable(n, i) for i in range(n)]
        nonlin = [c - c.homogeneous_part(1) for c in self.components]
        # psi = L^{-1} (x - nonlin(psi))
        psi = [sum((x[j].scale(Linv[i, j]) for j in range(n)), Polynomial.zero(n)) for i in range(n)]
        for _ in range(N):
            rhs = [x[i] - nonlin[i].substitute(psi, N) for i in range(n)]
            new = [sum((rhs[j].scale(Linv[i, j]) for j in range(n)), Polynomial.zero(n)) for i in range(n)]
            if new == psi:
                break
            psi = new
        return CoordinateChangeJet(psi, N)

    def __eq__(self, other):
        if not isinstance(other, CoordinateChangeJet):
            return NotImplemented
        return self.order == other.order and self.components == other.components

    def __hash__(self):
        return hash((self.components, self.order))

    def __repr__(self):
        comps = ", ".join(c.to_string() for c in self.components)
        return f"CoordinateChangeJet([{comps}], order={self.order})"


def compose(f, change: CoordinateChangeJet) -> Jet:
    """Pull back ``f`` (a Jet or Polynomial) along ``change``, truncated at the common order."""
    if isinstance(f, Polynomial):
        f = Jet(f, change.order)
    if f.nvars != change.nvars:
        raise DimensionError(f"{f.nvars} vs {change.nvars} variables")
    N = min(f.order, change.order)
    return Jet(f.poly.substitute(change.components, N), N)


# ---------------------------------------------------------------------------
# text grammar:  expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
# factor := ('+'|'-') factor | power ; power := atom ('^' integer)? ; atom := number | var | '(' expr ')'

_TOKEN = re.compile(r"\s*(?:(\d+)|(x\d+|[xyz])|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + (len(rest) - len(rest.lstrip()))
            raise PolynomialSyntaxError(f"unknown symbol {text[bad]!r}", *_line_col(text, bad))
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2):
            toks.append(("var", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            toks.append(("op", op, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


def _line_col(text: str, pos: int):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def parse_polynomial(text: str, nvars: Optional[int] = None) -> Polynomial:
    """Parse the polynomial grammar: ``x,y,z`` or ``x1..xN``, rationals, ``+ - * / ^``, parentheses.

    The variable count is inferred from the highest variable used unless given.
    Division is only allowed by a nonzero constant.
    """
    toks = _tokenize(text)
    names = {t[1] for t in toks if t[0] == "var"}
    indexed = {n for n in names if n[1:].isdigit()}
    if indexed and indexed != names:
        pos = next(t[2] for t in toks if t[0] == "var" and t[1] not in indexed)
        raise PolynomialSyntaxError("cannot mix x,y,z with x1..xN names", *_line_col(text, pos))
    if indexed:
        idx = {n: int(n[1:]) - 1 for n in names}
        if any(i < 0 for i in idx.values()):
            raise PolynomialSyntaxError("variables are numbered from x1", 1, 1)
        inferred = max(idx.values()) + 1
    else:
        idx = {n: "xyz".index(n) for n in names}
        inferred = max(idx.values(), default=0) + 1
    n = inferred if nvars is None else nvars
    if n < inferred:
        raise PolynomialSyntaxError(f"expression uses {inferred} variables, {n} requested", 1, 1)
    if n > MAX_VARIABLES:
        raise DimensionError(f"at most {MAX_VARIABLES} variables are supported")
    pos = [0]

    def peek():
        return toks[pos[0]]

    def take():
        t = toks[pos[0]]
        pos[0] += 1
        return t

    def fail(msg, t):
        raise PolynomialSyntaxError(msg, *_line_col(text, t[2]))

    def expr():
        p = term()
        while peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            q = term()
            p = p + q if op == "+" else p - q
        return p

    def term():
        p = factor()
        while peek()[0] == "op" and peek()[1] in "*/":
            t = take()
            q = factor()
            if t[1] == "*":
                p = p * q
            else:
                if q.degree > 0:
                    fail("division by a non-constant", t)
                c = q.constant_term()
                if c == 0:
                    fail("division by zero", t)
                p = p.scale(1 / c)
        return p

    def factor():
        t = peek()
        if t[0] == "op" and t[1] in "+-":
            take()
            p = factor()
            return -p if t[1] == "-" else p
        return power()

    def power():
        p = atom()
        if peek()[0] == "op" and peek()[1] == "^":
            take()
            t = take()
            if t[0] != "num":
                fail("exponent must be a non-negative integer", t)
            p = p ** t[1]
        return p

    def atom():
        t = take()
        if t[0] == "num":
            return Polynomial.constant(n, t[1])
        if t[0] == "var":
            return Polynomial.variable(n, idx[t[1]])
        if t[0] == "op" and t[1] == "(":
            p = expr()
            c = take()
            if c[0] != "op" or c[1] != ")":
                fail("expected ')'", c)
            return p
        fail("unexpected " + ("end of input" if t[0] == "end" else repr(t[1])), t)

    result = expr()
    if peek()[0] != "end":
        fail(f"unexpected {peek()[1]!r}", peek())
    return result
