"""Multigraded Poincare-Dulac normalization and equivariant generators.

Coordinate changes are built as time-one flows of polynomial fields xi:
pulling a function back multiplies it by exp(xi), and a field transforms
by exp(ad xi).  Each homological step divides by a nonzero ad-weight, so
everything stays rational.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import count
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import lcm as _lcm

from .errors import (
    FactorizationError,
    InvalidStateError,
    NonEquivariantFactorError,
    NotDivisibleError,
    ObstructionError,
    RepeatedFactorError,
)
from .exactlinalg import QMatrix, in_span, jordan_chevalley
from .logjets import VectorFieldJet, ad_weight, bracket, lift_with_linear_part
from .poly import (
    CoordinateChangeJet,
    Jet,
    Polynomial,
    _int_items,
    _int_mul,
    _integer_form,
    _normalize,
    compose,
    monomials_up_to,
    series_divide,
)
from .rational import Q, mpz
from .torusfinder import TorusData


def generic_combination(T: TorusData, order: int) -> Tuple[int, ...]:
    """An integer combination w* of the weight rows that separates joint weights up to ``order``.

    w* = sum M^i W_i for the smallest M >= 2 such that, over all exponents of
    total degree <= order+1, distinct joint function weights stay distinct
    and nonzero joint field weights stay nonzero.
    """
    W = [tuple(w) for w in T.weights]
    if not W:
        raise ValueError("a rank-0 torus has no grading")
    if len(W) == 1:
        return W[0]
    n = len(W[0])
    fun = set()
    fld = set()
    for a in monomials_up_to(n, order + 1):
        lam = tuple(sum(x * y for x, y in zip(w, a)) for w in W)
        fun.add(lam)
        for j in range(n):
            mu = tuple(l - w[j] for l, w in zip(lam, W))
            if any(mu):
                fld.add(mu)
    for M in count(2):
        c = [M ** i for i in range(len(W))]
        images = {sum(x * y for x, y in zip(c, lam)) for lam in fun}
        if len(images) != len(fun):
            continue
        if any(sum(x * y for x, y in zip(c, mu)) == 0 for mu in fld):
            continue
        return tuple(sum(ci * w[j] for ci, w in zip(c, W)) for j in range(n))


def _common_form(polys: Sequence[Polynomial]):
    """Common denominator D and integer term lists of D * p for each p."""
    den = mpz(1)
    forms = [_integer_form(p.terms) for p in polys]
    for d, _ in forms:
        den = _lcm(den, d)
    return den, [[(g, e, c * (den // d)) for g, e, c in items] for d, items in forms]


def _int_diff(items, i: int):
    out = []
    for g, e, c in items:
        a = e[i]
        if a:
            out.append((g - 1, e[:i] + (a - 1,) + e[i + 1:], c * a))
    return out


def _int_derive(xi_items, items, cap, acc=None, sign=1):
    """acc += sign * xi(p) on integer term lists."""
    if acc is None:
        acc = {}
    for i, xa in enumerate(xi_items):
        if xa:
            _int_mul(xa, _int_diff(items, i), cap, acc, sign)
    return acc


def lie_exp_function(xi: VectorFieldJet, p: Polynomial, cap: int) -> Polynomial:
    """exp(xi)(p) = p + xi(p) + xi(xi(p))/2 + ..., truncated at total degree ``cap``."""
    # numerators are kept as integers over a running denominator and reduced once at the end
    D, xi_items = _common_form(xi.coefficients)
    den, term = _integer_form(p.truncate(cap).terms)
    parts = [(den, term)]
    for k in count(1):
        term = _int_items(_int_derive(xi_items, term, cap))
        term = [t for t in term if t[2]]
        if not term:
            break
        den = den * D * k
        parts.append((den, term))
    acc = {}
    for d, items in parts:
        f = den // d
        for _, e, c in items:
            acc[e] = acc.get(e, 0) + c * f
    return Polynomial._raw(p.nvars, _normalize(acc, den))


def lie_exp_field(xi: VectorFieldJet, delta: VectorFieldJet) -> VectorFieldJet:
    """exp(ad xi)(delta), truncated at the common order."""
    n = delta.nvars
    cap = min(xi.order, delta.order)
    if not (xi.in_delta() and delta.in_delta()):
        return _lie_exp_field_plain(xi, delta)
    D, xi_items = _common_form(xi.coefficients)
    start = delta.truncate(cap)
    den, term = _common_form(start.coefficients)
    parts = [(den, term)]
    for k in count(1):
        # [xi, t]_j = xi(t_j) - t(xi_j)
        new = []
        for j in range(n):
            acc = _int_derive(xi_items, term[j], cap)
            _int_derive(term, xi_items[j], cap, acc, -1)
            new.append([t for t in _int_items(acc) if t[2]])
        term = new
        if not any(term):
            break
        den = den * D * k
        parts.append((den, term))
    comps = []
    for j in range(n):
        acc = {}
        for d, items in parts:
            f = den // d
            for _, e, c in items[j]:
                acc[e] = acc.get(e, 0) + c * f
        comps.append(Polynomial._raw(n, _normalize(acc, den)))
    return VectorFieldJet(comps, cap)


def _lie_exp_field_plain(xi: VectorFieldJet, delta: VectorFieldJet) -> VectorFieldJet:
    total = delta.truncate(xi.order)
    term = total
    for k in count(1):
        term = bracket(xi, term).scale(Q(1, k))
        if term.is_zero():
            return total
        total = total + term


def _semisimple_weights(delta: VectorFieldJet, T: Optional[TorusData]) -> Tuple[Q, ...]:
    A = delta.linear_part()
    S = jordan_chevalley(A).semisimple
    if not S.is_diagonal():
        raise InvalidStateError(f"semisimple part {S} of the linear part is not diagonal in these coordinates")
    w = S.diagonal()
    if T is not None and any(w):
        if not T.weights or not in_span(w, [tuple(Q(x) for x in r) for r in T.weights]):
            raise InvalidStateError(f"semisimple part diag{tuple(str(x) for x in w)} is not in the torus span")
    return w


def poincare_dulac(
    delta: VectorFieldJet, T: Optional[TorusData], order: int
) -> Tuple[CoordinateChangeJet, VectorFieldJet]:
    """Remove every non-resonant term of ``delta`` up to coefficient degree ``order``.

    Resonance is with respect to S, the (diagonal) semisimple part of the
    linear part.  Returns (phi, delta') with phi tangent to the identity and
    delta' = exp(ad xi_N)...exp(ad xi_2) delta the pulled-back field; f o phi
    is logarithmic for delta' whenever f is for delta.
    """
    phi, d, _ = _normalize_field(delta, T, order, ())
    return phi, d


def _normalize_field(delta, T, order, functions):
    """poincare_dulac, also returning each p in ``functions`` pulled back by phi.

    exp(xi) is an automorphism of the truncated algebra, so p o phi is
    carried along the same Lie series as the coordinate functions.
    """
    if not delta.in_delta():
        raise InvalidStateError("the field must vanish at the origin")
    n = delta.nvars
    w = _semisimple_weights(delta, T)
    d = delta.truncate(order)
    if d.order < order:
        d = VectorFieldJet(d.coefficients, order)
    comps = [Polynomial.variable(n, i) for i in range(n)]
    carried = [p.truncate(order) for p in functions]
    for deg in range(2, order + 1):
        for _ in range(4 * n + 4):
            xi_terms = {}
            for j, p in enumerate(d.coefficients):
                for e, c in p.homogeneous_part(deg).terms.items():
                    mu = sum(a * b for a, b in zip(w, e)) - w[j]
                    if mu:
                        xi_terms[(j, e)] = c / mu
            if not xi_terms:
                break
            xi = VectorFieldJet.from_terms(n, xi_terms, order)
            d = lie_exp_field(xi, d)
            comps = [lie_exp_function(xi, c, order) for c in comps]
            carried = [lie_exp_function(xi, p, order) for p in carried]
        else:
            raise InvalidStateError(f"homological step at degree {deg} did not converge")
    return CoordinateChangeJet(comps, order), d, carried


def resonance_violations(delta: VectorFieldJet, weights: Sequence[Sequence[int]]) -> List[Tuple[int, tuple]]:
    """Nonlinear terms of ``delta`` whose joint ad-weight is nonzero."""
    bad = []
    for j, e, c in delta.terms():
        if sum(e) >= 2 and any(ad_weight(wi, e, j) for wi in weights):
            bad.append((j, e))
    return bad


@dataclass(frozen=True)
class EquivariantPresentation:
    """g = u * (f o change) with g concentrated in the joint weight ``multidegrees``."""

    change: CoordinateChangeJet
    unit: Jet
    normalized: Jet
    multidegrees: Tuple[int, ...]
    generic_weight: Tuple[int, ...] = ()
    field: Optional[VectorFieldJet] = None
    normalized_field: Optional[VectorFieldJet] = None

    def weight_violations(self, T: TorusData) -> List[tuple]:
        return [e for e in self.normalized.poly.terms if T.joint_weight(e) != self.multidegrees]

    def is_weight_pure(self, T: TorusData) -> bool:
        return not self.weight_violations(T)

    def reconstructs(self, f) -> bool:
        """u^{-1} g == f o change modulo the truncation."""
        fj = f if isinstance(f, Jet) else Jet(f, self.normalized.order)
        pulled = compose(fj, self.change)
        N = min(pulled.order, self.normalized.order)
        return (self.unit * pulled).congruent(self.normalized) and N >= 0


def _dump(**kw) -> Dict[str, str]:
    return {k: str(v) for k, v in kw.items()}


def make_equivariant(f, T: TorusData, order: int) -> EquivariantPresentation:
    """Normalize f (in coordinates diagonalizing T) to a multihomogeneous generator.

    Lifts the generic torus element diag(w*) to a logarithmic field,
    brings that field to Poincare-Dulac normal form by phi, and keeps the
    component g of f o phi of the joint weight of its initial form.  The
    ideal (f o phi) + m^(N+1) is stable under the semisimple part diag(w*),
    so g = u * (f o phi) for a unit u, obtained by series division.
    """
    fpoly = f.poly if isinstance(f, Jet) else f
    n = fpoly.nvars
    o = fpoly.order
    if o is None or o == 0:
        raise InvalidStateError("f must vanish at the origin and be nonzero")
    if order < o:
        raise ValueError(f"truncation order {order} is below the order {o} of f")
    fj = Jet(fpoly, order)
    if T.rank == 0:
        return EquivariantPresentation(
            CoordinateChangeJet.identity(n, order), Jet.one(n, order - o), fj, ()
        )
    wstar = generic_combination(T, order)
    try:
        delta, h = lift_with_linear_part(fpoly, QMatrix.diag(list(wstar)), order - o)
    except InvalidStateError as exc:
        raise ObstructionError(
            "the generic torus element has no logarithmic lift", _dump(f=fpoly, weights=T.weights, wstar=wstar, error=exc)
        ) from None
    phi, dnorm, (f1poly,) = _normalize_field(delta, T, order, (fpoly,))
    f1 = Jet(f1poly, order)
    init = f1.poly.initial_form()
    lams = {T.joint_weight(e) for e in init.terms}
    if len(lams) != 1:
        raise ObstructionError(
            "initial form of the normalized function is not multihomogeneous",
            _dump(f=fpoly, change=phi, pulled=f1, weights=T.weights, initial_weights=sorted(lams)),
        )
    lam = lams.pop()
    g = Polynomial(n, {e: c for e, c in f1.poly.terms.items() if T.joint_weight(e) == lam})
    gj = Jet(g, order)
    try:
        u = series_divide(gj, f1)
    except NotDivisibleError as exc:
        raise ObstructionError(
            "the weight component does not generate the same ideal",
            _dump(f=fpoly, change=phi, pulled=f1, component=g, weights=T.weights, error=exc),
        ) from None
    if not u.is_unit():
        raise ObstructionError(
            "the quotient of the weight component by f o phi is not a unit",
            _dump(f=fpoly, change=phi, pulled=f1, component=g, quotient=u),
        )
    return EquivariantPresentation(phi, u, gj, lam, wstar, delta, dnorm)


def factor_multidegrees(
    g: Jet,
    factors: Sequence[Polynomial],
    T: TorusData,
    change: Optional[CoordinateChangeJet] = None,
) -> List[Tuple[int, ...]]:
    """Multidegree of each user-supplied factor of g.

    ``change`` (if given) pulls the factors back into the coordinates of g.
    The product must equal g up to a unit; each pulled-back factor must be
    concentrated in a single joint weight.
    """
    seen = {}
    for i, p in enumerate(factors):
        key = p.content_normalized()
        if key in seen:
            raise RepeatedFactorError(
                f"factor {p} is repeated (positions {seen[key] + 1} and {i + 1}); the germ must be reduced"
            )
        seen[key] = i
    N = g.order
    pulled = [compose(Jet(p, N), change) if change is not None else Jet(p, N) for p in factors]
    prod = Jet.one(g.nvars, N)
    for q in pulled:
        prod = prod * q
    try:
        u = series_divide(g, prod)
    except NotDivisibleError:
        raise FactorizationError("the product of the factors does not divide the normalized equation") from None
    if not u.is_unit():
        raise FactorizationError("the product of the factors differs from the normalized equation by a non-unit")
    out = []
    for p, q in zip(factors, pulled):
        ws = sorted({T.joint_weight(e) for e in q.poly.terms})
        if len(ws) != 1:
            raise NonEquivariantFactorError(f"factor {p} spreads over joint weights {ws}")
        out.append(ws[0])
    if T.multidegrees is not None:
        total = tuple(sum(c) for c in zip(*out)) if out else ()
        if out and total != tuple(T.multidegrees):
            raise FactorizationError(f"factor multidegrees sum to {total}, expected {T.multidegrees}")
    return out
