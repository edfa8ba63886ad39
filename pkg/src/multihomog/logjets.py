"""Vector-field jets and the jet Lie algebra of logarithmic derivations.

A logarithmic derivation of f is a field delta with delta(f) = h*f for some
series h.  At jet level we solve the linear system

    sum_j a_j * df/dx_j - h * f  = 0   mod m^(m + 1 + ord f)

for coefficient fields a_j of degree <= m+1 and cofactors h of degree <= m,
and project the solutions to level k (coefficients of degree <= k+1).  The
projections shrink as m grows and eventually stabilize; the stable space is
the level-k jet of the module of logarithmic derivations.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DimensionError, InvalidGermError, InvalidStateError, StabilizationError
from .exactlinalg import (
    InconsistentSystemError,
    QMatrix,
    SparseEchelon,
    integer_row,
    nullspace,
    primitive_integer_vector,
    row_space_basis,
    solve_sparse,
)
from .poly import Exponent, Jet, Polynomial, monomials_of_degree, sum_of_products, term_key, variable_names
from .rational import Q


class VectorFieldJet:
    """delta = sum_j a_j d/dx_j with every a_j truncated at total degree ``order``."""

    __slots__ = ("coefficients", "order")

    def __init__(self, coefficients: Sequence, order: int):
        comps = []
        for c in coefficients:
            c = c.poly if isinstance(c, Jet) else c
            comps.append(c.truncate(order))
        n = len(comps)
        if any(c.nvars != n for c in comps):
            raise DimensionError("a vector field on n variables needs n coefficients in n variables")
        self.coefficients: Tuple[Polynomial, ...] = tuple(comps)
        self.order = order

    @property
    def nvars(self) -> int:
        return len(self.coefficients)

    @classmethod
    def zero(cls, nvars: int, order: int) -> "VectorFieldJet":
        return cls([Polynomial.zero(nvars)] * nvars, order)

    @classmethod
    def from_matrix(cls, A, order: int) -> "VectorFieldJet":
        """The linear field sum_{i,j} A[i,j] x_i d/dx_j."""
        A = A if isinstance(A, QMatrix) else QMatrix(A)
        n = A.nrows
        comps = []
        for j in range(n):
            comps.append(Polynomial(n, {tuple(int(t == i) for t in range(n)): A[i, j] for i in range(n)}))
        return cls(comps, order)

    @classmethod
    def monomial(cls, exponent: Sequence[int], j: int, coeff=1, order: Optional[int] = None) -> "VectorFieldJet":
        n = len(exponent)
        comps = [Polynomial.zero(n)] * n
        comps[j] = Polynomial.monomial(exponent, coeff)
        return cls(comps, sum(exponent) if order is None else order)

    @classmethod
    def from_terms(cls, nvars: int, terms: Dict[Tuple[int, Exponent], Q], order: int) -> "VectorFieldJet":
        parts: List[Dict[Exponent, Q]] = [{} for _ in range(nvars)]
        for (j, e), c in terms.items():
            parts[j][e] = c
        return cls([Polynomial(nvars, p) for p in parts], order)

    def terms(self) -> List[Tuple[int, Exponent, Q]]:
        """(j, alpha, c) for each term c x^alpha d/dx_j, in canonical order."""
        out = [(j, e, c) for j, p in enumerate(self.coefficients) for e, c in p.terms.items()]
        out.sort(key=lambda t: (sum(t[1]), t[0], term_key(t[1])))
        return out

    def term_dict(self) -> Dict[Tuple[int, Exponent], Q]:
        return {(j, e): c for j, p in enumerate(self.coefficients) for e, c in p.terms.items()}

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def constant_part(self) -> Tuple[Q, ...]:
        return tuple(c.constant_term() for c in self.coefficients)

    def in_delta(self) -> bool:
        """True iff the field vanishes at the origin."""
        return not any(self.constant_part())

    def linear_part(self) -> QMatrix:
        """Matrix A with delta_0 = sum A[i,j] x_i d/dx_j."""
        n = self.nvars
        return QMatrix(
            [[self.coefficients[j].coefficient(tuple(int(t == i) for t in range(n))) for j in range(n)] for i in range(n)]
        )

    def graded_part(self, d: int) -> "VectorFieldJet":
        """delta_d: the part whose coefficients are homogeneous of degree d+1."""
        return VectorFieldJet([c.homogeneous_part(d + 1) for c in self.coefficients], self.order)

    def truncate(self, order: int) -> "VectorFieldJet":
        return VectorFieldJet(self.coefficients, min(order, self.order))

    def _check(self, other):
        if not isinstance(other, VectorFieldJet):
            raise TypeError("expected a VectorFieldJet")
        if other.nvars != self.nvars:
            raise DimensionError(f"fields on {self.nvars} and {other.nvars} variables")

    def __add__(self, other):
        self._check(other)
        return VectorFieldJet([a + b for a, b in zip(self.coefficients, other.coefficients)], min(self.order, other.order))

    def __sub__(self, other):
        self._check(other)
        return VectorFieldJet([a - b for a, b in zip(self.coefficients, other.coefficients)], min(self.order, other.order))

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "VectorFieldJet":
        return VectorFieldJet([a.scale(c) for a in self.coefficients], self.order)

    def __eq__(self, other):
        if not isinstance(other, VectorFieldJet):
            return NotImplemented
        return self.order == other.order and self.coefficients == other.coefficients

    def congruent(self, other: "VectorFieldJet") -> bool:
        """Equality modulo the coarser of the two truncations."""
        N = min(self.order, other.order)
        return all(a.truncate(N) == b.truncate(N) for a, b in zip(self.coefficients, other.coefficients))

    def __hash__(self):
        return hash((self.coefficients, self.order))

    def to_string(self, names: Optional[Sequence[str]] = None) -> str:
        names = list(names) if names is not None else variable_names(self.nvars)
        parts = []
        for j, c in enumerate(self.coefficients):
            if c.is_zero():
                continue
            s = c.to_string(names)
            if len(c) > 1:
                s = f"({s})"
            elif s == "1":
                s = ""
            elif s == "-1":
                s = "-"
            parts.append(f"{s}*d{names[j]}" if s not in ("", "-") else f"{s}d{names[j]}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"VectorFieldJet({self.to_string()!r}, order={self.order})"


def apply(delta: VectorFieldJet, f) -> Jet:
    """delta(f) = sum a_i df/dx_i, truncated at the precision it is known to.

    The field's coefficients are known modulo m^(order+1), which fixes
    delta(f) modulo m^(order + ord f).  A Polynomial ``f`` is exact; a Jet of
    order Nf further limits the result to Nf (Nf - 1 if the field does not
    vanish at the origin).
    """
    exact = isinstance(f, Polynomial)
    p = f if exact else f.poly
    if p.nvars != delta.nvars:
        raise DimensionError(f"field on {delta.nvars} variables applied to a function of {p.nvars}")
    o = p.order
    N = delta.order + (o - 1 if o else 0)
    if not exact:
        N = min(N, f.order if delta.in_delta() else f.order - 1)
    N = max(N, 0)
    return Jet(_derive(delta, p, N), N)


def _derive(delta: VectorFieldJet, p: Polynomial, cap: int) -> Polynomial:
    return sum_of_products([(a, p.diff(i), 1) for i, a in enumerate(delta.coefficients)], p.nvars, cap)


def bracket(delta: VectorFieldJet, eps: VectorFieldJet) -> VectorFieldJet:
    """[delta, eps]; component j is delta(eps_j) - eps(delta_j).

    For fields vanishing at the origin the result is exact to min(orders);
    otherwise one order is lost.
    """
    delta._check(eps)
    N = min(delta.order, eps.order)
    if not (delta.in_delta() and eps.in_delta()):
        N = max(N - 1, 0)
    n = delta.nvars
    comps = [
        sum_of_products(
            [(d, b.diff(i), 1) for i, d in enumerate(delta.coefficients)]
            + [(e, a.diff(i), -1) for i, e in enumerate(eps.coefficients)],
            n,
            N,
        )
        for a, b in zip(delta.coefficients, eps.coefficients)
    ]
    return VectorFieldJet(comps, N)


def ad_weight(weights: Sequence[int], exponent: Sequence[int], j: int) -> int:
    """Eigenvalue of ad(sum w_i x_i d/dx_i) on x^alpha d/dx_j."""
    return sum(a * b for a, b in zip(weights, exponent)) - weights[j]


# ---------------------------------------------------------------------------
# field coordinates at a fixed level


def field_index(nvars: int, level: int, include_constant: bool = False) -> List[Tuple[int, Exponent]]:
    """Coordinates (j, beta) of level-``level`` fields, in canonical order.

    Ordered by total degree of beta, then by j, then by the monomial order.
    """
    out = []
    for d in range(0 if include_constant else 1, level + 2):
        mons = monomials_of_degree(nvars, d)
        for j in range(nvars):
            out.extend((j, b) for b in mons)
    return out


def field_vector(delta: VectorFieldJet, index: Sequence[Tuple[int, Exponent]]) -> Tuple[Q, ...]:
    td = delta.term_dict()
    return tuple(td.get(key, Q(0)) for key in index)


def vector_field(nvars: int, vec: Sequence, index: Sequence[Tuple[int, Exponent]], order: int) -> VectorFieldJet:
    return VectorFieldJet.from_terms(nvars, {key: Q(v) for key, v in zip(index, vec) if v}, order)


# ---------------------------------------------------------------------------
# the linear system


def _integer_polynomial(f: Polynomial) -> Dict[Exponent, int]:
    """f scaled to coprime integer coefficients (the solution space is unchanged)."""
    row = integer_row({e: c for e, c in f.terms.items()})
    from math import gcd

    g = 0
    for v in row.values():
        g = gcd(g, v)
    return {e: v // g for e, v in row.items()}


def _check_germ(f: Polynomial):
    if f.is_zero():
        raise InvalidGermError("the zero function does not define a hypersurface germ")
    if f.constant_term() != 0:
        raise InvalidGermError("f has a nonzero constant term, so it does not vanish at the origin")


_PROJECTED = 1 << 40


class LogSystem:
    """Incrementally built jet system for the logarithmic derivations of f.

    Hidden unknowns (cofactor coefficients and high-degree field coefficients)
    receive small column indices in creation order; projected unknowns (the
    field coefficients kept at the target level) receive indices above a
    fixed offset.  Rows of the echelon form led by a projected column then
    cut out exactly the projection of the solution space.

    With ``constant_projection`` the field may have a constant part and the
    projection is onto that constant part alone (used by the input guard).
    """

    def __init__(self, f: Polynomial, level: int, constant_projection: bool = False, eliminate: bool = True):
        _check_germ(f)
        self.f = f
        self.n = f.nvars
        self.level = level
        self.constant_mode = constant_projection
        self.fint = _integer_polynomial(f)
        self.ord_f = f.order
        self.grads = [
            [(e, int(c)) for e, c in Polynomial(self.n, self.fint).diff(j).terms.items()] for j in range(self.n)
        ]
        self.fterms = list(self.fint.items())
        if constant_projection:
            self.projected = [(j, (0,) * self.n) for j in range(self.n)]
        else:
            self.projected = field_index(self.n, level)
        self.col: Dict[tuple, int] = {}
        for i, (j, b) in enumerate(self.projected):
            self.col[("d", j, b)] = _PROJECTED + i
        self.next_hidden = 0
        self.echelon = SparseEchelon()
        self.eliminate = eliminate
        self.raw_rows: List[Dict[int, int]] = []
        self.m = -1
        self.rows_done = -1  # equations of total degree <= rows_done are inserted

    def _field_degrees_hidden(self, d: int) -> bool:
        if self.constant_mode:
            return d >= 1
        return d > self.level + 1

    def _alloc(self, t: int):
        for g in monomials_of_degree(self.n, t):
            self.col[("h", g)] = self.next_hidden
            self.next_hidden += 1
        d = t + 1
        if self._field_degrees_hidden(d):
            for j in range(self.n):
                for b in monomials_of_degree(self.n, d):
                    self.col[("d", j, b)] = self.next_hidden
                    self.next_hidden += 1

    def _row(self, gamma: Exponent) -> Dict[int, int]:
        m = self.m
        row: Dict[int, int] = {}
        low = 0 if self.constant_mode else 1
        for j, terms in enumerate(self.grads):
            for a, c in terms:
                b = tuple(x - y for x, y in zip(gamma, a))
                if min(b) < 0:
                    continue
                db = sum(b)
                if low <= db <= m + 1:
                    k = self.col[("d", j, b)]
                    row[k] = row.get(k, 0) + c
        for a, c in self.fterms:
            t = tuple(x - y for x, y in zip(gamma, a))
            if min(t) < 0 or sum(t) > m:
                continue
            k = self.col[("h", t)]
            row[k] = row.get(k, 0) - c
        return {k: v for k, v in row.items() if v}

    def extend_to(self, m: int):
        """Grow the system to source order m (monotone; never shrinks)."""
        if m <= self.m:
            return
        for t in range(self.m + 1, m + 1):
            self._alloc(t)
        self.m = m
        top = m + self.ord_f
        for e in range(self.rows_done + 1, top + 1):
            for gamma in monomials_of_degree(self.n, e):
                r = self._row(gamma)
                if r:
                    if self.eliminate:
                        self.echelon.insert(r)
                    else:
                        self.raw_rows.append(r)
        self.rows_done = top

    @property
    def cutoff(self) -> int:
        """Equations hold modulo m^cutoff."""
        return self.m + 1 + self.ord_f

    def projected_basis(self) -> List[Tuple[int, ...]]:
        """Canonical basis (RREF, primitive integer rows) of the projected space."""
        P = len(self.projected)
        cons = self.echelon.constraint_rows(_PROJECTED)
        M = QMatrix([[Q(r.get(_PROJECTED + i, 0)) for i in range(P)] for r in cons], ncols=P)
        ker = nullspace(M) if cons else [tuple(Q(int(i == j)) for j in range(P)) for i in range(P)]
        return [primitive_integer_vector(v) for v in row_space_basis(ker)]

    def lift(self, values: Sequence) -> Tuple[Dict[Tuple[int, Exponent], Q], Polynomial]:
        """Canonical solution with the projected coordinates set to ``values``.

        Free hidden unknowns are set to zero.  Returns (field terms, cofactor).
        Raises InconsistentSystemError if ``values`` is not in the projected space.
        """
        fixed = {_PROJECTED + i: Q(v) for i, v in enumerate(values)}
        if self.eliminate:
            sol = self.echelon.back_substitute(fixed)
        else:
            sol = solve_sparse(self.raw_rows, fixed)
        inv = {v: k for k, v in self.col.items()}
        terms: Dict[Tuple[int, Exponent], Q] = {}
        h: Dict[Exponent, Q] = {}
        for c, v in sol.items():
            key = inv.get(c)
            if key is None or not v:
                continue
            if key[0] == "h":
                h[key[1]] = v
            else:
                terms[(key[1], key[2])] = v
        return terms, Polynomial(self.n, h)


def log_derivations_at(f: Polynomial, k: int, m: int) -> Tuple[List[VectorFieldJet], List[Jet]]:
    """Level-k projection of the order-m system: canonical basis and cofactors.

    Cofactors are returned modulo m^(k+1), the precision at which they are
    determined by the level-k field.
    """
    if k < 0 or m < k:
        raise ValueError("need 0 <= k <= m")
    sys_ = LogSystem(f, k)
    sys_.extend_to(m)
    return _basis_and_cofactors(sys_)


def _basis_and_cofactors(sys_: LogSystem):
    k = sys_.level
    basis, cof = [], []
    for v in sys_.projected_basis():
        terms, h = sys_.lift(v)
        basis.append(vector_field(sys_.n, v, sys_.projected, k + 1))
        cof.append(Jet(h, k))
    return basis, cof


def constant_part_solutions(f: Polynomial, m: int) -> List[Tuple[int, ...]]:
    """Constant parts of logarithmic fields allowed to be nonzero at the origin, at order m."""
    sys_ = LogSystem(f, 0, constant_projection=True)
    sys_.extend_to(m)
    return sys_.projected_basis()


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JetLieAlgebra:
    """Level-k jets of the logarithmic derivations of f, with stabilization data."""

    f: Polynomial
    level: int
    basis: Tuple[VectorFieldJet, ...]
    cofactors: Tuple[Jet, ...]
    stabilization_witness: int
    dimension_history: Tuple[Tuple[int, int], ...] = ()

    @property
    def nvars(self) -> int:
        return self.f.nvars

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def cutoff(self) -> int:
        """delta(f) - h f vanishes modulo m^cutoff for every basis element."""
        return self.level + 1 + self.f.order

    @property
    def index(self) -> List[Tuple[int, Exponent]]:
        return field_index(self.nvars, self.level)

    def vectors(self) -> List[Tuple[Q, ...]]:
        idx = self.index
        return [field_vector(b, idx) for b in self.basis]

    def contains(self, delta: VectorFieldJet) -> bool:
        """Membership of the level-k truncation of ``delta`` in the span."""
        idx = self.index
        v = field_vector(delta.truncate(self.level + 1), idx)
        rows = self.vectors()
        return len(row_space_basis(rows + [v])) == len(row_space_basis(rows)) if rows else not any(v)

    def residuals(self) -> List[Jet]:
        """delta(f) - h f for each basis element, truncated just below the cutoff."""
        out = []
        cap = self.cutoff - 1
        for b, h in zip(self.basis, self.cofactors):
            r = _derive(b, self.f, cap) - h.poly.mul_truncated(self.f, cap)
            out.append(Jet(r.truncate(cap), cap))
        return out

    def verify_cofactors(self) -> bool:
        return all(r.poly.is_zero() for r in self.residuals())

    def closure_failures(self) -> List[Tuple[int, int]]:
        """Basis pairs whose bracket leaves the span (modulo the level truncation)."""
        bad = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if not self.contains(bracket(self.basis[i], self.basis[j])):
                    bad.append((i, j))
        return bad

    def is_closed(self) -> bool:
        return not self.closure_failures()


def _closed(basis: List[VectorFieldJet], level: int, n: int) -> bool:
    idx = field_index(n, level)
    rows = [field_vector(b, idx) for b in basis]
    r0 = len(row_space_basis(rows)) if rows else 0
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            v = field_vector(bracket(basis[i], basis[j]).truncate(level + 1), idx)
            if any(v) and len(row_space_basis(rows + [v])) != r0:
                return False
    return True


def default_max_source_order(f: Polynomial) -> int:
    return 4 * f.degree + 8


def stabilized_log_derivations(
    f: Polynomial,
    k: int = 0,
    m_max: Optional[int] = None,
    m_start: Optional[int] = None,
) -> JetLieAlgebra:
    """Sweep m upward until the level-k projection is stable.

    Stability means three consecutive orders m, m+1, m+2 give the same
    canonical basis and that basis is closed under brackets; m is the
    witness.  The sweep starts at max(k, deg f) unless ``m_start`` is given.
    """
    _check_germ(f)
    if k < 0:
        raise ValueError("jet level must be non-negative")
    m0 = max(k, f.degree if m_start is None else m_start)
    if m_max is None:
        m_max = default_max_source_order(f)
    if m_max < m0 + 2:
        m_max = m0 + 2
    sys_ = LogSystem(f, k)
    history: List[Tuple[int, int]] = []
    bases: List[List[Tuple[int, ...]]] = []
    for m in range(m0, m_max + 1):
        sys_.extend_to(m)
        b = sys_.projected_basis()
        if history and len(b) > history[-1][1]:
            raise InvalidStateError(
                f"projected dimension grew from {history[-1][1]} to {len(b)} at m={m}; the sweep must be monotone"
            )
        history.append((m, len(b)))
        bases.append(b)
        if len(bases) >= 3 and bases[-1] == bases[-2] == bases[-3]:
            basis, cof = _basis_and_cofactors(sys_)
            if _closed(basis, k, f.nvars):
                return JetLieAlgebra(f, k, tuple(basis), tuple(cof), m - 2, tuple(history))
    raise StabilizationError(
        f"level-{k} projection did not stabilize by m={m_max}; dimensions by m: "
        + ", ".join(f"{m}:{d}" for m, d in history)
    )


def linear_parts(L: JetLieAlgebra) -> List[QMatrix]:
    """Canonical basis of the span of the degree-0 parts (the Lie algebra g0)."""
    n = L.nvars
    flats = [b.linear_part().flat() for b in L.basis]
    rows = row_space_basis([v for v in flats if any(v)])
    out = []
    for r in rows:
        v = primitive_integer_vector(r)
        out.append(QMatrix([v[i * n:(i + 1) * n] for i in range(n)]))
    return out


def lift_with_linear_part(f: Polynomial, A: QMatrix, m: int, modular: bool = True) -> Tuple[VectorFieldJet, Polynomial]:
    """Canonical logarithmic field with linear part A at source order m.

    The field has coefficients of degree <= m+1 and delta(f) = h f modulo
    m^(m+1+ord f).  Raises InvalidStateError if A is not a linear part of a
    solution at this order.
    """
    sys_ = LogSystem(f, 0, eliminate=not modular)
    sys_.extend_to(m)
    n = f.nvars
    vals = [A[b.index(1), j] for j, b in sys_.projected]
    try:
        terms, h = sys_.lift(vals)
    except InconsistentSystemError:
        raise InvalidStateError("the requested linear part is not the linear part of a logarithmic field") from None
    for i, (j, b) in enumerate(sys_.projected):
        if vals[i]:
            terms[(j, b)] = Q(vals[i])
    return VectorFieldJet.from_terms(n, terms, m + 1), h


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightComponent:
    weight: Tuple[int, ...]
    field: VectorFieldJet
    kind: str  # "torus", "weight-zero" or "root"

    @property
    def nilpotent_linear_part(self) -> bool:
        return self.field.linear_part().is_nilpotent()


@dataclass(frozen=True)
class WeightDecomposition:
    level: int
    weights: Tuple[Tuple[int, ...], ...]
    components: Tuple[WeightComponent, ...]
    bracket_table: Tuple[dict, ...]

    @property
    def estimated_r(self) -> int:
        return sum(1 for c in self.components if c.kind != "torus")


def torus_fields(weights: Sequence[Sequence[int]], order: int) -> List[VectorFieldJet]:
    return [VectorFieldJet.from_matrix(QMatrix.diag(list(w)), order) for w in weights]


def weight_decompose(L: JetLieAlgebra, weights: Sequence[Sequence[int]]) -> WeightDecomposition:
    """Split L into simultaneous eigenvectors of ad(sigma_i), sigma_i = diag(W_i).

    Weight-zero vectors are further split into the sigma-span and a
    canonical complement.  Every output vector is re-checked against the
    bracket: [sigma_i, v] == weight_i * v at the level truncation.
    """
    W = [tuple(int(x) for x in w) for w in weights]
    n, k = L.nvars, L.level
    s = len(W)
    idx = L.index
    pos = {key: i for i, key in enumerate(idx)}
    buckets: Dict[Tuple[int, ...], List[Tuple[Q, ...]]] = {}
    for b in L.basis:
        parts: Dict[Tuple[int, ...], List[Q]] = {}
        for j, e, c in b.terms():
            mu = tuple(ad_weight(w, e, j) for w in W)
            parts.setdefault(mu, [Q(0)] * len(idx))[pos[(j, e)]] = c
        for mu, v in parts.items():
            buckets.setdefault(mu, []).append(tuple(v))
    zero = (0,) * s
    sig = torus_fields(W, k + 1)
    sig_vecs = [field_vector(x, idx) for x in sig]
    comps: List[WeightComponent] = []
    total = 0
    for mu in sorted(buckets, key=lambda w: (w != zero, w)):
        space = row_space_basis(buckets[mu])
        if mu == zero and s:
            sig_basis = row_space_basis(sig_vecs)
            if len(row_space_basis(space + sig_basis)) != len(space):
                raise InvalidStateError("the torus fields are not contained in the jet algebra")
            for v in sig_vecs:
                comps.append(WeightComponent(mu, vector_field(n, primitive_integer_vector(v), idx, k + 1), "torus"))
            rest = _complement(space, sig_basis)
            for v in rest:
                comps.append(WeightComponent(mu, vector_field(n, primitive_integer_vector(v), idx, k + 1), "weight-zero"))
            total += len(space)
        else:
            kind = "weight-zero" if mu == zero else "root"
            for v in space:
                comps.append(WeightComponent(mu, vector_field(n, primitive_integer_vector(v), idx, k + 1), kind))
            total += len(space)
    if total != L.dim:
        raise InvalidStateError(
            f"weight components span dimension {total}, expected {L.dim}: the algebra is not graded by the torus"
        )
    table = []
    for c in comps:
        if c.kind == "torus":
            continue
        verified = all(
            bracket(sg, c.field).truncate(k + 1).congruent(c.field.scale(mu)) for sg, mu in zip(sig, c.weight)
        )
        if not verified:
            raise InvalidStateError(f"ad-eigenvector check failed for {c.field}")
        table.append({"field": c.field.to_string(), "weight": list(c.weight), "verified": verified})
    return WeightDecomposition(k, tuple(W), tuple(comps), tuple(table))


def _complement(space: List[Tuple[Q, ...]], sub: List[Tuple[Q, ...]]) -> List[Tuple[Q, ...]]:
    """Canonical complement of span(sub) inside span(space): reduce modulo sub, then RREF."""
    if not sub:
        return space
    piv = [next(i for i, x in enumerate(r) if x) for r in sub]
    out = []
    for v in space:
        v = list(v)
        for r, p in zip(sub, piv):
            if v[p]:
                c = v[p] / r[p]
                v = [a - c * b for a, b in zip(v, r)]
        if any(v):
            out.append(tuple(v))
    return row_space_basis(out) if out else []
