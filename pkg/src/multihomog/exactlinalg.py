"""Exact linear algebra over Q.

Small dense matrices (:class:`QMatrix`) carry the Jordan-Chevalley and
eigenvalue work; :class:`SparseEchelon` handles the large, sparse systems
that arise from jet computations.  Sparse rows are kept as integer vectors
(fraction-free elimination with content removal) to limit coefficient growth.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import CommutationError, DimensionError, UnsupportedSpectrumError
from .rational import Q

Vector = Tuple[Q, ...]


class QMatrix:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: Optional[int] = None):
        rows = tuple(tuple(Q(x) for x in r) for r in rows)
        if rows:
            w = len(rows[0])
            if any(len(r) != w for r in rows):
                raise DimensionError("ragged matrix")
        else:
            w = ncols or 0
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = w

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int) -> "QMatrix":
        return cls([[0] * c for _ in range(r)], ncols=c)

    @classmethod
    def diag(cls, entries: Sequence) -> "QMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "QMatrix":
        if not cols:
            return cls([])
        return cls([[c[i] for c in cols] for i in range(len(cols[0]))])

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def tolist(self) -> List[List[Q]]:
        return [list(r) for r in self.rows]

    def flat(self) -> Vector:
        return tuple(x for r in self.rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def transpose(self) -> "QMatrix":
        return QMatrix(zip(*self.rows), ncols=self.nrows) if self.rows else QMatrix([], 0)

    T = property(transpose)

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._same(other)
        return QMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._same(other)
        return QMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "QMatrix":
        c = Q(c)
        return QMatrix([[c * a for a in r] for r in self.rows], self.ncols)

    def __mul__(self, c):
        if isinstance(c, QMatrix):
            return self @ c
        return self.scale(c)

    __rmul__ = scale

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            if self.ncols != other.nrows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            cols = list(zip(*other.rows)) if other.rows else []
            return QMatrix(
                [[sum((a * b for a, b in zip(r, c)), Q(0)) for c in cols] for r in self.rows],
                other.ncols,
            )
        v = tuple(other)
        if len(v) != self.ncols:
            raise DimensionError("vector length mismatch")
        return tuple(sum((a * b for a, b in zip(r, v)), Q(0)) for r in self.rows)

    def _same(self, other):
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __pow__(self, k: int) -> "QMatrix":
        out = QMatrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def diagonal(self) -> Vector:
        return tuple(self.rows[i][i] for i in range(min(self.nrows, self.ncols)))

    def trace(self) -> Q:
        return sum(self.diagonal(), Q(0))

    def commutator(self, other: "QMatrix") -> "QMatrix":
        return self @ other - other @ self

    def is_nilpotent(self) -> bool:
        return (self ** self.nrows).is_zero()

    def rref(self) -> Tuple["QMatrix", List[int]]:
        rows, piv = _rref([list(r) for r in self.rows], self.ncols)
        return QMatrix(rows, self.ncols), piv

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> List[Vector]:
        return nullspace(self)

    def det(self) -> Q:
        if not self.is_square():
            raise DimensionError("determinant of a non-square matrix")
        a = [list(r) for r in self.rows]
        n = self.nrows
        d = Q(1)
        for c in range(n):
            p = next((r for r in range(c, n) if a[r][c] != 0), None)
            if p is None:
                return Q(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                d = -d
            d *= a[c][c]
            for r in range(c + 1, n):
                if a[r][c]:
                    f = a[r][c] / a[c][c]
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return d

    def inverse(self) -> "QMatrix":
        if not self.is_square():
            raise DimensionError("inverse of a non-square matrix")
        n = self.nrows
        aug = [list(r) + [Q(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        rows, piv = _rref(aug, 2 * n)
        if piv[:n] != list(range(n)) or (n and piv[n - 1] >= n):
            raise ZeroDivisionError("matrix is singular")
        return QMatrix([r[n:] for r in rows[:n]])

    def charpoly(self) -> List[Q]:
        """Characteristic polynomial det(tI - A), coefficients from t^0 upward (monic)."""
        if not self.is_square():
            raise DimensionError("characteristic polynomial of a non-square matrix")
        # Faddeev-LeVerrier: exact in characteristic zero
        n = self.nrows
        coeffs = [Q(0)] * (n + 1)
        coeffs[n] = Q(1)
        M = QMatrix.zeros(n, n)
        I = QMatrix.identity(n)
        for k in range(1, n + 1):
            M = self @ M + I.scale(coeffs[n - k + 1])
            coeffs[n - k] = -(self @ M).trace() / k
        return coeffs

    def __repr__(self):
        return "QMatrix(" + repr([[str(x) for x in r] for r in self.rows]) + ")"

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "]"


def _rref(a: List[List[Q]], ncols: int) -> Tuple[List[List[Q]], List[int]]:
    pivots = []
    r = 0
    nrows = len(a)
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots


def nullspace(M: QMatrix) -> List[Vector]:
    """Kernel basis, one vector per free column of the RREF (1 at that column)."""
    rows, piv = M.rref()
    n = M.ncols
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Q(0)] * n
        v[f] = Q(1)
        for i, p in enumerate(piv):
            v[p] = -rows[i, f]
        basis.append(tuple(v))
    return basis


def row_space_basis(vectors: Sequence[Sequence]) -> List[Vector]:
    """Canonical (RREF) basis of the span of ``vectors``."""
    vectors = [tuple(Q(x) for x in v) for v in vectors]
    if not vectors:
        return []
    rows, piv = _rref([list(v) for v in vectors], len(vectors[0]))
    return [tuple(r) for r in rows[: len(piv)]]


def in_span(v: Sequence, basis: Sequence[Sequence]) -> bool:
    if not basis:
        return all(x == 0 for x in v)
    return len(row_space_basis(list(basis) + [v])) == len(row_space_basis(basis))


def solve(M: QMatrix, b: Sequence) -> Optional[Vector]:
    """One solution of M x = b (free variables zero), or None."""
    aug = [list(r) + [Q(x)] for r, x in zip(M.rows, b)]
    rows, piv = _rref(aug, M.ncols + 1)
    if piv and piv[-1] == M.ncols:
        return None
    x = [Q(0)] * M.ncols
    for i, p in enumerate(piv):
        x[p] = rows[i][M.ncols]
    return tuple(x)


def primitive_integer_vector(v: Sequence) -> Tuple[int, ...]:
    """Scale a rational vector by a positive rational to coprime integers."""
    v = [Q(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(0 for _ in ints)
    return tuple(x // g for x in ints)


# ---------------------------------------------------------------------------
# univariate polynomials over Q, coefficient lists from degree 0 upward

def _utrim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def upoly_divmod(a, b):
    a, b = _utrim(a), _utrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Q(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    while len(r) >= len(b) and r:
        c = r[-1] / b[-1]
        k = len(r) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            r[i + k] -= c * y
        r = _utrim(r)
    return _utrim(q), r


def upoly_gcd(a, b):
    a, b = _utrim(a), _utrim(b)
    while b:
        a, b = b, upoly_divmod(a, b)[1]
    if not a:
        return []
    return [x / a[-1] for x in a]


def upoly_derivative(p):
    return _utrim([i * c for i, c in enumerate(p)][1:])


def squarefree_part(p):
    """p / gcd(p, p'), made monic."""
    p = _utrim(p)
    g = upoly_gcd(p, upoly_derivative(p))
    q, r = upoly_divmod(p, g)
    assert not r
    return [x / q[-1] for x in q]


def upoly_at_matrix(p, A: QMatrix) -> QMatrix:
    n = A.nrows
    out = QMatrix.zeros(n, n)
    I = QMatrix.identity(n)
    for c in reversed(_utrim(p)):
        out = out @ A + I.scale(c)
    return out


def upoly_eval(p, x):
    out = Q(0)
    for c in reversed(p):
        out = out * x + c
    return out


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChevalleyPair:
    semisimple: QMatrix
    nilpotent: QMatrix


def jordan_chevalley(A: QMatrix) -> ChevalleyPair:
    """Additive Jordan-Chevalley decomposition A = S + N over Q.

    Newton iteration S <- S - p(S) p'(S)^{-1} on the squarefree part p of the
    characteristic polynomial; no eigenvalues are ever computed.
    """
    if not A.is_square():
        raise DimensionError("Jordan-Chevalley decomposition needs a square matrix")
    p = squarefree_part(A.charpoly())
    dp = upoly_derivative(p)
    S = A
    for _ in range(4 * max(A.nrows, 1).bit_length() + 4):
        pS = upoly_at_matrix(p, S)
        if pS.is_zero():
            break
        S = S - pS @ upoly_at_matrix(dp, S).inverse()
    else:  # pragma: no cover - quadratic convergence makes this unreachable
        raise ArithmeticError("Chevalley iteration did not converge")
    return ChevalleyPair(S, A - S)


def is_semisimple(A: QMatrix) -> bool:
    """True iff the minimal polynomial is squarefree, i.e. p(A) = 0 for the squarefree part p."""
    return upoly_at_matrix(squarefree_part(A.charpoly()), A).is_zero()


def _divisors(n: int) -> List[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(p) -> List[Q]:
    """Distinct rational roots of a univariate rational polynomial, descending."""
    p = _utrim(p)
    if not p:
        raise ValueError("zero polynomial has every root")
    den = 1
    for c in p:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    roots = set()
    while ints and ints[0] == 0:
        roots.add(Q(0))
        ints = ints[1:]
    if len(ints) > 1:
        sf = squarefree_part([Q(c) for c in ints])
        den = 1
        for c in sf:
            den = den * c.denominator // gcd(den, c.denominator)
        sfi = [int(c * den) for c in sf]
        for a in _divisors(sfi[0]):
            for b in _divisors(sfi[-1]):
                for s in (1, -1):
                    x = Q(s * a, b)
                    if upoly_eval(sf, x) == 0:
                        roots.add(x)
    return sorted(roots, reverse=True)


@dataclass(frozen=True)
class EigenData:
    eigenpairs: Tuple[Tuple[Q, Tuple[Vector, ...]], ...]
    complete: bool  # True iff A is diagonalizable over Q

    def as_dict(self):
        return {lam: basis for lam, basis in self.eigenpairs}


def rational_eigenvalues(A: QMatrix) -> EigenData:
    if not A.is_square():
        raise DimensionError("eigenvalues of a non-square matrix")
    n = A.nrows
    pairs = []
    total = 0
    for lam in rational_roots(A.charpoly()):
        basis = tuple(row_space_basis(nullspace(A - QMatrix.identity(n).scale(lam))))
        pairs.append((lam, basis))
        total += len(basis)
    return EigenData(tuple(pairs), total == n)


def _leading_index(v: Sequence) -> int:
    return next(i for i, x in enumerate(v) if x != 0)


def simultaneous_diagonalize(family: Sequence[QMatrix]) -> Tuple[QMatrix, List[Tuple[int, ...]]]:
    """Common eigenbasis P (as columns) of a commuting family diagonalizable over Q.

    Columns are the RREF bases of the joint eigenspaces, ordered by leading
    coordinate and then by decreasing joint eigenvalue.  ``weights[i]`` is the
    diagonal of P^{-1} A_i P scaled to a primitive integer vector.
    """
    family = list(family)
    if not family:
        return QMatrix.identity(0), []
    n = family[0].nrows
    for A in family:
        if A.shape != (n, n):
            raise DimensionError("family members must be square of equal size")
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            if not family[i].commutator(family[j]).is_zero():
                raise CommutationError(f"family members {i} and {j} do not commute")
    spectra = []
    for i, A in enumerate(family):
        ed = rational_eigenvalues(A)
        if not ed.complete:
            raise UnsupportedSpectrumError(
                f"family member {i} is not diagonalizable over Q (irrational or defective spectrum)"
            )
        spectra.append(ed)
    # split the space into joint eigenspaces
    spaces = [((), [tuple(Q(int(i == j)) for j in range(n)) for i in range(n)])]
    for A, ed in zip(family, spectra):
        new = []
        for key, basis in spaces:
            B = QMatrix.from_columns(basis)
            for lam, _ in ed.eigenpairs:
                K = (A - QMatrix.identity(n).scale(lam)) @ B
                coeffs = nullspace(K)
                if coeffs:
                    vecs = [B @ c for c in coeffs]
                    new.append((key + (lam,), row_space_basis(vecs)))
        spaces = new
    cols = []
    for key, basis in spaces:
        for v in basis:
            cols.append((_leading_index(v), tuple(-x for x in key), v, key))
    cols.sort(key=lambda t: (t[0], t[1]))
    P = QMatrix.from_columns([c[2] for c in cols])
    weights = [primitive_integer_vector([c[3][i] for c in cols]) for i in range(len(family))]
    return P, weights


# ---------------------------------------------------------------------------

class InconsistentSystemError(ArithmeticError):
    pass


def _content_normalize(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g not in (1,):
        row = {c: v // g for c, v in row.items()}
    return row


def integer_row(row: Dict[int, Q]) -> Dict[int, int]:
    den = 1
    for v in row.values():
        d = getattr(v, "denominator", 1)
        den = den * d // gcd(den, d)
    return {c: int(v * den) for c, v in row.items() if v}


class SparseEchelon:
    """Row echelon form of a sparse system, built row by row.

    Columns are integers; a smaller index means higher pivot priority.  Every
    stored row has a distinct leading (smallest) column.  Rows are integral
    and content-normalized with a positive leading entry.
    """

    def __init__(self):
        self.rows: Dict[int, Dict[int, int]] = {}

    def __len__(self):
        return len(self.rows)

    @property
    def pivots(self) -> List[int]:
        return sorted(self.rows)

    def reduce(self, row: Dict[int, int]) -> Dict[int, int]:
        """Top-reduce until the leading column is not a pivot (or the row vanishes)."""
        row = {c: v for c, v in row.items() if v}
        rows = self.rows
        while row:
            lead = min(row)
            p = rows.get(lead)
            if p is None:
                return _content_normalize(row)
            a = row[lead]
            b = p[lead]
            g = gcd(a, b)
            a //= g
            b //= g
            if b != 1:
                row = {c: v * b for c, v in row.items()}
            for c, v in p.items():
                nv = row.get(c, 0) - a * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            if row and len(row) > 4 and b != 1:
                row = _content_normalize(row)
        return row

    def insert(self, row: Dict[int, int]) -> bool:
        r = self.reduce(row)
        if not r:
            return False
        self.rows[min(r)] = r
        return True

    def contains(self, row: Dict[int, int]) -> bool:
        return not self.reduce(row)

    def constraint_rows(self, start: int) -> List[Dict[int, int]]:
        """Stored rows whose leading column is >= start (they involve only such columns)."""
        return [self.rows[k] for k in sorted(self.rows) if k >= start]

    def back_substitute(self, fixed: Dict[int, Q]) -> Dict[int, Q]:
        """Solve the homogeneous system with ``fixed`` columns prescribed.

        Non-pivot columns that are not fixed are set to zero.  Rows led by a
        fixed column are checked, not solved.  Returns all nonzero values.
        """
        vals: Dict[int, Q] = {c: Q(v) for c, v in fixed.items() if v}
        for lead in sorted(self.rows, reverse=True):
            row = self.rows[lead]
            s = Q(0)
            for c, v in row.items():
                if c != lead:
                    x = vals.get(c)
                    if x:
                        s += v * x
            if lead in fixed:
                if s + row[lead] * Q(fixed[lead]) != 0:
                    raise InconsistentSystemError(f"constraint led by column {lead} violated")
                continue
            if s:
                vals[lead] = -s / row[lead]
        return vals


# ---------------------------------------------------------------------------
# multi-modular solving with exact verification


_PRIMES: List[int] = []


def _prime(i: int) -> int:
    """The i-th prime above 2^62 (word-size moduli for FLINT)."""
    from gmpy2 import next_prime

    while len(_PRIMES) <= i:
        _PRIMES.append(int(next_prime(_PRIMES[-1] if _PRIMES else 1 << 62)))
    return _PRIMES[i]


def rational_reconstruct(a: int, m: int) -> Optional[Q]:
    """The fraction r/s with r = a s (mod m) and |r|, s <= sqrt(m/2), if it exists."""
    from math import isqrt

    a %= m
    bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or gcd(r1, abs(s1)) != 1:
        return None
    return Q(r1, s1)


def _solve_mod(Z, p):
    """Reduced row echelon form of the augmented integer matrix ``Z`` mod p (via FLINT).

    Free unknowns are set to zero.  Returns (pivot columns, solution list)
    or (None, None) if the system is inconsistent mod p.
    """
    from flint import nmod_mat

    W = Z.ncols()
    H = W - 1
    M, rank = nmod_mat(Z, p).rref()
    pivots = []
    x = [0] * H
    c = 0
    for i in range(rank):
        # pivots increase strictly, so each row is scanned from the previous pivot on
        while int(M[i, c]) == 0:
            c += 1
        if c == H:
            return None, None
        pivots.append(c)
        x[c] = int(M[i, H])
        c += 1
    return pivots, x


def solve_sparse(rows: Sequence[Dict[int, int]], fixed: Dict[int, Q], max_primes: int = 64) -> Dict[int, Q]:
    """Solve the homogeneous integer system with ``fixed`` columns prescribed.

    Unknown columns that are not pivots (lowest column index first) are set
    to zero, exactly as :meth:`SparseEchelon.back_substitute` does.  Works
    modulo word-size primes, lifts by Chinese remaindering and rational
    reconstruction, and verifies the result exactly; if that does not settle
    quickly, falls back to exact elimination.
    """
    rows = [r for r in rows if r]
    den = 1
    for v in fixed.values():
        den = den * Q(v).denominator // gcd(den, Q(v).denominator)
    fixed_int = {c: int(Q(v) * den) for c, v in fixed.items()}
    hidden = sorted({c for r in rows for c in r if c not in fixed})
    hidden_pos = {c: i for i, c in enumerate(hidden)}
    rhs = [-sum(v * fixed_int[c] for c, v in r.items() if c in fixed_int) for r in rows]
    from flint import fmpz_mat

    W = len(hidden) + 1
    flat = [0] * (len(rows) * W)
    for i, r in enumerate(rows):
        for c, v in r.items():
            k = hidden_pos.get(c)
            if k is not None:
                flat[i * W + k] = int(v)
        flat[i * W + W - 1] = int(rhs[i])
    Z = fmpz_mat(len(rows), W, flat)

    def verify(sol):
        d = 1
        for v in sol.values():
            d = d * v.denominator // gcd(d, v.denominator)
        xi = {c: int(v * d) for c, v in sol.items()}
        for r, b in zip(rows, rhs):
            if sum(v * xi[c] for c, v in r.items() if c in xi) != b * d:
                return False
        return True

    modulus = 1
    residues: Optional[List[int]] = None
    ref_pivots = None
    inconsistent = 0
    for i in range(max_primes):
        p = _prime(i)
        piv, x = _solve_mod(Z, p)
        if piv is None:
            inconsistent += 1
            if inconsistent >= 2:
                break
            continue
        if ref_pivots is None or piv < ref_pivots:
            # an earlier pivot list means the previous primes were unlucky
            ref_pivots, modulus, residues = piv, p, list(x)
        elif piv == ref_pivots:
            inv = pow(modulus % p, p - 2, p)
            new = []
            for a, b in zip(residues, x):
                t = ((b - a) * inv) % p
                new.append(a + modulus * t)
            modulus *= p
            residues = new
        else:
            continue
        if modulus == p and i + 1 < max_primes:
            continue
        sol = {}
        ok = True
        for k, a in enumerate(residues):
            if a:
                q = rational_reconstruct(a, modulus)
                if q is None:
                    ok = False
                    break
                sol[hidden[k]] = q
        if ok and verify(sol):
            return {c: v / den for c, v in sol.items()}
    # exact fallback
    ech = SparseEchelon()
    for r in rows:
        ech.insert(r)
    return {c: v for c, v in ech.back_substitute(fixed).items() if c not in fixed}
