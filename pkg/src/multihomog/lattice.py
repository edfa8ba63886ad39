"""Integer lattices: Smith and Hermite normal forms, saturation, canonical bases."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import gcd
from typing import List, Optional, Sequence, Tuple

from .errors import DimensionError

IntMatrix = List[List[int]]


def _identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if not A:
        return []
    cols = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in A]


def smith_normal_form(M: Sequence[Sequence[int]]) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, D, V) with U*M*V = D, U and V unimodular, D diagonal with d_i | d_{i+1}."""
    D = [[int(x) for x in r] for r in M]
    m = len(D)
    n = len(D[0]) if D else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, c):  # row dst += c * row src
        D[dst] = [a + c * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for r in D:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]

    t = 0
    while t < min(m, n):
        # pick the smallest nonzero entry in the remaining block as pivot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = D[i][t] // p
                if q:
                    add_row(i, t, -q)
                if D[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = D[t][j] // p
                if q:
                    add_col(j, t, -q)
                if D[t][j]:
                    dirty = True
            if not dirty:
                # enforce divisibility of the remaining block
                bad = next(
                    ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                add_row(t, bad[0], 1)
                continue
            # move a smaller remainder into the pivot position
            best = None
            for i in range(t, m):
                if D[i][t] and (best is None or abs(D[i][t]) < abs(best[2])):
                    best = (i, t, D[i][t])
            for j in range(t, n):
                if D[t][j] and (best is None or abs(D[t][j]) < abs(best[2])):
                    best = (t, j, D[t][j])
            swap_rows(t, best[0])
            swap_cols(t, best[1])
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


def _unimodular_inverse(V: IntMatrix) -> IntMatrix:
    from .exactlinalg import QMatrix

    inv = QMatrix(V).inverse()
    out = []
    for r in inv.rows:
        if any(x.denominator != 1 for x in r):
            raise ArithmeticError("matrix is not unimodular")
        out.append([int(x) for x in r])
    return out


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Row-style Hermite normal form: nonzero rows only, positive pivots, reduced above."""
    A = [[int(x) for x in r] for r in rows if any(r)]
    if not A:
        return []
    n = len(A[0])
    out: IntMatrix = []
    r = 0
    for c in range(n):
        # Euclid on column c among rows r..end
        while True:
            nz = [i for i in range(r, len(A)) if A[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[i0] = A[i0], A[r]
            done = True
            for i in range(r + 1, len(A)):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if r < len(A) and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
            for i in range(r):
                q = A[i][c] // A[r][c]
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
            r += 1
            if r == len(A):
                break
    out = [row for row in A[:r]]
    return out


def flipped_hermite_form(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Hermite form taken in reversed coordinates, then reversed back.

    Pivots sit at the last nonzero coordinate of each row and are positive.
    The torus weight matrices use this form (see ``canonical_weights``).
    """
    H = hermite_normal_form([list(r)[::-1] for r in rows])
    return [r[::-1] for r in H[::-1]]


def rank_of(rows: Sequence[Sequence[int]]) -> int:
    return len(hermite_normal_form(rows))


@dataclass(frozen=True)
class IntegerLattice:
    """A sublattice of Z^n stored by its Hermite basis."""

    ambient: int
    basis: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_generators(cls, generators: Sequence[Sequence[int]], ambient: Optional[int] = None) -> "IntegerLattice":
        gens = [tuple(int(x) for x in g) for g in generators]
        if ambient is None:
            if not gens:
                raise DimensionError("ambient dimension needed for an empty generator list")
            ambient = len(gens[0])
        if any(len(g) != ambient for g in gens):
            raise DimensionError("generators of unequal length")
        return cls(ambient, tuple(tuple(r) for r in hermite_normal_form(gens)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def generators(self) -> List[Tuple[int, ...]]:
        return list(self.basis)

    def __contains__(self, v) -> bool:
        return membership(self, v)

    def is_saturated(self) -> bool:
        return saturate(self.basis, self.ambient) == self


def saturate(generators: Sequence[Sequence[int]], ambient: Optional[int] = None) -> IntegerLattice:
    """(Q-span of the generators) intersected with Z^n."""
    gens = [list(map(int, g)) for g in generators]
    if ambient is None:
        ambient = len(gens[0]) if gens else 0
    if any(len(g) != ambient for g in gens):
        raise DimensionError("generators of unequal length")
    gens = [g for g in gens if any(g)]
    if not gens:
        return IntegerLattice(ambient, ())
    U, D, V = smith_normal_form(gens)
    r = sum(1 for i in range(min(len(D), ambient)) if D[i][i])
    Vinv = _unimodular_inverse(V)
    return IntegerLattice.from_generators(Vinv[:r], ambient)


def invariant_factors(generators: Sequence[Sequence[int]]) -> List[int]:
    gens = [list(map(int, g)) for g in generators if any(g)]
    if not gens:
        return []
    _, D, _ = smith_normal_form(gens)
    return [D[i][i] for i in range(min(len(D), len(D[0]))) if D[i][i]]


def saturation_index(generators: Sequence[Sequence[int]]) -> int:
    """[saturate(G) : <G>], the product of the invariant factors."""
    out = 1
    for d in invariant_factors(generators):
        out *= d
    return out


def lattices_equal(a: IntegerLattice, b: IntegerLattice) -> bool:
    if a.ambient != b.ambient:
        raise DimensionError(f"lattices in Z^{a.ambient} and Z^{b.ambient}")
    return a.basis == b.basis


def membership(L: IntegerLattice, v: Sequence[int]) -> bool:
    v = [int(x) for x in v]
    if len(v) != L.ambient:
        raise DimensionError(f"vector of length {len(v)} in Z^{L.ambient}")
    for row in L.basis:
        p = next(i for i, x in enumerate(row) if x)
        if v[p] % row[p]:
            return False
        q = v[p] // row[p]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


def primitive(v: Sequence[int]) -> Tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def canonical_weights(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Canonical basis of the lattice spanned by ``rows`` (flipped Hermite form)."""
    return flipped_hermite_form(rows)


def canonical_permutation(rows: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], IntMatrix]:
    """Coordinate permutation making the canonical weight matrix as large as possible.

    Returns (perm, W) where column j of W is column perm[j] of the input
    lattice.  Candidates are compared by the row-major entries of the flipped
    Hermite form; the first maximizer in lexicographic permutation order wins.
    """
    rows = [list(map(int, r)) for r in rows]
    if not rows:
        return (), []
    n = len(rows[0])
    best = None
    for perm in permutations(range(n)):
        W = flipped_hermite_form([[r[p] for p in perm] for r in rows])
        key = tuple(x for r in W for x in r)
        if best is None or key > best[0]:
            best = (key, perm, W)
    return best[1], best[2]
