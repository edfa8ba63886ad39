import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from multihomog import CommutationError, Q, QMatrix, UnsupportedSpectrumError, jordan_chevalley, simultaneous_diagonalize
from multihomog.exactlinalg import (
    InconsistentSystemError,
    SparseEchelon,
    is_semisimple,
    nullspace,
    rational_eigenvalues,
    rational_reconstruct,
    solve_sparse,
)
from strategies import qmatrices


def sym(A):
    return sympy.Matrix([[sympy.Rational(int(x.numerator), int(x.denominator)) for x in r] for r in A.rows])



def _eval(p, t, M):
    n = M.shape[0]
    out = sympy.zeros(n)
    for c in sympy.Poly(p, t).all_coeffs():
        out = out * M + c * sympy.eye(n)
    return out


class TestNullspace:
    def test_identity(self):
        assert nullspace(QMatrix.identity(3)) == []

    def test_zero(self):
        assert len(nullspace(QMatrix.zeros(2, 3))) == 3

    def test_single_row(self):
        assert nullspace(QMatrix([[1, 2, 3]])) == [(-2, 1, 0), (-3, 0, 1)]


class TestJordanChevalley:
    def test_jordan_block(self):
        p = jordan_chevalley(QMatrix([[1, 1], [0, 1]]))
        assert p.semisimple == QMatrix.identity(2)
        assert p.nilpotent == QMatrix([[0, 1], [0, 0]])

    def test_diagonal(self):
        A = QMatrix.diag([3, 2])
        p = jordan_chevalley(A)
        assert p.semisimple == A and p.nilpotent.is_zero()

    def test_rotation_is_semisimple(self):
        A = QMatrix([[0, 1], [-1, 0]])
        p = jordan_chevalley(A)
        assert p.semisimple == A and p.nilpotent.is_zero()

    def test_against_sympy_jordan_form(self):
        # rational spectrum: S is P diag(J) P^-1 with the Jordan blocks' diagonals
        A = sympy.Matrix([[2, 1, 0], [0, 2, 0], [1, 0, 5]])
        Pm, Jm = A.jordan_form()
        S_ref = Pm * sympy.diag(*[Jm[i, i] for i in range(3)]) * Pm.inv()
        got = jordan_chevalley(QMatrix([[int(x) for x in r] for r in A.tolist()])).semisimple
        assert sym(got) == S_ref


class TestEigen:
    def test_diagonal(self):
        ed = rational_eigenvalues(QMatrix.diag([3, 2]))
        assert ed.complete and ed.as_dict() == {3: ((1, 0),), 2: ((0, 1),)}

    def test_rotation(self):
        ed = rational_eigenvalues(QMatrix([[0, 1], [-1, 0]]))
        assert ed.eigenpairs == () and not ed.complete

    def test_nilpotent(self):
        ed = rational_eigenvalues(QMatrix([[0, 1], [0, 0]]))
        assert ed.as_dict() == {0: ((1, 0),)} and not ed.complete


class TestSimultaneous:
    def test_single(self):
        P, w = simultaneous_diagonalize([QMatrix.diag([3, 2])])
        assert P == QMatrix.identity(2) and w == [(3, 2)]

    def test_swap(self):
        P, w = simultaneous_diagonalize([QMatrix.identity(2), QMatrix([[0, 1], [1, 0]])])
        assert {P.column(0), P.column(1)} == {(1, 1), (1, -1)}
        assert w[0] == (1, 1)

    def test_empty(self):
        P, w = simultaneous_diagonalize([])
        assert w == []

    def test_non_commuting(self):
        with pytest.raises(CommutationError):
            simultaneous_diagonalize([QMatrix.diag([1, 2]), QMatrix([[0, 1], [0, 0]])])

    def test_irrational(self):
        with pytest.raises(UnsupportedSpectrumError):
            simultaneous_diagonalize([QMatrix([[0, 2], [1, 0]])])


# --- properties -------------------------------------------------------------


@st.composite
def rational_matrices(draw):
    n = draw(st.integers(1, 5))
    return QMatrix(
        [[Q(draw(st.integers(-4, 4)), draw(st.integers(1, 3))) for _ in range(n)] for _ in range(n)]
    )


@given(rational_matrices())
def test_chevalley_invariants(A):
    p = jordan_chevalley(A)
    S, N = p.semisimple, p.nilpotent
    n = A.nrows
    assert S + N == A
    assert S @ N == N @ S
    assert (N ** n).is_zero()
    assert _eval(_sqf(sym(S)), sympy.Symbol("t"), sym(S)).is_zero_matrix


def _sqf(M):
    t = sympy.Symbol("t")
    m = M.charpoly(t).as_expr()
    return sympy.quo(m, sympy.gcd(m, sympy.diff(m, t)), t)


@given(rational_matrices())
def test_chevalley_idempotent(A):
    S = jordan_chevalley(A).semisimple
    p = jordan_chevalley(S)
    assert p.semisimple == S and p.nilpotent.is_zero()
    assert is_semisimple(S)


@st.composite
def commuting_families(draw):
    n = draw(st.integers(1, 4))
    P = QMatrix([[draw(st.integers(-2, 2)) for _ in range(n)] for _ in range(n)])
    if P.rank() < n:
        P = QMatrix.identity(n)
    fam = []
    for _ in range(draw(st.integers(1, 3))):
        D = QMatrix.diag([draw(st.integers(-3, 3)) for _ in range(n)])
        fam.append(P @ D @ P.inverse())
    return fam


@given(commuting_families())
def test_simultaneous_diagonalize(fam):
    P, w = simultaneous_diagonalize(fam)
    Pi = P.inverse()
    for A, wi in zip(fam, w):
        D = Pi @ A @ P
        assert D.is_diagonal()
        d = D.diagonal()
        # the stored weights are a positive rational multiple of the diagonal
        nz = [i for i, x in enumerate(d) if x]
        if nz:
            r = Q(wi[nz[0]]) / d[nz[0]]
            assert r > 0 and all(Q(a) == r * b for a, b in zip(wi, d))
        else:
            assert not any(wi)


@given(st.integers(1, 4), st.integers(1, 6), st.data())
def test_nullspace_substitution_and_rank(r, c, data):
    M = QMatrix([[Q(data.draw(st.integers(-3, 3)), data.draw(st.integers(1, 2))) for _ in range(c)] for _ in range(r)])
    basis = nullspace(M)
    for v in basis:
        assert all(x == 0 for x in M @ v)
    # rank-nullity with sympy's independent elimination
    assert len(basis) == c - sym(M).rank()
    if basis:
        assert QMatrix(basis).rank() == len(basis)


@st.composite
def sparse_systems(draw):
    ncols = draw(st.integers(2, 12))
    rows = []
    for _ in range(draw(st.integers(1, 10))):
        cols = draw(st.lists(st.integers(0, ncols - 1), min_size=1, max_size=4, unique=True))
        rows.append({c: draw(st.integers(-5, 5)) or 1 for c in cols})
    nfixed = draw(st.integers(1, min(3, ncols)))
    fixed_cols = list(range(ncols - nfixed, ncols))
    fixed = {c: Q(draw(st.integers(-3, 3)), draw(st.integers(1, 3))) for c in fixed_cols}
    return rows, fixed


@given(sparse_systems())
def test_modular_solve_matches_exact_elimination(system):
    rows, fixed = system
    E = SparseEchelon()
    for row in rows:
        E.insert(dict(row))
    try:
        want = E.back_substitute(fixed)
    except InconsistentSystemError:
        with pytest.raises(InconsistentSystemError):
            solve_sparse(rows, fixed)
        return
    got = dict(solve_sparse(rows, fixed))
    got.update(fixed)
    assert {c: v for c, v in got.items() if v} == {c: v for c, v in want.items() if v}
    for row in rows:
        assert sum(v * got.get(c, 0) for c, v in row.items()) == 0


def test_rational_reconstruct():
    m = 1000003
    for num, den in [(3, 7), (-5, 11), (0, 1), (22, 9)]:
        a = num * pow(den, -1, m) % m
        assert rational_reconstruct(a, m) == Q(num, den)


def test_modular_solve_large_entries():
    rng = random.Random(7)
    rows = [{c: rng.randint(-10 ** 30, 10 ** 30) for c in rng.sample(range(8), 4)} for _ in range(5)]
    fixed = {6: Q(1), 7: Q(-2, 3)}
    E = SparseEchelon()
    for row in rows:
        E.insert(dict(row))
    want = E.back_substitute(fixed)
    got = dict(solve_sparse(rows, fixed))
    got.update(fixed)
    assert {c: v for c, v in got.items() if v} == {c: v for c, v in want.items() if v}
