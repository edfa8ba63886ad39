import itertools

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from multihomog import DimensionError, IntegerLattice, lattices_equal, membership, saturate, smith_normal_form
from multihomog.lattice import _matmul, hermite_normal_form, invariant_factors, saturation_index


def det(M):
    return int(sympy.Matrix(M).det())


class TestSmith:
    def test_row(self):
        U, D, V = smith_normal_form([[2, 4]])
        assert D == [[2, 0]]

    def test_identity(self):
        U, D, V = smith_normal_form([[1, 0], [0, 1]])
        assert D == U == V == [[1, 0], [0, 1]]

    def test_diag(self):
        assert smith_normal_form([[2, 0], [0, 3]])[1] == [[1, 0], [0, 6]]


class TestSaturate:
    def test_line(self):
        assert saturate([(2, 4)]).basis == ((1, 2),)

    def test_already_saturated(self):
        assert saturate([(1, 0), (0, 1)]).basis == ((1, 0), (0, 1))

    def test_three_dim(self):
        assert saturate([(2, 0, 0), (0, 2, 4)]).basis == ((1, 0, 0), (0, 1, 2))

    def test_empty(self):
        L = saturate([], 3)
        assert L.rank == 0 and L.ambient == 3


class TestEquality:
    def test_same_line(self):
        assert lattices_equal(saturate([(2, 4)]), saturate([(1, 2)]))

    def test_different(self):
        assert not lattices_equal(saturate([(1, 0)]), saturate([(0, 1)]))

    def test_zero(self):
        assert lattices_equal(saturate([], 2), saturate([], 2))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            lattices_equal(saturate([], 2), saturate([], 3))


class TestMembership:
    def test_multiple(self):
        assert membership(saturate([(1, 2)]), (3, 6))

    def test_off_line(self):
        assert not membership(saturate([(1, 2)]), (1, 1))

    def test_saturation_adds_primitive(self):
        assert membership(saturate([(2, 4)]), (1, 2))

    def test_unsaturated_lattice(self):
        L = IntegerLattice.from_generators([(2, 4)])
        assert not membership(L, (1, 2)) and membership(L, (-4, -8))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            membership(saturate([(1, 2)]), (1, 2, 3))


# --- properties -------------------------------------------------------------

int_matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@given(int_matrices)
def test_snf_invariants(M):
    U, D, V = smith_normal_form(M)
    assert _matmul(_matmul(U, M), V) == D
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert (a == 0 and b == 0) or (a != 0 and b % a == 0)
    # independent oracle
    ref = sympy_snf(sympy.Matrix(M), domain=sympy.ZZ)
    assert sorted(abs(int(ref[i, i])) for i in range(len(diag))) == sorted(diag)


@given(int_matrices)
def test_saturation_properties(G):
    n = len(G[0])
    L = saturate(G, n)
    assert saturate(L.basis, n) == L
    assert all(membership(L, g) for g in G)
    assert L.rank == sympy.Matrix(G).rank()
    # index = product of the invariant factors, via Gram determinants
    if L.rank:
        H = hermite_normal_form(G)
        if len(H) == L.rank:
            gram = lambda B: (sympy.Matrix(B) * sympy.Matrix(B).T).det()
            assert gram(H) == gram(L.basis) * saturation_index(G) ** 2
    assert saturation_index(G) == _product(invariant_factors(G))


def _product(xs):
    out = 1
    for x in xs:
        out *= x
    return out


@given(int_matrices)
def test_saturation_is_rational_span_intersection(G):
    # brute force: every small integer vector in the Q-span lies in the saturation, and nothing else does
    n = len(G[0])
    if n > 3:
        return
    L = saturate(G, n)
    Mg = sympy.Matrix(G)
    r = Mg.rank()
    for v in itertools.product(range(-3, 4), repeat=n):
        in_span = sympy.Matrix.vstack(Mg, sympy.Matrix([v])).rank() == r
        assert membership(L, v) == in_span


@st.composite
def lattice_pairs(draw):
    n = draw(st.integers(1, 5))
    G = draw(st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), max_size=3))
    U = _random_unimodular(draw, len(G))
    H = _matmul(U, G) if G else []
    other = draw(st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), max_size=3))
    return n, G, H, other


def _random_unimodular(draw, k):
    U = [[int(i == j) for j in range(k)] for i in range(k)]
    for _ in range(draw(st.integers(0, 4))):
        if k < 2:
            break
        i, j = draw(st.integers(0, k - 1)), draw(st.integers(0, k - 1))
        if i != j:
            c = draw(st.integers(-3, 3))
            U = [r if t != i else [a + c * b for a, b in zip(r, U[j])] for t, r in enumerate(U)]
    return U


def _both_ways(A, B, n):
    return all(membership(B, v) for v in A.basis) and all(membership(A, v) for v in B.basis)


@given(lattice_pairs())
def test_lattices_equal_matches_membership_oracle(data):
    n, G, H, other = data
    A = IntegerLattice.from_generators(G, n)
    B = IntegerLattice.from_generators(H, n)
    C = IntegerLattice.from_generators(other, n)
    assert lattices_equal(A, B) and _both_ways(A, B, n)
    assert lattices_equal(A, C) == _both_ways(A, C, n)
