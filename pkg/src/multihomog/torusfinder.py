"""Maximal tori in the linear-part algebra g0 and their integral weight data."""
from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

from .errors import InvalidStateError, UnsupportedSpectrumError
from .exactlinalg import (
    QMatrix,
    in_span,
    jordan_chevalley,
    nullspace,
    primitive_integer_vector,
    rational_eigenvalues,
    row_space_basis,
    simultaneous_diagonalize,
)
from .lattice import IntegerLattice, canonical_weights, saturate
from .rational import Q


class AlgebraicityWarning(UserWarning):
    """A semisimple part of an element of g0 fell outside g0 at the computed jet level."""


def _flat(A: QMatrix):
    return A.flat()


def _unflat(v, n) -> QMatrix:
    return QMatrix([v[i * n:(i + 1) * n] for i in range(n)])


def _combine(basis: Sequence[QMatrix], coeffs) -> QMatrix:
    n = basis[0].nrows
    out = QMatrix.zeros(n, n)
    for c, B in zip(coeffs, basis):
        if c:
            out = out + B.scale(c)
    return out


def check_lie_closure(g0: Sequence[QMatrix]) -> bool:
    flats = [_flat(A) for A in g0]
    for i in range(len(g0)):
        for j in range(i + 1, len(g0)):
            if not in_span(_flat(g0[i].commutator(g0[j])), flats):
                return False
    return True


def centralizer(g0: Sequence[QMatrix], family: Sequence[QMatrix]) -> List[QMatrix]:
    """Canonical basis of {X in span(g0) : [X, F] = 0 for every F in family}."""
    if not g0:
        return []
    n = g0[0].nrows
    if not family:
        cols = [_flat(A) for A in g0]
    else:
        # unknown coefficients c_b; equations: entries of sum c_b [B_b, F] vanish
        cols = []
        for B in g0:
            col = []
            for F in family:
                col.extend(_flat(B.commutator(F)))
            cols.append(col)
        M = QMatrix.from_columns(cols)
        coeffs = nullspace(M)
        cols = [_flat(_combine(g0, c)) for c in coeffs]
    return [_unflat(primitive_integer_vector(v), n) for v in row_space_basis(cols)] if cols else []


def diagonal_subalgebra(g0: Sequence[QMatrix]) -> List[QMatrix]:
    """Canonical basis of the diagonal matrices in span(g0)."""
    if not g0:
        return []
    n = g0[0].nrows
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    cols = [[A[i, j] for i, j in off] for A in g0]
    M = QMatrix.from_columns(cols) if off else QMatrix([], len(g0))
    coeffs = nullspace(M) if off else [tuple(Q(int(i == j)) for j in range(len(g0))) for i in range(len(g0))]
    flats = [_flat(_combine(g0, c)) for c in coeffs]
    flats = [v for v in flats if any(v)]
    return [_unflat(primitive_integer_vector(v), n) for v in row_space_basis(flats)] if flats else []


def maximal_toral_family(g0: Sequence[QMatrix], seed: int = 0, rounds: int = 8) -> List[QMatrix]:
    """A maximal commuting family of semisimple elements of span(g0).

    Starts from the diagonal elements of g0, then repeatedly draws seeded
    random elements of the centralizer of the family and adjoins their
    semisimple parts whenever that enlarges the span.  Stops after
    ``rounds`` consecutive draws that add nothing.  Candidates with
    irrational spectrum are skipped; if one of them would have enlarged the
    family and no rational element ever did, UnsupportedSpectrumError is
    raised at the end.
    """
    g0 = list(g0)
    if not g0:
        return []
    if not check_lie_closure(g0):
        raise InvalidStateError("the linear parts do not span a Lie algebra")
    rng = random.Random(seed)
    g0_flats = [_flat(A) for A in g0]
    family = diagonal_subalgebra(g0)
    fam_flats = [_flat(A) for A in family]
    cent = centralizer(g0, family)
    idle = 0
    irrational = None
    while idle < rounds:
        if not cent:
            break
        coeffs = [rng.randint(-9, 9) for _ in cent]
        X = _combine(cent, coeffs)
        S = jordan_chevalley(X).semisimple
        sf = _flat(S)
        if not any(sf) or in_span(sf, fam_flats):
            idle += 1
            continue
        if not in_span(sf, g0_flats):
            warnings.warn(
                f"semisimple part {S} of a centralizer element lies outside g0",
                AlgebraicityWarning,
                stacklevel=2,
            )
        if not rational_eigenvalues(S).complete:
            irrational = S
            idle += 1
            continue
        family.append(S)
        fam_flats.append(sf)
        cent = centralizer(g0, family)
        idle = 0
        irrational = None
    if irrational is not None:
        raise UnsupportedSpectrumError(
            f"the centralizer contains semisimple elements with irrational spectrum, e.g. {irrational}; "
            "a maximal torus would need an algebraic field extension"
        )
    return family


@dataclass(frozen=True)
class TorusData:
    rank: int
    weights: Tuple[Tuple[int, ...], ...]
    linear_change: QMatrix
    lattice: IntegerLattice
    multidegrees: Optional[Tuple[int, ...]] = None

    @property
    def nvars(self) -> int:
        return self.linear_change.nrows

    def diagonal_fields(self) -> List[QMatrix]:
        return [QMatrix.diag(list(w)) for w in self.weights]

    def with_multidegrees(self, lam: Sequence[int]) -> "TorusData":
        return replace(self, multidegrees=tuple(int(x) for x in lam))

    def joint_weight(self, exponent: Sequence[int]) -> Tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(w, exponent)) for w in self.weights)


def integral_weight_data(family: Sequence[QMatrix], nvars: Optional[int] = None) -> TorusData:
    """Diagonalize the family and package its saturated weight lattice.

    A matrix A encodes the field sum A[i,j] x_i d/dx_j; under x = P x' it
    becomes P^T A P^{-T}.  So P diagonalizes the transposes.
    """
    family = list(family)
    if not family:
        if nvars is None:
            raise ValueError("nvars is needed for an empty family")
        return TorusData(0, (), QMatrix.identity(nvars), IntegerLattice(nvars, ()))
    n = family[0].nrows
    P, rows = simultaneous_diagonalize([A.transpose() for A in family])
    lat = saturate(rows, n)
    W = canonical_weights(lat.basis)
    return TorusData(lat.rank, tuple(tuple(r) for r in W), P, lat)


def conjugate_to_new_coordinates(A: QMatrix, P: QMatrix) -> QMatrix:
    """Matrix of the same linear field after the substitution x = P x'."""
    return P.transpose() @ A @ P.transpose().inverse()


@dataclass(frozen=True)
class MaximalityReport:
    passed: bool
    centralizer: Tuple[QMatrix, ...]
    witnesses: Tuple[QMatrix, ...]


def _as_g0(L) -> List[QMatrix]:
    from .logjets import JetLieAlgebra, linear_parts

    return linear_parts(L) if isinstance(L, JetLieAlgebra) else list(L)


def check_maximality(T: TorusData, L) -> MaximalityReport:
    """Every centralizer element of the torus in g0 has its semisimple part in the torus span.

    ``L`` is a JetLieAlgebra or a list of linear parts, in coordinates
    where T is diagonal.
    """
    g0 = _as_g0(L)
    diag = T.diagonal_fields()
    cent = centralizer(list(g0), diag) if g0 else []
    span = [_flat(D) for D in diag]
    bad = []
    for C in cent:
        S = jordan_chevalley(C).semisimple
        if not in_span(_flat(S), span):
            bad.append(S)
    return MaximalityReport(not bad, tuple(cent), tuple(bad))


def nilpotent_cone_diagnostic(T: TorusData, L) -> List[QMatrix]:
    """Basis of the nilpotent parts of the torus centralizer (weight-zero nilpotents)."""
    g0 = _as_g0(L)
    diag = T.diagonal_fields()
    cent = centralizer(list(g0), diag) if g0 else []
    if not cent:
        return []
    n = cent[0].nrows
    nil = [_flat(jordan_chevalley(C).nilpotent) for C in cent]
    nil = [v for v in nil if any(v)]
    return [_unflat(primitive_integer_vector(v), n) for v in row_space_basis(nil)] if nil else []
