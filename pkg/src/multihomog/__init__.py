"""Multihomogeneous structure of hypersurface germs.

Given a polynomial f vanishing at the origin, the package computes the
logarithmic derivations of f at jet level, a maximal torus in their linear
parts, its saturated integer weight lattice, and a coordinate change plus
unit bringing f to a generator that is homogeneous for every weight at once.
All arithmetic is exact over Q.

>>> from multihomog import analyze
>>> r = analyze("x^2 + y^3")
>>> r.torus.weights, r.torus.multidegrees
(((3, 2),), (6,))
"""
__version__ = "0.1.0"

from .errors import (
    CommutationError,
    DimensionError,
    FactorizationError,
    InvalidChangeError,
    InvalidGermError,
    InvalidStateError,
    MultihomogError,
    NonEquivariantFactorError,
    NotAUnitError,
    NotDivisibleError,
    ObstructionError,
    PolynomialSyntaxError,
    RefusedInputError,
    RepeatedFactorError,
    StabilizationError,
    UnsupportedSpectrumError,
)
from .exactlinalg import QMatrix, jordan_chevalley, simultaneous_diagonalize
from .lattice import (
    IntegerLattice,
    hermite_normal_form,
    lattices_equal,
    membership,
    saturate,
    smith_normal_form,
)
from .logjets import (
    JetLieAlgebra,
    VectorFieldJet,
    apply,
    bracket,
    log_derivations_at,
    stabilized_log_derivations,
    weight_decompose,
)
from .normalform import (
    EquivariantPresentation,
    factor_multidegrees,
    generic_combination,
    make_equivariant,
    poincare_dulac,
)
from .pipeline import AnalysisConfig, AnalysisReport, analyze, invariance_suite, rossi_guard, saito_test
from .poly import (
    CoordinateChangeJet,
    Jet,
    Polynomial,
    compose,
    invert_unit,
    jet_arithmetic,
    parse_polynomial,
    partial_derivative,
    series_divide,
    weighted_components,
)
from .rational import Q
from .torusfinder import TorusData, check_maximality, integral_weight_data, maximal_toral_family

__all__ = [name for name in dir() if not name.startswith("_")]
