import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from multihomog import (
    AnalysisConfig,
    CoordinateChangeJet,
    DimensionError,
    Jet,
    RefusedInputError,
    analyze,
    compose,
    invariance_suite,
    lattices_equal,
    parse_polynomial,
    rossi_guard,
    saito_test,
    saturate,
)
from multihomog.lattice import canonical_permutation
from multihomog.pipeline import analyze_under_change, canonical_signature, positive_weight, trial_config
from strategies import CORPUS

P = parse_polynomial


@pytest.fixture(scope="module")
def reports():
    return {name: analyze(text) for name, text in CORPUS.items()}


def in_jacobian_plus_power(text, D):
    """sympy oracle: is f in (df) + m^(D+1)?  The ideal is m-primary, so this is a local statement."""
    expr = sympy.sympify(text.replace("^", "**"))
    syms = sorted(expr.free_symbols, key=lambda s: s.name)
    gens = [sympy.diff(expr, s) for s in syms]
    gens += [sympy.prod(m) for m in _monomials(syms, D + 1)]
    G = sympy.groebner(gens, *syms, order="grevlex")
    return G.contains(expr)


def _monomials(syms, d):
    from itertools import combinations_with_replacement

    return [list(c) for c in combinations_with_replacement(syms, d)]


class TestRossiGuard:
    def test_cusp_passes(self):
        assert rossi_guard(P("x^2+y^3")).passed

    def test_smooth_fails(self):
        g = rossi_guard(P("x"))
        assert not g.passed and "smooth" in g.detail

    def test_smooth_factor_fails(self):
        g = rossi_guard(P("x*y", 3))
        assert not g.passed and g.constant_fields == ((0, 0, 1),)

    def test_non_reduced_warns(self):
        g = rossi_guard(P("x^2+x^3"))
        assert g.passed and any("not reduced" in w for w in g.warnings)

    def test_analyze_refuses(self):
        with pytest.raises(RefusedInputError, match="smooth"):
            analyze("x")


class TestSaito:
    def test_cusp(self):
        assert saito_test(P("x^2+y^3")).evidence == "yes"

    def test_control(self):
        r = saito_test(P(CORPUS["control"]))
        assert r.evidence == "no"
        assert not in_jacobian_plus_power(CORPUS["control"], r.degree)

    def test_disguised_cusp(self):
        assert saito_test(P(CORPUS["disguised cusp"])).evidence == "yes"

    def test_not_applicable(self):
        assert saito_test(P("x+y^2")).evidence == "not applicable"

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_agrees_with_groebner(self, name):
        r = saito_test(P(CORPUS[name]))
        if r.evidence == "yes":
            assert in_jacobian_plus_power(CORPUS[name], 2 * P(CORPUS[name]).degree + 4)
        else:
            assert not in_jacobian_plus_power(CORPUS[name], r.degree)


class TestAnalyze:
    def test_cusp(self, reports):
        r = reports["cusp"]
        assert r.rank == 1 and r.torus.weights == ((3, 2),) and r.torus.multidegrees == (6,)
        assert r.normalized.poly == P("x^2+y^3") and r.quasihomogeneous

    def test_umbrella(self, reports):
        r = reports["umbrella"]
        assert r.rank == 2 and r.torus.multidegrees == (2, 2) and r.quasihomogeneous
        assert lattices_equal(r.torus.lattice, saturate([(1, 1, 0), (1, 0, 2)]))
        for w in r.torus.weights:
            assert 2 * w[0] == 2 * w[1] + w[2]

    def test_control(self, reports):
        r = reports["control"]
        assert r.rank == 0 and not r.quasihomogeneous
        assert all(A.is_nilpotent() for A in r.g0)

    def test_factors(self):
        r = analyze("x^2 - y^2*z", AnalysisConfig(factors=("x^2 - y^2*z",)))
        assert r.factors == [{"polynomial": "x^2 - y^2*z", "multidegree": [2, 2]}]

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_self_consistency(self, reports, name):
        r = reports[name]
        T = r.torus
        assert r.rank == len(T.weights) == T.lattice.rank
        assert r.presentation.is_weight_pure(T)
        assert r.maximality.passed
        assert r.algebra.is_closed() and r.algebra.verify_cofactors()
        assert all(row["verified"] for row in r.decomposition.bracket_table)
        # the emitted total change pulls f back to u^{-1} g
        f = P(CORPUS[name])
        N = r.normalized.order
        pulled = compose(Jet(f, N), r.normalizing_change)
        assert (r.presentation.unit * pulled).congruent(r.normalized)
        d = r.to_dict()
        assert set(d) >= {
            "input", "nvars", "rossi_guard", "torus", "normalized_equation", "stabilization_witness",
            "generator_diagnostics", "factors", "quasihomogeneous", "saito_test", "warnings", "config_echo",
        }
        assert set(d["torus"]) >= {"rank", "weights", "multidegrees", "linear_change"}
        assert set(d["generator_diagnostics"]) >= {"dim_g0", "estimated_r", "weight_table", "bracket_table"}

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_quasihomogeneous_implies_saito_yes(self, reports, name):
        r = reports[name]
        if r.quasihomogeneous:
            assert r.saito.evidence == "yes"

    def test_deterministic(self):
        a = analyze(CORPUS["umbrella"]).to_json()
        b = analyze(CORPUS["umbrella"]).to_json()
        assert a == b

    def test_config_validation(self):
        with pytest.raises(ValueError):
            analyze("x^2+y^3", AnalysisConfig(order=2))
        with pytest.raises(RefusedInputError):
            analyze("x^2+y^3", AnalysisConfig(order=30))
        with pytest.raises(DimensionError):
            analyze("x1*x2 + x3*x4 + x5*x6 + x7^2")


class TestPositiveWeight:
    def test_mixed_signs_only(self):
        assert positive_weight([(1, -1)]) is None

    def test_combination_needed(self):
        v = positive_weight([(1, -1, 0), (0, 1, 1)])
        assert v is not None and all(x > 0 for x in v)

    def test_far_combination(self):
        # only c = (1, 10) works in the small box's complement: exercises the LP fallback
        v = positive_weight([(1, -10, 0), (0, 1, 1)])
        assert v is not None and all(x > 0 for x in v)


class TestInvariance:
    def test_swap_gives_identical_report(self):
        f = P("x*y")
        cfg = trial_config(f, AnalysisConfig())
        swap = CoordinateChangeJet([P("y", 2), P("x", 2)], 10 ** 6)
        a = analyze(f, cfg)
        b = analyze_under_change(f, swap, cfg)
        assert a.to_json() == b.to_json()

    def test_cusp(self):
        rep = invariance_suite("x^2+y^3", trials=10)
        assert rep.passed and rep.base == (1, ((3, 2),), (6,))

    def test_control(self):
        rep = invariance_suite(CORPUS["control"], trials=5)
        assert rep.passed and all(t["rank"] == 0 for t in rep.trials)

    def test_threads_do_not_change_the_report(self):
        a = invariance_suite("x*y", trials=4, threads=1).to_json()
        b = invariance_suite("x*y", trials=4, threads=3).to_json()
        assert a == b


@given(st.sampled_from(["x^2+y^3", "x*y", "x^2+y^5", "x^3+y^4"]), st.integers(0, 10 ** 6))
def test_canonical_signature_is_permutation_invariant(text, seed):
    f = P(text)
    cfg = trial_config(f, AnalysisConfig())
    swap = CoordinateChangeJet([P("y", 2), P("x", 2)], 10 ** 6)
    a = analyze(f, cfg)
    b = analyze_under_change(f, swap, cfg)
    assert canonical_signature(a.torus, a.normalized.poly) == canonical_signature(b.torus, b.normalized.poly)
    _, Wa = canonical_permutation(a.torus.weights)
    _, Wb = canonical_permutation(b.torus.weights)
    assert Wa == Wb
