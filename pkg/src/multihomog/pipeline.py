"""End-to-end analysis: input guard, torus, normal form, diagnostics and report."""
from __future__ import annotations

import json
import random
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction as _Fraction
from itertools import permutations, product
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import (
    MultihomogError,
    NonEquivariantFactorError,
    RefusedInputError,
)
from .exactlinalg import QMatrix, SparseEchelon, upoly_gcd
from .lattice import flipped_hermite_form
from .logjets import (
    JetLieAlgebra,
    LogSystem,
    linear_parts,
    stabilized_log_derivations,
    weight_decompose,
)
from .normalform import EquivariantPresentation, factor_multidegrees, make_equivariant
from .poly import (
    MAX_VARIABLES,
    CoordinateChangeJet,
    Jet,
    Polynomial,
    monomials_of_degree,
    monomials_up_to,
    parse_polynomial,
    variable_names,
)
from .rational import Q
from .torusfinder import (
    AlgebraicityWarning,
    TorusData,
    check_maximality,
    integral_weight_data,
    maximal_toral_family,
    nilpotent_cone_diagnostic,
)

MAX_ORDER = 24


@dataclass(frozen=True)
class AnalysisConfig:
    """Run parameters; ``None`` fields are filled from f by :meth:`resolve`."""

    order: Optional[int] = None
    jet_level: int = 0
    max_source_order: Optional[int] = None
    min_source_order: Optional[int] = None
    seed: int = 0
    rounds: int = 8
    factors: Tuple[str, ...] = ()
    format: str = "text"
    saito_bound: Optional[int] = None
    run_saito: bool = True
    threads: int = 1

    def resolve(self, f: Polynomial, strict: bool = True) -> "AnalysisConfig":
        d = f.degree
        order = 2 * d + 4 if self.order is None else self.order
        m_start = max(self.jet_level, d) if self.min_source_order is None else self.min_source_order
        m_max = 4 * d + 8 if self.max_source_order is None else self.max_source_order
        cfg = replace(self, order=order, max_source_order=m_max, min_source_order=m_start)
        cfg.validate(f, strict)
        return cfg

    def validate(self, f: Polynomial, strict: bool = True):
        if f.nvars > MAX_VARIABLES:
            raise RefusedInputError(f"{f.nvars} variables exceed the limit of {MAX_VARIABLES}")
        if self.order is not None:
            if self.order > MAX_ORDER:
                raise RefusedInputError(f"truncation order {self.order} exceeds the limit of {MAX_ORDER}")
            if strict and self.order < f.degree:
                raise ValueError(f"truncation order {self.order} is below deg f = {f.degree}")
        if self.jet_level < 0:
            raise ValueError("jet level must be non-negative")
        if self.max_source_order is not None and self.min_source_order is not None:
            if self.max_source_order < self.min_source_order:
                raise ValueError(
                    f"max source order {self.max_source_order} is below the starting order {self.min_source_order}"
                )
        if self.format not in ("text", "json"):
            raise ValueError(f"unknown format {self.format!r}")

    def echo(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "jet_level": self.jet_level,
            "max_source_order": self.max_source_order,
            "min_source_order": self.min_source_order,
            "seed": self.seed,
            "rounds": self.rounds,
            "factors": list(self.factors),
            "saito_bound": self.saito_bound,
        }


# ---------------------------------------------------------------------------
# input guard


@dataclass(frozen=True)
class GuardResult:
    passed: bool
    detail: str
    constant_fields: Tuple[Tuple[int, ...], ...] = ()
    warnings: Tuple[str, ...] = ()


def reducedness_warnings(f: Polynomial) -> List[str]:
    """Exact squarefree test in one variable; a monomial-square heuristic otherwise."""
    out = []
    names = variable_names(f.nvars)
    if f.nvars == 1:
        coeffs = [f.coefficient((i,)) for i in range(f.degree + 1)]
        g = upoly_gcd(coeffs, [i * c for i, c in enumerate(coeffs)][1:])
        if len(g) > 1:
            out.append(f"f is not reduced: it has the repeated factor of degree {len(g) - 1} "
                       f"(gcd(f, f') = {Polynomial(1, {(i,): c for i, c in enumerate(g)})})")
    else:
        for i in range(f.nvars):
            low = min(e[i] for e in f.terms)
            if low >= 2:
                out.append(f"f is divisible by {names[i]}^{low}, so it is not reduced")
    return out


def rossi_guard(f: Polynomial, config: Optional[AnalysisConfig] = None) -> GuardResult:
    """Refuse germs with a smooth factor: logarithmic fields must vanish at the origin."""
    config = (config or AnalysisConfig()).resolve(f, strict=False)
    warn = tuple(reducedness_warnings(f))
    if not f.homogeneous_part(1).is_zero():
        return GuardResult(False, "f has a nonzero linear part, so the germ is smooth", (), warn)
    sys_ = LogSystem(f, 0, constant_projection=True)
    history = []
    for m in range(max(config.min_source_order, 1), config.max_source_order + 3):
        sys_.extend_to(m)
        history.append(tuple(sys_.projected_basis()))
        if len(history) >= 3 and history[-1] == history[-2] == history[-3]:
            break
    sols = history[-1]
    if sols:
        return GuardResult(
            False,
            "a logarithmic field with nonzero value at the origin exists, so the germ is a product "
            "with a smooth factor",
            tuple(sols),
            warn,
        )
    return GuardResult(True, "every logarithmic field vanishes at the origin", (), warn)


# ---------------------------------------------------------------------------
# Jacobian ideal membership


@dataclass(frozen=True)
class SaitoResult:
    evidence: str  # "yes", "no", "inconclusive" or "not applicable"
    degree: Optional[int]
    certificate: str

    def to_dict(self):
        return {"evidence": self.evidence, "degree": self.degree, "certificate": self.certificate}


def _jacobian_echelon(f: Polynomial, D: int, cap: Optional[int]):
    """Echelon form of x^beta df/dx_i, |beta| <= D, optionally truncated at degree cap."""
    n = f.nvars
    grads = [f.diff(i) for i in range(n)]
    top = max(f.degree, 1) + D
    cols = {e: i for i, e in enumerate(monomials_up_to(n, top if cap is None else cap))}
    ech = SparseEchelon()
    for beta in monomials_up_to(n, D):
        for gi in grads:
            row = {}
            for e, c in gi.terms.items():
                ee = tuple(a + b for a, b in zip(e, beta))
                if cap is not None and sum(ee) > cap:
                    continue
                row[cols[ee]] = c
            if row:
                ech.insert(_int_row(row))
    return ech, cols


def _int_row(row: Dict[int, Q]) -> Dict[int, int]:
    den = 1
    for v in row.values():
        den = den * v.denominator // gcd(den, v.denominator)
    return {k: int(v * den) for k, v in row.items() if v}


def _poly_row(p: Polynomial, cols, cap: Optional[int]):
    out = {}
    for e, c in p.terms.items():
        if cap is not None and sum(e) > cap:
            continue
        out[cols[e]] = c
    return _int_row(out) if out else {}


def saito_test(f: Polynomial, degree_bound: Optional[int] = None) -> SaitoResult:
    """Evidence for f lying in its Jacobian ideal (quasihomogeneity for isolated singularities).

    For D = ord f, ord f + 1, ..., degree_bound:
      * f in (df) as polynomials, with multipliers of degree <= D: "yes";
      * f not in (df) + m^(D+1): "no" (a certificate of non-membership);
      * (df) + m^(D+2) contains m^(D+1) and f in (df) + m^(D+1): "yes" by Nakayama.
    """
    if f.is_zero() or f.order is None or f.order < 2:
        return SaitoResult("not applicable", None, "the test needs f in m^2")
    bound = 2 * f.degree + 4 if degree_bound is None else degree_bound
    for D in range(f.order, bound + 1):
        ech, cols = _jacobian_echelon(f, D, None)
        if ech.contains(_poly_row(f, cols, None)):
            return SaitoResult("yes", D, f"f = sum a_i df/dx_i with polynomial a_i of degree <= {D}")
        ech, cols = _jacobian_echelon(f, D, D + 1)
        trunc = SparseEchelon()
        for lead, row in ech.rows.items():
            r = {k: v for k, v in row.items() if k < len(monomials_up_to(f.nvars, D))}
            if r:
                trunc.insert(r)
        if not trunc.contains(_poly_row(f, cols, D)):
            return SaitoResult("no", D, f"f is not in the Jacobian ideal modulo m^{D + 1}")
        if all(ech.contains({cols[e]: 1}) for e in monomials_of_degree(f.nvars, D + 1)):
            return SaitoResult(
                "yes", D, f"m^{D + 1} lies in the Jacobian ideal (Nakayama) and f is in it modulo m^{D + 1}"
            )
    return SaitoResult("inconclusive", bound, f"no decision up to degree {bound}")


# ---------------------------------------------------------------------------
# positivity


def positive_weight(weights: Sequence[Sequence[int]]) -> Optional[Tuple[int, ...]]:
    """A strictly positive vector in the integer span of the rows, or None."""
    W = [list(map(int, w)) for w in weights]
    if not W:
        return None
    n = len(W[0])

    def combo(c):
        return tuple(sum(ci * w[j] for ci, w in zip(c, W)) for j in range(n))

    box = 4 if len(W) <= 3 else 2
    best = None
    for c in product(range(-box, box + 1), repeat=len(W)):
        v = combo(c)
        if all(x > 0 for x in v):
            key = (sum(v), v)
            if best is None or key < best[0]:
                best = (key, v)
    if best is not None:
        return _primitive(best[1])
    try:
        from scipy.optimize import linprog
    except ImportError:  # pragma: no cover
        return None
    # find c with c.W >= 1 componentwise
    res = linprog(
        c=[0] * len(W),
        A_ub=[[-w[j] for w in W] for j in range(n)],
        b_ub=[-1] * n,
        bounds=[(None, None)] * len(W),
        method="highs",
    )
    if res.status != 0:
        return None
    for den in (1, 2, 3, 4, 6, 12, 60, 840):
        cs = [Q(_Fraction(x).limit_denominator(1000)) for x in res.x]
        L = 1
        for c in cs:
            L = L * c.denominator // gcd(L, c.denominator)
        ints = [int(c * L) for c in cs]
        v = combo(ints)
        if all(x > 0 for x in v):
            return _primitive(v)
    return None


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g else tuple(v)


# ---------------------------------------------------------------------------
# report


def _s(x) -> str:
    return str(x)


def _matrix(A: QMatrix) -> List[List[str]]:
    return [[_s(x) for x in r] for r in A.rows]


def _nilpotency_index(A: QMatrix) -> Optional[int]:
    n = A.nrows
    B = A
    for k in range(1, n + 1):
        if B.is_zero():
            return k
        B = B @ A
    return None


@dataclass
class AnalysisReport:
    input: str
    nvars: int
    variables: List[str]
    rossi_guard: GuardResult
    torus: TorusData
    presentation: EquivariantPresentation
    normalizing_change: CoordinateChangeJet
    stabilization_witness: int
    dimension_history: Tuple[Tuple[int, int], ...]
    g0: List[QMatrix]
    algebra: JetLieAlgebra
    decomposition: Any
    maximality: Any
    nilpotent_cone: List[QMatrix]
    factors: List[Dict[str, Any]]
    quasihomogeneous: bool
    positive_weight: Optional[Tuple[int, ...]]
    saito: Optional[SaitoResult]
    warnings: List[str]
    config: AnalysisConfig

    @property
    def rank(self) -> int:
        return self.torus.rank

    @property
    def normalized(self) -> Jet:
        return self.presentation.normalized

    def to_dict(self) -> Dict[str, Any]:
        T = self.torus
        names = self.variables
        dec = self.decomposition
        return {
            "input": self.input,
            "nvars": self.nvars,
            "variables": names,
            "rossi_guard": {"passed": self.rossi_guard.passed, "detail": self.rossi_guard.detail},
            "torus": {
                "rank": T.rank,
                "weights": [list(w) for w in T.weights],
                "multidegrees": list(T.multidegrees or ()),
                "linear_change": _matrix(T.linear_change),
            },
            "normalized_equation": self.presentation.normalized.poly.to_string(names),
            "truncation_order": self.presentation.normalized.order,
            "normalizing_change": [c.to_string(names) for c in self.normalizing_change.components],
            "unit": self.presentation.unit.poly.to_string(names),
            "stabilization_witness": self.stabilization_witness,
            "dimension_history": [list(x) for x in self.dimension_history],
            "generator_diagnostics": {
                "jet_level": self.algebra.level,
                "dim_g0": len(self.g0),
                "s": T.rank,
                "estimated_r": dec.estimated_r,
                "g0": [
                    {"matrix": _matrix(A), "nilpotent": A.is_nilpotent(), "nilpotency_index": _nilpotency_index(A)}
                    for A in self.g0
                ],
                "weight_table": [
                    {
                        "field": c.field.to_string(names),
                        "weight": list(c.weight),
                        "kind": c.kind,
                        "nilpotent_linear_part": c.nilpotent_linear_part,
                    }
                    for c in dec.components
                ],
                "bracket_table": [dict(row) for row in dec.bracket_table],
            },
            "maximality": {
                "passed": self.maximality.passed,
                "witnesses": [_matrix(A) for A in self.maximality.witnesses],
            },
            "nilpotent_cone": [_matrix(A) for A in self.nilpotent_cone],
            "factors": self.factors,
            "quasihomogeneous": self.quasihomogeneous,
            "positive_weight": list(self.positive_weight) if self.positive_weight else None,
            "saito_test": self.saito.to_dict() if self.saito else None,
            "warnings": list(self.warnings),
            "config_echo": self.config.echo(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        return render_text(self.to_dict())


def render_text(d: Dict[str, Any], indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for k, v in d.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(render_text(v, indent + 1))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}:")
            for item in v:
                body = render_text(item, indent + 2).lstrip()
                lines.append(f"{pad}  - {body}")
        else:
            lines.append(f"{pad}{k}: {_compact(v)}")
    return "\n".join(lines)


def _compact(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_compact(x) for x in v) + "]"
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


# ---------------------------------------------------------------------------


def _coerce(f) -> Polynomial:
    return parse_polynomial(f) if isinstance(f, str) else f


def compute_torus(f: Polynomial, config: AnalysisConfig) -> Tuple[JetLieAlgebra, List[QMatrix], TorusData, List[str]]:
    """Log derivations, g0, maximal toral family and its weight data (no normalization)."""
    notes: List[str] = []
    L = stabilized_log_derivations(
        f, config.jet_level, m_max=config.max_source_order, m_start=config.min_source_order
    )
    g0 = linear_parts(L)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AlgebraicityWarning)
        family = maximal_toral_family(g0, config.seed, config.rounds)
    notes.extend(str(w.message) for w in caught if issubclass(w.category, AlgebraicityWarning))
    T = integral_weight_data(family, f.nvars)
    return L, g0, T, notes


def analyze(f, config: Optional[AnalysisConfig] = None, strict: bool = True) -> AnalysisReport:
    """Full analysis of the germ defined by the polynomial f."""
    f = _coerce(f)
    config = (config or AnalysisConfig()).resolve(f, strict)
    if f.is_zero() or f.constant_term() != 0:
        raise RefusedInputError("f must be a nonzero polynomial vanishing at the origin")
    guard = rossi_guard(f, config)
    if not guard.passed:
        raise RefusedInputError(guard.detail)
    notes = list(guard.warnings)
    L, g0, T, tnotes = compute_torus(f, config)
    notes.extend(tnotes)
    N = config.order
    P = T.linear_change
    Pchange = CoordinateChangeJet.linear(P.tolist(), N)
    fP = f.substitute(list(CoordinateChangeJet.linear(P.tolist(), 10 ** 6).components))
    pres = make_equivariant(fP, T, N)
    T = T.with_multidegrees(pres.multidegrees)
    total = Pchange.then(pres.change)
    g = pres.normalized.poly
    if g == f and P == QMatrix.identity(f.nvars):
        Lg = L
    else:
        Lg = stabilized_log_derivations(g, config.jet_level, m_max=config.max_source_order, m_start=config.min_source_order)
    dec = weight_decompose(Lg, T.weights)
    g0g = linear_parts(Lg)
    maxi = check_maximality(T, g0g)
    if not maxi.passed:
        notes.append("maximality check failed: some centralizer element has semisimple part outside the torus")
    cone = nilpotent_cone_diagnostic(T, g0g)
    factors = _factor_entries(config.factors, f, pres, T, total, notes)
    pos = positive_weight(T.weights) if T.rank else None
    qh = pos is not None
    if T.rank and not qh:
        notes.append("the weight lattice contains no strictly positive vector, so f is not quasihomogeneous")
    saito = saito_test(f, config.saito_bound) if config.run_saito else None
    names = variable_names(f.nvars)
    return AnalysisReport(
        input=f.to_string(names),
        nvars=f.nvars,
        variables=names,
        rossi_guard=guard,
        torus=T,
        presentation=pres,
        normalizing_change=total,
        stabilization_witness=L.stabilization_witness,
        dimension_history=L.dimension_history,
        g0=g0,
        algebra=Lg,
        decomposition=dec,
        maximality=maxi,
        nilpotent_cone=cone,
        factors=factors,
        quasihomogeneous=qh,
        positive_weight=pos,
        saito=saito,
        warnings=notes,
        config=config,
    )


def _factor_entries(texts, f, pres, T, total, notes):
    if not texts:
        return []
    polys = [parse_polynomial(t, f.nvars) for t in texts]
    try:
        degs = factor_multidegrees(pres.normalized, polys, T, total)
    except NonEquivariantFactorError as exc:
        notes.append(f"non-equivariant factor: {exc}")
        return [{"polynomial": str(p), "multidegree": None} for p in polys]
    return [{"polynomial": str(p), "multidegree": list(d)} for p, d in zip(polys, degs)]


# ---------------------------------------------------------------------------
# invariance under coordinate changes


def canonical_signature(T: TorusData, g: Polynomial) -> Tuple[int, Tuple[Tuple[int, ...], ...], Tuple[int, ...]]:
    """(s, weight matrix, sorted multidegrees) up to permuting the coordinates.

    Among all coordinate permutations, the flipped Hermite form of the
    permuted lattice is maximized row-major; multidegrees are recomputed in
    that basis from a monomial of g (the smallest result over tied
    permutations is kept).
    """
    s = T.rank
    if s == 0:
        return (0, (), ())
    n = T.nvars
    exps = sorted(g.terms)
    alpha = exps[0]
    best = None
    for perm in permutations(range(n)):
        Wp = flipped_hermite_form([[w[p] for p in perm] for w in T.weights])
        key = tuple(x for r in Wp for x in r)
        ap = [alpha[p] for p in perm]
        lam = tuple(sorted(sum(a * b for a, b in zip(r, ap)) for r in Wp))
        cand = (key, tuple(-x for x in lam))
        if best is None or cand > best[0]:
            best = (cand, Wp, lam)
    return (s, tuple(tuple(r) for r in best[1]), best[2])


def random_change(nvars: int, rng: random.Random, order: int = 10 ** 6) -> CoordinateChangeJet:
    """Invertible small-integer linear part plus sparse terms of degree 2 and 3."""
    while True:
        L = [[rng.randint(-2, 2) for _ in range(nvars)] for _ in range(nvars)]
        if QMatrix(L).det() != 0:
            break
    comps = []
    for i in range(nvars):
        terms = {tuple(int(k == j) for k in range(nvars)): L[i][j] for j in range(nvars)}
        for d in (2, 3):
            mons = monomials_of_degree(nvars, d)
            for _ in range(rng.randint(0, 2)):
                e = rng.choice(mons)
                terms[e] = terms.get(e, 0) + rng.choice((-2, -1, 1, 2))
        comps.append(Polynomial(nvars, terms))
    return CoordinateChangeJet(comps, order)


@dataclass
class InvarianceReport:
    base: Tuple
    trials: List[Dict[str, Any]]
    counterexamples: List[Dict[str, Any]]

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> Dict[str, Any]:
        return {
            "base": _sig_dict(self.base),
            "trials": self.trials,
            "counterexamples": self.counterexamples,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        return render_text(self.to_dict())


def _sig_dict(sig):
    return {"rank": sig[0], "weights": [list(r) for r in sig[1]], "multidegrees": list(sig[2])}


def trial_config(f: Polynomial, config: AnalysisConfig) -> AnalysisConfig:
    """Configuration pinned to the base germ, so every trial solves the same systems."""
    base = config.resolve(f)
    return replace(base, run_saito=False, factors=())


def analyze_under_change(f: Polynomial, change: CoordinateChangeJet, config: AnalysisConfig) -> AnalysisReport:
    fpsi = f.substitute(list(change.components))
    return analyze(fpsi, config, strict=False)


def invariance_suite(f, config: Optional[AnalysisConfig] = None, trials: int = 10, threads: Optional[int] = None) -> InvarianceReport:
    """Re-run the analysis after seeded random coordinate changes and compare signatures."""
    f = _coerce(f)
    config = config or AnalysisConfig()
    cfg = trial_config(f, config)
    base = analyze(f, cfg)
    base_sig = canonical_signature(base.torus, base.normalized.poly)
    changes = [random_change(f.nvars, random.Random(f"{config.seed}:{t}")) for t in range(trials)]

    def run(t):
        ch = changes[t]
        entry = {"trial": t, "change": [c.to_string() for c in ch.components]}
        try:
            rep = analyze_under_change(f, ch, cfg)
            sig = canonical_signature(rep.torus, rep.normalized.poly)
            entry.update(_sig_dict(sig))
            entry["agrees"] = sig == base_sig
        except MultihomogError as exc:
            entry["error"] = f"{type(exc).__name__}: {exc}"
            entry["agrees"] = False
        return entry

    workers = threads if threads is not None else config.threads
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(trials)))
    else:
        results = [run(t) for t in range(trials)]
    bad = [r for r in results if not r["agrees"]]
    return InvarianceReport(base_sig, results, bad)
