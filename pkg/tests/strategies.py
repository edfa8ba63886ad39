"""Shared hypothesis strategies."""
from fractions import Fraction

from hypothesis import strategies as st

from multihomog import Jet, Polynomial, QMatrix

small_q = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4))


@st.composite
def polynomials(draw, nvars=2, max_deg=4, max_terms=6, min_order=0):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        e = tuple(draw(st.integers(0, max_deg)) for _ in range(nvars))
        if sum(e) > max_deg or sum(e) < min_order:
            continue
        terms[e] = draw(small_q)
    return Polynomial(nvars, terms)


@st.composite
def jets(draw, nvars=2, order=4):
    return Jet(draw(polynomials(nvars=nvars, max_deg=order + 1)), order)


@st.composite
def qmatrices(draw, n=None, lo=-3, hi=3):
    n = n or draw(st.integers(1, 4))
    return QMatrix([[draw(st.integers(lo, hi)) for _ in range(n)] for _ in range(n)])


def to_sympy(p, names=None):
    """Independent view of a Polynomial as a sympy expression."""
    import sympy

    names = names or ["x", "y", "z", "x4", "x5", "x6"][: p.nvars]
    syms = sympy.symbols(names)
    expr = sympy.Integer(0)
    for e, c in p.items():
        term = sympy.Rational(int(c.numerator), int(c.denominator))
        for s, k in zip(syms, e):
            term *= s ** k
        expr += term
    return sympy.expand(expr), syms


def sympy_truncate(expr, syms, order):
    import sympy

    poly = sympy.Poly(expr, *syms)
    return sum(
        (c * sympy.prod([s ** k for s, k in zip(syms, m)]) for m, c in poly.terms() if sum(m) <= order),
        sympy.Integer(0),
    )


CORPUS = {
    "cusp": "x^2+y^3",
    "xy": "x*y",
    "umbrella": "x^2 - y^2*z",
    "control": "x^5+y^5+x^2*y^2",
    "disguised cusp": "x^2+2*x*y^2+y^4+y^5",
}


def dense_log_system(text, m, with_constants=False, nvars=None):
    """Independent dense solve of delta(f) = h f.

    Unknowns are the coefficients of each delta_j in degrees [1, m+1] (or
    [0, m+1]) and of h in degrees [0, m]; equations are all coefficients of
    delta(f) - h f below degree m + 1 + ord f.  Returns (unknown labels,
    nullspace basis as lists of sympy Rationals).
    """
    import sympy
    from sympy.polys.matrices import DomainMatrix

    expr = sympy.sympify(text.replace("^", "**"))
    syms = sorted(expr.free_symbols, key=lambda s: {"x": 0, "y": 1, "z": 2}[s.name])
    if nvars is not None:
        syms = list(sympy.symbols("x y z")[:nvars])
    n = len(syms)
    fpoly = sympy.Poly(expr, *syms)
    ordf = min(sum(mon) for mon in fpoly.monoms())
    cut = m + 1 + ordf
    grads = [sympy.Poly(sympy.diff(expr, s), *syms) for s in syms]

    def monos(lo, hi):
        out = []
        for d in range(lo, hi + 1):
            out += [e for e in _exps(n, d)]
        return out

    labels, contribs = [], []
    for j in range(n):
        for b in monos(0 if with_constants else 1, m + 1):
            labels.append(("d", j, b))
            contribs.append(_shift(grads[j], b))
    for b in monos(0, m):
        labels.append(("h", b))
        contribs.append({e: -c for e, c in _shift(fpoly, b).items()})
    rows = sorted({e for c in contribs for e in c if sum(e) < cut})
    ri = {e: i for i, e in enumerate(rows)}
    M = [[sympy.Rational(0)] * len(labels) for _ in rows]
    for col, c in enumerate(contribs):
        for e, v in c.items():
            if e in ri:
                M[ri[e]][col] = v
    dm = DomainMatrix([[sympy.QQ(int(v.p), int(v.q)) for v in r] for r in M], (len(rows), len(labels)), sympy.QQ)
    null = dm.nullspace().to_Matrix()
    basis = [[null[i, j] for j in range(null.shape[1])] for i in range(null.shape[0])]
    return labels, basis


def _exps(n, d):
    if n == 1:
        yield (d,)
        return
    for a in range(d, -1, -1):
        for rest in _exps(n - 1, d - a):
            yield (a,) + rest


def _shift(poly, b):
    return {tuple(x + y for x, y in zip(mon, b)): c for mon, c in poly.terms()}


def dense_linear_parts_rank(text, m):
    """Rank of the span of linear parts of the dense solution space, and the matrices."""
    import sympy

    labels, basis = dense_log_system(text, m)
    lin = [i for i, lab in enumerate(labels) if lab[0] == "d" and sum(lab[2]) == 1]
    mats = []
    for v in basis:
        n = len(labels[lin[0]][2])
        A = sympy.zeros(n)
        for i in lin:
            _, j, b = labels[i]
            A[b.index(1), j] = v[i]
        mats.append(A)
    flat = sympy.Matrix([list(A) for A in mats]) if mats else sympy.zeros(0, 1)
    return (flat.rank() if mats else 0), mats
