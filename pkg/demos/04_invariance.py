"""Random coordinate changes leave the torus invariants alone."""
# %%
import random

from multihomog import AnalysisConfig, analyze, invariance_suite, parse_polynomial
from multihomog.pipeline import random_change

f = parse_polynomial("x^2 + y^3")
psi = random_change(2, random.Random(11))
print("psi =", [c.to_string() for c in psi.components])
g = f.substitute(list(psi.components))
print("f o psi =", g)

r = analyze(g, AnalysisConfig(order=10), strict=False)
print("weights", r.torus.weights, "multidegree", r.torus.multidegrees)
print("normal form", r.normalized.poly)

# %% ten seeded trials each
for text in ["x^2 + y^3", "x*y", "x^5 + y^5 + x^2*y^2"]:
    rep = invariance_suite(text, trials=10)
    print(f"{text:22s} base {rep.base}  counterexamples {len(rep.counterexamples)}")

# %% a germ with no grading at all
r = analyze("x^5 + y^5 + x^2*y^2", AnalysisConfig(order=14))
print("rank", r.rank, "quasihomogeneous", r.quasihomogeneous, "saito", r.saito.evidence)
