"""A cusp in disguise: x^2 + 2xy^2 + y^4 + y^5 = (x + y^2)^2 + y^5."""
# %%
from multihomog import CoordinateChangeJet, Jet, analyze, compose, parse_polynomial, saito_test

f = parse_polynomial("x^2 + 2*x*y^2 + y^4 + y^5")
print("f =", f)

# no single grading by (a, b) makes f homogeneous as written
for w in [(1, 1), (5, 2), (2, 1)]:
    print(w, sorted(f.weighted_components(w)))

# %% the analysis finds the weights anyway
r = analyze(f)
print("weights", r.torus.weights, "multidegree", r.torus.multidegrees)
print("normal form", r.normalized.poly)
print("change", [c.to_string() for c in r.normalizing_change.components])

# %% check the change by hand
N = r.normalized.order
phi = r.normalizing_change
print("f o phi =", compose(Jet(f, N), phi).poly)
back = CoordinateChangeJet([parse_polynomial("x + y^2"), parse_polynomial("y", 2)], N)
print("phi then x -> x + y^2:", [compose(Jet(c, N), back).poly.to_string() for c in phi.components])

# %% f lies in its own Jacobian ideal, as it must for a quasihomogeneous isolated singularity
print(saito_test(f))
