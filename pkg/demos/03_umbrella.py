"""Whitney umbrella x^2 - y^2 z: two independent gradings."""
# %%
from multihomog import AnalysisConfig, analyze, lattices_equal, saturate
from multihomog.lattice import membership

r = analyze("x^2 - y^2*z", AnalysisConfig(factors=("x^2 - y^2*z",)))
T = r.torus
print("rank", T.rank)
print("weights", T.weights)
print("multidegrees", T.multidegrees)
print("factor", r.factors)

# %% the lattice is every w with 2 w1 = 2 w2 + w3
L = saturate(T.weights, 3)
print(lattices_equal(L, saturate([(1, 1, 0), (1, 0, 2)])))
for w in [(1, 1, 0), (0, 1, -2), (1, 0, 1), (2, 1, 2)]:
    print(w, membership(L, w), 2 * w[0] == 2 * w[1] + w[2])

# %% a strictly positive weight exists, so the germ is quasihomogeneous
print("positive weight", r.positive_weight, "quasihomogeneous", r.quasihomogeneous)

# %% weight table of the jet Lie algebra
for row in r.to_dict()["generator_diagnostics"]["weight_table"]:
    print(row)
