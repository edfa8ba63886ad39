"""The cusp x^2 + y^3, one stage at a time."""
# %%
from multihomog import (
    analyze,
    integral_weight_data,
    maximal_toral_family,
    parse_polynomial,
    stabilized_log_derivations,
    weight_decompose,
)
from multihomog.logjets import linear_parts

f = parse_polynomial("x^2 + y^3")
print("f =", f)

# %% logarithmic vector fields, projected to their linear parts
L = stabilized_log_derivations(f, 0)
print("stabilized at m =", L.stabilization_witness, "history", L.dimension_history)
for b, h in zip(L.basis, L.cofactors):
    print(f"  {b.to_string()}    cofactor {h.poly}")

g0 = linear_parts(L)
for A in g0:
    print("  linear part", [[str(x) for x in r] for r in A.rows], "nilpotent" if A.is_nilpotent() else "")

# %% the torus: semisimple elements, diagonalized and saturated
family = maximal_toral_family(g0)
T = integral_weight_data(family)
print("rank", T.rank, "weights", T.weights)

# the x*dy direction is a root of weight 3 - 2 = 1
wd = weight_decompose(L, T.weights)
for c in wd.components:
    print(f"  {c.kind:6s} weight {c.weight}  {c.field.to_string()}")

# %% the whole pipeline in one call
r = analyze(f)
print(r.to_text())
