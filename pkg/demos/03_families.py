"""The catalog of degenerate families and their closure under products.

Each family ties some of the four vectors to the free ones by linear
rules with scalar constants (A, B, C, D, alpha, beta, s, t).  With the
constants fixed, every family is closed under composition: products of
members are members with the *same* constants.
"""

import numpy as np

from kmln import (
    FAMILY_TAGS,
    assemble,
    closure_check,
    compose,
    construct,
    descriptor,
    instance_params,
    membership,
    numeric_rank,
    sample_instance,
)

print("catalog size:", len(FAMILY_TAGS))
print("tags:", " ".join(FAMILY_TAGS))

# K-3 sets l = D*k and m = n = 0; one free vector, one constant.
fam = descriptor("K-3")
print("\nK-3 constants:", fam.constants, "free base vectors:", fam.bases)

p = construct("K-3", {"D": 2.0}, base={"k": [3.0, 1.0, 2.0, 1.0]})
print("K-3 member rank:", numeric_rank(assemble(p)))

# Membership recovers the constant from the coordinates alone.
mem = membership("K-3", p)
print("membership residual:", mem.residual, "recovered D:", mem.constants["D"])

# Products of members stay inside with the same constant.
q = construct("K-3", {"D": 2.0}, base={"k": [1.0, 0.0, 1.0, 0.5]})
prod = compose(p, q)
print("product residual:", membership("K-3", prod).residual)

# A seeded sweep over random member pairs, all 39 families.
worst = 0.0
for tag in FAMILY_TAGS:
    report = closure_check(tag, samples=50, seed=3)
    worst = max(worst, report.worst_residual)
print("\nworst closure residual over all families:", worst)

# Random members with random constants, one line per family.
rng = np.random.default_rng(4)
inst = sample_instance("KM-4", rng)
print("\nsampled KM-4 constants:", {n: complex(c) for n, c in inst.constants.items()})
print("sampled member rank:", numeric_rank(assemble(instance_params(inst))))
