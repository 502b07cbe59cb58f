"""Rank stories: observed profiles, disputed labels, and the rank-1 cut.

Every family carries a catalog rank label.  Generic sampling confirms
most labels, but eleven families come out at a different rank than their
label claims; the verification suite reports those as discrepancies
rather than hiding them.  Separately, forcing the determinant of the
free base block to zero is meant to drop a rank-2 family to rank 1 —
that works for the twelve families whose tied vectors are all scalar
multiples of the base, and provably cannot work for the other thirteen.
"""

import numpy as np

from kmln import (
    FAMILIES,
    RANK_TWO_TAGS,
    assemble,
    instance_params,
    numeric_rank,
    rank1_restrict,
    rank_profile,
    sample_instance,
)

disputed = [tag for tag, fam in FAMILIES.items()
            if fam.claimed_rank != fam.generic_rank]
print("families whose observed rank differs from the catalog label:")
for tag in disputed:
    fam = FAMILIES[tag]
    print(f"  {tag}: label {fam.claimed_rank}, observed {rank_profile(tag)}")

# The rank-1 restriction replaces the scalar part of each free vector by
# a square root of v.v, forcing det(c0*I + v.sigma) = 0 on that block.
rng = np.random.default_rng(5)
print("\nrank-1 restriction across the rank-2 families:")
collapsed, stuck = [], []
for tag in RANK_TWO_TAGS:
    inst = rank1_restrict(sample_instance(tag, rng))
    r = numeric_rank(assemble(instance_params(inst)))
    (collapsed if r <= 1 else stuck).append(tag)
print("collapse to rank <= 1:", " ".join(collapsed))
print("stay at rank 2:      ", " ".join(stuck))

# Why some families cannot collapse: in K-6 the l block is not a scalar
# multiple of the k block, so killing det(K) leaves det(L) nonzero.
inst = sample_instance("K-6", rng)
restricted = rank1_restrict(inst)
g = assemble(instance_params(restricted))
det_k = np.linalg.det(g[:2, :2])
det_l = np.linalg.det(g[2:, :2])
print("\nK-6 after restriction: det(K block) =", abs(det_k),
      " det(L block) =", abs(det_l))
