"""The matrix product computed directly in parameter space.

`compose(left, right)` returns the coordinates of assemble(left) @
assemble(right) without ever forming the 4x4 matrices.  Each output
vector is a sum of two Pauli-pair products, so the law is quadratic in
the sixteen coordinates and exact up to floating-point rounding.
"""

import numpy as np

from kmln import assemble, compose, identity_params, random_params

rng = np.random.default_rng(1)

left = random_params(rng)
right = random_params(rng)

prod = compose(left, right)
dense = assemble(left) @ assemble(right)
err = np.linalg.norm(assemble(prod) - dense) / np.linalg.norm(dense)
print("parameter-space vs dense product, relative error:", err)

# The identity matrix has coordinates k = m = (1, 0, 0, 0), l = n = 0.
e = identity_params()
same = compose(e, right)
print("identity acts trivially:",
      np.allclose(same.components(), right.components()))

# Associativity over a random triple.
third = random_params(rng)
a = compose(compose(left, right), third)
b = compose(left, compose(right, third))
print("associativity max error:",
      np.abs(a.components() - b.components()).max())

# The first factor is the left matrix factor: compose(p, q) ~ P @ Q.
pq = assemble(compose(left, right))
qp = assemble(right) @ assemble(left)
print("left/right order matters:", not np.allclose(pq, qp))
