"""Build group elements three ways and split one into its Cartan factors.

Run with ``python3 demos/group_and_cartan.py``.
"""

import numpy as np

from cartanq.group import (
    SU2Element,
    TranslationMatrix,
    block_constraint_residuals,
    cartan_decompose,
    dyn_matrix,
    poincare_matrix,
    random_sl2c,
    random_su22,
    random_translation,
)

np.set_printoptions(precision=4, suppress=True)
rng = np.random.default_rng(0)

# a generic element from a seeded exponential of the algebra
u = random_su22(2026)
print("certificates of random_su22(2026):", sorted(u.certified))
print("block constraint residuals:", {k: f"{v:.1e}" for k, v in block_constraint_residuals(u).items()})

f = cartan_decompose(u)
U, H = f.unitary_part.matrix, f.positive_part.matrix
print("||UH - u|| =", f"{np.abs(U @ H - u.matrix).max():.1e}")
print("eigenvalues of H:", np.linalg.eigvalsh(H))

# a Poincare matrix: pseudo-unitary but not unitary
p = poincare_matrix(random_sl2c(rng), random_translation(rng))
print("\nPoincare element certificates:", sorted(p.certified))

# the dynamical intersection is both, so its Cartan positive part is trivial
w = TranslationMatrix.from_params(0.0, [0.0, 0.0, 1.0], normalized=True)
d = dyn_matrix(SU2Element.identity(), w)
print("dyn element diagonal:", np.diag(d.matrix))
print("H of the dyn element is the identity:", np.allclose(cartan_decompose(d).positive_part.matrix, np.eye(4)))
