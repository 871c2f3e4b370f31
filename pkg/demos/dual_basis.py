"""
Dual bases and the maximally entangled state
============================================

Every linearly independent basis has a dual: vectors orthogonal to all
basis states but one. The dual turns the basis into a resolution of the
identity and rewrites the maximally entangled state.
"""

import numpy as np

from locc_resource import BasisSet, dual_basis, make_state
from locc_resource.dual import check_identity_decomposition, check_mes_decomposition, random_basis

# |0> and |+> are not orthogonal. Their duals are |-> and |1>.
zero = make_state([1, 0], (2,))
plus = make_state([1, 1], (2,))
d = dual_basis(BasisSet((zero, plus)))
print("dual of |0>:", np.round(d[0].amps, 4))
print("dual of |+>:", np.round(d[1].amps, 4))
print("overlaps <~psi_i|psi_i>:", np.round(d.overlaps, 6))

# A random two-qubit basis, rebuilt from its dual.
rng = np.random.default_rng(1)
b = random_basis((2, 2), rng)
d = dual_basis(b)
print("identity residual:", check_identity_decomposition(b, d))
print("MES residual:     ", check_mes_decomposition(b, d))
