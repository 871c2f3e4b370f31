"""
From product transformations to a measurement and back
======================================================

If the conjugated resource reaches every dual basis state by a product
matrix, those matrices define a separable measurement that identifies
each basis state without error. Running that measurement on the resource
plus a locally prepared maximally entangled state performs the
transformation again.
"""

import numpy as np

from locc_resource import (
    build_unambiguous_povm,
    check_unambiguous,
    complete_orthonormal,
    conjugate,
    dual_basis,
    example3_resource,
    find_transform,
    ghz_state,
    protocol_from_measurement,
    w_state,
)

phi = example3_resource()
b = complete_orthonormal([w_state(3), ghz_state(3, 2)], np.random.default_rng(4))
duals = dual_basis(b)

# One certificate per dual basis state.
ms = [find_transform(conjugate(phi), duals[i], seed=7).operator for i in range(len(b))]

povm = build_unambiguous_povm(phi, b, ms)
table = check_unambiguous(povm, phi, b)
print("success weights eps_i:", np.array2string(table.eps, precision=3))
print("largest off-diagonal: ", table.offdiag_max)

# The forward protocol lands on each dual with probability eps_i / 8.
for br, e in zip(protocol_from_measurement(phi, b, povm), table.eps):
    print(f"outcome {br.outcome}: p = {br.probability:.3e}  eps/8 = {e / 8:.3e}  fidelity = {br.fidelity:.12f}")
