"""
Turning a 3x2x2 resource into W and GHZ
=======================================

The state (|000> + |110> + |201>)/sqrt 3 can be converted to both
maximally entangled three-qubit classes by product matrices, so it is a
universal resource for unambiguous discrimination of three-qubit bases.
It still carries less than one ebit across the AB:C cut.
"""

import numpy as np

from locc_resource import apply_product, classify3, cut_entropy, example3_resource, ghz_state, w_state
from locc_resource.resources import example3_ghz_operator, example3_shared_matrix_operator, example3_w_operator

phi = example3_resource()

# Party A maps |1>, |2> -> |0> and |0> -> |1>: the W state comes out exactly.
image, _ = apply_product(example3_w_operator(), phi)
print("W map error:", np.linalg.norm(image.amps - w_state(3).amps))

# For GHZ, party A keeps |1> -> |0>, |2> -> |1> and party B flips.
image, _ = apply_product(example3_ghz_operator(), phi)
print("GHZ map error:", np.linalg.norm(np.sqrt(1.5) * image.amps - ghz_state(3, 2).amps))

# Reusing the W-map matrix for party A instead only relabels the W state.
image, _ = apply_product(example3_shared_matrix_operator(), phi)
print("shared-matrix image class:", classify3(image.normalize()).tag.value)

# H(2/3) ebits across AB:C, against a full ebit for GHZ.
print("entropy AB:C, resource:", cut_entropy(phi, [0, 1]))
print("entropy AB:C, GHZ:     ", cut_entropy(ghz_state(3, 2), [0, 1]))
