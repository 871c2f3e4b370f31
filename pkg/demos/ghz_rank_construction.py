"""
Reaching low-rank states from a generalized GHZ state
=====================================================

A state with an R-term product decomposition is the image of the
R-level GHZ state under local maps whose columns are the product terms.
"""

import numpy as np

from locc_resource import apply_product, ghz_rank_construction, ghz_state, random_state, schmidt_measure

s = random_state((2, 2, 2), np.random.default_rng(5))
res = schmidt_measure(s, r_max=3)
print("rank of a random three-qubit state:", res.rank)

op = ghz_rank_construction(s, res.decomposition, rank=3)
image, _ = apply_product(op, ghz_state(3, 3))
print("reconstruction error from GHZ_3^3:", np.linalg.norm(np.sqrt(3) * image.amps - s.amps))
