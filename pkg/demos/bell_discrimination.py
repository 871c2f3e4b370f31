"""
Perfect discrimination with shared Bell pairs
=============================================

When every party shares a maximally entangled pair with the last one,
they can teleport their shares to it. The last party then holds the
whole unknown state and measures in the basis directly, whatever the
Bell outcomes were.
"""

import numpy as np

from locc_resource import bell_resource, complete_orthonormal, ghz_state, perfect_discrimination_bell, w_state

print("resource shape:", bell_resource((2, 2, 2)).dims)

b = complete_orthonormal([w_state(3), ghz_state(3, 2)], np.random.default_rng(0))
res = perfect_discrimination_bell(b)
print("Bell branches:", res.branches)
print("worst probability of the right answer:", res.min_correct)
print("largest probability of a wrong answer:", res.max_wrong)
