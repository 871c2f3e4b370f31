"""
No three-qubit resource is universal
====================================

A resource on three qubits would have to reach both GHZ and W, but every
state sits in one SLOCC class and the two maximal classes cannot reach
each other. The 3-tangle separates them.
"""

import numpy as np

from locc_resource import classify3, random_state, reachable, universality_unambiguous
from locc_resource.resources import three_qubit_maximal_reps

rng = np.random.default_rng(3)
reps = three_qubit_maximal_reps()
for _ in range(5):
    phi = random_state((2, 2, 2), rng)
    verdict = universality_unambiguous(phi, reps)
    ob = verdict.obstruction
    print(f"tangle {classify3(phi).tangle:.3f}: universal={verdict.universal}, "
          f"blocked {ob.source_class.value} -> {ob.target_class.value}")

print("GHZ -> W allowed:", reachable("GHZ", "W"))
print("W -> GHZ allowed:", reachable("W", "GHZ"))
