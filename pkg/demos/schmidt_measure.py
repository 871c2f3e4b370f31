"""
Tensor rank and the Schmidt measure
===================================

The Schmidt measure is log2 of the fewest product terms that add up to a
state. The search brackets it between the largest bipartite Schmidt rank
and the best decomposition it finds, and flags ranks reached only as a
limit of diverging terms.
"""

from locc_resource import example3_resource, ghz_state, schmidt_measure, w_state

for name, s in [("GHZ", ghz_state(3, 2)), ("W", w_state(3)), ("3x2x2 resource", example3_resource())]:
    res = schmidt_measure(s)
    print(f"{name}: rank {res.rank} (lower bound {res.lower}), E_S = {res.schmidt_measure:.4f} bits, "
          f"border-rank ranks {list(res.border_ranks)}")
