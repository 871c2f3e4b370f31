"""Entanglement resources for local unambiguous discrimination and SLOCC conversion.

Dense numerical tools for multipartite pure states: dual bases, product
(SLOCC) transformations, separable unambiguous measurements built from
them and back, teleportation-based perfect discrimination, tensor rank
and three-qubit entanglement classes.
"""

from .constants import TOL_ALS, TOL_EPS, TOL_NORM, TOL_PSD, TOL_RANK, TOL_TANGLE
from .discrimination import (
    SeparablePOVM,
    build_unambiguous_povm,
    check_unambiguous,
    perfect_discrimination_bell,
    projective_povm,
)
from .dual import (
    BasisSet,
    DualBasis,
    RankDeficientBasis,
    check_identity_decomposition,
    check_mes_decomposition,
    complete_orthonormal,
    dual_basis,
    random_basis,
    random_orthonormal_basis,
)
from .resources import (
    Decomposition,
    RankResult,
    Slocc3,
    Slocc3Class,
    bell_resource,
    classify3,
    example3_ghz_operator,
    example3_resource,
    example3_w_operator,
    ghz_rank_construction,
    ghz_state,
    make_named,
    rank_lower_bound_w,
    reachable,
    schmidt_measure,
    three_tangle,
    universality_unambiguous,
    w_state,
)
from .tensor import (
    DensityLikeOperator,
    ProductOperator,
    PureState,
    ShapeError,
    SystemShape,
    apply_product,
    conjugate,
    cut_entropy,
    fidelity,
    inner,
    make_state,
    max_entangled,
    partial_trace,
    random_state,
    schmidt_rank_bipartite,
    tensor_product,
)
from .transform import (
    find_transform,
    protocol_from_measurement,
    teleport,
    verify_transform,
)

__version__ = "0.1.0"
