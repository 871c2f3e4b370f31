"""Resource states, Schmidt measure, three-qubit SLOCC classes and universality checks."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constants import ALS_MAX_ITER, ALS_NORM_CAP, ALS_RESTARTS, TOL_ALS, TOL_NORM, TOL_RANK, TOL_TANGLE
from .tensor import (
    ProductOperator,
    PureState,
    ShapeError,
    SystemShape,
    apply_product,
    as_shape,
    conjugate,
    flattening_rank_bound,
    make_state,
    max_entangled,
    partial_trace,
)
from .transform import TransformSearch, find_transform, verify_transform


# -- named states -------------------------------------------------------------


def w_state(n: int = 3) -> PureState:
    """``(1/sqrt n)(|10..0> + |010..0> + ... + |0..01>)``."""
    if n < 2:
        raise ShapeError("W state needs at least two parties")
    t = np.zeros((2,) * n, dtype=complex)
    for k in range(n):
        idx = [0] * n
        idx[k] = 1
        t[tuple(idx)] = 1.0
    return make_state(t, (2,) * n, f"W{n}")


def ghz_state(n: int = 3, r: int = 2) -> PureState:
    """``(1/sqrt r) sum_{i<r} |i>^{(x)n}`` on ``(C^r)^{(x)n}``."""
    if n < 1 or r < 1:
        raise ShapeError("GHZ state needs n >= 1 parties and r >= 1 levels")
    t = np.zeros((r,) * n, dtype=complex)
    for i in range(r):
        t[(i,) * n] = 1.0
    return make_state(t, (r,) * n, f"GHZ{n}^{r}")


def bell_resource(dims: Sequence[int]) -> PureState:
    """Parties ``1..N-1`` each maximally entangled with party N.

    Lives on ``d_1 (x) ... (x) d_{N-1} (x) C^{D/d_N}`` with amplitude
    ``sqrt(d_N/D)`` on every ``|i>|i>``, ``i`` running over the multi-index
    of the first N-1 parties.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ShapeError(f"invalid dims {dims}")
    m = int(np.prod(dims[:-1]))
    total = m * dims[-1]
    t = np.eye(m, dtype=complex).reshape(dims[:-1] + (m,)) * np.sqrt(dims[-1] / total)
    return PureState(SystemShape(dims[:-1] + (m,)), t.reshape(-1), f"PhiBell{len(dims)}")


def example3_resource() -> PureState:
    """``(|000> + |110> + |201>)/sqrt 3`` on ``C^3 (x) C^2 (x) C^2``."""
    t = np.zeros((3, 2, 2), dtype=complex)
    t[0, 0, 0] = t[1, 1, 0] = t[2, 0, 1] = 1.0
    return make_state(t, (3, 2, 2), "PhiEx3")


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
EX3_W_LOCAL = np.array([[0, 1, 1], [1, 0, 0]], dtype=complex)
EX3_GHZ_LOCAL = np.array([[0, 1, 0], [0, 0, 1]], dtype=complex)


def example3_w_operator() -> ProductOperator:
    """Maps the three-level resource exactly onto ``|W>``."""
    return ProductOperator((EX3_W_LOCAL, np.eye(2), np.eye(2)))


def example3_ghz_operator() -> ProductOperator:
    """Maps the three-level resource onto ``|GHZ>`` up to the factor ``sqrt(3/2)``.

    Party A sends ``|1> -> |0>`` and ``|2> -> |1>`` and drops ``|0>``;
    party B flips, giving ``(|000> + |111>)/sqrt 3``.
    """
    return ProductOperator((EX3_GHZ_LOCAL, SIGMA_X, np.eye(2)))


def example3_shared_matrix_operator() -> ProductOperator:
    """The W map of party A combined with ``sigma_x`` on party B.

    This is ``(I (x) sigma_x (x) I)`` after the W map, so its image is the
    W-class state ``(|000> + |011> + |110>)/sqrt 3`` and never GHZ.
    """
    return ProductOperator((EX3_W_LOCAL, SIGMA_X, np.eye(2)))


def make_named(name: str, **params) -> PureState:
    """Construct a named state.

    ``w`` (n), ``ghz`` (n, r), ``bell`` (dims), ``ex3``, ``mes`` (d).
    """
    name = name.lower()
    if name == "w":
        return w_state(int(params.get("n", 3)))
    if name == "ghz":
        return ghz_state(int(params.get("n", 3)), int(params.get("r", 2)))
    if name == "bell":
        return bell_resource(params.get("dims", (2, 2, 2)))
    if name == "ex3":
        return example3_resource()
    if name == "mes":
        return max_entangled(int(params.get("d", 2)))
    raise ValueError(f"unknown state {name!r}")


# -- Schmidt measure ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Decomposition:
    """``sum_i weights[i] (x)_k vectors[i][k]`` with unit local vectors."""

    weights: np.ndarray
    vectors: tuple[tuple[np.ndarray, ...], ...]

    @property
    def terms(self) -> int:
        return len(self.weights)

    def amplitudes(self) -> np.ndarray:
        total = 0
        for w, vs in zip(self.weights, self.vectors):
            term = np.array([w], dtype=complex)
            for v in vs:
                term = np.kron(term, v)
            total = total + term
        return total

    @classmethod
    def from_operator(cls, op: ProductOperator, scale: complex = 1.0) -> Decomposition:
        """Columns of the local factors are the product terms (times ``scale``)."""
        r = op.factors[0].shape[1]
        weights, vectors = [], []
        for j in range(r):
            cols = [f[:, j] for f in op.factors]
            norms = [np.linalg.norm(c) for c in cols]
            if min(norms) == 0:
                weights.append(0.0)
                vectors.append(tuple(np.eye(f.shape[0])[0].astype(complex) for f in op.factors))
                continue
            weights.append(scale * np.prod(norms))
            vectors.append(tuple(c / nrm for c, nrm in zip(cols, norms)))
        return cls(np.array(weights, dtype=complex), tuple(vectors))


@dataclass(frozen=True, eq=False)
class RankResult:
    """Tensor-rank bracket for a pure state.

    ``rank`` is the smallest number of terms the search could fit (the
    certified upper bound); ``lower`` is the flattening bound. Only when
    the two meet is the rank proven (``certified``); otherwise the honest
    statement is the interval ``[lower, upper]``. ``residuals[r]`` is
    ``None`` for ranks excluded by the lower bound.
    """

    rank: int | None
    lower: int
    upper: int | None
    residuals: dict[int, float | None]
    border_rank_flag: bool
    border_ranks: tuple[int, ...]
    decomposition: Decomposition | None = field(default=None, repr=False)

    @property
    def certified(self) -> bool:
        return self.upper is not None and self.upper == self.lower

    @property
    def schmidt_measure(self) -> float | None:
        """``E_S = log2 r`` in bits."""
        return None if self.rank is None else float(np.log2(self.rank))


def generic_rank_bound(shape) -> int:
    """Every tensor has rank at most the product of all but its largest dimension."""
    dims = sorted(as_shape(shape).dims)
    return int(np.prod(dims[:-1])) if len(dims) > 1 else 1


def schmidt_measure(
    s: PureState,
    r_max: int | None = None,
    restarts: int = ALS_RESTARTS,
    max_iter: int = ALS_MAX_ITER,
    norm_cap: float = ALS_NORM_CAP,
    seed: int = 0,
    tol: float = TOL_ALS,
) -> RankResult:
    """Smallest ``r`` with a product decomposition of ``s`` in ``r`` terms.

    A rank-``r`` decomposition is exactly a product matrix taking the
    ``r``-level GHZ state to ``s``, so each candidate is a
    :func:`find_transform` search. Ranks below the flattening bound are
    skipped.
    """
    lower = flattening_rank_bound(s)
    if r_max is None:
        r_max = generic_rank_bound(s.shape)
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    n = s.shape.n
    residuals: dict[int, float | None] = {}
    border = []
    upper, decomposition = None, None
    for r in range(1, r_max + 1):
        if r < lower:
            residuals[r] = None
            continue
        src = ghz_state(n, r)
        search = find_transform(src, s, restarts, max_iter, norm_cap, seed, tol)
        residuals[r] = search.residual
        if search.found:
            upper = r
            decomposition = Decomposition.from_operator(search.operator, 1 / np.sqrt(r))
            break
        if search.border_rank_escape:
            border.append(r)
    return RankResult(upper, lower, upper, residuals, bool(border), tuple(border), decomposition)


# -- three-qubit SLOCC classes -------------------------------------------------


class Slocc3(enum.Enum):
    PRODUCT = "PRODUCT"
    BISEP_A = "BISEP_A"
    BISEP_B = "BISEP_B"
    BISEP_C = "BISEP_C"
    W = "W"
    GHZ = "GHZ"


@dataclass(frozen=True)
class Slocc3Class:
    tag: Slocc3
    ranks: tuple[int, int, int]
    tangle: float
    confident: bool = True


def hyperdeterminant(s: PureState) -> complex:
    """Cayley hyperdeterminant of a ``2 x 2 x 2`` amplitude tensor."""
    if s.dims != (2, 2, 2):
        raise ShapeError(f"hyperdeterminant needs shape (2, 2, 2), got {s.dims}")
    a = s.tensor()
    d1 = (a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2 + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
          + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2 + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2)
    d2 = (a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
          + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1])
    d3 = (a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
          + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0])
    return complex(d1 - 2 * d2 + 4 * d3)


def three_tangle(s: PureState) -> float:
    """``4 |Det|`` for the normalized state; 1 for GHZ, 0 off the GHZ class."""
    return float(4 * abs(hyperdeterminant(s)) / s.norm**4)


def classify3(s: PureState, tol_tangle: float = TOL_TANGLE, tol_rank: float = TOL_RANK) -> Slocc3Class:
    """SLOCC class of a three-qubit state from local ranks and the 3-tangle."""
    if s.dims != (2, 2, 2):
        raise ShapeError(f"classify3 needs shape (2, 2, 2), got {s.dims}")
    ranks = tuple(partial_trace(s, [k]).rank(tol_rank) for k in range(3))
    tau = three_tangle(s)
    confident = not (tol_tangle * 1e-2 < tau < tol_tangle * 1e2)
    ones = [k for k, r in enumerate(ranks) if r == 1]
    if len(ones) == 3:
        tag = Slocc3.PRODUCT
    elif len(ones) == 1:
        tag = (Slocc3.BISEP_A, Slocc3.BISEP_B, Slocc3.BISEP_C)[ones[0]]
    elif len(ones) == 0:
        tag = Slocc3.GHZ if tau > tol_tangle else Slocc3.W
    else:
        # two trivial parties force the third to be trivial too
        tag, confident = Slocc3.PRODUCT, False
    return Slocc3Class(tag, ranks, tau, confident)


_BISEP = {Slocc3.BISEP_A, Slocc3.BISEP_B, Slocc3.BISEP_C}
_REACH = {
    Slocc3.GHZ: {Slocc3.GHZ, Slocc3.PRODUCT} | _BISEP,
    Slocc3.W: {Slocc3.W, Slocc3.PRODUCT} | _BISEP,
    Slocc3.BISEP_A: {Slocc3.BISEP_A, Slocc3.PRODUCT},
    Slocc3.BISEP_B: {Slocc3.BISEP_B, Slocc3.PRODUCT},
    Slocc3.BISEP_C: {Slocc3.BISEP_C, Slocc3.PRODUCT},
    Slocc3.PRODUCT: {Slocc3.PRODUCT},
}


def _tag(c) -> Slocc3:
    if isinstance(c, Slocc3Class):
        return c.tag
    if isinstance(c, Slocc3):
        return c
    return Slocc3(str(c).upper())


def reachable(src, dst) -> bool:
    """Whether a state of class ``src`` can be converted into class ``dst`` by SLOCC."""
    return _tag(dst) in _REACH[_tag(src)]


# -- universality -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RepWitness:
    """Evidence for or against ``Phi^* -> rep``.

    ``method`` is ``certificate`` (caller-supplied operator verified),
    ``search`` (found or refuted numerically) or ``class-obstruction``
    (three-qubit classes not ordered).
    """

    label: str
    reached: bool
    method: str
    operator: ProductOperator | None = field(default=None, repr=False)
    mu: complex | None = None
    residual: float | None = None
    source_class: Slocc3 | None = None
    target_class: Slocc3 | None = None
    search: TransformSearch | None = field(default=None, repr=False)


@dataclass(frozen=True)
class UniversalityVerdict:
    universal: bool
    witnesses: tuple[RepWitness, ...]

    @property
    def obstruction(self) -> RepWitness | None:
        return next((w for w in self.witnesses if not w.reached), None)


def three_qubit_maximal_reps() -> list[PureState]:
    """Representatives of the two maximal three-qubit classes."""
    return [ghz_state(3, 2).with_label("GHZ"), w_state(3).with_label("W")]


def universality_unambiguous(
    phi: PureState,
    maximal_reps: Sequence[PureState],
    certificates: dict[int, ProductOperator] | None = None,
    restarts: int = ALS_RESTARTS,
    max_iter: int = ALS_MAX_ITER,
    norm_cap: float = ALS_NORM_CAP,
    seed: int = 0,
    tol: float = TOL_ALS,
) -> UniversalityVerdict:
    """Check whether ``Phi^*`` reaches every maximally entangled representative.

    Supplied certificates are verified first. When ``phi`` and a
    representative are both three-qubit states, an unordered pair of
    SLOCC classes refutes the conversion without a search.
    """
    certificates = certificates or {}
    src = conjugate(phi)
    src_class = classify3(src) if src.dims == (2, 2, 2) else None
    witnesses = []
    for i, rep in enumerate(maximal_reps):
        label = rep.label or f"rep{i}"
        if i in certificates:
            check = verify_transform(src, rep, certificates[i])
            if check.ok:
                witnesses.append(RepWitness(label, True, "certificate", certificates[i], check.mu, check.residual))
                continue
        if src_class is not None and rep.dims == (2, 2, 2):
            rep_class = classify3(rep)
            if not reachable(src_class, rep_class):
                witnesses.append(
                    RepWitness(label, False, "class-obstruction", source_class=src_class.tag, target_class=rep_class.tag)
                )
                continue
        search = find_transform(src, rep, restarts, max_iter, norm_cap, seed, tol)
        mu = residual = None
        if search.found:
            check = verify_transform(src, rep, search.operator)
            mu, residual = check.mu, check.residual
        witnesses.append(
            RepWitness(label, search.found, "search", search.operator, mu,
                       residual if residual is not None else search.residual, search=search)
        )
    return UniversalityVerdict(all(w.reached for w in witnesses), tuple(witnesses))


def ghz_rank_construction(s: PureState, decomposition: Decomposition, rank: int | None = None) -> ProductOperator:
    """Local operators ``A_k`` with ``sqrt(R) ((x)_k A_k)|GHZ_N^R> = |s>``.

    ``A_k = sum_i alpha_i^{1/N} |a_{i,k}><i|``; a decomposition with fewer
    than ``R`` terms is padded with zero terms.
    """
    n = s.shape.n
    r = decomposition.terms
    rank = r if rank is None else int(rank)
    if r > rank:
        raise ValueError(f"decomposition has {r} terms, more than R = {rank}")
    err = np.linalg.norm(decomposition.amplitudes() - s.amps)
    if err > TOL_NORM:
        raise ValueError(f"decomposition does not reconstruct the state (error {err:.3e})")
    factors = [np.zeros((d, rank), dtype=complex) for d in s.dims]
    for i, (alpha, vecs) in enumerate(zip(decomposition.weights, decomposition.vectors)):
        root = complex(alpha) ** (1.0 / n)
        for k in range(n):
            factors[k][:, i] = root * vecs[k]
    op = ProductOperator(tuple(factors))
    image, _ = apply_product(op, ghz_state(n, rank))
    err = np.linalg.norm(np.sqrt(rank) * image.amps - s.amps)
    if err > 10 * TOL_NORM:
        raise AssertionError(f"GHZ construction misses the state by {err:.3e}")
    return op


def rank_lower_bound_w(n: int, d: int) -> int:
    """``(N-1)(d-1) + 1``, the generalized-W lower bound on the maximal rank of ``(C^d)^{(x)N}``."""
    if d < 2 or d & (d - 1):
        raise ValueError(f"d must be a power of two, got {d}")
    if n < 2:
        raise ValueError("need at least two parties")
    return (n - 1) * (d - 1) + 1
