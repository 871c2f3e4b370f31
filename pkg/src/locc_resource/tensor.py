"""Dense multipartite pure states and product operators.

Amplitudes are stored as flat complex vectors. The multi-index
``(i_1, ..., i_N)`` maps to a flat index in row-major order with party 1
most significant, i.e. ``amps.reshape(dims)[i_1, ..., i_N]``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .constants import TOL_NORM, TOL_PSD, TOL_RANK


class ShapeError(ValueError):
    """Raised when system shapes or party indices do not fit together."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SystemShape:
    """Ordered local dimensions ``(d_1, ..., d_N)`` of a multipartite system."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) == 0:
            raise ShapeError("a system needs at least one party")
        if any(d < 1 for d in dims):
            raise ShapeError(f"local dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def pair(self, other: SystemShape) -> SystemShape:
        """Party-wise grouping: party k becomes ``C^{d_k} (x) C^{d'_k}``."""
        if self.n != other.n:
            raise ShapeError(f"cannot pair {self.n}-party and {other.n}-party shapes")
        return SystemShape(tuple(a * b for a, b in zip(self.dims, other.dims)))

    def __iter__(self):
        return iter(self.dims)

    def __len__(self):
        return self.n


def as_shape(shape) -> SystemShape:
    if isinstance(shape, SystemShape):
        return shape
    return SystemShape(tuple(shape))


@dataclass(frozen=True)
class PureState:
    """A complex amplitude vector over a :class:`SystemShape`.

    Public constructors normalize. ``normalized=False`` marks an
    intermediate vector (a measurement branch, an operator image) whose
    norm carries information.
    """

    shape: SystemShape
    amps: np.ndarray
    label: str = ""
    normalized: bool = True

    def __post_init__(self):
        shape = as_shape(self.shape)
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.size != shape.dim:
            raise ShapeError(f"{amps.size} amplitudes do not fit shape {shape.dims}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        if self.normalized and abs(np.linalg.norm(amps) - 1.0) > TOL_NORM:
            raise ValueError(
                f"state is not normalized (norm {np.linalg.norm(amps):.3e}); "
                "use make_state or pass normalized=False"
            )
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "amps", _frozen(amps))

    @property
    def dims(self) -> tuple[int, ...]:
        return self.shape.dims

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.shape.dims)

    def normalize(self) -> PureState:
        nrm = self.norm
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return PureState(self.shape, self.amps / nrm, self.label)

    def with_label(self, label: str) -> PureState:
        return PureState(self.shape, self.amps, label, self.normalized)


def make_state(amps, shape, label: str = "") -> PureState:
    """Build a normalized state from (possibly unnormalized) amplitudes."""
    amps = np.asarray(amps, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(amps)):
        raise ValueError("amplitudes must be finite")
    nrm = np.linalg.norm(amps)
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    return PureState(as_shape(shape), amps / nrm, label)


def basis_state(index: Sequence[int], shape, label: str = "") -> PureState:
    """Computational basis state ``|i_1 ... i_N>``."""
    shape = as_shape(shape)
    amps = np.zeros(shape.dim, dtype=complex)
    amps[np.ravel_multi_index(tuple(index), shape.dims)] = 1.0
    return PureState(shape, amps, label)


@dataclass(frozen=True)
class ProductOperator:
    """``M = M^(1) (x) ... (x) M^(N)`` kept as its local factors.

    Factor k maps ``C^{cols_k}`` to ``C^{rows_k}``; factors may be rectangular.
    """

    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        factors = []
        for f in self.factors:
            f = np.asarray(f, dtype=complex)
            if f.ndim != 2:
                raise ShapeError("every factor must be a matrix")
            if not np.all(np.isfinite(f)):
                raise ValueError("factor entries must be finite")
            factors.append(_frozen(f))
        if not factors:
            raise ShapeError("a product operator needs at least one factor")
        object.__setattr__(self, "factors", tuple(factors))

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def in_shape(self) -> SystemShape:
        return SystemShape(tuple(f.shape[1] for f in self.factors))

    @property
    def out_shape(self) -> SystemShape:
        return SystemShape(tuple(f.shape[0] for f in self.factors))

    def matrix(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for f in self.factors:
            out = np.kron(out, f)
        return out

    def hs_norm_sq(self) -> float:
        """``tr(M^dagger M)``, multiplicative over the factors."""
        return float(np.prod([np.vdot(f, f).real for f in self.factors]))

    def factor_norms(self) -> np.ndarray:
        return np.array([np.linalg.norm(f) for f in self.factors])

    def scaled(self, s: complex) -> ProductOperator:
        """Multiply the whole operator by ``s``, spread evenly over the factors."""
        root = complex(s) ** (1.0 / self.n)
        return ProductOperator(tuple(f * root for f in self.factors))

    def conj(self) -> ProductOperator:
        return ProductOperator(tuple(f.conj() for f in self.factors))


def identity_operator(shape) -> ProductOperator:
    return ProductOperator(tuple(np.eye(d) for d in as_shape(shape).dims))


@dataclass(frozen=True)
class DensityLikeOperator:
    """Hermitian matrix over a system shape (reduced states, POVM elements)."""

    shape: SystemShape
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        shape = as_shape(self.shape)
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (shape.dim, shape.dim):
            raise ShapeError(f"matrix of size {m.shape} does not fit shape {shape.dims}")
        if np.linalg.norm(m - m.conj().T) > TOL_NORM * max(1.0, np.linalg.norm(m)):
            raise ValueError("operator is not Hermitian")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def is_psd(self, tol: float = TOL_PSD) -> bool:
        return bool(self.eigvals().min() >= -tol)

    def rank(self, tol: float = TOL_RANK) -> int:
        ev = np.abs(self.eigvals())
        if ev.max() == 0:
            return 0
        return int(np.sum(ev > tol * ev.max()))


def tensor_product(a: PureState, b: PureState, pair: bool = False) -> PureState:
    """Kronecker product of two states.

    With ``pair=False`` the parties are concatenated, ``(a_1..a_N, b_1..b_M)``.
    With ``pair=True`` both states must have N parties and party k of the
    result is ``C^{da_k} (x) C^{db_k}`` with the ``a`` index more significant.
    """
    normalized = a.normalized and b.normalized
    if not pair:
        shape = SystemShape(a.dims + b.dims)
        return PureState(shape, np.kron(a.amps, b.amps), normalized=normalized)
    shape = a.shape.pair(b.shape)
    n = a.shape.n
    t = np.multiply.outer(a.tensor(), b.tensor())
    order = [ax for k in range(n) for ax in (k, n + k)]
    t = np.transpose(t, order)
    return PureState(shape, t.reshape(-1), normalized=normalized)


def pairing_permutation(dims_a: Sequence[int], dims_b: Sequence[int]) -> np.ndarray:
    """Flat-index permutation taking plain ``a (x) b`` order to paired order.

    ``paired = plain[perm]``.
    """
    n = len(dims_a)
    idx = np.arange(int(np.prod(dims_a)) * int(np.prod(dims_b))).reshape(tuple(dims_a) + tuple(dims_b))
    order = [ax for k in range(n) for ax in (k, n + k)]
    return np.transpose(idx, order).reshape(-1)


def conjugate(s: PureState) -> PureState:
    """Entrywise complex conjugate in the computational basis."""
    return PureState(s.shape, s.amps.conj(), s.label, s.normalized)


def inner(a: PureState, b: PureState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.dims} vs {b.dims}")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: PureState, b: PureState) -> float:
    """``|<a|b>|^2 / (<a|a><b|b>)``."""
    return abs(inner(a, b)) ** 2 / (a.norm**2 * b.norm**2)


def apply_local(t: np.ndarray, axis: int, m: np.ndarray) -> np.ndarray:
    """Apply matrix ``m`` to one axis of an amplitude tensor."""
    return np.moveaxis(np.tensordot(m, t, axes=([1], [axis])), 0, axis)


def apply_product(
    op: ProductOperator, s: PureState, renormalize: bool = False
) -> tuple[PureState, float]:
    """Return ``(M|s>, ||M|s>||)``; the state is normalized only on request."""
    if op.in_shape != s.shape:
        raise ShapeError(f"operator input shape {op.in_shape.dims} != state shape {s.dims}")
    t = s.tensor()
    for k, f in enumerate(op.factors):
        t = apply_local(t, k, f)
    out = PureState(op.out_shape, t.reshape(-1), normalized=False)
    nrm = out.norm
    if renormalize:
        out = out.normalize()
    return out, nrm


def _check_parties(parties: Iterable[int], n: int) -> tuple[int, ...]:
    parties = tuple(int(p) for p in parties)
    if len(set(parties)) != len(parties) or any(p < 0 or p >= n for p in parties):
        raise ShapeError(f"invalid party subset {parties} for {n} parties")
    return parties


def _cut_matrix(s: PureState, side: Sequence[int]) -> np.ndarray:
    side = sorted(_check_parties(side, s.shape.n))
    rest = [k for k in range(s.shape.n) if k not in side]
    t = np.transpose(s.tensor(), side + rest)
    rows = int(np.prod([s.dims[k] for k in side])) if side else 1
    return t.reshape(rows, -1)


def partial_trace(s: PureState, keep: Sequence[int]) -> DensityLikeOperator:
    """Reduced operator of ``|s><s|`` on the parties in ``keep`` (kept in ascending order).

    An empty ``keep`` traces out everything and returns the 1x1 matrix ``[||s||^2]``.
    """
    keep = sorted(_check_parties(keep, s.shape.n))
    m = _cut_matrix(s, keep)
    dims = tuple(s.dims[k] for k in keep) or (1,)
    return DensityLikeOperator(SystemShape(dims), m @ m.conj().T)


def _validate_cut(s: PureState, cut: Sequence[int]) -> tuple[int, ...]:
    cut = _check_parties(cut, s.shape.n)
    if len(cut) == 0 or len(cut) == s.shape.n:
        raise ShapeError(f"cut {cut} is not a bipartition of {s.shape.n} parties")
    return cut


def entropy_bits(probs: np.ndarray) -> float:
    p = np.asarray(probs, dtype=float)
    p = p[p > 1e-300]
    return float(-np.sum(p * np.log2(p)))


def cut_entropy(s: PureState, cut: Sequence[int]) -> float:
    """Von Neumann entropy in bits of the reduced state on the parties in ``cut``."""
    cut = _validate_cut(s, cut)
    ev = partial_trace(s, cut).eigvals()
    ev = np.clip(ev, 0.0, None)
    return entropy_bits(ev / ev.sum())


def schmidt_coefficients(s: PureState, cut: Sequence[int]) -> np.ndarray:
    return np.linalg.svd(_cut_matrix(s, _validate_cut(s, cut)), compute_uv=False)


def schmidt_rank_bipartite(s: PureState, cut: Sequence[int], tol: float = TOL_RANK) -> int:
    """Number of Schmidt coefficients above ``tol`` times the largest one."""
    sv = schmidt_coefficients(s, cut)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def bipartitions(n: int) -> list[tuple[int, ...]]:
    """One side of every nontrivial bipartition of ``n`` parties (party 0 on this side)."""
    out = []
    others = range(1, n)
    for size in range(0, n - 1):
        for rest in itertools.combinations(others, size):
            out.append((0,) + rest)
    return out


def flattening_rank_bound(s: PureState) -> int:
    """Largest Schmidt rank over all bipartitions, a lower bound on tensor rank."""
    if s.shape.n == 1:
        return 1 if s.norm > 0 else 0
    return max(schmidt_rank_bipartite(s, cut) for cut in bipartitions(s.shape.n))


def max_entangled(d: int) -> PureState:
    """``(1/sqrt d) sum_i |i, i>`` on ``C^d (x) C^d``."""
    if d < 1:
        raise ShapeError("dimension must be >= 1")
    amps = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return PureState(SystemShape((d, d)), amps, f"mes{d}")


def paired_max_entangled(shape) -> PureState:
    """``(x)_k |Psi_k>`` with ``|Psi_k>`` maximally entangled on ``C^{d_k} (x) C^{d_k}``,
    grouped so party k holds both halves of its own pair (dims ``d_k^2``)."""
    shape = as_shape(shape)
    t = np.ones((), dtype=complex)
    for d in shape.dims:
        t = np.multiply.outer(t, np.eye(d) / np.sqrt(d))
    # t axes: (a_1, b_1, a_2, b_2, ...) already grouped per party
    return PureState(shape.pair(shape), t.reshape(-1), "paired_mes")


def random_state(shape, rng: np.random.Generator, label: str = "") -> PureState:
    """Haar-random pure state."""
    shape = as_shape(shape)
    z = rng.standard_normal(shape.dim) + 1j * rng.standard_normal(shape.dim)
    return make_state(z, shape, label)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_local_unitary(shape, rng: np.random.Generator) -> ProductOperator:
    return ProductOperator(tuple(random_unitary(d, rng) for d in as_shape(shape).dims))
