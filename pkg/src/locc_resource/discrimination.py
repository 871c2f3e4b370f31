"""Unambiguous discrimination of ``|Phi> (x) B`` with separable measurements.

POVM elements act on the paired system ``H' (x) H`` in which party k holds
``C^{d'_k} (x) C^{d_k}`` (resource index more significant), matching
``tensor_product(phi, psi, pair=True)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constants import TOL_EPS, TOL_NORM, TOL_PSD
from .dual import BasisSet, dual_basis
from .tensor import (
    ProductOperator,
    PureState,
    ShapeError,
    SystemShape,
    as_shape,
    conjugate,
    inner,
    tensor_product,
)
from .transform import PreconditionError, bell_measure, verify_transform


class POVMError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SeparablePOVM:
    """D conclusive elements followed by the inconclusive one.

    ``factors[i]``, when present, lists per-party vectors whose tensor
    product ``|phi_i>`` satisfies ``elements[i] = scale |phi_i><phi_i|``.
    """

    shape: SystemShape
    elements: tuple[np.ndarray, ...] = field(repr=False)
    factors: tuple[tuple[np.ndarray, ...] | None, ...] | None = field(default=None, repr=False)
    scale: float = 1.0

    def __post_init__(self):
        shape = as_shape(self.shape)
        els = []
        for e in self.elements:
            e = np.array(e, dtype=complex)
            if e.shape != (shape.dim, shape.dim):
                raise ShapeError(f"element of size {e.shape} does not fit shape {shape.dims}")
            if not np.all(np.isfinite(e)):
                raise POVMError("non-finite POVM entry")
            e.setflags(write=False)
            els.append(e)
        if len(els) < 2:
            raise POVMError("need at least one conclusive and the inconclusive element")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "elements", tuple(els))
        total = sum(els)
        if np.linalg.norm(total - np.eye(shape.dim)) > TOL_NORM * len(els):
            raise POVMError("POVM elements do not sum to the identity")
        for i, e in enumerate(els):
            if np.linalg.norm(e - e.conj().T) > TOL_NORM:
                raise POVMError(f"element {i} is not Hermitian")
            if np.linalg.eigvalsh(e).min() < -TOL_PSD:
                raise POVMError(f"element {i} is not positive semidefinite")

    @property
    def conclusive(self) -> tuple[np.ndarray, ...]:
        return self.elements[:-1]

    @property
    def inconclusive(self) -> np.ndarray:
        return self.elements[-1]

    def conj(self) -> SeparablePOVM:
        factors = None
        if self.factors is not None:
            factors = tuple(
                None if f is None else tuple(v.conj() for v in f) for f in self.factors
            )
        return SeparablePOVM(self.shape, tuple(e.conj() for e in self.elements), factors, self.scale)

    def relabel(self, order: Sequence[int]) -> SeparablePOVM:
        """Permute the conclusive outcomes (negative controls)."""
        els = tuple(self.conclusive[i] for i in order) + (self.inconclusive,)
        factors = None
        if self.factors is not None:
            factors = tuple(self.factors[i] for i in order) + (self.factors[-1],)
        return SeparablePOVM(self.shape, els, factors, self.scale)


def complete_povm(shape, conclusive: Sequence[np.ndarray], factors=None, scale: float = 1.0) -> SeparablePOVM:
    """Append ``I - sum(conclusive)`` as the inconclusive element."""
    shape = as_shape(shape)
    rest = np.eye(shape.dim) - sum(conclusive)
    rest = (rest + rest.conj().T) / 2
    if factors is not None:
        factors = tuple(factors) + (None,)
    return SeparablePOVM(shape, tuple(conclusive) + (rest,), factors, scale)


@dataclass(frozen=True)
class UnambiguityTable:
    """``table[i, j] = <Phi (x) psi_j| Pi_i |Phi (x) psi_j>``."""

    table: np.ndarray = field(repr=False)
    eps: np.ndarray
    offdiag_max: float
    passed: bool


def check_unambiguous(
    povm: SeparablePOVM, phi: PureState, b: BasisSet, tol: float = TOL_NORM, tol_eps: float = TOL_EPS
) -> UnambiguityTable:
    vecs = [tensor_product(phi, psi, pair=True).amps for psi in b]
    if povm.shape.dim != vecs[0].size:
        raise ShapeError("POVM does not act on the paired resource-and-basis system")
    d = len(b)
    if len(povm.conclusive) != d:
        raise ShapeError(f"POVM has {len(povm.conclusive)} conclusive outcomes for {d} states")
    table = np.array(
        [[np.vdot(v, e @ v).real for v in vecs] for e in povm.conclusive]
    )
    eps = np.diag(table).copy()
    off = table - np.diag(eps)
    offdiag_max = float(np.abs(off).max()) if d > 1 else 0.0
    passed = bool(np.all(eps > tol_eps) and offdiag_max < tol)
    return UnambiguityTable(table, eps, offdiag_max, passed)


def projective_povm(phi: PureState, b: BasisSet) -> SeparablePOVM:
    """Global projectors onto the orthonormal ``|Phi (x) psi_i>`` plus the remainder."""
    if not b.orthonormal:
        raise POVMError("projective measurement needs an orthonormal basis")
    vecs = [tensor_product(phi, psi, pair=True).amps for psi in b]
    shape = phi.shape.pair(b.shape)
    return complete_povm(shape, [np.outer(v, v.conj()) for v in vecs])


def _normalize_hs(m: ProductOperator, target: float) -> ProductOperator:
    """Rescale so that ``tr(M^dagger M) = target``."""
    return m.scaled(np.sqrt(target / m.hs_norm_sq()))


def build_unambiguous_povm(
    phi: PureState, b: BasisSet, ms: Sequence[ProductOperator], tol: float = TOL_NORM
) -> SeparablePOVM:
    """Product-state measurement from transformation certificates.

    ``ms[i]`` must take ``|Phi^*>`` to a multiple of the dual ``|~psi_i>``.
    Each is rescaled to ``tr(M_i^dagger M_i) = D'`` and turned into the
    product vector ``|phi_i> = (I (x) M_i)|Psi'>``, with ``|Psi'>`` the
    party-wise maximally entangled state on two copies of the resource
    system. ``<Phi (x) psi_j|phi_i> = <psi_j|~psi_i> / (mu_i sqrt D')``, so
    ``Pi_i = c |phi_i><phi_i|`` only fires on ``psi_i``; the uniform
    ``c = 1 / lambda_max(sum_i |phi_i><phi_i|)`` keeps the inconclusive
    remainder positive.
    """
    if len(ms) != len(b):
        raise ShapeError(f"{len(ms)} operators for {len(b)} basis states")
    duals = dual_basis(b)
    phi_c = conjugate(phi)
    dprime = phi.shape.dim
    shape = phi.shape.pair(b.shape)

    vecs, factors, mus = [], [], []
    for i, m in enumerate(ms):
        check = verify_transform(phi_c, duals[i], m, tol=tol)
        if not check.ok:
            raise PreconditionError(
                f"operator {i} does not take Phi* to dual {i} (residual {check.residual:.3e})"
            )
        m = _normalize_hs(m, dprime)
        mus.append(verify_transform(phi_c, duals[i], m, tol=tol).mu)
        # (I (x) M^(k))|Psi'_k> has amplitudes M^(k)[r, a] / sqrt(d'_k) at paired index (a, r)
        local = tuple(f.T.reshape(-1) / np.sqrt(f.shape[1]) for f in m.factors)
        v = local[0]
        for part in local[1:]:
            v = np.kron(v, part)
        vecs.append(v)
        factors.append(local)

    for i, v in enumerate(vecs):
        for j, psi in enumerate(b):
            got = np.vdot(tensor_product(phi, psi, pair=True).amps, v)
            want = inner(psi, duals[i]) / (mus[i] * np.sqrt(dprime))
            if abs(got - want) > tol:
                raise AssertionError(f"overlap <Phi psi_{j}|phi_{i}> off by {abs(got - want):.3e}")

    frame = sum(np.outer(v, v.conj()) for v in vecs)
    c = 1.0 / np.linalg.eigvalsh(frame).max()
    povm = complete_povm(shape, [c * np.outer(v, v.conj()) for v in vecs], factors, c)
    assert np.linalg.eigvalsh(povm.inconclusive).min() >= -TOL_PSD
    return povm


@dataclass(frozen=True)
class BellDiscrimination:
    """``probs[j, branch, i]``: outcome ``i`` on input ``psi_j`` in one tuple of
    teleportation outcomes."""

    probs: np.ndarray = field(repr=False)
    branches: int
    min_correct: float
    max_wrong: float
    passed: bool


def perfect_discrimination_bell(b: BasisSet, tol: float = TOL_NORM) -> BellDiscrimination:
    """Teleport every share to the last party through the Bell-type resource, then measure in ``b``.

    The resource pairs each of parties ``1..N-1`` with party N by a
    maximally entangled state. Party k Bell-measures its share of the
    unknown state with its half of that pair; party N applies the Weyl
    correction to the matching sub-register of its resource system. Every
    tuple of Bell outcomes is enumerated exactly on ``|psi_j> (x) |Phi_Bell>``.
    """
    from .resources import bell_resource

    if not b.orthonormal:
        raise POVMError("perfect discrimination needs an orthonormal basis")
    dims = b.shape.dims
    n = len(dims)
    resource = bell_resource(dims)
    # split the last party's register into one sub-register per partner
    res_t = resource.tensor().reshape(dims[:-1] + dims[:-1])
    combos = list(itertools.product(*[list(itertools.product(range(d), range(d))) for d in dims[:-1]]))
    expected_weight = 1.0 / float(np.prod(np.array(dims[:-1]) ** 2))
    bmat = b.matrix
    probs = np.zeros((len(b), len(combos), len(b)))
    for j, psi in enumerate(b):
        full = np.multiply.outer(psi.tensor(), res_t)
        for c, combo in enumerate(combos):
            t = full
            labels = [("s", k) for k in range(n)] + [("a", k) for k in range(n - 1)] + [("b", k) for k in range(n - 1)]
            for k in range(n - 1):
                si, ai, bi = labels.index(("s", k)), labels.index(("a", k)), labels.index(("b", k))
                t = bell_measure(t, si, ai, bi, combo[k])
                rest = [lab for lab in labels if lab not in (("s", k), ("a", k), ("b", k))]
                slot = sum(1 for idx, lab in enumerate(labels) if idx < si and lab != ("b", k))
                rest.insert(slot, ("r", k))
                labels = rest
            assert labels == [("r", k) for k in range(n - 1)] + [("s", n - 1)]
            v = t.reshape(-1)
            weight = float(np.vdot(v, v).real)
            if abs(weight - expected_weight) > tol:
                raise AssertionError(f"branch {combo} has weight {weight}, expected {expected_weight}")
            probs[j, c] = np.abs(bmat.conj().T @ v) ** 2 / weight
    correct = np.array([probs[j, :, j] for j in range(len(b))])
    wrong = probs.copy()
    for j in range(len(b)):
        wrong[j, :, j] = 0.0
    min_correct = float(correct.min())
    max_wrong = float(wrong.max())
    passed = abs(1.0 - min_correct) < tol and max_wrong < tol
    return BellDiscrimination(probs, len(combos), min_correct, max_wrong, passed)
