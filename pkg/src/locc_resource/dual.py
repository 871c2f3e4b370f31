"""Biorthogonal (dual) bases of a complete, linearly independent basis."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .constants import MAX_CONDITION, TOL_NORM, TOL_RANK
from .tensor import PureState, ShapeError, SystemShape, make_state, max_entangled


class RankDeficientBasis(ValueError):
    """The basis states are linearly dependent (or too close to it)."""


@dataclass(frozen=True, eq=False)
class BasisSet:
    """D states spanning a D-dimensional system, not necessarily orthogonal."""

    states: tuple[PureState, ...]

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise ShapeError("empty basis")
        shape = states[0].shape
        if any(s.shape != shape for s in states):
            raise ShapeError("basis states must share one shape")
        object.__setattr__(self, "states", states)

    @property
    def shape(self) -> SystemShape:
        return self.states[0].shape

    @property
    def dim(self) -> int:
        return self.shape.dim

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i):
        return self.states[i]

    @cached_property
    def matrix(self) -> np.ndarray:
        """Amplitude matrix with column j holding ``|psi_j>``."""
        m = np.column_stack([s.amps for s in self.states])
        m.setflags(write=False)
        return m

    @cached_property
    def gram(self) -> np.ndarray:
        g = self.matrix.conj().T @ self.matrix
        g.setflags(write=False)
        return g

    @property
    def complete(self) -> bool:
        return len(self.states) == self.dim

    @cached_property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)

    @property
    def linearly_independent(self) -> bool:
        sv = self.singular_values
        return len(self.states) <= self.dim and sv[-1] > TOL_RANK * sv[0]

    @property
    def orthonormal(self) -> bool:
        return bool(np.linalg.norm(self.gram - np.eye(len(self))) < TOL_NORM)

    @property
    def condition(self) -> float:
        sv = self.singular_values
        return float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")


@dataclass(frozen=True, eq=False)
class DualBasis:
    """Unit vectors ``|~psi_i>`` with ``<~psi_i|psi_j> = 0`` for ``i != j``.

    ``overlaps[i] = <~psi_i|psi_i>`` is real and positive by construction.
    """

    duals: tuple[PureState, ...]
    overlaps: np.ndarray
    condition: float

    def __len__(self):
        return len(self.duals)

    def __getitem__(self, i):
        return self.duals[i]

    @property
    def matrix(self) -> np.ndarray:
        return np.column_stack([s.amps for s in self.duals])


def dual_basis(b: BasisSet, max_condition: float = MAX_CONDITION) -> DualBasis:
    """Dual basis by one matrix inversion.

    With ``B`` the matrix whose columns are the ``|psi_j>``, row ``i`` of
    ``B^{-1}`` annihilates every ``|psi_j>`` with ``j != i``; its conjugate,
    normalized, is ``|~psi_i>``. Because that row has unit overlap with
    ``|psi_i>``, the normalized overlap ``1/||row_i||`` comes out real and
    positive with no further phase fixing.
    """
    if not b.complete:
        raise ShapeError(f"basis has {len(b)} states for dimension {b.dim}")
    cond = b.condition
    if not b.linearly_independent or cond > max_condition:
        raise RankDeficientBasis(f"basis is rank deficient (condition number {cond:.3e})")
    inv = np.linalg.inv(b.matrix)
    row_norms = np.linalg.norm(inv, axis=1)
    duals = tuple(
        PureState(b.shape, inv[i].conj() / row_norms[i], f"dual_{i}") for i in range(b.dim)
    )
    overlaps = 1.0 / row_norms
    overlaps.setflags(write=False)
    return DualBasis(duals, overlaps, cond)


def identity_residual(b: BasisSet, d: DualBasis) -> float:
    """``|| sum_i |psi_i><~psi_i| / <~psi_i|psi_i> - I ||_F``."""
    resolved = (b.matrix / d.overlaps) @ d.matrix.conj().T
    return float(np.linalg.norm(resolved - np.eye(b.dim)))


def mes_residual(b: BasisSet, d: DualBasis) -> float:
    """Distance between ``(1/sqrt D) sum_i |psi_i^*>|~psi_i> / <~psi_i|psi_i>``
    and the standard maximally entangled state on two copies of the system."""
    dim = b.dim
    rhs = sum(
        np.kron(b.states[i].amps.conj(), d.duals[i].amps) / d.overlaps[i] for i in range(dim)
    ) / np.sqrt(dim)
    return float(np.linalg.norm(rhs - max_entangled(dim).amps))


# names used by the rest of the package and the CLI
check_identity_decomposition = identity_residual
check_mes_decomposition = mes_residual


def basis_from_states(states: Sequence[PureState]) -> BasisSet:
    return BasisSet(tuple(states))


def random_basis(shape, rng: np.random.Generator) -> BasisSet:
    """Generic (non-orthogonal) basis with Gaussian amplitudes."""
    shape = shape if isinstance(shape, SystemShape) else SystemShape(tuple(shape))
    d = shape.dim
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return BasisSet(tuple(make_state(z[:, j], shape, f"psi_{j}") for j in range(d)))


def random_orthonormal_basis(shape, rng: np.random.Generator) -> BasisSet:
    from .tensor import random_unitary

    shape = shape if isinstance(shape, SystemShape) else SystemShape(tuple(shape))
    u = random_unitary(shape.dim, rng)
    return BasisSet(tuple(make_state(u[:, j], shape, f"psi_{j}") for j in range(shape.dim)))


def complete_orthonormal(states: Sequence[PureState], rng: np.random.Generator) -> BasisSet:
    """Extend orthonormal ``states`` to a full orthonormal basis with random completions."""
    shape = states[0].shape
    d = shape.dim
    given = np.column_stack([s.amps for s in states])
    if np.linalg.norm(given.conj().T @ given - np.eye(len(states))) > TOL_NORM:
        raise ValueError("seed states must be orthonormal")
    z = rng.standard_normal((d, d - len(states))) + 1j * rng.standard_normal((d, d - len(states)))
    q, _ = np.linalg.qr(np.column_stack([given, z]))
    # QR may flip phases of the given columns; keep the caller's vectors verbatim
    extra = [make_state(q[:, j], shape, f"psi_{j}") for j in range(len(states), d)]
    return BasisSet(tuple(states) + tuple(extra))
