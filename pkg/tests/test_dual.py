import numpy as np
import pytest
from hypothesis import given, strategies as st

from locc_resource.dual import (
    BasisSet,
    RankDeficientBasis,
    check_identity_decomposition,
    check_mes_decomposition,
    complete_orthonormal,
    dual_basis,
    random_basis,
    random_orthonormal_basis,
)
from locc_resource.tensor import ShapeError, inner, make_state, random_state

seeds = st.integers(0, 2**32 - 1)
shapes = st.sampled_from([(2,), (3,), (2, 2), (3, 2), (2, 2, 2)])


def test_dual_of_zero_and_plus_by_hand():
    # B = [[1, 1/sqrt2], [0, 1/sqrt2]], B^-1 = [[1, -1], [0, sqrt2]]
    zero = make_state([1, 0], (2,))
    plus = make_state([1, 1], (2,))
    d = dual_basis(BasisSet((zero, plus)))
    minus = np.array([1, -1]) / np.sqrt(2)
    assert abs(abs(np.vdot(d[0].amps, minus)) - 1) < 1e-14
    assert abs(abs(d[1].amps[1]) - 1) < 1e-14
    assert np.allclose(d.overlaps, [1 / np.sqrt(2), 1 / np.sqrt(2)])


@given(shapes, seeds)
def test_biorthogonality(dims, seed):
    b = random_basis(dims, np.random.default_rng(seed))
    d = dual_basis(b)
    overlaps = d.matrix.conj().T @ b.matrix
    assert np.allclose(overlaps, np.diag(d.overlaps), atol=1e-9)
    assert np.all(d.overlaps > 0)
    assert np.allclose(np.linalg.norm(d.matrix, axis=0), 1)


@given(shapes, seeds)
def test_identity_and_mes_decompositions(dims, seed):
    b = random_basis(dims, np.random.default_rng(seed))
    d = dual_basis(b)
    assert check_identity_decomposition(b, d) < 1e-10 * b.dim
    assert check_mes_decomposition(b, d) < 1e-10 * b.dim


@given(shapes, seeds)
def test_orthonormal_basis_is_self_dual(dims, seed):
    b = random_orthonormal_basis(dims, np.random.default_rng(seed))
    d = dual_basis(b)
    assert np.allclose(d.overlaps, 1)
    for psi, dual in zip(b, d.duals):
        assert abs(inner(dual, psi) - 1) < 1e-10


@given(seeds)
def test_dual_unique_up_to_phase(seed):
    """A rephased basis state leaves every dual unchanged up to phase."""
    rng = np.random.default_rng(seed)
    b = random_basis((2, 2), rng)
    phases = np.exp(2j * np.pi * rng.random(4))
    b2 = BasisSet(tuple(make_state(s.amps * p, s.shape) for s, p in zip(b, phases)))
    d1, d2 = dual_basis(b), dual_basis(b2)
    for u, v in zip(d1.duals, d2.duals):
        assert abs(abs(inner(u, v)) - 1) < 1e-9
    assert np.allclose(d1.overlaps, d2.overlaps)


def test_rank_deficient_basis_is_refused():
    s = make_state([1, 0, 0, 0], (2, 2))
    t = make_state([0, 1, 0, 0], (2, 2))
    u = make_state([1, 1, 0, 0], (2, 2))
    v = make_state([0, 0, 1, 0], (2, 2))
    with pytest.raises(RankDeficientBasis):
        dual_basis(BasisSet((s, t, u, v)))


def test_near_singular_basis_is_refused():
    s = make_state([1, 0], (2,))
    t = make_state([1, 1e-13], (2,))
    with pytest.raises(RankDeficientBasis):
        dual_basis(BasisSet((s, t)))


def test_incomplete_or_mixed_basis_is_refused(rng):
    with pytest.raises(ShapeError):
        dual_basis(BasisSet((make_state([1, 0, 0, 0], (2, 2)),)))
    with pytest.raises(ShapeError):
        BasisSet((random_state((2, 2), rng), random_state((4,), rng)))
    with pytest.raises(ShapeError):
        BasisSet(())


def test_completion_keeps_given_states(rng):
    w = make_state([0, 1, 1, 0, 1, 0, 0, 0], (2, 2, 2))
    ghz = make_state([1, 0, 0, 0, 0, 0, 0, 1], (2, 2, 2))
    b = complete_orthonormal([w, ghz], rng)
    assert len(b) == 8 and b.orthonormal
    assert np.array_equal(b[0].amps, w.amps)
    assert np.array_equal(b[1].amps, ghz.amps)
    with pytest.raises(ValueError):
        complete_orthonormal([w, make_state([0, 1, 0, 0, 0, 0, 0, 0], (2, 2, 2))], rng)
