import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locc_resource.discrimination import (
    POVMError,
    SeparablePOVM,
    build_unambiguous_povm,
    check_unambiguous,
    complete_povm,
    perfect_discrimination_bell,
    projective_povm,
)
from locc_resource.dual import BasisSet, dual_basis, random_basis, random_orthonormal_basis
from locc_resource.resources import example3_resource
from locc_resource.tensor import (
    ShapeError,
    conjugate,
    make_state,
    random_state,
    tensor_product,
)
from locc_resource.transform import (
    PreconditionError,
    find_transform,
    protocol_from_measurement,
    verify_transform,
)

seeds = st.integers(0, 2**32 - 1)


def _certificates(phi, b, seed=0):
    duals = dual_basis(b)
    ms = []
    for i in range(len(b)):
        search = find_transform(conjugate(phi), duals[i], seed=seed)
        assert search.found
        ms.append(search.operator)
    return ms


@settings(max_examples=10)
@given(seeds)
def test_round_trip_on_nonorthogonal_two_qubit_basis(seed):
    rng = np.random.default_rng(seed)
    phi = random_state((2, 2), rng)
    b = random_basis((2, 2), rng)
    ms = _certificates(phi, b, seed)
    povm = build_unambiguous_povm(phi, b, ms)
    table = check_unambiguous(povm, phi, b)
    assert table.passed
    assert table.offdiag_max < 1e-10

    duals = dual_basis(b)
    branches = protocol_from_measurement(phi, b, povm)
    assert len(branches) == len(b) + 1
    for br, e, c in zip(branches, table.eps, duals.overlaps):
        assert br.fidelity > 1 - 1e-9
        assert br.probability == pytest.approx(e / (b.dim * c**2), rel=1e-9, abs=1e-14)
        assert br.probability >= e / b.dim - 1e-14
    assert sum(br.probability for br in branches) == pytest.approx(1.0)


def test_success_weights_follow_the_rescaled_certificates(rng):
    phi = random_state((2, 2), rng)
    b = random_basis((2, 2), rng)
    ms = _certificates(phi, b)
    povm = build_unambiguous_povm(phi, b, ms)
    table = check_unambiguous(povm, phi, b)
    duals = dual_basis(b)
    dprime = phi.shape.dim
    for i, m in enumerate(ms):
        m = m.scaled(np.sqrt(dprime / m.hs_norm_sq()))
        mu = verify_transform(conjugate(phi), duals[i], m).mu
        expected = povm.scale * duals.overlaps[i] ** 2 / (abs(mu) ** 2 * dprime)
        assert table.eps[i] == pytest.approx(expected, rel=1e-9)


def test_povm_elements_are_product_projectors(rng):
    phi = random_state((2, 2), rng)
    b = random_basis((2, 2), rng)
    povm = build_unambiguous_povm(phi, b, _certificates(phi, b))
    for e, local in zip(povm.conclusive, povm.factors):
        v = np.kron(local[0], local[1])
        assert np.allclose(e, povm.scale * np.outer(v, v.conj()))
    assert np.linalg.eigvalsh(povm.inconclusive).min() > -1e-10
    assert np.allclose(sum(povm.elements), np.eye(16))


def test_relabelled_measurement_is_ambiguous(rng):
    phi = random_state((2, 2), rng)
    b = random_basis((2, 2), rng)
    povm = build_unambiguous_povm(phi, b, _certificates(phi, b)).relabel([1, 0, 2, 3])
    assert not check_unambiguous(povm, phi, b).passed
    with pytest.raises(PreconditionError):
        protocol_from_measurement(phi, b, povm)


def test_build_rejects_bad_certificates(rng):
    phi = random_state((2, 2), rng)
    b = random_basis((2, 2), rng)
    ms = _certificates(phi, b)
    with pytest.raises(PreconditionError):
        build_unambiguous_povm(phi, b, [ms[1], ms[0], ms[2], ms[3]])
    with pytest.raises(ShapeError):
        build_unambiguous_povm(phi, b, ms[:3])


def test_projective_measurement_gives_uniform_probability(rng):
    phi = example3_resource()
    b = random_orthonormal_basis((2, 2, 2), rng)
    branches = protocol_from_measurement(phi, b, projective_povm(phi, b))
    for br in branches[:-1]:
        assert br.probability == pytest.approx(1 / 8, abs=1e-12)
        assert br.fidelity > 1 - 1e-9
    assert branches[-1].probability == pytest.approx(0.0, abs=1e-12)


def test_projective_needs_orthonormal_basis(rng):
    with pytest.raises(POVMError):
        projective_povm(random_state((2, 2), rng), random_basis((2, 2), rng))


def test_povm_validation():
    with pytest.raises(POVMError):
        SeparablePOVM((2,), (np.eye(2) / 2, np.eye(2) / 4))
    with pytest.raises(POVMError):
        SeparablePOVM((2,), (np.diag([1.5, 0.5]), np.diag([-0.5, 0.5])))
    with pytest.raises(POVMError):
        SeparablePOVM((2,), (np.array([[0.5, 0.1], [0.0, 0.5]]), np.array([[0.5, -0.1], [0.0, 0.5]])))
    with pytest.raises(ShapeError):
        SeparablePOVM((2,), (np.eye(3), np.zeros((3, 3))))
    povm = complete_povm((2,), [np.diag([1.0, 0.0])])
    assert np.allclose(povm.inconclusive, np.diag([0.0, 1.0]))


def test_check_needs_matching_sizes(rng):
    phi = random_state((2, 2), rng)
    b = random_orthonormal_basis((2, 2), rng)
    povm = projective_povm(phi, b)
    with pytest.raises(ShapeError):
        check_unambiguous(povm, random_state((3, 2), rng), b)


@pytest.mark.parametrize("dims", [(2, 2), (3, 2), (2, 3), (2, 2, 2)])
def test_bell_resource_discriminates_any_orthonormal_basis(dims, rng):
    res = perfect_discrimination_bell(random_orthonormal_basis(dims, rng))
    assert res.passed
    d_rest = int(np.prod(dims[:-1]))
    assert res.branches == d_rest**2
    assert res.min_correct == pytest.approx(1.0, abs=1e-12)


def test_bell_discrimination_with_product_basis():
    basis = BasisSet(tuple(make_state(np.eye(8)[i], (2, 2, 2)) for i in range(8)))
    assert perfect_discrimination_bell(basis).passed


def test_bell_discrimination_needs_orthonormal_basis(rng):
    with pytest.raises(POVMError):
        perfect_discrimination_bell(random_basis((2, 2), rng))


def test_paired_vectors_match_povm_shape(rng):
    phi = random_state((3, 2), rng)
    b = random_orthonormal_basis((2, 2), rng)
    v = tensor_product(phi, b[0], pair=True)
    assert v.dims == (6, 4)
    assert projective_povm(phi, b).shape.dims == (6, 4)

