import numpy as np
import pytest
from hypothesis import given, strategies as st

from locc_resource.tensor import (
    ProductOperator,
    PureState,
    ShapeError,
    SystemShape,
    apply_product,
    basis_state,
    bipartitions,
    conjugate,
    cut_entropy,
    fidelity,
    flattening_rank_bound,
    inner,
    make_state,
    max_entangled,
    paired_max_entangled,
    pairing_permutation,
    partial_trace,
    random_local_unitary,
    random_state,
    schmidt_rank_bipartite,
    tensor_product,
)

shapes = st.sampled_from([(2, 2), (2, 3), (3, 2), (2, 2, 2), (3, 2, 2), (2, 2, 2, 2)])
seeds = st.integers(0, 2**32 - 1)


def test_flat_index_puts_party_one_first():
    s = basis_state((1, 0, 1), (2, 3, 2))
    # 1*(3*2) + 0*2 + 1
    assert np.flatnonzero(s.amps).tolist() == [7]
    assert s.tensor()[1, 0, 1] == 1


def test_make_state_normalizes_and_validates():
    s = make_state([3, 4j], (2,))
    assert np.allclose(s.amps, [0.6, 0.8j])
    with pytest.raises(ShapeError):
        make_state([1, 0, 0], (2, 2))
    with pytest.raises(ValueError):
        make_state([0, 0], (2,))
    with pytest.raises(ValueError):
        PureState(SystemShape((2,)), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        make_state([np.nan, 1], (2,))


def test_shape_rejects_bad_dims():
    with pytest.raises(ShapeError):
        SystemShape(())
    with pytest.raises(ShapeError):
        SystemShape((2, 0))


def test_max_entangled_amplitudes():
    m = max_entangled(3)
    assert m.dims == (3, 3)
    assert np.allclose(m.amps[[0, 4, 8]], 1 / np.sqrt(3))
    assert np.count_nonzero(m.amps) == 3


def test_paired_product_groups_parties():
    a = basis_state((1, 0), (2, 3))
    b = basis_state((0, 2), (3, 4))
    p = tensor_product(a, b, pair=True)
    assert p.dims == (6, 12)
    # party 1: (1, 0) -> 3, party 2: (0, 2) -> 2
    assert p.tensor()[3, 2] == 1


@given(seeds)
def test_pairing_permutation_matches_paired_product(seed):
    rng = np.random.default_rng(seed)
    a = random_state((2, 3), rng)
    b = random_state((3, 2), rng)
    plain = tensor_product(a, b).amps
    paired = tensor_product(a, b, pair=True).amps
    assert np.allclose(plain[pairing_permutation((2, 3), (3, 2))], paired)


def test_paired_max_entangled_is_product_of_pairs():
    s = paired_max_entangled((2, 3))
    expected = tensor_product(max_entangled(2), max_entangled(3))
    # plain order (a1, b1, a2, b2) is already grouped per party
    assert np.allclose(s.amps, expected.amps)
    assert s.dims == (4, 9)


def test_inner_and_fidelity():
    a = make_state([1, 1], (2,))
    b = make_state([1, -1], (2,))
    assert abs(inner(a, b)) < 1e-15
    assert fidelity(a, a) == pytest.approx(1.0)
    assert inner(make_state([1, 1j], (2,)), make_state([1, 0], (2,))) == pytest.approx(1 / np.sqrt(2))
    with pytest.raises(ShapeError):
        inner(a, make_state([1, 0, 0], (3,)))


def test_partial_trace_of_ghz():
    ghz = make_state([1, 0, 0, 0, 0, 0, 0, 1], (2, 2, 2))
    rho_a = partial_trace(ghz, [0])
    assert np.allclose(rho_a.matrix, np.eye(2) / 2)
    rho_ab = partial_trace(ghz, [0, 1])
    assert np.allclose(np.diag(rho_ab.matrix).real, [0.5, 0, 0, 0.5])
    assert partial_trace(ghz, []).matrix.shape == (1, 1)
    with pytest.raises(ShapeError):
        partial_trace(ghz, [3])
    with pytest.raises(ShapeError):
        partial_trace(ghz, [0, 0])


@given(shapes, seeds)
def test_partial_trace_is_psd_with_unit_trace(dims, seed):
    s = random_state(dims, np.random.default_rng(seed))
    for cut in bipartitions(len(dims)):
        rho = partial_trace(s, cut)
        assert rho.is_psd()
        assert rho.trace == pytest.approx(1.0, abs=1e-12)


@given(shapes, seeds)
def test_entropy_is_symmetric_across_the_cut(dims, seed):
    s = random_state(dims, np.random.default_rng(seed))
    n = len(dims)
    for cut in bipartitions(n):
        rest = [k for k in range(n) if k not in cut]
        assert cut_entropy(s, cut) == pytest.approx(cut_entropy(s, rest), abs=1e-9)


@given(shapes, seeds)
def test_local_unitaries_preserve_cut_spectra(dims, seed):
    rng = np.random.default_rng(seed)
    s = random_state(dims, rng)
    u = random_local_unitary(dims, rng)
    t, nrm = apply_product(u, s)
    assert nrm == pytest.approx(1.0)
    for cut in bipartitions(len(dims)):
        assert cut_entropy(t, cut) == pytest.approx(cut_entropy(s, cut), abs=1e-9)


def test_entropy_of_example_resource_matches_binary_entropy():
    # (|000> + |110> + |201>)/sqrt 3: party C is |0> w.p. 2/3
    s = make_state([1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0], (3, 2, 2))
    h = -(2 / 3) * np.log2(2 / 3) - (1 / 3) * np.log2(1 / 3)
    assert cut_entropy(s, [0, 1]) == pytest.approx(h, abs=1e-12)
    assert h == pytest.approx(0.9182958, abs=1e-7)


def test_entropy_rejects_trivial_cuts():
    s = make_state(np.ones(4), (2, 2))
    with pytest.raises(ShapeError):
        cut_entropy(s, [])
    with pytest.raises(ShapeError):
        cut_entropy(s, [0, 1])


def test_schmidt_rank_and_flattening_bound():
    prod = basis_state((0, 1, 0), (2, 2, 2))
    assert flattening_rank_bound(prod) == 1
    ex3 = make_state([1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0], (3, 2, 2))
    assert schmidt_rank_bipartite(ex3, [0]) == 3
    assert schmidt_rank_bipartite(ex3, [2]) == 2
    assert flattening_rank_bound(ex3) == 3


def test_bipartitions_cover_each_cut_once():
    assert bipartitions(2) == [(0,)]
    assert sorted(bipartitions(3)) == [(0,), (0, 1), (0, 2)]
    assert len(bipartitions(4)) == 2 ** 3 - 1


def test_product_operator_shapes_and_norms():
    op = ProductOperator((np.ones((2, 3)), np.eye(2)))
    assert op.in_shape.dims == (3, 2)
    assert op.out_shape.dims == (2, 2)
    assert np.allclose(op.matrix(), np.kron(np.ones((2, 3)), np.eye(2)))
    assert op.hs_norm_sq() == pytest.approx(np.linalg.norm(op.matrix()) ** 2)
    with pytest.raises(ShapeError):
        apply_product(op, basis_state((0, 0), (2, 2)))


@given(seeds)
def test_apply_product_matches_kronecker_matrix(seed):
    rng = np.random.default_rng(seed)
    s = random_state((2, 3, 2), rng)
    factors = tuple(rng.standard_normal((d_out, d)) + 1j * rng.standard_normal((d_out, d))
                    for d_out, d in [(3, 2), (2, 3), (2, 2)])
    op = ProductOperator(factors)
    image, nrm = apply_product(op, s)
    assert np.allclose(image.amps, op.matrix() @ s.amps)
    assert nrm == pytest.approx(np.linalg.norm(op.matrix() @ s.amps))


def test_conjugate_is_entrywise():
    s = make_state([1, 1j], (2,))
    assert np.allclose(conjugate(s).amps, s.amps.conj())
