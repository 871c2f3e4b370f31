import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from locc_resource import io
from locc_resource.discrimination import projective_povm
from locc_resource.dual import random_orthonormal_basis
from locc_resource.resources import example3_w_operator, ghz_state
from locc_resource.tensor import random_state

seeds = st.integers(0, 2**32 - 1)


@given(seeds)
def test_state_round_trip_is_exact(seed):
    s = random_state((3, 2), np.random.default_rng(seed), "psi")
    back = io.state_from_dict(io.loads(io.dumps(io.state_to_dict(s))), normalize=False)
    assert back.label == "psi"
    assert np.array_equal(back.amps, s.amps)


def test_state_document_layout():
    doc = io.state_to_dict(ghz_state(3, 2))
    assert doc["shape"] == [2, 2, 2]
    assert doc["amps"][0] == [pytest.approx(2**-0.5), 0.0]
    assert doc["amps"][7] == [pytest.approx(2**-0.5), 0.0]
    assert len(doc["amps"]) == 8


def test_operator_round_trip():
    op = example3_w_operator()
    back = io.operator_from_dict(io.loads(io.dumps(io.operator_to_dict(op))))
    for a, b in zip(op.factors, back.factors):
        assert np.array_equal(a, b)


def test_povm_round_trip(rng):
    phi = random_state((2, 2), rng)
    b = random_orthonormal_basis((2, 2), rng)
    povm = projective_povm(phi, b)
    back = io.povm_from_dict(io.loads(io.dumps(io.povm_to_dict(povm))))
    assert len(back.elements) == len(povm.elements)
    for a, c in zip(povm.elements, back.elements):
        assert np.array_equal(a, c)


def test_basis_document_holds_several_states(rng):
    b = random_orthonormal_basis((2, 2), rng)
    states = io.states_from_data(io.loads(io.dumps(io.basis_to_dict(b))))
    assert len(states) == 4
    assert io.states_from_data(io.state_to_dict(b[0]))[0].dims == (2, 2)


@pytest.mark.parametrize("doc", [
    {"shape": [2, 2], "amps": [[1, 0]] * 3},
    {"shape": [2, 0], "amps": []},
    {"shape": "2x2", "amps": [[1, 0]] * 4},
    {"amps": [[1, 0]]},
    {"shape": [2], "amps": [[0, 0], [0, 0]]},
    {"shape": [2], "amps": [1, 0]},
    {"shape": [2], "amps": [["a", 0], [0, 0]]},
])
def test_malformed_states_are_rejected(doc):
    with pytest.raises(io.FormatError):
        io.state_from_dict(doc)


def test_nonfinite_and_invalid_json_are_rejected():
    with pytest.raises(io.FormatError):
        io.loads('{"shape": [1], "amps": [[NaN, 0]]}')
    with pytest.raises(io.FormatError):
        io.loads('{"shape": [1]')


def test_malformed_operators_and_povms():
    with pytest.raises(io.FormatError):
        io.operator_from_dict({"factors": []})
    with pytest.raises(io.FormatError):
        io.operator_from_dict({"factors": [[[1, 0], [0, 0]]]})
    with pytest.raises(io.FormatError):
        io.povm_from_dict({"shape": [2], "elements": [[[[1, 0]]]]})


def test_read_missing_file(tmp_path):
    with pytest.raises(io.FormatError):
        io.read_state(tmp_path / "missing.json")


def test_write_and_read(tmp_path):
    s = ghz_state(3, 2)
    io.write_json(tmp_path / "s.json", io.state_to_dict(s))
    assert np.allclose(io.read_state(tmp_path / "s.json").amps, s.amps)
    assert json.loads((tmp_path / "s.json").read_text())["label"] == "GHZ3^2"
