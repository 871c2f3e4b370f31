"""JSON file formats for states, bases, product operators and POVMs.

Complex numbers are ``[re, im]`` pairs. Flat amplitude and matrix indices
follow the package convention: party 1 most significant, row-major.

State::

    {"shape": [2, 2, 2], "amps": [[0.7071, 0], ..., [0.7071, 0]], "label": "GHZ"}

Basis (several states): ``{"states": [<state>, ...]}``.

Product operator: ``{"factors": [<matrix>, ...], "label": "..."}`` where a
matrix is a list of rows of ``[re, im]`` pairs.

POVM: ``{"shape": [...], "elements": [<matrix>, ...], "factors": [[<vector>, ...] | null, ...], "scale": c}``
with the inconclusive element last.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .discrimination import SeparablePOVM
from .dual import BasisSet
from .tensor import ProductOperator, PureState, SystemShape


class FormatError(ValueError):
    """Malformed or inconsistent file contents."""


def _reject_constant(name):
    raise FormatError(f"non-finite number {name} in input")


def loads(text: str) -> Any:
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def _pair(z: complex) -> list[float]:
    # 17 significant digits round-trip exactly
    return [float(z.real), float(z.imag)]


def _complex_list(data, what: str) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what}: expected [re, im] pairs") from exc
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise FormatError(f"{what}: expected [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise FormatError(f"{what}: non-finite entry")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_vector(v: np.ndarray) -> list[list[float]]:
    return [_pair(z) for z in np.asarray(v).reshape(-1)]


def encode_matrix(m: np.ndarray) -> list[list[list[float]]]:
    return [[_pair(z) for z in row] for row in np.asarray(m)]


def state_to_dict(s: PureState) -> dict:
    out = {"shape": list(s.dims), "amps": encode_vector(s.amps)}
    if s.label:
        out["label"] = s.label
    return out


def state_from_dict(data: dict, normalize: bool = True) -> PureState:
    if not isinstance(data, dict) or "shape" not in data or "amps" not in data:
        raise FormatError("state needs 'shape' and 'amps'")
    shape = data["shape"]
    if not isinstance(shape, list) or not all(isinstance(d, int) and d >= 1 for d in shape):
        raise FormatError("'shape' must be a list of positive integers")
    amps = _complex_list(data["amps"], "amps")
    if amps.ndim != 1:
        raise FormatError("'amps' must be a flat list")
    if amps.size != math.prod(shape):
        raise FormatError(f"{amps.size} amplitudes for shape {shape} (need {math.prod(shape)})")
    nrm = np.linalg.norm(amps)
    if nrm == 0:
        raise FormatError("zero state")
    if normalize:
        amps = amps / nrm
    return PureState(SystemShape(tuple(shape)), amps, str(data.get("label", "")), normalized=normalize)


def operator_to_dict(op: ProductOperator, label: str = "") -> dict:
    out = {"factors": [encode_matrix(f) for f in op.factors]}
    if label:
        out["label"] = label
    return out


def operator_from_dict(data: dict) -> ProductOperator:
    if not isinstance(data, dict) or "factors" not in data:
        raise FormatError("operator needs 'factors'")
    factors = []
    for k, f in enumerate(data["factors"]):
        m = _complex_list(f, f"factor {k}")
        if m.ndim != 2:
            raise FormatError(f"factor {k} must be a matrix")
        factors.append(m)
    if not factors:
        raise FormatError("operator has no factors")
    return ProductOperator(tuple(factors))


def povm_to_dict(povm: SeparablePOVM) -> dict:
    out = {
        "shape": list(povm.shape.dims),
        "elements": [encode_matrix(e) for e in povm.elements],
        "scale": float(povm.scale),
    }
    if povm.factors is not None:
        out["factors"] = [None if f is None else [encode_vector(v) for v in f] for f in povm.factors]
    return out


def povm_from_dict(data: dict) -> SeparablePOVM:
    if not isinstance(data, dict) or "shape" not in data or "elements" not in data:
        raise FormatError("POVM needs 'shape' and 'elements'")
    shape = SystemShape(tuple(data["shape"]))
    elements = []
    for i, e in enumerate(data["elements"]):
        m = _complex_list(e, f"element {i}")
        if m.shape != (shape.dim, shape.dim):
            raise FormatError(f"element {i} has size {m.shape}, shape needs {(shape.dim, shape.dim)}")
        elements.append(m)
    factors = None
    if data.get("factors") is not None:
        if len(data["factors"]) != len(elements):
            raise FormatError("one factor entry (or null) per element required")
        factors = tuple(
            None if f is None else tuple(_complex_list(v, f"factor of element {i}") for v in f)
            for i, f in enumerate(data["factors"])
        )
    return SeparablePOVM(shape, tuple(elements), factors, float(data.get("scale", 1.0)))


def basis_to_dict(b: BasisSet) -> dict:
    return {"states": [state_to_dict(s) for s in b]}


def states_from_data(data) -> list[PureState]:
    """A single state or a ``{"states": [...]}`` document."""
    if isinstance(data, dict) and "states" in data:
        return [state_from_dict(s) for s in data["states"]]
    return [state_from_dict(data)]


def read_json(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    return loads(text)


def dumps(data) -> str:
    return json.dumps(data, indent=1, allow_nan=False) + "\n"


def read_state(path) -> PureState:
    return state_from_dict(read_json(path))


def read_states(paths) -> list[PureState]:
    out = []
    for p in paths:
        out.extend(states_from_data(read_json(p)))
    return out


def read_operator(path) -> ProductOperator:
    return operator_from_dict(read_json(path))


def read_povm(path) -> SeparablePOVM:
    return povm_from_dict(read_json(path))


def write_json(path, data) -> None:
    Path(path).write_text(dumps(data))
