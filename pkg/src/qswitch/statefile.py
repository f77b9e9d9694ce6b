"""JSON interchange for states and unitaries.

A complex number is ``[re, im]``, a vector is a list of complex numbers and a
matrix is a list of rows. A state file looks like::

    {"local_dim": 2,
     "states": [{"vector": [[1, 0], [0, 0]]},
                {"matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}]}

A unitary file holds ``{"a": matrix, "b": matrix}`` and optionally
``"psi": vector``. Schemas ship in ``qswitch/schemas``.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from qswitch.errors import ValidationError
from qswitch.invariants import StateTuple
from qswitch.linalg import DensityMatrix, PureState, UnitaryMatrix


class StateFileError(ValidationError):
    """Malformed interchange document; the message names the offending field."""


def load_schema(name):
    """Parsed JSON schema shipped with the package ("states", "unitaries" or "report")."""
    text = resources.files("qswitch").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def _parse_json(text, source):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _complex(x, where):
    if (
        not isinstance(x, list)
        or len(x) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)
    ):
        raise StateFileError(f"{where}: expected a complex number [re, im], got {json.dumps(x)[:40]}")
    return complex(x[0], x[1])


def parse_vector(data, where="vector"):
    if not isinstance(data, list) or not data:
        raise StateFileError(f"{where}: expected a non-empty list of [re, im] pairs")
    return np.array([_complex(x, f"{where}[{i}]") for i, x in enumerate(data)], dtype=np.complex128)


def parse_matrix(data, where="matrix"):
    if not isinstance(data, list) or not data:
        raise StateFileError(f"{where}: expected a non-empty list of rows")
    rows = [parse_vector(r, f"{where}[{i}]") for i, r in enumerate(data)]
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise StateFileError(f"{where}: rows have different lengths {sorted(width)}")
    return np.vstack(rows)


def _with_context(where, build):
    try:
        return build()
    except StateFileError:
        raise
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def states_from_dict(doc, source="<document>") -> StateTuple:
    if not isinstance(doc, dict):
        raise StateFileError(f"{source}: top level must be an object")
    if "states" not in doc:
        raise StateFileError(f"{source}: missing field 'states'")
    entries = doc["states"]
    if not isinstance(entries, list) or not entries:
        raise StateFileError(f"{source}: 'states' must be a non-empty list")
    local_dim = doc.get("local_dim")
    if local_dim is not None and (not isinstance(local_dim, int) or local_dim < 1):
        raise StateFileError(f"{source}: 'local_dim' must be a positive integer")
    states = []
    for i, entry in enumerate(entries):
        where = f"{source}: states[{i}]"
        if not isinstance(entry, dict) or len(set(entry) & {"vector", "matrix"}) != 1:
            raise StateFileError(f"{where}: expected exactly one of 'vector' or 'matrix'")
        if "vector" in entry:
            v = parse_vector(entry["vector"], f"{where}.vector")
            state = _with_context(where, lambda v=v: PureState(v))
        else:
            m = parse_matrix(entry["matrix"], f"{where}.matrix")
            state = _with_context(where, lambda m=m: DensityMatrix(m))
        if local_dim is not None and state.dim != local_dim:
            raise ValidationError(f"{where}: state {i + 1} has dimension {state.dim}, local_dim is {local_dim}")
        states.append(state)
    return StateTuple(tuple(states))


def load_states(path) -> StateTuple:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise StateFileError(f"{path}: {exc.strerror}") from None
    return states_from_dict(_parse_json(text, str(path)), str(path))


def unitaries_from_dict(doc, source="<document>"):
    """(A, B, psi or None) from a unitary document."""
    if not isinstance(doc, dict):
        raise StateFileError(f"{source}: top level must be an object")
    out = []
    for key in ("a", "b"):
        if key not in doc:
            raise StateFileError(f"{source}: missing field '{key}'")
        m = parse_matrix(doc[key], f"{source}: {key}")
        out.append(_with_context(f"{source}: {key}", lambda m=m: UnitaryMatrix(m)))
    psi = None
    if "psi" in doc:
        v = parse_vector(doc["psi"], f"{source}: psi")
        psi = _with_context(f"{source}: psi", lambda: PureState(v))
    return out[0], out[1], psi


def load_unitaries(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise StateFileError(f"{path}: {exc.strerror}") from None
    return unitaries_from_dict(_parse_json(text, str(path)), str(path))


def complex_json(z):
    z = complex(z)
    return [z.real, z.imag]


def vector_json(v):
    return [complex_json(x) for x in np.asarray(v).reshape(-1)]


def matrix_json(m):
    return [vector_json(row) for row in np.asarray(m)]


def states_to_dict(states):
    t = states if isinstance(states, StateTuple) else StateTuple(tuple(states))
    entries = []
    for s in t.states:
        if isinstance(s, PureState):
            entries.append({"vector": vector_json(s.amplitudes)})
        else:
            entries.append({"matrix": matrix_json(s.matrix)})
    return {"local_dim": t.local_dim, "states": entries}


def dump_states(states, path):
    Path(path).write_text(json.dumps(states_to_dict(states), indent=1) + "\n")
