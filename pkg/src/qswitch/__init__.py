"""Bargmann invariants and their measurement with the quantum switch."""
from qswitch.errors import QSwitchError, SizeCapError, ValidationError
from qswitch.invariants import (
    InvariantValue,
    StateTuple,
    bargmann_cycle_expectation,
    bargmann_product_trace,
    bargmann_pure_chain,
)
from qswitch.kernels import BACKEND
from qswitch.linalg import DensityMatrix, PureState, UnitaryMatrix
from qswitch.perm import Permutation
from qswitch.protocol import (
    ProtocolSpec,
    build_odd_protocol,
    even_invariant_convex,
    even_invariant_repeat_pure,
    odd_invariant_via_switch,
    sample_protocol,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DensityMatrix",
    "InvariantValue",
    "Permutation",
    "ProtocolSpec",
    "PureState",
    "QSwitchError",
    "SizeCapError",
    "StateTuple",
    "UnitaryMatrix",
    "ValidationError",
    "bargmann_cycle_expectation",
    "bargmann_product_trace",
    "bargmann_pure_chain",
    "build_odd_protocol",
    "even_invariant_convex",
    "even_invariant_repeat_pure",
    "odd_invariant_via_switch",
    "sample_protocol",
]
