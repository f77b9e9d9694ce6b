"""The unitary quantum switch on control (qubit) x system.

The control qubit is the most significant tensor factor. Control |0> runs
A then B (operator BA), control |1> runs B then A (operator AB).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from qswitch.errors import ValidationError
from qswitch.linalg import (
    KET_MINUS,
    KET_MINUS_I,
    KET_PLUS,
    DensityMatrix,
    PureState,
    UnitaryMatrix,
    as_density,
)

log = logging.getLogger(__name__)

_PROB_SLACK = 1e-12


def _mat(u):
    return u.matrix if isinstance(u, UnitaryMatrix) else np.asarray(u, dtype=np.complex128)


def _same_dim(a, b):
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValidationError(f"switch inputs must be square and equal-sized, got {a.shape} and {b.shape}")


def switch_unitary(a, b) -> UnitaryMatrix:
    """|0><0| x BA + |1><1| x AB."""
    a, b = _mat(a), _mat(b)
    _same_dim(a, b)
    d = a.shape[0]
    s = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    s[:d, :d] = b @ a
    s[d:, d:] = a @ b
    return UnitaryMatrix(s)


def commutator_form(a, b):
    """({A, B}, [A, B])."""
    a, b = _mat(a), _mat(b)
    _same_dim(a, b)
    return a @ b + b @ a, a @ b - b @ a


def dab(a, b):
    """D(A, B) = A^dag B^dag A B."""
    a, b = _mat(a), _mat(b)
    _same_dim(a, b)
    return a.conj().T @ b.conj().T @ a @ b


@dataclass(frozen=True)
class SwitchInput:
    a: UnitaryMatrix
    b: UnitaryMatrix
    system_state: Union[PureState, DensityMatrix]
    control_state: Union[PureState, DensityMatrix] = KET_PLUS

    def __post_init__(self):
        if self.a.dim != self.b.dim:
            raise ValidationError(f"A is {self.a.dim}-dimensional but B is {self.b.dim}-dimensional")
        if self.system_state.dim != self.a.dim:
            raise ValidationError(
                f"system state has dimension {self.system_state.dim}, operations act on {self.a.dim}"
            )
        if self.control_state.dim != 2:
            raise ValidationError("the control must be a qubit")


@dataclass(frozen=True)
class SwitchOutput:
    """Joint control x system state; a vector when both inputs were pure."""

    joint: Union[PureState, DensityMatrix]
    system_dim: int

    def density(self) -> DensityMatrix:
        if isinstance(self.joint, PureState):
            v = self.joint.amplitudes
            return DensityMatrix(np.outer(v, v.conj()), validate=False)
        return self.joint

    def control_reduced(self):
        """2 x 2 reduced state of the control qubit."""
        d = self.system_dim
        if isinstance(self.joint, PureState):
            v = self.joint.amplitudes.reshape(2, d)
            return v @ v.conj().T
        m = self.joint.matrix.reshape(2, d, 2, d)
        return np.einsum("ikjk->ij", m)


@dataclass(frozen=True)
class ControlStats:
    p_minus: float
    p_minus_i: float

    def __post_init__(self):
        for name in ("p_minus", "p_minus_i"):
            p = getattr(self, name)
            if not -_PROB_SLACK <= p <= 1 + _PROB_SLACK:
                raise ValidationError(f"{name} = {p!r} is not a probability")

    @property
    def tr_estimate(self):
        """Tr(rho D) reconstructed from the two probabilities."""
        return complex(1 - 2 * self.p_minus, 1 - 2 * self.p_minus_i)


def _pure_control(control):
    if isinstance(control, PureState):
        return control.amplitudes
    m = control.matrix
    if np.real(np.vdot(m, m)) >= 1 - 1e-12:
        _, vecs = np.linalg.eigh(m)
        return vecs[:, -1]
    return None


def apply_switch(inp: SwitchInput) -> SwitchOutput:
    """Conjugate control x system by the switch unitary.

    Pure control and pure system stay a 2d vector. Otherwise the output is
    assembled blockwise: block (i, j) is sigma_ij M_i rho M_j^dag with
    M_0 = BA and M_1 = AB, which is S (sigma x rho) S^dag for the
    block-diagonal S.
    """
    a, b = inp.a.matrix, inp.b.matrix
    d = inp.a.dim
    ctrl_vec = _pure_control(inp.control_state)
    if ctrl_vec is not None and isinstance(inp.system_state, PureState):
        psi = inp.system_state.amplitudes
        joint = np.concatenate([ctrl_vec[0] * (b @ (a @ psi)), ctrl_vec[1] * (a @ (b @ psi))])
        return SwitchOutput(PureState(joint), d)
    ba = b @ a
    ab = a @ b
    sigma = as_density(inp.control_state).matrix
    rho = as_density(inp.system_state).matrix
    ms = (ba, ab)
    left = (ba @ rho, ab @ rho)
    blocks = [[sigma[i, j] * (left[i] @ ms[j].conj().T) for j in range(2)] for i in range(2)]
    return SwitchOutput(DensityMatrix(np.block(blocks), validate=False), d)


def _projector_prob(reduced, ket):
    return float(np.real(np.vdot(ket, reduced @ ket)))


def control_stats_born(output: SwitchOutput) -> ControlStats:
    """p(|->) and p(|-_i>) by projecting the control of the joint state."""
    reduced = output.control_reduced()
    return ControlStats(
        _projector_prob(reduced, KET_MINUS.amplitudes),
        _projector_prob(reduced, KET_MINUS_I.amplitudes),
    )


def control_stats_formula(a, b, rho) -> ControlStats:
    """p_- = (1 - Re Tr(rho D)) / 2 and p_-i = (1 - Im Tr(rho D)) / 2, control |+>."""
    m = rho if isinstance(rho, np.ndarray) else as_density(rho).matrix
    t = complex(np.trace(m @ dab(a, b)))
    return ControlStats(0.5 * (1 - t.real), 0.5 * (1 - t.imag))


def clamp_probability(p, label="p"):
    """Clip to [0, 1] for sampling; values further out than the slack are an error."""
    if not -_PROB_SLACK <= p <= 1 + _PROB_SLACK:
        raise ValidationError(f"{label} = {p!r} is not a probability")
    if p < 0 or p > 1:
        clipped = min(max(p, 0.0), 1.0)
        log.debug("clamped %s from %r to %r", label, p, clipped)
        return clipped
    return p


__all__ = [
    "SwitchInput",
    "SwitchOutput",
    "ControlStats",
    "switch_unitary",
    "commutator_form",
    "dab",
    "apply_switch",
    "control_stats_born",
    "control_stats_formula",
    "clamp_probability",
]
