"""Bargmann invariants Tr(rho_1 ... rho_n) by three independent routes.

* ``bargmann_product_trace``: sequential d x d products, works for any n.
* ``bargmann_pure_chain``: <psi_1|psi_2><psi_2|psi_3>...<psi_n|psi_1>.
* ``bargmann_cycle_expectation``: Tr(C_n rho_1 x ... x rho_n) on the d^n space.

They share no code beyond input handling and act as oracles for each other.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from qswitch import perm
from qswitch.errors import SizeCapError, ValidationError
from qswitch.linalg import (
    SIZE_CAP,
    DensityMatrix,
    PureState,
    as_density,
    random_density,
    random_state,
)

log = logging.getLogger(__name__)

Method = Literal["product-trace", "pure-chain", "cycle-expectation", "switch-protocol", "cycle-test"]
State = Union[PureState, DensityMatrix]

PURITY_TOL = 1e-10
MODULUS_WARN = 1 + 1e-10
MODULUS_FAIL = 1 + 1e-6


@dataclass(frozen=True)
class StateTuple:
    states: tuple

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise ValidationError("a state tuple needs at least one state")
        for i, s in enumerate(states):
            if not isinstance(s, (PureState, DensityMatrix)):
                raise ValidationError(f"state {i + 1} is a {type(s).__name__}, not a quantum state")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            bad = next(i for i, s in enumerate(states) if s.dim != states[0].dim)
            raise ValidationError(
                f"state {bad + 1} has dimension {states[bad].dim}, expected {states[0].dim}"
            )
        object.__setattr__(self, "states", states)

    @property
    def n(self):
        return len(self.states)

    @property
    def local_dim(self):
        return self.states[0].dim

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    @property
    def purity_flags(self):
        return tuple(is_pure(s) for s in self.states)

    def all_pure(self):
        return all(self.purity_flags)

    def densities(self):
        return [as_density(s).matrix for s in self.states]

    def reordered(self, labels):
        """Tuple (rho_{a_1}, ..., rho_{a_n}) for 1-based labels."""
        return StateTuple(tuple(self.states[a - 1] for a in labels))

    def reversed(self):
        return StateTuple(self.states[::-1])

    def rotated(self, k=1):
        return StateTuple(self.states[k:] + self.states[:k])

    def conjugated(self, u):
        """Every state mapped to U rho U^dag (vectors to U psi)."""
        u = np.asarray(u)
        out = []
        for s in self.states:
            if isinstance(s, PureState):
                out.append(PureState.normalized(u @ s.amplitudes))
            else:
                m = u @ s.matrix @ u.conj().T
                out.append(DensityMatrix((m + m.conj().T) / 2 / np.real(np.trace(m))))
        return StateTuple(tuple(out))


@dataclass(frozen=True)
class InvariantValue:
    value: complex
    order: int
    method: Method

    def __post_init__(self):
        mod = abs(self.value)
        if mod > MODULUS_FAIL:
            raise ValidationError(f"|invariant| = {mod!r} exceeds 1; inputs escaped validation")
        if mod > MODULUS_WARN:
            warnings.warn(f"|invariant| = {mod!r} slightly exceeds 1", RuntimeWarning, stacklevel=3)

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag


def is_pure(state):
    if isinstance(state, PureState):
        return True
    return state.purity() >= 1 - PURITY_TOL


def as_vector(state):
    """State vector of a pure state (leading eigenvector for rank-1 density matrices)."""
    if isinstance(state, PureState):
        return state.amplitudes
    if not is_pure(state):
        raise ValidationError(
            f"state has purity {state.purity():.6f} < 1; use the product-trace evaluator"
        )
    _, vecs = np.linalg.eigh(state.matrix)
    return vecs[:, -1]


def _as_tuple(states):
    return states if isinstance(states, StateTuple) else StateTuple(tuple(states))


def bargmann_product_trace(states) -> InvariantValue:
    t = _as_tuple(states)
    mats = t.densities()
    acc = mats[0]
    for m in mats[1:]:
        acc = acc @ m
    return InvariantValue(complex(np.trace(acc)), t.n, "product-trace")


def bargmann_pure_chain(states) -> InvariantValue:
    t = _as_tuple(states)
    vecs = [as_vector(s) for s in t.states]
    value = 1 + 0j
    for i in range(t.n):
        value *= np.vdot(vecs[i], vecs[(i + 1) % t.n])
    return InvariantValue(complex(value), t.n, "pure-chain")


def product_vector(vectors):
    out = np.ones(1, dtype=np.complex128)
    for v in vectors:
        out = np.kron(out, v)
    return out


def product_density(mats):
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out


def bargmann_cycle_expectation(states, cap=SIZE_CAP) -> InvariantValue:
    """Tr(C_n (rho_1 x ... x rho_n)).

    C_n is applied through its basis-index map (the nonzero pattern of
    ``perm_to_unitary``): Tr(U rho) = sum_j rho[j, map(j)].
    """
    t = _as_tuple(states)
    size = t.local_dim**t.n
    if size > cap:
        raise SizeCapError(size, cap, "use bargmann_product_trace instead")
    imap = perm.index_map(perm.cycle_shift(t.n), t.local_dim, cap)
    if t.all_pure():
        psi = product_vector([as_vector(s) for s in t.states])
        # <psi| U |psi> with (U psi)[map(j)] = psi[j]
        value = np.sum(np.conj(psi[imap]) * psi)
    else:
        rho = product_density(t.densities())
        value = np.sum(rho[np.arange(size), imap])
    return InvariantValue(complex(value), t.n, "cycle-expectation")


def repetition_reduction_check(states, index=0, tol=1e-12):
    """Delta_{n+1} with state ``index`` repeated equals Delta_n (pure states)."""
    t = _as_tuple(states)
    longer = t.states[: index + 1] + (t.states[index],) + t.states[index + 1 :]
    lhs = bargmann_pure_chain(longer).value
    rhs = bargmann_pure_chain(t).value
    return abs(lhs - rhs) <= tol


def repeated(states, index):
    """Tuple with state ``index`` (0-based) duplicated in place."""
    t = _as_tuple(states)
    return StateTuple(t.states[: index + 1] + (t.states[index],) + t.states[index + 1 :])


def evaluate_all(states, cap=SIZE_CAP):
    """Every applicable evaluator, keyed by method name."""
    t = _as_tuple(states)
    out = {"product-trace": bargmann_product_trace(t)}
    if t.all_pure():
        out["pure-chain"] = bargmann_pure_chain(t)
    if t.local_dim**t.n <= cap:
        out["cycle-expectation"] = bargmann_cycle_expectation(t, cap)
    return out


def random_tuple(rng, n, dim, kind="pure", rank=None) -> StateTuple:
    """n states from one generator: Haar pure, or Ginibre mixed of the given rank."""
    if kind == "pure":
        return StateTuple(tuple(random_state(rng, dim) for _ in range(n)))
    if kind == "mixed":
        return StateTuple(tuple(random_density(rng, dim, rank) for _ in range(n)))
    raise ValidationError(f"unknown state kind {kind!r}; expected 'pure' or 'mixed'")
