"""End-to-end measurement protocols built on the quantum switch.

Odd orders feed the switch with a pair of permutation unitaries (A, B) and a
reordered product state; even orders are reduced to odd ones by repeating a
pure state, or by a convex decomposition of one state into pure states.
The module also holds the cycle test and a Hadamard-test simulation of the
switch. The even-order no-go witness lives here too.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Literal, Optional

import numpy as np

from qswitch import perm
from qswitch.errors import SizeCapError, ValidationError
from qswitch.invariants import (
    InvariantValue,
    StateTuple,
    _as_tuple,
    as_vector,
    is_pure,
    product_density,
    product_vector,
)
from qswitch.linalg import (
    HADAMARD,
    KET_PLUS,
    SIZE_CAP,
    TOL_DERIVED,
    DensityMatrix,
    PureState,
    UnitaryMatrix,
    as_density,
    make_rng,
    random_unitary,
)
from qswitch.switch import (
    ControlStats,
    SwitchInput,
    apply_switch,
    clamp_probability,
    control_stats_born,
    switch_unitary,
)

log = logging.getLogger(__name__)

Family = Literal["main", "alt"]
EvenStrategy = Literal["repeat", "convex", "auto"]

# Im(Delta) = IM_SIGN * (1 - 2 p_-i). Fixed by comparing against the
# product-trace oracle at n = 3 for each family; both agree with the
# switch readout Im Tr(rho D) = 1 - 2 p_-i.
IM_SIGN = {"main": 1, "alt": 1}
# Cycle test with phase gate diag(1, i): p(1) = (1 + Im Delta) / 2.
CYCLE_TEST_IM_SIGN = -1

# Cost of one inverse query when emulated with forward queries only.
INVERSE_QUERY_COST = 4

CHUNK_SHOTS = 1 << 16


@dataclass(frozen=True)
class ProtocolSpec:
    n: int
    local_dim: int
    family: Family = "main"
    even_strategy: Optional[EvenStrategy] = None
    strategy_index: int = 1
    shots: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"protocol order must be >= 2, got {self.n}")
        if self.local_dim < 2:
            raise ValidationError(f"local dimension must be >= 2, got {self.local_dim}")
        if self.family not in ("main", "alt"):
            raise ValidationError(f"unknown family {self.family!r}")
        if self.n % 2 == 0:
            if self.even_strategy is None:
                object.__setattr__(self, "even_strategy", "auto")
            elif self.even_strategy not in ("repeat", "convex", "auto"):
                raise ValidationError(f"unknown even strategy {self.even_strategy!r}")
            if not 1 <= self.strategy_index <= self.n:
                raise ValidationError(f"strategy index must be in 1..{self.n}")
        elif self.even_strategy is not None:
            raise ValidationError("even-order strategies apply only to even n")
        if self.shots < 0:
            raise ValidationError("shots must be nonnegative")
        if self.shots == 1:
            raise ValidationError("sampling needs at least 2 shots (one per basis)")

    @property
    def exact(self):
        return self.shots == 0


@dataclass(frozen=True)
class EstimationResult:
    p_minus: float
    p_minus_i: float
    re_estimate: float
    im_estimate: float
    stderr_re: float = 0.0
    stderr_im: float = 0.0
    shots_x: int = 0
    shots_y: int = 0
    exact: bool = True

    @property
    def value(self):
        return complex(self.re_estimate, self.im_estimate)


@dataclass(frozen=True)
class SimulationReport:
    max_deviation: float
    k_a: int
    k_b: int
    inverse_queries_a: int
    inverse_queries_b: int

    @property
    def expanded(self):
        """(k_A, k_B) when each inverse query costs INVERSE_QUERY_COST forward queries."""
        return (
            self.k_a + INVERSE_QUERY_COST * self.inverse_queries_a,
            self.k_b + INVERSE_QUERY_COST * self.inverse_queries_b,
        )

    def describe(self):
        ea, eb = self.expanded
        return (
            f"raw ({self.k_a},{self.k_b}) + inverse ({self.inverse_queries_a},{self.inverse_queries_b}); "
            f"expanded ({self.k_a}+{ea - self.k_a}, {self.k_b}+{eb - self.k_b}) = ({ea},{eb})"
        )


@dataclass(frozen=True)
class ConvexDecomposition:
    weights: tuple
    components: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        comps = tuple(self.components)
        if len(w) != len(comps) or not w:
            raise ValidationError("need one weight per component")
        if any(x <= 0 for x in w):
            raise ValidationError("convex weights must be positive")
        if abs(sum(w) - 1) > 1e-12:
            raise ValidationError(f"convex weights sum to {sum(w)!r}, expected 1")
        if not all(isinstance(c, PureState) for c in comps):
            raise ValidationError("components must be pure states")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    def reconstruct(self):
        return sum(w * np.outer(c.amplitudes, c.amplitudes.conj()) for w, c in zip(self.weights, self.components))

    def residual(self, target):
        return float(np.max(np.abs(self.reconstruct() - as_density(target).matrix)))


# --- odd orders -------------------------------------------------------------


@dataclass(frozen=True)
class OddProtocol:
    """Switch inputs (A, B) and input reordering P for one odd order."""

    n: int
    local_dim: int
    family: Family
    a_perm: perm.Permutation
    b_perm: perm.Permutation
    p_perm: perm.Permutation

    def __iter__(self):
        return iter((self.a, self.b, self.p))

    @property
    def labels(self):
        """a_j = P^-1(j), 1-based: slot j of the switch input holds state a_j."""
        return perm.inverse(self.p_perm).oneline()

    @cached_property
    def a(self) -> UnitaryMatrix:
        return perm.perm_to_unitary(self.a_perm, self.local_dim)

    @cached_property
    def b(self) -> UnitaryMatrix:
        return perm.perm_to_unitary(self.b_perm, self.local_dim)

    @cached_property
    def p(self) -> UnitaryMatrix:
        return perm.perm_to_unitary(self.p_perm, self.local_dim)

    def d_perm(self):
        return perm.switch_difference(self.a_perm, self.b_perm)


@lru_cache(maxsize=64)
def build_odd_protocol(n, local_dim, family: Family = "main") -> OddProtocol:
    """Main family: swap layers with the label reordering. Alt family: the
    cycle-based pair, with P conjugating its D(A, B) onto C_n."""
    if n < 3 or n % 2 == 0:
        raise ValidationError(
            f"the switch protocol needs odd n >= 3, got {n}; "
            "use even_invariant_repeat_pure or even_invariant_convex for even orders"
        )
    size = local_dim**n
    if size > SIZE_CAP:
        raise SizeCapError(size, SIZE_CAP, "use the product-trace evaluator instead")
    if family == "main":
        a, b = perm.main_family(n)
        p = perm.preprocess_perm(n)
    elif family == "alt":
        a, b = perm.alt_family(n)
        p = perm.cycle_conjugator(perm.switch_difference(a, b))
    else:
        raise ValidationError(f"unknown family {family!r}")
    return OddProtocol(n, local_dim, family, a, b, p)


def switch_input_state(states, protocol: OddProtocol):
    """rho_sw = P (rho_1 x ... x rho_n) P^dag, a vector when every state is pure."""
    t = _as_tuple(states)
    if t.all_pure():
        psi = product_vector([as_vector(s) for s in t.states])
        return PureState(perm.apply_to_vector(protocol.p_perm, t.local_dim, psi))
    rho = product_density(t.densities())
    # permutation conjugate of a product of validated states
    return DensityMatrix(perm.apply_to_density(protocol.p_perm, t.local_dim, rho), validate=False)


def odd_control_stats(states, family: Family = "main") -> ControlStats:
    t = _as_tuple(states)
    protocol = build_odd_protocol(t.n, t.local_dim, family)
    out = apply_switch(SwitchInput(protocol.a, protocol.b, switch_input_state(t, protocol), KET_PLUS))
    return control_stats_born(out)


def _readout(stats: ControlStats, family):
    return complex(1 - 2 * stats.p_minus, IM_SIGN[family] * (1 - 2 * stats.p_minus_i))


def odd_invariant_via_switch(states, family: Family = "main") -> InvariantValue:
    t = _as_tuple(states)
    stats = odd_control_stats(t, family)
    return InvariantValue(_readout(stats, family), t.n, "switch-protocol")


# --- even orders ------------------------------------------------------------


def _check_even(t):
    if t.n % 2:
        raise ValidationError(f"even-order strategies need even n, got {t.n}; use odd_invariant_via_switch")


def _repeat_tuple(t, index, state):
    """Tuple with slot ``index`` (0-based) replaced by two copies of ``state``."""
    return StateTuple(t.states[:index] + (state, state) + t.states[index + 1 :])


def even_repeat_stats(states, repeat_index=1, family: Family = "main") -> ControlStats:
    t = _as_tuple(states)
    _check_even(t)
    idx = repeat_index - 1
    if not 0 <= idx < t.n:
        raise ValidationError(f"repeat index must be in 1..{t.n}")
    state = t.states[idx]
    if not is_pure(state):
        raise ValidationError(
            f"state {repeat_index} is mixed; repeating it is only valid for pure states, "
            "use even_invariant_convex instead"
        )
    pure = state if isinstance(state, PureState) else PureState.normalized(as_vector(state))
    return odd_control_stats(_repeat_tuple(t, idx, pure), family)


def even_invariant_repeat_pure(states, repeat_index=1, family: Family = "main") -> InvariantValue:
    t = _as_tuple(states)
    stats = even_repeat_stats(t, repeat_index, family)
    return InvariantValue(_readout(stats, family), t.n, "switch-protocol")


def eigendecompose_for_protocol(rho) -> ConvexDecomposition:
    """Spectral decomposition into pure states; eigenvalues below 1e-12 are dropped."""
    m = as_density(rho).matrix
    vals, vecs = np.linalg.eigh(m)
    keep = vals > 1e-12
    total = float(np.sum(vals[keep]))
    if abs(total - 1) > 0:
        log.debug("renormalized convex weights, residual %.3e", 1 - total)
    weights = [float(v) / total for v in vals[keep]][::-1]
    comps = [PureState.normalized(vecs[:, i]) for i in np.flatnonzero(keep)][::-1]
    # exact-sum guard: push the float remainder onto the largest weight
    weights[0] += 1.0 - math.fsum(weights)
    return ConvexDecomposition(tuple(weights), tuple(comps))


def even_convex_stats(states, decomp=None, index=1, family: Family = "main") -> ControlStats:
    """Control statistics of the alpha-weighted mixture of repeated-component runs."""
    t = _as_tuple(states)
    _check_even(t)
    idx = index - 1
    if not 0 <= idx < t.n:
        raise ValidationError(f"decomposition index must be in 1..{t.n}")
    if decomp is None:
        decomp = eigendecompose_for_protocol(t.states[idx])
    res = decomp.residual(t.states[idx])
    if res > TOL_DERIVED:
        raise ValidationError(f"decomposition does not reconstruct state {index}: residual {res:.3e}")
    p_minus = p_minus_i = 0.0
    for w, comp in zip(decomp.weights, decomp.components):
        stats = odd_control_stats(_repeat_tuple(t, idx, comp), family)
        p_minus += w * stats.p_minus
        p_minus_i += w * stats.p_minus_i
    return ControlStats(p_minus, p_minus_i)


def even_invariant_convex(states, decomp=None, index=1, family: Family = "main") -> InvariantValue:
    t = _as_tuple(states)
    stats = even_convex_stats(t, decomp, index, family)
    return InvariantValue(_readout(stats, family), t.n, "switch-protocol")


def protocol_control_stats(states, spec: ProtocolSpec) -> ControlStats:
    """Exact control statistics for any order, routing even orders per the ProtocolSpec."""
    t = _as_tuple(states)
    if t.n != spec.n or t.local_dim != spec.local_dim:
        raise ValidationError(
            f"states are {t.n} x dim {t.local_dim}, the protocol expects {spec.n} x dim {spec.local_dim}"
        )
    if t.n % 2:
        return odd_control_stats(t, spec.family)
    strategy = spec.even_strategy
    if strategy == "auto":
        strategy = "repeat" if is_pure(t.states[spec.strategy_index - 1]) else "convex"
    if strategy == "repeat":
        return even_repeat_stats(t, spec.strategy_index, spec.family)
    return even_convex_stats(t, None, spec.strategy_index, spec.family)


# --- sampling ---------------------------------------------------------------


def _binomial_chunked(seed, basis, shots, p):
    """Sum of ``shots`` Bernoulli(p) draws in fixed chunks, each chunk with its own stream."""
    total = 0
    for chunk, start in enumerate(range(0, shots, CHUNK_SHOTS)):
        size = min(CHUNK_SHOTS, shots - start)
        rng = make_rng([seed, basis, chunk])
        total += int(rng.binomial(size, p))
    return total


def _estimate(seed, basis, shots, p):
    k = _binomial_chunked(seed, basis, shots, clamp_probability(p, f"basis {basis} probability"))
    p_hat = k / shots
    return p_hat, 2 * math.sqrt(p_hat * (1 - p_hat) / shots)


def sample_protocol(states, spec: ProtocolSpec) -> EstimationResult:
    """Shot-based estimate: ceil(shots/2) X-basis and floor(shots/2) Y-basis runs."""
    stats = protocol_control_stats(states, spec)
    if spec.exact:
        value = _readout(stats, spec.family)
        return EstimationResult(stats.p_minus, stats.p_minus_i, value.real, value.imag)
    shots_x = (spec.shots + 1) // 2
    shots_y = spec.shots // 2
    px, se_x = _estimate(spec.seed, 0, shots_x, stats.p_minus)
    py, se_y = _estimate(spec.seed, 1, shots_y, stats.p_minus_i)
    return EstimationResult(
        p_minus=px,
        p_minus_i=py,
        re_estimate=1 - 2 * px,
        im_estimate=IM_SIGN[spec.family] * (1 - 2 * py),
        stderr_re=se_x,
        stderr_im=se_y,
        shots_x=shots_x,
        shots_y=shots_y,
        exact=False,
    )


# --- cycle test -------------------------------------------------------------


def _controlled_ladder(n):
    """Nearest-neighbour SWAPs whose product is C_n, in application order."""
    return [perm.transposition(n, k, k + 1) for k in range(1, n)]


def cycle_test(states, s=0, cap=SIZE_CAP):
    """Probability of outcome 1 on the auxiliary qubit of the cycle test.

    Circuit: H on aux, controlled SWAP_{1,2}, ..., SWAP_{n-1,n} (together the
    controlled C_n), phase diag(1, i^s) on aux, H, computational-basis
    measurement. s = 0 gives (1 - Re Delta)/2, s = 1 gives (1 + Im Delta)/2.
    """
    if s not in (0, 1):
        raise ValidationError("s must be 0 or 1")
    t = _as_tuple(states)
    d, n = t.local_dim, t.n
    size = d**n
    if size > cap:
        raise SizeCapError(size, cap, "use bargmann_product_trace instead")
    gates = [perm.index_map(g, d, cap) for g in _controlled_ladder(n)]
    phase = np.diag([1, 1j**s])
    after = HADAMARD @ phase
    if t.all_pure():
        psi = product_vector([as_vector(x) for x in t.states])
        branch = [psi / np.sqrt(2), psi / np.sqrt(2)]
        for imap in gates:
            moved = np.empty_like(branch[1])
            moved[imap] = branch[1]
            branch[1] = moved
        state = after @ np.stack(branch)
        return float(np.real(np.vdot(state[1], state[1])))
    rho = product_density(t.densities())
    blocks = np.stack([np.stack([rho, rho]), np.stack([rho, rho])]) / 2  # (2, 2, D, D)
    for imap in gates:
        inv_map = np.argsort(imap)
        blocks[1] = blocks[1][:, inv_map, :]
        blocks[:, 1] = blocks[:, 1][:, :, inv_map]
    # only the (1, 1) block of the control is needed
    p1 = 0.0
    for i in range(2):
        for j in range(2):
            p1 += after[1, i] * np.conj(after[1, j]) * np.trace(blocks[i, j])
    return float(np.real(p1))


def cycle_test_invariant(states) -> InvariantValue:
    t = _as_tuple(states)
    re = 1 - 2 * cycle_test(t, 0)
    im = CYCLE_TEST_IM_SIGN * (1 - 2 * cycle_test(t, 1))
    return InvariantValue(complex(re, im), t.n, "cycle-test")


# --- Hadamard-test simulation of the switch ---------------------------------


class QueryOracle:
    """Black-box access to a unitary that counts forward and inverse calls."""

    def __init__(self, u):
        self._u = u.matrix if isinstance(u, UnitaryMatrix) else np.asarray(u)
        self.forward = 0
        self.inverse = 0

    def __call__(self, vec):
        self.forward += 1
        return self._u @ vec

    def inv(self, vec):
        self.inverse += 1
        return self._u.conj().T @ vec


def switch_output_direct(a, b, psi):
    """(H x 1) S_{A,B} (|+> x psi) = 1/2 [|0>(BA + AB)psi + |1>(BA - AB)psi]."""
    s = switch_unitary(a, b).matrix
    d = s.shape[0] // 2
    v = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi)
    joint = s @ np.kron(KET_PLUS.amplitudes, v)
    return np.kron(HADAMARD, np.eye(d)) @ joint


def simulate_switch_hadamard(a, b, psi):
    """Switch output from a Hadamard test: prepare BA psi, controlled U = A B A^dag B^dag."""
    a_m = a.matrix if isinstance(a, UnitaryMatrix) else np.asarray(a)
    b_m = b.matrix if isinstance(b, UnitaryMatrix) else np.asarray(b)
    if a_m.shape != b_m.shape or a_m.shape[0] != psi.dim:
        raise ValidationError(
            f"dimension mismatch: A {a_m.shape}, B {b_m.shape}, state of dimension {psi.dim}"
        )
    qa, qb = QueryOracle(a_m), QueryOracle(b_m)
    phi = qb(qa(psi.amplitudes))
    branch0 = phi / np.sqrt(2)
    # controlled U acts on the |1> branch: B^dag, then A^dag, then B, then A
    branch1 = qa(qb(qa.inv(qb.inv(phi)))) / np.sqrt(2)
    out = np.concatenate([(branch0 + branch1) / np.sqrt(2), (branch0 - branch1) / np.sqrt(2)])
    deviation = float(np.max(np.abs(out - switch_output_direct(a_m, b_m, psi))))
    report = SimulationReport(deviation, qa.forward, qb.forward, qa.inverse, qb.inverse)
    return PureState(out), report


# --- even-order no-go -------------------------------------------------------


@dataclass(frozen=True)
class NogoReport:
    n: int
    local_dim: int
    cycle_parity: str
    exhaustive_solutions: Optional[int]
    triples_checked: Optional[int]
    det_sign: int
    det_sign_formula: int
    rhs_det_max_deviation: float
    trials: int
    premise_holds: bool
    d_mod4_flag: bool
    notes: list = field(default_factory=list)

    @property
    def premise_flag(self):
        """Raised when det of the C_n representation is +1, so the determinant
        argument against C_n = P^dag U_1^dag...U_m^dag U_1...U_m P does not apply."""
        return not self.premise_holds


def nogo_witness(n, local_dim, trials=100, seed=0, m=2, exhaustive_max_n=4):
    if n < 2 or n % 2:
        raise ValidationError(f"the no-go concerns even n >= 2, got {n}")
    c = perm.cycle_shift(n)
    solutions = checked = None
    notes = []
    if n <= exhaustive_max_n:
        solutions = perm.count_commutator_conjugates(n, c)
        checked = math.factorial(n) ** 3
    else:
        notes.append(f"exhaustive search skipped for n={n} ({math.factorial(n)}^3 triples)")
    sign_exact = perm.unitary_determinant_sign(c, local_dim)
    sign_closed = perm.determinant_sign_formula(c, local_dim)
    dim = local_dim**n
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(trials):
        p = random_unitary(rng, dim).matrix
        us = [random_unitary(rng, dim).matrix for _ in range(m)]
        rhs = p.conj().T
        for u in us:
            rhs = rhs @ u.conj().T
        for u in us:
            rhs = rhs @ u
        rhs = rhs @ p
        worst = max(worst, abs(np.linalg.det(rhs) - 1))
    if sign_exact == 1:
        notes.append(
            f"det of the C_{n} representation at d={local_dim} is +1, so the determinant "
            "argument does not exclude unitary solutions here"
        )
    return NogoReport(
        n=n,
        local_dim=local_dim,
        cycle_parity=perm.parity(c),
        exhaustive_solutions=solutions,
        triples_checked=checked,
        det_sign=sign_exact,
        det_sign_formula=sign_closed,
        rhs_det_max_deviation=float(worst),
        trials=trials,
        premise_holds=sign_exact == -1,
        d_mod4_flag=local_dim % 4 in (0, 1),
        notes=notes,
    )


# --- pair-set bookkeeping ---------------------------------------------------


def pair_product(pairs: perm.PairSet, states):
    """Product of <psi_{a_i}|psi_{a_j}> over the positional pairs (i, j)."""
    t = _as_tuple(states)
    if t.n != pairs.n:
        raise ValidationError(f"pair set has order {pairs.n}, tuple has {t.n} states")
    vecs = [as_vector(s) for s in t.states]
    value = 1 + 0j
    for a_i, a_j in pairs.label_pairs():
        value *= np.vdot(vecs[a_i - 1], vecs[a_j - 1])
    return complex(value)


def switch_input_trace(states, t_perm=None):
    """Tr(T psi_sw) with psi_sw the main-family reordered product state (default T = ABAB)."""
    t = _as_tuple(states)
    protocol = build_odd_protocol(t.n, t.local_dim, "main")
    if t_perm is None:
        t_perm = perm.compose_all(protocol.a_perm, protocol.b_perm, protocol.a_perm, protocol.b_perm)
    psi = switch_input_state(t, protocol)
    if not isinstance(psi, PureState):
        raise ValidationError("the pair-set trace is defined for pure tuples")
    v = psi.amplitudes
    imap = perm.index_map(t_perm, t.local_dim)
    return complex(np.sum(np.conj(v[imap]) * v))
