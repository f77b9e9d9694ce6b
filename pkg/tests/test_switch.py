import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qswitch.errors import ValidationError
from qswitch.linalg import (
    KET_0,
    KET_PLUS,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    DensityMatrix,
    PureState,
    UnitaryMatrix,
    haar_random_unitary,
    make_rng,
    random_density,
    random_state,
    random_unitary,
)
from qswitch.switch import (
    ControlStats,
    SwitchInput,
    apply_switch,
    clamp_probability,
    commutator_form,
    control_stats_born,
    control_stats_formula,
    dab,
    switch_unitary,
)

X, Y, Z = (UnitaryMatrix(m) for m in (PAULI_X, PAULI_Y, PAULI_Z))


def test_switch_unitary_blocks():
    a, b = haar_random_unitary(1, 3), haar_random_unitary(2, 3)
    s = switch_unitary(a, b).matrix
    np.testing.assert_allclose(s[:3, :3], b.matrix @ a.matrix)
    np.testing.assert_allclose(s[3:, 3:], a.matrix @ b.matrix)
    assert np.all(s[:3, 3:] == 0)


def test_commutator_form():
    anti, comm = commutator_form(X, Z)
    np.testing.assert_allclose(anti, 0, atol=1e-15)
    np.testing.assert_allclose(comm, 2 * PAULI_X @ PAULI_Z)


def test_pure_and_density_paths_agree():
    rng = make_rng(4)
    a, b = random_unitary(rng, 4), random_unitary(rng, 4)
    psi = random_state(rng, 4)
    pure = apply_switch(SwitchInput(a, b, psi))
    mixed = apply_switch(SwitchInput(a, b, psi.density()))
    np.testing.assert_allclose(pure.density().matrix, mixed.density().matrix, atol=1e-14)
    s = switch_unitary(a, b).matrix
    v = s @ np.kron(KET_PLUS.amplitudes, psi.amplitudes)
    np.testing.assert_allclose(pure.joint.amplitudes, v, atol=1e-14)


@given(st.integers(0, 2**31), st.integers(1, 5))
@settings(max_examples=40, deadline=None)
def test_born_matches_formula(seed, dim):
    rng = make_rng(seed)
    a, b = random_unitary(rng, dim), random_unitary(rng, dim)
    rho = random_density(rng, dim)
    born = control_stats_born(apply_switch(SwitchInput(a, b, rho)))
    formula = control_stats_formula(a, b, rho)
    assert abs(born.p_minus - formula.p_minus) <= 1e-12
    assert abs(born.p_minus_i - formula.p_minus_i) <= 1e-12
    t = np.trace(rho.matrix @ dab(a, b))
    assert abs(born.tr_estimate - t) <= 1e-10


def test_p_minus_from_commutator_norm():
    # p_- = <psi| [A,B]^dag [A,B] |psi> / 4
    rng = make_rng(8)
    a, b = random_unitary(rng, 3), random_unitary(rng, 3)
    psi = random_state(rng, 3)
    _, comm = commutator_form(a, b)
    v = comm @ psi.amplitudes
    stats = control_stats_born(apply_switch(SwitchInput(a, b, psi)))
    assert abs(stats.p_minus - np.vdot(v, v).real / 4) <= 1e-12


@pytest.mark.parametrize("pair", [(X, Z), (X, Y), (Y, Z)])
def test_anticommuting_paulis(pair):
    rho = random_density(make_rng(2), 2)
    stats = control_stats_born(apply_switch(SwitchInput(*pair, rho)))
    assert abs(stats.p_minus - 1) <= 1e-12


def test_commuting_inputs():
    rng = make_rng(3)
    a = random_unitary(rng, 3)
    stats = control_stats_born(apply_switch(SwitchInput(a, a, random_density(rng, 3))))
    assert abs(stats.p_minus) <= 1e-12
    assert abs(stats.p_minus_i - 0.5) <= 1e-12


def test_mixed_control():
    rng = make_rng(5)
    a, b = random_unitary(rng, 2), random_unitary(rng, 2)
    out = apply_switch(SwitchInput(a, b, KET_0, DensityMatrix(np.eye(2) / 2)))
    # incoherent control: no interference, p_- = 1/2
    assert abs(control_stats_born(out).p_minus - 0.5) <= 1e-12


def test_input_validation():
    with pytest.raises(ValidationError, match="dimension"):
        SwitchInput(X, haar_random_unitary(0, 3), KET_0)
    with pytest.raises(ValidationError, match="system state"):
        SwitchInput(X, Z, PureState(np.ones(3) / np.sqrt(3)))
    with pytest.raises(ValidationError, match="qubit"):
        SwitchInput(X, Z, KET_0, PureState(np.ones(3) / np.sqrt(3)))


def test_probability_guards():
    with pytest.raises(ValidationError):
        ControlStats(1.1, 0.5)
    assert clamp_probability(-1e-14) == 0.0
    assert clamp_probability(0.3) == 0.3
    with pytest.raises(ValidationError):
        clamp_probability(1.5)
