import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qswitch.errors import SizeCapError, ValidationError
from qswitch.invariants import (
    InvariantValue,
    StateTuple,
    bargmann_cycle_expectation,
    bargmann_product_trace,
    bargmann_pure_chain,
    evaluate_all,
    random_tuple,
    repeated,
    repetition_reduction_check,
)
from qswitch.linalg import KET_0, KET_1, KET_PLUS, KET_PLUS_I, DensityMatrix, make_rng, random_unitary

EXAMPLE = StateTuple((KET_0, KET_PLUS, KET_PLUS_I))


def test_example_tuple_value():
    for v in evaluate_all(EXAMPLE).values():
        assert abs(v.value - (0.25 + 0.25j)) <= 1e-12


def test_single_state_is_one():
    rho = DensityMatrix(np.diag([0.3, 0.7]))
    assert abs(bargmann_product_trace([rho]).value - 1) <= 1e-12
    assert abs(bargmann_cycle_expectation([rho]).value - 1) <= 1e-12
    assert abs(bargmann_pure_chain([KET_PLUS]).value - 1) <= 1e-12


def test_orthogonal_pair_vanishes():
    assert bargmann_pure_chain([KET_0, KET_1]).value == 0


def test_two_state_overlap():
    rng = make_rng(3)
    t = random_tuple(rng, 2, 3)
    a, b = (s.amplitudes for s in t.states)
    assert abs(bargmann_pure_chain(t).value - abs(np.vdot(a, b)) ** 2) <= 1e-12


@given(st.integers(0, 2**31), st.integers(2, 6), st.sampled_from(["pure", "mixed"]))
@settings(max_examples=40, deadline=None)
def test_methods_agree(seed, n, kind):
    t = random_tuple(make_rng(seed), n, 2, kind)
    vals = [v.value for v in evaluate_all(t).values()]
    assert len(vals) == (3 if kind == "pure" else 2)
    for v in vals[1:]:
        assert abs(v - vals[0]) <= 1e-10


@given(st.integers(0, 2**31), st.integers(2, 6))
@settings(max_examples=30, deadline=None)
def test_symmetries(seed, n):
    rng = make_rng(seed)
    t = random_tuple(rng, n, 2, "mixed")
    base = bargmann_product_trace(t).value
    assert abs(bargmann_product_trace(t.rotated()).value - base) <= 1e-12
    assert abs(bargmann_product_trace(t.reversed()).value - np.conj(base)) <= 1e-12
    u = random_unitary(rng, 2).matrix
    assert abs(bargmann_product_trace(t.conjugated(u)).value - base) <= 1e-10


@given(st.integers(0, 2**31), st.integers(1, 6), st.integers(0, 5))
@settings(max_examples=30, deadline=None)
def test_repetition_reduction(seed, n, idx):
    t = random_tuple(make_rng(seed), n, 3)
    idx %= n
    assert repetition_reduction_check(t, idx)
    assert repeated(t, idx).n == n + 1


def test_modulus_bound_and_guard():
    t = random_tuple(make_rng(5), 4, 2, "mixed")
    assert abs(bargmann_product_trace(t).value) <= 1 + 1e-10
    with pytest.raises(ValidationError):
        InvariantValue(1.01, 2, "product-trace")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        InvariantValue(1 + 1e-8, 2, "product-trace")
    assert caught


def test_mismatched_dims_name_the_state():
    with pytest.raises(ValidationError, match="state 2 has dimension 3"):
        StateTuple((KET_0, DensityMatrix(np.eye(3) / 3)))


def test_pure_chain_rejects_mixed():
    with pytest.raises(ValidationError, match="purity"):
        bargmann_pure_chain([KET_0, DensityMatrix(np.eye(2) / 2)])


def test_cycle_expectation_size_cap():
    t = random_tuple(make_rng(0), 13, 2)
    with pytest.raises(SizeCapError):
        bargmann_cycle_expectation(t)
    assert "cycle-expectation" not in evaluate_all(t)


def test_cycle_expectation_dense_oracle():
    from qswitch import perm
    from qswitch.invariants import product_density

    t = random_tuple(make_rng(9), 4, 2, "mixed")
    u = perm.perm_to_unitary(perm.cycle_shift(4), 2).matrix
    dense = np.trace(u @ product_density(t.densities()))
    assert abs(bargmann_cycle_expectation(t).value - dense) <= 1e-12


def test_random_tuple_kind():
    with pytest.raises(ValidationError):
        random_tuple(make_rng(0), 2, 2, "thermal")
    assert not random_tuple(make_rng(0), 2, 2, "mixed").all_pure()
