import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qswitch.errors import ValidationError
from qswitch.linalg import (
    HADAMARD,
    KET_0,
    KET_PLUS,
    DensityMatrix,
    PureState,
    UnitaryMatrix,
    dagger,
    haar_random_state,
    haar_random_unitary,
    matmul,
    random_density_matrix,
    tensor,
    tensor_all,
    trace,
    unitarity_error,
)


def loop_matmul(a, b):
    # triple-loop reference, independent of BLAS
    out = np.zeros((a.shape[0], b.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            for k in range(a.shape[1]):
                out[i, j] += a[i, k] * b[k, j]
    return out


def loop_kron(a, b):
    out = np.zeros((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            for k in range(b.shape[0]):
                for m in range(b.shape[1]):
                    out[i * b.shape[0] + k, j * b.shape[1] + m] = a[i, j] * b[k, m]
    return out


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@given(seeds, st.integers(1, 6), st.integers(1, 6), st.integers(1, 6))
@settings(max_examples=30, deadline=None)
def test_matmul_matches_loop_oracle(seed, n, k, m):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    b = rng.normal(size=(k, m)) + 1j * rng.normal(size=(k, m))
    np.testing.assert_allclose(matmul(a, b), loop_matmul(a, b), atol=1e-12)


def test_matmul_shape_mismatch():
    with pytest.raises(ValidationError, match="cannot multiply"):
        matmul(np.eye(2), np.eye(3))


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_tensor_matches_loop_and_is_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
    np.testing.assert_allclose(tensor(a, b), loop_kron(a, b), rtol=1e-15, atol=0)
    # same index placement; entries differ only by floating-point product order
    np.testing.assert_allclose(tensor(tensor(a, b), c), tensor(a, tensor(b, c)), rtol=1e-15, atol=0)
    np.testing.assert_array_equal(tensor_all([a, b, c]), tensor(tensor(a, b), c))


def test_tensor_associative_exact_on_real_integers():
    a, b, c = np.arange(4).reshape(2, 2), np.arange(4, 10).reshape(3, 2), np.arange(2).reshape(1, 2)
    np.testing.assert_array_equal(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))


def test_tensor_index_convention():
    # first factor is most significant: |1> x |0> is basis index 2
    v = tensor(np.array([[0], [1]]), np.array([[1], [0]])).ravel()
    assert np.flatnonzero(v).tolist() == [2]


@given(seeds, st.integers(1, 64))
@settings(max_examples=20, deadline=None)
def test_trace_cyclic(seed, dim):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    b = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    assert abs(trace(matmul(a, b)) - trace(matmul(b, a))) <= 1e-10 * dim


def test_trace_rejects_non_square():
    with pytest.raises(ValidationError):
        trace(np.zeros((2, 3)))


def test_dagger_involution():
    m = haar_random_unitary(3, 5).matrix
    np.testing.assert_array_equal(dagger(dagger(m)), m)


@pytest.mark.parametrize("dim", [1, 2, 3, 8, 17, 64])
def test_haar_unitary_contract(dim):
    u = haar_random_unitary(7, dim)
    assert unitarity_error(u.matrix) <= 1e-10
    assert abs(abs(np.linalg.det(u.matrix)) - 1) <= 1e-9
    if dim == 1:
        assert abs(abs(u.matrix[0, 0]) - 1) <= 1e-12


def test_haar_generators_are_pure_functions():
    assert haar_random_state(11, 4) == haar_random_state(11, 4)
    assert haar_random_unitary(11, 4) == haar_random_unitary(11, 4)
    assert random_density_matrix(11, 4, 2) == random_density_matrix(11, 4, 2)
    assert haar_random_state(11, 4) != haar_random_state(12, 4)


def test_haar_state_first_moment():
    # E|<0|psi>|^2 = 1/d for Haar states
    vals = [abs(haar_random_state(s, 4).amplitudes[0]) ** 2 for s in range(4000)]
    assert abs(np.mean(vals) - 0.25) < 0.01


def test_pure_state_validation():
    with pytest.raises(ValidationError, match="not normalized"):
        PureState([1, 1])
    with pytest.raises(ValidationError, match="empty"):
        PureState([])
    assert PureState.normalized([1, 1]) == KET_PLUS


def test_density_validation_messages():
    with pytest.raises(ValidationError, match="Hermitian"):
        DensityMatrix([[0.5, 0.1], [0.2, 0.5]])
    with pytest.raises(ValidationError, match="trace"):
        DensityMatrix([[0.6, 0], [0, 0.6]])
    with pytest.raises(ValidationError, match="negative eigenvalue"):
        DensityMatrix([[1.2, 0], [0, -0.2]])
    rho = DensityMatrix(np.eye(2) / 2)
    assert rho.purity() == pytest.approx(0.5)
    assert KET_0.density().purity() == pytest.approx(1.0)


def test_random_density_rank_and_validity():
    rho = random_density_matrix(1, 4, 2)
    vals = np.linalg.eigvalsh(rho.matrix)
    assert np.sum(vals > 1e-12) == 2
    with pytest.raises(ValidationError):
        random_density_matrix(1, 4, 5)


def test_unitary_rejects_with_error_value():
    with pytest.raises(ValidationError, match=r"max\|U\^dag U - 1\| = "):
        UnitaryMatrix([[1, 1], [0, 1]])
    u = UnitaryMatrix(HADAMARD)
    assert (u @ u) == UnitaryMatrix(HADAMARD @ HADAMARD)
