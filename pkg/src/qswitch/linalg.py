"""Dense complex linear algebra and seeded Haar sampling.

Matrices are ``numpy`` complex128 arrays. Tensor products put the first
factor in the most significant position, so for dimensions ``(d1, d2)`` the
composite index is ``i1 * d2 + i2``.

Random generation uses numpy's Philox counter-based generator keyed through
``numpy.random.SeedSequence(seed)``; the same ``(seed, dim)`` always gives
bit-identical output on the same numpy build.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from qswitch.errors import ValidationError

log = logging.getLogger(__name__)

TOL_DIRECT = 1e-12
TOL_DERIVED = 1e-10
TOL_UNITARY = 1e-10
TOL_EIG = 1e-10
SIZE_CAP = 4096


def make_rng(seed):
    """Philox generator seeded through ``SeedSequence(seed)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def as_matrix(a):
    """Read-only complex128 copy of a 2-D array."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValidationError(f"expected a matrix, got an array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    m.setflags(write=False)
    return m


def _frozen(a):
    a.setflags(write=False)
    return a


def matmul(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValidationError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def dagger(a):
    return np.conj(np.asarray(a)).T


def tensor(a, b):
    """Kronecker product, ``a`` as the most significant factor."""
    return np.kron(np.asarray(a), np.asarray(b))


def tensor_all(factors):
    return reduce(np.kron, [np.asarray(f) for f in factors])


def trace(a):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"trace needs a square matrix, got shape {a.shape}")
    return complex(np.trace(a))


def unitarity_error(m):
    """Max-norm of U^dagger U - 1."""
    m = np.asarray(m)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


@dataclass(frozen=True)
class PureState:
    """Normalized state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if v.size == 0:
            raise ValidationError("state vector is empty")
        if not np.all(np.isfinite(v)):
            raise ValidationError("state vector has non-finite entries")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > TOL_DIRECT:
            raise ValidationError(f"state vector is not normalized: |psi| = {norm!r}")
        object.__setattr__(self, "amplitudes", _frozen(v))

    @classmethod
    def normalized(cls, amplitudes):
        v = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        return cls(v / np.linalg.norm(v))

    @property
    def dim(self):
        return self.amplitudes.shape[0]

    def density(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()))

    def __eq__(self, other):
        return isinstance(other, PureState) and np.array_equal(self.amplitudes, other.amplitudes)

    __hash__ = None


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix.

    Validation runs at construction; pass ``validate=False`` only for
    matrices produced by trusted operations (unitary conjugation of an
    already-valid state), where the eigensolver would dominate the cost.
    """

    matrix: np.ndarray
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"density matrix must be square, got shape {m.shape}")
        if self.validate:
            if not np.all(np.isfinite(m)):
                raise ValidationError("density matrix has non-finite entries")
            herm = float(np.max(np.abs(m - m.conj().T)))
            if herm > TOL_DIRECT:
                raise ValidationError(f"density matrix is not Hermitian: max|rho - rho^dag| = {herm!r}")
            tr = np.trace(m)
            if abs(tr - 1.0) > TOL_DIRECT:
                raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
            low = float(np.linalg.eigvalsh(m)[0])
            if low < -TOL_EIG:
                raise ValidationError(f"density matrix has negative eigenvalue {low!r}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def purity(self):
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def __eq__(self, other):
        return isinstance(other, DensityMatrix) and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


@dataclass(frozen=True)
class UnitaryMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValidationError(f"unitary must be square, got shape {m.shape}")
        err = unitarity_error(m)
        if err > TOL_UNITARY:
            raise ValidationError(f"matrix is not unitary: max|U^dag U - 1| = {err:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def dagger(self) -> UnitaryMatrix:
        return UnitaryMatrix(dagger(self.matrix))

    def __matmul__(self, other):
        if isinstance(other, UnitaryMatrix):
            return UnitaryMatrix(matmul(self.matrix, other.matrix))
        return NotImplemented

    def __eq__(self, other):
        return isinstance(other, UnitaryMatrix) and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


def as_density(state) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.density()
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


def basis_state(dim, index):
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return PureState(v)


_S = 1 / np.sqrt(2)
KET_0 = PureState([1, 0])
KET_1 = PureState([0, 1])
KET_PLUS = PureState([_S, _S])
KET_MINUS = PureState([_S, -_S])
KET_PLUS_I = PureState([_S, 1j * _S])
KET_MINUS_I = PureState([_S, -1j * _S])

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) * _S


def _gaussian_vector(rng, dim):
    z = rng.standard_normal((dim, 2))
    return z[:, 0] + 1j * z[:, 1]


def _check_dim(dim):
    if int(dim) != dim or dim < 1:
        raise ValidationError(f"dimension must be a positive integer, got {dim!r}")
    return int(dim)


def random_state(rng, dim) -> PureState:
    """Haar-random pure state drawn from an existing generator."""
    v = _gaussian_vector(rng, _check_dim(dim))
    return PureState(v / np.linalg.norm(v))


def random_unitary(rng, dim) -> UnitaryMatrix:
    """Haar-random unitary: QR of a Ginibre matrix with the R-diagonal phases fixed."""
    dim = _check_dim(dim)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return UnitaryMatrix(q * (diag / np.abs(diag)))


def random_density(rng, dim, rank=None) -> DensityMatrix:
    """Random mixed state G G^dag / Tr(G G^dag) with G a dim x rank Ginibre matrix."""
    dim = _check_dim(dim)
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise ValidationError(f"rank must be in [1, {dim}], got {rank}")
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.real(np.trace(m)))


def haar_random_state(seed, dim) -> PureState:
    return random_state(make_rng(seed), dim)


def haar_random_unitary(seed, dim) -> UnitaryMatrix:
    return random_unitary(make_rng(seed), dim)


def random_density_matrix(seed, dim, rank=None) -> DensityMatrix:
    return random_density(make_rng(seed), dim, rank)
