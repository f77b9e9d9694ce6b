"""Kernel dispatch: the compiled extension when available, else pure Python.

Set ``QSWITCH_PURE_PYTHON=1`` to force the fallback (used by the test suite
and the benchmark to exercise both paths).
"""
import os

from qswitch import _kernels_py

try:
    if os.environ.get("QSWITCH_PURE_PYTHON"):
        raise ImportError("pure-Python kernels requested")
    from qswitch import _kernels as _impl
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"
else:
    BACKEND = "cython"

induced_index_map = _impl.induced_index_map
permutation_sign = _impl.permutation_sign
commutator_conjugate_solutions = _impl.commutator_conjugate_solutions

__all__ = [
    "BACKEND",
    "induced_index_map",
    "permutation_sign",
    "commutator_conjugate_solutions",
]
