# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_kernels_py.py`` for the reference semantics."""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def induced_index_map(images, Py_ssize_t d):
    cdef Py_ssize_t n = len(images)
    cdef Py_ssize_t size = d ** n
    cdef Py_ssize_t i, j, rest, digit, target
    cdef cnp.int64_t[::1] weights = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] dest = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] img = np.asarray(images, dtype=np.int64)
    out = np.empty(size, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    for i in range(n):
        weights[i] = d ** (n - 1 - i)
    for i in range(n):
        dest[i] = weights[img[i]]
    for j in range(size):
        rest = j
        target = 0
        for i in range(n):
            digit = rest // weights[i]
            rest = rest - digit * weights[i]
            target += digit * dest[i]
        o[j] = target
    return out


def permutation_sign(images):
    cdef cnp.int64_t[::1] img = np.asarray(images, dtype=np.int64)
    cdef Py_ssize_t n = img.shape[0]
    cdef Py_ssize_t start, j, cycles = 0
    cdef unsigned char[::1] seen = np.zeros(n, dtype=np.uint8)
    for start in range(n):
        if seen[start]:
            continue
        cycles += 1
        j = start
        while not seen[j]:
            seen[j] = 1
            j = img[j]
    return -1 if (n - cycles) % 2 else 1


def commutator_conjugate_solutions(group, target):
    cdef cnp.int64_t[:, ::1] g = np.ascontiguousarray(group, dtype=np.int64)
    cdef cnp.int64_t[::1] t = np.asarray(target, dtype=np.int64)
    cdef Py_ssize_t m = g.shape[0]
    cdef Py_ssize_t n = g.shape[1]
    cdef cnp.int64_t[:, ::1] ginv = np.empty_like(np.asarray(g))
    cdef cnp.int64_t[::1] c = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t ia, ib, ip, x
    cdef long count = 0
    cdef bint ok
    for ia in range(m):
        for x in range(n):
            ginv[ia, g[ia, x]] = x
    for ia in range(m):
        for ib in range(m):
            for x in range(n):
                c[x] = ginv[ia, ginv[ib, g[ia, g[ib, x]]]]
            for ip in range(m):
                ok = True
                for x in range(n):
                    if ginv[ip, c[g[ip, x]]] != t[x]:
                        ok = False
                        break
                if ok:
                    count += 1
    return count
