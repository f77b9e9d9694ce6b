"""Pure-Python kernels (fallback for the Cython extension).

Every function here has a twin with the same signature in ``_kernels.pyx``.
Permutations are passed as integer sequences of images, 0-based.
"""
import numpy as np


def induced_index_map(images, d):
    """Action of a tensor-factor permutation on computational basis indices.

    The factor at position ``i`` is moved to position ``images[i]``; position 0
    is the most significant digit of a basis index. Returns ``out`` with
    ``out[j]`` the index that basis state ``j`` is sent to.
    """
    n = len(images)
    size = d**n
    weights = [d ** (n - 1 - i) for i in range(n)]
    dest_weights = [weights[images[i]] for i in range(n)]
    out = np.empty(size, dtype=np.int64)
    for j in range(size):
        rest = j
        target = 0
        for i in range(n):
            digit, rest = divmod(rest, weights[i])
            target += digit * dest_weights[i]
        out[j] = target
    return out


def permutation_sign(images):
    """Sign (+1 or -1) of a permutation, by counting cycles."""
    n = len(images)
    seen = bytearray(n)
    cycles = 0
    for start in range(n):
        if seen[start]:
            continue
        cycles += 1
        j = start
        while not seen[j]:
            seen[j] = 1
            j = images[j]
    return -1 if (n - cycles) % 2 else 1


def commutator_conjugate_solutions(group, target):
    """Count triples (p, a, b) in ``group`` with p^-1 a^-1 b^-1 a b p == target.

    ``group`` is a 2-D array of permutations (one per row); composition applies
    the right-hand factor first.
    """
    group = [tuple(int(x) for x in row) for row in np.asarray(group)]
    target = tuple(int(x) for x in target)
    n = len(target)

    def inv(p):
        r = [0] * n
        for i, x in enumerate(p):
            r[x] = i
        return tuple(r)

    inverses = [inv(p) for p in group]
    count = 0
    for ia, a in enumerate(group):
        a_inv = inverses[ia]
        for ib, b in enumerate(group):
            b_inv = inverses[ib]
            # c = a^-1 b^-1 a b
            c = tuple(a_inv[b_inv[a[b[x]]]] for x in range(n))
            for ip, p in enumerate(group):
                p_inv = inverses[ip]
                if all(p_inv[c[p[x]]] == target[x] for x in range(n)):
                    count += 1
    return count
