"""Exact symmetric-group arithmetic and the permutation families of the protocols.

Conventions
-----------
* ``Permutation.images[i]`` is the image of ``i``; indices are 0-based
  internally, while cycle and one-line text forms use 1-based labels.
* ``compose(p, q)`` applies ``q`` first: ``compose(p, q)(x) == p(q(x))``.
  With this order the tensor-factor representation is a homomorphism,
  ``perm_to_unitary(compose(p, q)) == perm_to_unitary(p) @ perm_to_unitary(q)``,
  so a product such as A B A B reads the same for permutations and matrices.
* A cycle ``(a b c)`` sends a to b, b to c and c to a.
* The unitary of ``p`` moves the tensor factor in position ``i`` to position
  ``p(i)``; equivalently slot ``j`` receives the factor from ``p^-1(j)``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Literal

import numpy as np

from qswitch import kernels
from qswitch.errors import SizeCapError, ValidationError
from qswitch.linalg import SIZE_CAP, UnitaryMatrix

Parity = Literal["even", "odd"]


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(x) for x in self.images)
        if not images:
            raise ValidationError("a permutation needs at least one element")
        if sorted(images) != list(range(len(images))):
            raise ValidationError(f"{images} is not a bijection on 0..{len(images) - 1}")
        object.__setattr__(self, "images", images)

    @property
    def n(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i]

    def __mul__(self, other):
        return compose(self, other)

    def __str__(self):
        return format_cycles(self)

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(n)))

    @classmethod
    def from_oneline(cls, images_1based):
        return cls(tuple(x - 1 for x in images_1based))

    def oneline(self):
        return tuple(x + 1 for x in self.images)

    def is_identity(self):
        return all(i == x for i, x in enumerate(self.images))


def compose(p, q):
    if p.n != q.n:
        raise ValidationError(f"cannot compose permutations of sizes {p.n} and {q.n}")
    return Permutation(tuple(p.images[x] for x in q.images))


def compose_all(*perms):
    """Product p1 p2 ... pk (rightmost applied first)."""
    out = perms[-1]
    for p in reversed(perms[:-1]):
        out = compose(p, out)
    return out


def inverse(p):
    r = [0] * p.n
    for i, x in enumerate(p.images):
        r[x] = i
    return Permutation(tuple(r))


def power(p, k):
    out = Permutation.identity(p.n)
    base = p if k >= 0 else inverse(p)
    for _ in range(abs(k)):
        out = compose(base, out)
    return out


def cycles(p):
    """Canonical cycle form: 1-based, minimum first, sorted, fixed points omitted."""
    seen = [False] * p.n
    out = []
    for start in range(p.n):
        if seen[start] or p.images[start] == start:
            seen[start] = True
            continue
        cyc = []
        j = start
        while not seen[j]:
            seen[j] = True
            cyc.append(j + 1)
            j = p.images[j]
        out.append(tuple(cyc))
    return out


def cycle_count(p):
    """Number of disjoint cycles, fixed points included."""
    return len(cycles(p)) + sum(1 for i, x in enumerate(p.images) if i == x)


def parity(p) -> Parity:
    return "odd" if (p.n - cycle_count(p)) % 2 else "even"


def sign(p):
    return -1 if parity(p) == "odd" else 1


def from_cycles(n, cycle_list):
    """Product of (possibly overlapping) cycles, rightmost applied first."""
    out = Permutation.identity(n)
    for cyc in reversed(list(cycle_list)):
        cyc = [int(c) for c in cyc]
        if len(set(cyc)) != len(cyc):
            raise ValidationError(f"cycle {tuple(cyc)} repeats an element")
        if any(not 1 <= c <= n for c in cyc):
            raise ValidationError(f"cycle {tuple(cyc)} has labels outside 1..{n}")
        images = list(range(n))
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            images[a - 1] = b - 1
        out = compose(Permutation(tuple(images)), out)
    return out


def transposition(n, i, j):
    return from_cycles(n, [(i, j)])


def format_cycles(p):
    cs = cycles(p)
    if not cs:
        return "()"
    return "".join("(" + " ".join(str(c) for c in cyc) + ")" for cyc in cs)


def format_oneline(p):
    return "[" + ",".join(str(x) for x in p.oneline()) + "]"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text, n=None):
    """Parse ``"(1 3 2)(4 5)"``; ``n`` defaults to the largest label present."""
    text = text.strip()
    if re.sub(r"\s", "", _CYCLE_RE.sub("", text)):
        raise ValidationError(f"malformed cycle notation: {text!r}")
    groups = []
    for body in _CYCLE_RE.findall(text):
        labels = [int(tok) for tok in re.split(r"[\s,]+", body.strip()) if tok]
        if labels:
            groups.append(labels)
    largest = max((max(g) for g in groups), default=1)
    if n is None:
        n = largest
    elif largest > n:
        raise ValidationError(f"label {largest} exceeds n={n}")
    return from_cycles(n, groups)


def parse_oneline(text):
    """Parse ``"[3,1,2]"`` (1-based images)."""
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValidationError(f"one-line notation must look like [3,1,2], got {text!r}")
    try:
        images = [int(tok) for tok in re.split(r"[\s,]+", body[1:-1].strip()) if tok]
    except ValueError as exc:
        raise ValidationError(f"bad one-line notation {text!r}: {exc}") from None
    return Permutation.from_oneline(images)


def parse_permutation(text, n=None):
    text = text.strip()
    p = parse_oneline(text) if text.startswith("[") else parse_cycles(text, n)
    if n is not None and p.n != n:
        if p.n > n:
            raise ValidationError(f"permutation acts on {p.n} points, expected {n}")
        p = Permutation(p.images + tuple(range(p.n, n)))
    return p


# --- families ---------------------------------------------------------------


def cycle_shift(n):
    """Left-shift n-cycle: 1 -> n, k -> k-1 (its unitary shifts tensor factors left)."""
    _check_positive(n)
    return Permutation(tuple((i - 1) % n for i in range(n)))


def swap_layer_a(n):
    """(1 2)(3 4)... over odd-starting adjacent pairs."""
    _check_positive(n)
    return from_cycles(n, [(i, i + 1) for i in range(1, n, 2)])


def swap_layer_b(n):
    """(2 3)(4 5)... over even-starting adjacent pairs."""
    _check_positive(n)
    return from_cycles(n, [(i, i + 1) for i in range(2, n, 2)])


def main_family(n):
    return swap_layer_a(n), swap_layer_b(n)


def preprocess_labels(n):
    """Input ordering a_1..a_n for the main family (n = 2k+1).

    Labels come in blocks of four, s = 0, 1, ...:
    a_{4s+1} = s+1, a_{4s+2} = k+1-s, a_{4s+3} = k+s+2, a_{4s+4} = 2k+1-s,
    stopping as soon as n labels exist.
    """
    _check_odd(n)
    k = (n - 1) // 2
    labels = []
    s = 0
    while len(labels) < n:
        labels.extend((s + 1, k + 1 - s, k + s + 2, 2 * k + 1 - s))
        s += 1
    return tuple(labels[:n])


def preprocess_perm(n):
    """Preprocessing permutation P_n with P_n^-1(j) = a_j."""
    return inverse(Permutation.from_oneline(preprocess_labels(n)))


def alt_family(n):
    """Alternative pair: A = (m m+1 ... n), B = (1 m n)(2 n-1)...(m-1 m+1), m = (n+1)/2."""
    _check_odd(n, minimum=3)
    m = (n + 1) // 2
    a = from_cycles(n, [tuple(range(m, n + 1))])
    b = from_cycles(n, [(1, m, n)] + [(j, n + 1 - j) for j in range(2, m)])
    return a, b


def word_reversal(n):
    """i -> n+1-i."""
    return Permutation(tuple(n - 1 - i for i in range(n)))


def commutator(a, b):
    """a b a^-1 b^-1."""
    return compose_all(a, b, inverse(a), inverse(b))


def switch_difference(a, b):
    """Permutation of D(A, B) = A^dag B^dag A B, i.e. a^-1 b^-1 a b."""
    return compose_all(inverse(a), inverse(b), a, b)


def commutator_cycle(n):
    """The cycle (1 2 ... n) that the alternative-family commutator equals.

    Under apply-right-first composition this is the right shift, the inverse
    of ``cycle_shift(n)``.
    """
    return from_cycles(n, [tuple(range(1, n + 1))]) if n > 1 else Permutation.identity(1)


def cycle_conjugator(t):
    """Return P with P^-1 t P == cycle_shift(n), normalized so that P(1) = 1.

    ``t`` must be a single n-cycle. P(j) = t^-j(0) in 0-based labels; the
    main-family preprocessing permutation is exactly this conjugator.
    """
    n = t.n
    if cycle_count(t) != 1 and n > 1:
        raise ValidationError(f"{format_cycles(t)} is not an {n}-cycle")
    t_inv = inverse(t)
    images = [0] * n
    for j in range(1, n):
        images[j] = t_inv.images[images[j - 1]]
    return Permutation(tuple(images))


def verify_conjugacy(n):
    """P^-1 (A B A B) P == C_n exactly, for the main family at odd n."""
    a, b = main_family(n)
    p = preprocess_perm(n)
    return compose_all(inverse(p), a, b, a, b, p) == cycle_shift(n)


def verify_commutator_identity(n, a=None, b=None):
    """A B A^-1 B^-1 == (1 2 ... n) exactly (alternative family by default).

    Orientation is pinned by the n = 3 SWAP calculation: with A = SWAP_23 and
    B = SWAP_12 SWAP_23 multiplied as matrices, the commutator is the cycle
    (1 2 3) in the a -> b convention, i.e. the inverse of ``cycle_shift(3)``.
    """
    if a is None or b is None:
        a, b = alt_family(n)
    return commutator(a, b) == commutator_cycle(n)


# --- pair sets --------------------------------------------------------------


@dataclass(frozen=True)
class PairSet:
    """Positional pairs (i, j), 1-based, one per slot i; the label pair is (a_i, a_j)."""

    n: int
    pairs: frozenset
    labels: tuple[int, ...]

    def __post_init__(self):
        pairs = frozenset((int(i), int(j)) for i, j in self.pairs)
        if len(pairs) != self.n or sorted(i for i, _ in pairs) != list(range(1, self.n + 1)):
            raise ValidationError("a pair set needs exactly one pair per slot 1..n")
        if len(self.labels) != self.n:
            raise ValidationError("labels must have length n")
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))

    def label_pairs(self):
        return sorted((self.labels[i - 1], self.labels[j - 1]) for i, j in self.pairs)


def pairs_from_permutation(t, labels):
    """Pairs (i, t^-1(i)): the factors <psi_{a_i}|psi_{a_{t^-1(i)}}> of Tr(T psi_sw)."""
    if len(labels) != t.n:
        raise ValidationError(f"need {t.n} labels, got {len(labels)}")
    t_inv = inverse(t)
    return PairSet(t.n, frozenset((i + 1, t_inv.images[i] + 1) for i in range(t.n)), tuple(labels))


def main_pair_set(n):
    a, b = main_family(n)
    return pairs_from_permutation(compose_all(a, b, a, b), preprocess_labels(n))


def lemma5_step(i_n):
    """Grow the main-family pair set from order n to n+2 (n odd, n >= 5)."""
    n = i_n.n
    if n < 5 or n % 2 == 0:
        raise ValidationError(f"the recursion starts at odd n >= 5, got n={n}")
    if i_n.labels != preprocess_labels(n):
        raise ValidationError("pair set labels do not follow the main-family ordering")
    old_a, old_b = (n - 2, n - 1), (n, n - 3)
    if old_a not in i_n.pairs or old_b not in i_n.pairs:
        raise ValidationError(f"pair set lacks {old_a} or {old_b}; not a main-family set")
    pairs = set(i_n.pairs) - {old_a, old_b}
    pairs |= {(n - 2, n + 2), (n, n + 1), (n + 1, n - 3), (n + 2, n - 1)}
    return PairSet(n + 2, frozenset(pairs), preprocess_labels(n + 2))


# --- representation ---------------------------------------------------------


def _check_cap(size, cap):
    if cap is not None and size > cap:
        raise SizeCapError(size, cap, "reduce n or the local dimension")


def index_map(p, local_dim, cap=SIZE_CAP):
    """Basis-index permutation of p's unitary: U |j> = |index_map[j]>."""
    _check_positive(local_dim)
    _check_cap(local_dim**p.n, cap)
    return kernels.induced_index_map(p.images, local_dim)


def apply_to_vector(p, local_dim, vec, cap=SIZE_CAP):
    vec = np.asarray(vec)
    out = np.empty_like(vec)
    out[index_map(p, local_dim, cap)] = vec
    return out


def apply_to_density(p, local_dim, rho, cap=SIZE_CAP):
    """U rho U^dag for the tensor-factor unitary of p."""
    rho = np.asarray(rho)
    inv_map = np.argsort(index_map(p, local_dim, cap))
    return rho[np.ix_(inv_map, inv_map)]


def perm_to_unitary(p, local_dim, cap=SIZE_CAP) -> UnitaryMatrix:
    imap = index_map(p, local_dim, cap)
    size = imap.shape[0]
    m = np.zeros((size, size), dtype=np.complex128)
    m[imap, np.arange(size)] = 1.0
    return UnitaryMatrix(m)


def unitary_determinant_sign(p, local_dim, cap=1 << 22):
    """Exact det of p's unitary: the sign of the induced basis permutation."""
    return kernels.permutation_sign(index_map(p, local_dim, cap))


def determinant_sign_formula(p, local_dim):
    """Closed form of ``unitary_determinant_sign``.

    A transposition of two factors swaps d^(n-2) * d(d-1)/2 pairs of basis
    states, so det = sign(p) ** (d^(n-2) * d(d-1)/2).
    """
    if p.n < 2 or parity(p) == "even":
        return 1
    d = local_dim
    return -1 if (d ** (p.n - 2) * (d * (d - 1) // 2)) % 2 else 1


# --- group-level search -----------------------------------------------------


def all_permutations(n):
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


def count_commutator_conjugates(n, target=None):
    """Number of (P, A, B) in S_n^3 with P^-1 A^-1 B^-1 A B P == target (default C_n)."""
    target = cycle_shift(n) if target is None else target
    return int(kernels.commutator_conjugate_solutions(all_permutations(n), np.array(target.images)))


def _check_positive(n):
    if int(n) != n or n < 1:
        raise ValidationError(f"expected a positive integer, got {n!r}")


def _check_odd(n, minimum=3):
    if int(n) != n or n < minimum or n % 2 == 0:
        raise ValidationError(f"expected an odd integer >= {minimum}, got {n!r}")
