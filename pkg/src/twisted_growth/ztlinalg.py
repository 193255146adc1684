"""Exact linear algebra over the integers.

Matrices are plain lists of lists of Python ints (arbitrary precision). All
functions are pure; inputs are never mutated.

Conventions
-----------
* ``hnf`` is column style: ``H = A @ U`` with ``U`` unimodular. ``H`` is in
  lower column-echelon form: the pivot rows of successive nonzero columns
  strictly increase, pivots are positive, and every other entry in a pivot
  row (the columns before the pivot) is reduced into ``[0, pivot)``. Zero
  columns come last.
* ``snf`` returns ``D = U @ A @ V`` diagonal with non-negative entries and
  ``d1 | d2 | ...``. Pivot choice: smallest nonzero absolute value, ties
  broken by lowest (row, col) index.
* A :class:`Lattice` stores its basis as the nonzero columns of an HNF, so two
  lattices are equal iff their bases are equal.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

Matrix = list  # list[list[int]]
Vector = tuple  # tuple[int, ...]


# ---------------------------------------------------------------------------
# small matrix helpers

def shape(A):
    rows = len(A)
    cols = len(A[0]) if rows else 0
    return rows, cols


def zeros(rows, cols):
    return [[0] * cols for _ in range(rows)]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def copy(A):
    return [list(map(int, row)) for row in A]


def transpose(A):
    rows, cols = shape(A)
    return [[A[i][j] for i in range(rows)] for j in range(cols)]


def matmul(A, B):
    Bt = transpose(B)
    return [[sum(x * y for x, y in zip(row, col)) for col in Bt] for row in A]


def matvec(A, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in A)


def vecmat(v, A):
    """Row vector times matrix."""
    return matvec(transpose(A), v)


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def bilinear(u, A, v):
    """``u^T A v``."""
    return dot(u, matvec(A, v))


def sub(A, B):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def add(A, B):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def scale(c, A):
    return [[c * x for x in row] for row in A]


def columns(A):
    return [tuple(col) for col in transpose(A)]


def from_columns(cols, rows=None):
    cols = [tuple(c) for c in cols]
    if not cols:
        return [[] for _ in range(rows or 0)]
    return [list(r) for r in zip(*cols)]


def hstack(A, B):
    return [list(ra) + list(rb) for ra, rb in zip(A, B)]


def det(A):
    """Exact determinant (Bareiss fraction-free elimination)."""
    n = len(A)
    if n == 0:
        return 1
    M = copy(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rational_inverse(A):
    """Inverse over Q as a matrix of Fractions. Raises on singular input."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [x / p for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def integer_inverse(A):
    """Inverse of a unimodular matrix, as integers."""
    inv = rational_inverse(A)
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def is_unimodular(A):
    rows, cols = shape(A)
    return rows == cols and abs(det(A)) == 1


def rank_q(A):
    """Rank over Q by fraction-free Gaussian elimination.

    Kept independent of the normal-form code so it can serve as a cross-check.
    """
    M = copy(A)
    rows, cols = shape(M)
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, rows):
            if M[i][c]:
                f, g = M[i][c], M[r][c]
                M[i] = [g * x - f * y for x, y in zip(M[i], M[r])]
        r += 1
        if r == rows:
            break
    return r


# ---------------------------------------------------------------------------
# normal forms

def _col_op(M, dst, src, k):
    """column dst += k * column src"""
    if k:
        for row in M:
            row[dst] += k * row[src]


def _col_swap(M, i, j):
    if i != j:
        for row in M:
            row[i], row[j] = row[j], row[i]


def _col_neg(M, i):
    for row in M:
        row[i] = -row[i]


def hnf(A):
    """Column Hermite normal form. Returns ``(H, U)`` with ``H = A @ U``."""
    H = copy(A)
    rows, cols = shape(H)
    U = identity(cols)
    p = 0
    for i in range(rows):
        if p == cols:
            break
        # gcd-reduce row i over columns p.. into column p
        while True:
            nz = [j for j in range(p, cols) if H[i][j] != 0]
            if not nz:
                break
            j0 = min(nz, key=lambda j: (abs(H[i][j]), j))
            _col_swap(H, p, j0)
            _col_swap(U, p, j0)
            done = True
            for j in range(p + 1, cols):
                if H[i][j]:
                    q = H[i][j] // H[i][p]
                    _col_op(H, j, p, -q)
                    _col_op(U, j, p, -q)
                    if H[i][j]:
                        done = False
            if done:
                break
        if H[i][p] == 0:
            continue
        if H[i][p] < 0:
            _col_neg(H, p)
            _col_neg(U, p)
        piv = H[i][p]
        for j in range(p):
            q = H[i][j] // piv
            _col_op(H, j, p, -q)
            _col_op(U, j, p, -q)
        p += 1
    return H, U


def _row_op(M, dst, src, k):
    if k:
        M[dst] = [x + k * y for x, y in zip(M[dst], M[src])]


def snf(A):
    """Smith normal form. Returns ``(D, U, V)`` with ``D = U @ A @ V``."""
    D = copy(A)
    rows, cols = shape(D)
    U = identity(rows)
    V = identity(cols)
    t = 0
    while t < min(rows, cols):
        entries = [(abs(D[i][j]), i, j) for i in range(t, rows)
                   for j in range(t, cols) if D[i][j] != 0]
        if not entries:
            break
        _, i0, j0 = min(entries)
        D[t], D[i0] = D[i0], D[t]
        U[t], U[i0] = U[i0], U[t]
        _col_swap(D, t, j0)
        _col_swap(V, t, j0)
        clean = True
        piv = D[t][t]
        for i in range(t + 1, rows):
            if D[i][t]:
                q = D[i][t] // piv
                _row_op(D, i, t, -q)
                _row_op(U, i, t, -q)
                clean = clean and D[i][t] == 0
        for j in range(t + 1, cols):
            if D[t][j]:
                q = D[t][j] // piv
                _col_op(D, j, t, -q)
                _col_op(V, j, t, -q)
                clean = clean and D[t][j] == 0
        if not clean:
            continue  # a smaller remainder appeared; pick a new pivot
        bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                    if D[i][j] % piv), None)
        if bad is not None:
            _row_op(D, t, bad[0], 1)
            _row_op(U, t, bad[0], 1)
            continue
        if piv < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return D, U, V


def snf_diagonal(A):
    D, _, _ = snf(A)
    return [D[i][i] for i in range(min(shape(D)))]


def rank_z(A):
    return sum(1 for d in snf_diagonal(A) if d != 0)


# ---------------------------------------------------------------------------
# lattices

@dataclass(frozen=True)
class Lattice:
    """A sublattice of Z^ambient_dim with a canonical (HNF) basis."""

    ambient_dim: int
    basis: tuple  # tuple of column vectors

    @property
    def rank(self):
        return len(self.basis)

    def matrix(self):
        return from_columns(self.basis, self.ambient_dim)

    def contains(self, v):
        if self.rank == 0:
            return all(x == 0 for x in v)
        return solve_z(self.matrix(), v) is not None

    def determinant(self):
        """Covolume inside its own Q-span (sqrt of the Gram determinant)."""
        if self.rank == 0:
            return 1
        B = self.matrix()
        g = det(matmul(transpose(B), B))
        r = _isqrt_exact(g)
        if r is not None:
            return r
        return Fraction(g) ** Fraction(1, 2)


def _isqrt_exact(n):
    from math import isqrt
    r = isqrt(n)
    return r if r * r == n else None


def lattice_from_columns(cols, ambient_dim):
    cols = [tuple(int(x) for x in c) for c in cols]
    if not cols:
        return Lattice(ambient_dim, ())
    H, _ = hnf(from_columns(cols, ambient_dim))
    basis = tuple(c for c in columns(H) if any(c))
    return Lattice(ambient_dim, basis)


def zero_lattice(n):
    return Lattice(n, ())


def full_lattice(n):
    return lattice_from_columns(columns(identity(n)), n)


def kernel_basis(A):
    """Saturated lattice {x in Z^cols : A x = 0}."""
    rows, cols = shape(A)
    if rows == 0:
        return full_lattice(cols)
    H, U = hnf(A)
    ker = [c for c, h in zip(columns(U), columns(H)) if not any(h)]
    return lattice_from_columns(ker, cols)


def image_lattice(A):
    rows, cols = shape(A)
    return lattice_from_columns(columns(A), rows)


def saturation(L):
    if L.rank == 0:
        return L
    D, U, _ = snf(L.matrix())
    Uinv = integer_inverse(U)
    return lattice_from_columns(columns(Uinv)[:L.rank], L.ambient_dim)


def is_saturated(L):
    return saturation(L) == L


def lattice_sum(L1, L2):
    return lattice_from_columns(L1.basis + L2.basis, L1.ambient_dim)


def solve_z(A, b):
    """Some integer x with ``A x = b``, or None.

    The solution returned is the particular one read off the column HNF, with
    all free coordinates set to zero, so it is deterministic.
    """
    rows, cols = shape(A)
    b = tuple(int(x) for x in b)
    if len(b) != rows:
        raise ValueError("right-hand side has wrong length")
    if cols == 0:
        return () if not any(b) else None
    H, U = hnf(A)
    y = [0] * cols
    j = 0
    for i in range(rows):
        if j < cols and H[i][j] != 0:
            s = b[i] - sum(H[i][l] * y[l] for l in range(j))
            q, r = divmod(s, H[i][j])
            if r:
                return None
            y[j] = q
            j += 1
    if matvec(H, y) != b:
        return None
    return matvec(U, y)


def extend_to_unimodular(L):
    """Unimodular matrix whose first ``L.rank`` columns are ``L.basis``.

    ``L`` must be saturated. The remaining columns span a complement; they are
    put in HNF so the result is deterministic.
    """
    n, r = L.ambient_dim, L.rank
    if r == 0:
        return identity(n)
    B = L.matrix()
    D, P, Q = snf(B)
    if any(D[i][i] != 1 for i in range(r)):
        raise ValueError("lattice is not saturated")
    Pinv = integer_inverse(P)
    comp = columns(Pinv)[r:]
    comp = lattice_from_columns(comp, n).basis if comp else ()
    Uext = from_columns(tuple(L.basis) + tuple(comp), n)
    assert is_unimodular(Uext)
    return Uext


def complement(L):
    """A lattice C with L + C = Z^n and L ∩ C = 0 (L saturated)."""
    U = extend_to_unimodular(L)
    return lattice_from_columns(columns(U)[L.rank:], L.ambient_dim)


def lattice_index(L1, L2):
    """Index [L2 : L1] for L1 ⊆ L2; ``math.inf`` when the ranks differ."""
    if L1.ambient_dim != L2.ambient_dim:
        raise ValueError("ambient dimensions differ")
    for v in L1.basis:
        if not L2.contains(v):
            raise ValueError("L1 is not contained in L2")
    if L1.rank < L2.rank:
        return float("inf")
    if L2.rank == 0:
        return 1
    # coordinates of L1's basis in terms of L2's basis
    B2 = L2.matrix()
    coords = [solve_z(B2, v) for v in L1.basis]
    return abs(det(from_columns(coords, L2.rank)))


def hermite_residue(v, L):
    """Reduce v modulo a full-rank lattice L to its canonical residue.

    With L in lower column-HNF, the result satisfies 0 <= r_i < pivot_i on
    every pivot row.
    """
    v = list(v)
    for col in L.basis:
        i = next(k for k, x in enumerate(col) if x)
        q = v[i] // col[i]
        if q:
            v = [x - q * y for x, y in zip(v, col)]
    return tuple(v)


# ---------------------------------------------------------------------------
# transversality triples

@dataclass(frozen=True)
class TransversalityTriple:
    """(I, J, A): I ∩ J = 0, I + J of finite index, Z^n = I + J + A."""

    I: Lattice
    J: Lattice
    A: tuple  # coset representatives of Z^n / (I + J), zero first

    @property
    def ambient_dim(self):
        return self.I.ambient_dim

    def sum_lattice(self):
        return lattice_sum(self.I, self.J)


def transversality_triple(I, ambient_dim=None):
    n = I.ambient_dim if ambient_dim is None else ambient_dim
    if I.ambient_dim != n:
        raise ValueError("I does not live in the given ambient lattice")
    J = complement(saturation(I))
    S = lattice_sum(I, J)
    pivots = [next(x for x in col if x) for col in S.basis]
    reps = set()
    # residues 0 <= r_i < pivot_i on pivot rows; S is full rank so every
    # row is a pivot row
    for digits in itertools.product(*(range(p) for p in pivots)):
        reps.add(hermite_residue(digits, S))
    A = tuple(sorted(reps))
    assert A[0] == (0,) * n
    return TransversalityTriple(I, J, A)


def decompose(triple, v):
    """Split v = i + j + a with i ∈ I, j ∈ J, a ∈ A. Returns (i, j, a)."""
    S = triple.sum_lattice()
    a = hermite_residue(v, S)
    w = tuple(x - y for x, y in zip(v, a))
    basis = list(triple.I.basis) + list(triple.J.basis)
    x = solve_z(from_columns(basis, triple.ambient_dim), w)
    assert x is not None
    r = triple.I.rank
    i = matvec(from_columns(triple.I.basis, triple.ambient_dim), x[:r]) if r else (0,) * len(v)
    j = (matvec(from_columns(triple.J.basis, triple.ambient_dim), x[r:])
         if triple.J.rank else (0,) * len(v))
    return i, j, a


def in_triple_span(triple, v):
    """Membership test v ∈ I + J + A."""
    a = hermite_residue(v, triple.sum_lattice())
    return a in set(triple.A)


def vec_gcd(values: Iterable[int]) -> int:
    g = 0
    for x in values:
        g = gcd(g, int(x))
    return g
