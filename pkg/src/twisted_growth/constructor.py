"""Build an automorphism whose twisted conjugacy growth carries a log factor.

Recipe: split Z^k as radical + complement, choose a rational symplectic basis
of the complement, rescale it so that its span sandwiches the lattice, then
act by unit shears on two pairs and by a hyperbolic block on the rest.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import ztlinalg as zl
from .autom import Automorphism, validate
from .nilgroup import GroupSpec, SpecError


@dataclass(frozen=True)
class SymplecticBasis:
    complement: tuple     # integer columns spanning a complement of the radical
    pairs: tuple          # ((p, q), ...) as Fraction vectors in complement coordinates
    unit: Fraction        # common value of omega(p_i, q_i)
    scale: int            # M with span >= lattice >= M * span

    @property
    def dim(self):
        return 2 * len(self.pairs)

    def matrix(self):
        """Columns p_1, q_1, p_2, q_2, ... in complement coordinates."""
        cols = [v for pq in self.pairs for v in pq]
        return zl.from_columns([list(v) for v in cols])

    def ambient_pairs(self):
        C = [list(c) for c in self.complement]
        def lift(v):
            return tuple(sum(x * c[i] for x, c in zip(v, C)) for i in range(len(C[0])))
        return tuple((lift(p), lift(q)) for p, q in self.pairs)

    def form(self, spec):
        """Omega restricted to the complement."""
        C = zl.from_columns([list(c) for c in self.complement])
        return zl.matmul(zl.matmul(zl.transpose(C), spec.Omega), C)


def _form(W, u, v):
    return sum(u[i] * W[i][j] * v[j] for i in range(len(u)) for j in range(len(v)) if W[i][j])


def _gram_schmidt(W):
    """Symplectic basis of (Q^d, W) with omega(p_i, q_i) = 1."""
    d = len(W)
    pool = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    pairs = []
    while pool:
        p = pool.pop(0)
        for idx, u in enumerate(pool):
            w = _form(W, p, u)
            if w:
                break
        else:
            raise SpecError("form is degenerate on the complement of its radical")
        u = pool.pop(idx)
        q = [x / w for x in u]
        rest = []
        for v in pool:
            a, b = _form(W, v, q), _form(W, v, p)
            rest.append([x - a * y + b * z for x, y, z in zip(v, p, q)])
        pool = rest
        pairs.append((p, q))
    return pairs


def _denominator_lcm(rows):
    out = 1
    for r in rows:
        for x in r:
            out = lcm(out, Fraction(x).denominator)
    return out


def symplectic_basis(spec: GroupSpec) -> SymplecticBasis:
    R = spec.radical()
    U = zl.extend_to_unimodular(R)
    r = R.rank
    comp = [tuple(c) for c in zl.columns(U)[r:]]
    d = len(comp)
    if d % 2:
        raise SpecError(f"non-degenerate part has odd dimension {d}")
    C = zl.from_columns([list(c) for c in comp])
    W = zl.matmul(zl.matmul(zl.transpose(C), spec.Omega), C)
    pairs = _gram_schmidt(W)
    B = zl.from_columns([v for pq in pairs for v in pq])
    # shrink uniformly until the span contains the lattice
    t = _denominator_lcm(zl.rational_inverse(B))
    pairs = [([x / t for x in p], [x / t for x in q]) for p, q in pairs]
    B = [[x / t for x in row] for row in B]
    scale = _denominator_lcm(B)
    pairs = tuple((tuple(p), tuple(q)) for p, q in pairs)
    return SymplecticBasis(tuple(comp), pairs, Fraction(1, t * t), scale)


def _block(i, M):
    if i < 2:
        return [[1, M], [0, 1]]
    a = 2 * M * M
    return [[1 - 2 * M + a, a], [a, 1 + 2 * M + a]]


def build_log_automorphism(spec: GroupSpec) -> Automorphism:
    """eps = +1 automorphism, identity on the radical, with frak_d = 2."""
    R = spec.radical()
    k, r = spec.k, R.rank
    d_z = k - r
    if d_z % 2:
        raise SpecError(f"non-degenerate part has odd dimension {d_z}")
    if d_z == 2:
        return Automorphism.identity(k)
    sb = symplectic_basis(spec)
    m = len(sb.pairs)
    T = zl.zeros(d_z, d_z)
    for i in range(m):
        blk = _block(i, sb.scale)
        for x in range(2):
            for y in range(2):
                T[2 * i + x][2 * i + y] = blk[x][y]
    P = sb.matrix()
    Z = zl.matmul(zl.matmul(P, T), zl.rational_inverse(P))
    if any(Fraction(x).denominator != 1 for row in Z for x in row):
        raise AssertionError("rescaled basis does not give an integral action")
    Z = [[int(x) for x in row] for row in Z]
    U = zl.extend_to_unimodular(R)
    full = zl.identity(k)
    for i in range(d_z):
        for j in range(d_z):
            full[r + i][r + j] = Z[i][j]
    Uinv = zl.integer_inverse(U)
    Mfull = zl.matmul(zl.matmul(U, full), Uinv)
    # parity fix on the basis u_i, zero on the radical, then to standard coordinates
    cols = zl.columns(U)
    x = [0] * r + [(spec.q(zl.matvec(Mfull, u)) - spec.q(u)) % 2 for u in cols[r:]]
    psi_prime = zl.vecmat(x, Uinv)
    psi = Automorphism.from_lists(Mfull, 1, psi_prime)
    validate(spec, psi)
    return psi
