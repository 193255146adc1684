"""Twisted conjugacy: the action, an exact decision procedure with witnesses,
canonical forms, and the affine divisibility system for degenerate twists.

For ``w = (v, s)`` and ``g = (a, c)`` the twisted conjugate ``w g psi(w)^-1``
has abelian part ``a + v - M v`` and center

    c + (1 - eps) s + v^T Omega a - psi'.v - (v + a)^T Omega M v.

For ``eps = 1`` the ``s`` term drops out, and when ``M v = v`` the center
shift reduces to ``2 v^T Omega a - psi'.v``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Optional

from . import ztlinalg as zl
from .autom import Automorphism, apply, invariants, is_degenerate
from .nilgroup import Element, GroupSpec, in_G, inverse, multiply
from .numtheory import AffineMap


class NotInGroup(ValueError):
    pass


def _require_G(spec, *gs):
    for g in gs:
        if len(g.a) != spec.k:
            raise ValueError(f"element {g} has dimension {len(g.a)}, expected {spec.k}")
        if not in_G(spec, g):
            raise NotInGroup(f"{g} is not in G")


def twisted_conjugate(spec: GroupSpec, psi: Automorphism, w: Element, g: Element) -> Element:
    """``w g psi(w)^-1``, computed with the group law."""
    _require_G(spec, w, g)
    return multiply(spec, multiply(spec, w, g), inverse(spec, apply(spec, psi, w)))


def _conj(spec, psi, v, s, a, c):
    """Closed form of the twisted conjugate of (a, c) by (v, s)."""
    Mv = zl.matvec(psi.M, v)
    a2 = tuple(x + y - z for x, y, z in zip(a, v, Mv))
    va = tuple(x + y for x, y in zip(v, a))
    c2 = (c + (1 - psi.eps) * s + spec.omega_form(v, a) - zl.dot(psi.psi_prime, v)
          - spec.omega_form(va, Mv))
    return a2, c2


def _ext_gcd_combination(values):
    """(g, coeffs) with sum(coeffs[i] * values[i]) == g == gcd(values) >= 0."""
    g, coeffs = 0, [0] * len(values)
    for i, x in enumerate(values):
        if x == 0:
            continue
        # extended Euclid on (g, x)
        old_r, r = g, x
        old_s, s = 1, 0
        old_t, t = 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
            old_t, t = t, old_t - q * t
        coeffs = [old_s * cc for cc in coeffs]
        coeffs[i] = old_t
        g = old_r
        if g < 0:
            g, coeffs = -g, [-cc for cc in coeffs]
    return g, coeffs


class TwistData:
    """Everything derived from (spec, psi) once: kernels, images, triple."""

    def __init__(self, spec: GroupSpec, psi: Automorphism):
        self.spec, self.psi = spec, psi
        k = spec.k
        self.MI = [[x - int(i == j) for j, x in enumerate(row)] for i, row in enumerate(psi.M)]
        self.IM = zl.scale(-1, self.MI)
        self.kernel = list(zl.kernel_basis(self.MI).basis)
        H, U = zl.hnf(self.MI)
        self.image = zl.image_lattice(self.MI)
        r = self.image.rank
        assert tuple(zl.columns(H)[:r]) == self.image.basis
        self.preimage_cols = zl.columns(U)[:r]  # M-I maps these onto I's basis
        self.triple = zl.transversality_triple(self.image, k)
        self.sum_lattice = self.triple.sum_lattice()
        basis = list(self.triple.I.basis) + list(self.triple.J.basis)
        B = zl.from_columns(basis, k)
        self._det = zl.det(B)
        inv = zl.rational_inverse(B)
        self._adj = [[int(x * self._det) for x in row] for row in inv]
        self._shift_cache = {}
        self._ab_cache = {}

    # -- abelian bookkeeping ---------------------------------------------------
    def split(self, a):
        """(a_star, v): a_star ∈ A + J and (M - I) v = a - a_star."""
        alpha = zl.hermite_residue(a, self.sum_lattice)
        w = tuple(x - y for x, y in zip(a, alpha))
        x = [sum(p * q for p, q in zip(row, w)) for row in self._adj]
        x = [xi // self._det for xi in x]
        r = self.image.rank
        xI = x[:r]
        i_part = tuple(sum(col[t] * xI[j] for j, col in enumerate(self.triple.I.basis))
                       for t in range(len(a)))
        v = tuple(sum(col[t] * xI[j] for j, col in enumerate(self.preimage_cols))
                  for t in range(len(a)))
        a_star = tuple(p - q for p, q in zip(a, i_part))
        return a_star, v

    def kernel_shifts(self, a):
        """Center shifts at fixed abelianization a, one per kernel basis vector
        (eps = 1 only)."""
        spec, psi = self.spec, self.psi
        return [2 * spec.omega_form(kv, a) - zl.dot(psi.psi_prime, kv) for kv in self.kernel]

    def shift_modulus(self, a):
        """Generator of the group of center shifts realisable at a."""
        hit = self._shift_cache.get(a)
        if hit is not None:
            return hit
        if self.psi.eps == 1:
            g = zl.vec_gcd(self.kernel_shifts(a))
        else:
            g = 4
            for v in self._kernel_mod4():
                _, c2 = _conj(self.spec, self.psi, v, self.spec.q(v), a, 0)
                g = gcd(g, c2)
        self._shift_cache[a] = g
        return g

    def _kernel_mod4(self):
        for z in itertools.product(range(4), repeat=len(self.kernel)):
            yield tuple(sum(zi * kv[t] for zi, kv in zip(z, self.kernel))
                        for t in range(self.spec.k))

    def abelian_data(self, a):
        """(a_star, delta, g): (a, c) ~ (a_star, c + delta), shifts are g Z."""
        hit = self._ab_cache.get(a)
        if hit is not None:
            return hit
        a_star, v = self.split(a)
        s = self.spec.q(v) % 2
        a2, c2 = _conj(self.spec, self.psi, v, s, a, 0)
        assert a2 == a_star
        out = (a_star, c2, self.shift_modulus(a_star))
        self._ab_cache[a] = out
        return out


@lru_cache(maxsize=64)
def twist_data(spec: GroupSpec, psi: Automorphism) -> TwistData:
    return TwistData(spec, psi)


def center_shift_gcd(spec: GroupSpec, psi: Automorphism, a) -> int:
    if psi.eps != 1:
        raise ValueError("center_shift_gcd is only defined for eps = +1")
    return twist_data(spec, psi).shift_modulus(tuple(a))


# ---------------------------------------------------------------------------
# decision

def is_twisted_conjugate(spec: GroupSpec, psi: Automorphism, g: Element, h: Element):
    """Decide g ~_psi h. Returns (True, w) with w g psi(w)^-1 = h, or (False, None)."""
    _require_G(spec, g, h)
    data = twist_data(spec, psi)
    diff = tuple(y - x for x, y in zip(g.a, h.a))
    v0 = zl.solve_z(data.IM, diff)
    if v0 is None:
        return False, None
    if psi.eps == 1:
        w = _decide_positive(spec, psi, data, v0, g, h)
    else:
        w = _decide_negative(spec, psi, data, v0, g, h)
    if w is None:
        return False, None
    if twisted_conjugate(spec, psi, w, g) != h:  # pragma: no cover - safety net
        raise AssertionError(f"witness {w} failed verification for {g} ~ {h}")
    return True, w


def _decide_positive(spec, psi, data, v0, g, h):
    w1 = Element(v0, spec.q(v0) % 2)
    mid = twisted_conjugate(spec, psi, w1, g)
    need = h.c - mid.c
    shifts = data.kernel_shifts(h.a)
    gg, coeffs = _ext_gcd_combination(shifts)
    if gg == 0:
        return w1 if need == 0 else None
    if need % gg:
        return None
    t = need // gg
    u = tuple(sum(t * cf * kv[i] for cf, kv in zip(coeffs, data.kernel)) for i in range(spec.k))
    w2 = Element(u, spec.q(u) % 2)
    return multiply(spec, w2, w1)


def _decide_negative(spec, psi, data, v0, g, h):
    for z in itertools.product(range(4), repeat=len(data.kernel)):
        v = tuple(x + sum(zi * kv[i] for zi, kv in zip(z, data.kernel))
                  for i, x in enumerate(v0))
        s = spec.q(v)
        _, c2 = _conj(spec, psi, v, s, g.a, g.c)
        r = h.c - c2
        if r % 4 == 0:
            return Element(v, s + r // 2)
    return None


# ---------------------------------------------------------------------------
# canonical forms

@dataclass(frozen=True)
class CanonicalForm:
    a_star: tuple
    b_star: int
    g_a: int


def canonical_form(spec: GroupSpec, psi: Automorphism, triple, g: Element) -> CanonicalForm:
    """Class invariant: equal forms iff the elements are psi-conjugate.

    ``triple`` must be the transversality triple of image(M - I); pass None to
    use the cached one.
    """
    data = twist_data(spec, psi)
    if triple is not None and triple != data.triple:
        raise ValueError("canonical forms are defined relative to the cached triple "
                         "of image(M - I)")
    a_star, delta, gm = data.abelian_data(tuple(g.a))
    c = g.c + delta
    return CanonicalForm(a_star, c % gm if gm else c, gm)


def transversality_for(spec: GroupSpec, psi: Automorphism):
    return twist_data(spec, psi).triple


# ---------------------------------------------------------------------------
# affine divisibility system

@dataclass(frozen=True)
class ThetaSystem:
    v: tuple        # reordered basis of J; the first len(theta) span J1
    theta: tuple    # AffineMap per J1 direction
    D: int
    kernel_elements: tuple
    deltas: tuple

    def gcd_at(self, lambdas):
        g = 0
        for th, lam in zip(self.theta, lambdas):
            g = gcd(g, th(lam))
        return g

    def element(self, a, lambdas, c):
        """The element (a + sum lambda_j v_j, c)."""
        vec = list(a)
        for lam, vj in zip(lambdas, self.v):
            vec = [x + lam * y for x, y in zip(vec, vj)]
        return Element(tuple(vec), c)


def _require_degenerate(spec, psi):
    if not is_degenerate(spec, psi):
        raise ValueError("automorphism is non-degenerate")


def _pairing_matrix(spec, kernel, Jb):
    """Rows: kernel vectors; columns: J basis; entries k^T Omega j."""
    return [[spec.omega_form(kv, jv) for jv in Jb] for kv in kernel]


def theta_system(spec: GroupSpec, psi: Automorphism, triple, a) -> ThetaSystem:
    _require_degenerate(spec, psi)
    data = twist_data(spec, psi)
    triple = data.triple if triple is None else triple
    a = tuple(a)
    Jb = list(triple.J.basis)
    dJ = len(Jb)
    F = _pairing_matrix(spec, data.kernel, Jb)
    if dJ == 0:
        return ThetaSystem((), (), 1, (), ())
    J0 = zl.kernel_basis(F) if data.kernel else zl.full_lattice(dJ)
    P = zl.extend_to_unimodular(J0)
    r0 = J0.rank
    cols = zl.columns(P)
    P2 = zl.from_columns(cols[r0:] + cols[:r0], dJ)
    v = tuple(zl.matvec(zl.from_columns(Jb, spec.k), c) for c in zl.columns(P2))
    d = dJ - r0
    if d == 0:
        return ThetaSystem(v, (), 1, (), ())
    Fp = zl.matmul(F, P2)
    assert all(row[j] == 0 for row in Fp for j in range(d, dJ))
    F1 = [row[:d] for row in Fp]
    twoK = zl.lattice_from_columns([tuple(2 * x for x in row) for row in F1], d)
    assert twoK.rank == d
    Binv = zl.rational_inverse(twoK.matrix())
    deltas = []
    for i in range(d):
        col = [Binv[r][i] for r in range(d)]
        deltas.append(lcm(*(x.denominator for x in col)))
    diag = zl.lattice_from_columns(
        [tuple(deltas[i] * int(i == j) for j in range(d)) for i in range(d)], d)
    D = zl.lattice_index(diag, twoK)
    twoF1T = zl.transpose([[2 * x for x in row] for row in F1])
    thetas, ks = [], []
    for i in range(d):
        y = zl.solve_z(twoF1T, tuple(deltas[i] * int(i == j) for j in range(d)))
        assert y is not None
        k_i = tuple(sum(yr * kv[t] for yr, kv in zip(y, data.kernel)) for t in range(spec.k))
        slope = 2 * spec.omega_form(k_i, v[i])
        offset = 2 * spec.omega_form(k_i, a) - zl.dot(psi.psi_prime, k_i)
        assert slope == deltas[i]
        thetas.append(AffineMap(slope, offset))
        ks.append(k_i)
    return ThetaSystem(v, tuple(thetas), int(D), tuple(ks), tuple(deltas))


def kernel_dual_module(spec: GroupSpec, psi: Automorphism, triple=None):
    """The module {2 omega_k - psi'(k) : k ∈ ker(M - I)} of affine maps on J.

    Each map is encoded as (coefficients on the J basis..., constant term).
    Returns (basis, rank).
    """
    _require_degenerate(spec, psi)
    data = twist_data(spec, psi)
    triple = data.triple if triple is None else triple
    Jb = list(triple.J.basis)
    rows = []
    for kv in data.kernel:
        lin = [2 * spec.omega_form(kv, jv) for jv in Jb]
        rows.append(tuple(lin) + (-zl.dot(psi.psi_prime, kv),))
    if not rows:
        return [], 0
    L = zl.lattice_from_columns(rows, len(Jb) + 1)
    # no nonzero constants: any kernel combination with zero linear part
    # must have zero constant part
    lin_part = zl.transpose([list(r[:-1]) for r in rows]) if Jb else [[0] * len(rows)]
    for y in zl.kernel_basis(lin_part).basis:
        if sum(yi * r[-1] for yi, r in zip(y, rows)) != 0:
            raise AssertionError("module contains a nonzero constant function")
    return list(L.basis), L.rank
