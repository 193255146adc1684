"""Automorphisms of H_omega restricting to G, their invariants, and the
closed-form growth classification.

An automorphism is stored as ``(M, eps, psi_prime)`` and acts by

    (a, c) -> (M a, eps * c + psi_prime . a).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from typing import Optional

from . import ztlinalg as zl
from .nilgroup import Element, GroupSpec, in_G

# growth factors d(n), ordered by how fast they grow
FACTOR_ONE = "1"
FACTOR_LOG = "log"
FACTOR_N = "n"
FACTOR_N2 = "n^2"
FACTORS = (FACTOR_ONE, FACTOR_LOG, FACTOR_N, FACTOR_N2)


@dataclass(frozen=True)
class Automorphism:
    M: tuple
    eps: int
    psi_prime: tuple

    @classmethod
    def from_lists(cls, M, eps=1, psi_prime=None):
        k = len(M)
        if psi_prime is None:
            psi_prime = [0] * k
        if eps not in (1, -1):
            raise ValueError("eps must be +1 or -1")
        return cls(tuple(tuple(int(x) for x in r) for r in M), int(eps),
                   tuple(int(x) for x in psi_prime))

    @classmethod
    def identity(cls, k):
        return cls.from_lists(zl.identity(k))

    @property
    def k(self):
        return len(self.M)

    @property
    def matrix(self):
        return [list(r) for r in self.M]

    def to_json(self):
        return {"M": [list(r) for r in self.M], "eps": self.eps,
                "psi_prime": list(self.psi_prime)}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_lists(data["M"], data.get("eps", 1), data.get("psi_prime"))


def load_automorphism(path) -> Automorphism:
    with open(path) as fh:
        return Automorphism.from_json(json.load(fh))


def apply(spec: GroupSpec, psi: Automorphism, g: Element) -> Element:
    return Element(zl.matvec(psi.M, g.a), psi.eps * g.c + zl.dot(psi.psi_prime, g.a))


def compose(psi1: Automorphism, psi2: Automorphism) -> Automorphism:
    """``psi1 ∘ psi2``."""
    M = zl.matmul(psi1.matrix, psi2.matrix)
    pp = tuple(psi1.eps * x + y for x, y in
               zip(psi2.psi_prime, zl.vecmat(psi1.psi_prime, psi2.matrix)))
    return Automorphism.from_lists(M, psi1.eps * psi2.eps, pp)


def inverse_automorphism(psi: Automorphism) -> Automorphism:
    Minv = zl.integer_inverse(psi.matrix)
    pp = tuple(-psi.eps * x for x in zl.vecmat(psi.psi_prime, Minv))
    return Automorphism.from_lists(Minv, psi.eps, pp)


def change_basis(spec: GroupSpec, psi: Automorphism, P):
    """Rewrite (spec, psi) in the basis given by the columns of unimodular P."""
    Pt = zl.transpose(P)
    Pinv = zl.integer_inverse(P)
    omega = zl.matmul(zl.matmul(Pt, spec.Omega), P)
    Q = zl.matmul(zl.matmul(Pt, [list(r) for r in spec.parity_quadratic]), P)
    Q = [[x % 2 for x in row] for row in Q]
    lin = [x % 2 for x in zl.vecmat(spec.parity_linear, P)]
    new_spec = GroupSpec.from_lists(omega, Q, lin)
    M = zl.matmul(zl.matmul(Pinv, psi.matrix), P)
    pp = zl.vecmat(psi.psi_prime, P)
    return new_spec, Automorphism.from_lists(M, psi.eps, pp)


def parity_correction(spec: GroupSpec, M, eps=1):
    """The 0/1 vector psi' making (M, eps, psi') map G into G.

    Parity forces psi' modulo 2, so this is the canonical representative.
    """
    k = spec.k
    out = []
    for i in range(k):
        e = tuple(int(i == j) for j in range(k))
        out.append((spec.q(zl.matvec(M, e)) - eps * spec.q(e)) % 2)
    return tuple(out)


# ---------------------------------------------------------------------------
# validation

class AutomorphismError(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


def violations(spec: GroupSpec, psi: Automorphism):
    k = spec.k
    out = []
    if psi.k != k or any(len(r) != k for r in psi.M) or len(psi.psi_prime) != k:
        return [f"dimension mismatch: automorphism is not {k}-dimensional"]
    if psi.eps not in (1, -1):
        out.append("eps must be +1 or -1")
    if abs(zl.det(psi.matrix)) != 1:
        out.append(f"M is not unimodular (det = {zl.det(psi.matrix)})")
    MT = zl.transpose(psi.matrix)
    lhs = zl.matmul(zl.matmul(MT, spec.Omega), psi.matrix)
    if lhs != zl.scale(psi.eps, spec.Omega):
        out.append("M^T Omega M != eps * Omega (commutator not preserved)")
    bad = []
    for i in range(k):
        g = spec.lift(tuple(int(i == j) for j in range(k)))
        if not in_G(spec, apply(spec, psi, g)):
            bad.append(i)
    if bad:
        out.append(f"parity not preserved: images of generators {bad} leave G")
    return out


def validate(spec: GroupSpec, psi: Automorphism):
    """Raise AutomorphismError listing every violated condition."""
    v = violations(spec, psi)
    if v:
        raise AutomorphismError(v)
    return True


def is_valid(spec, psi):
    return not violations(spec, psi)


# ---------------------------------------------------------------------------
# invariants

@dataclass(frozen=True)
class InvariantReport:
    d_c: int
    r_c: int
    d_z: int
    r_z: int
    d_zc: int
    r_zc: int
    frak_d: int
    degenerate: bool
    growth_exponent: int
    growth_factor: str

    def growth_string(self):
        return growth_string(self.growth_exponent, self.growth_factor)

    def as_dict(self):
        return asdict(self)


def _minus_identity(M):
    return [[x - int(i == j) for j, x in enumerate(row)] for i, row in enumerate(M)]


def quotient_action(spec, psi):
    """Matrix of the induced map on Z^k / radical, via an HNF-extended basis."""
    R = spec.radical()
    U = zl.extend_to_unimodular(R)
    Uinv = zl.integer_inverse(U)
    conj = zl.matmul(zl.matmul(Uinv, psi.matrix), U)
    r = R.rank
    return [row[r:] for row in conj[r:]]


def central_kernel(spec, psi):
    """ker(psi_{z/c} - id) as a sublattice of Z^k."""
    R = spec.radical()
    if R.rank == 0:
        return R
    B = R.matrix()
    rest = zl.matmul(_minus_identity(psi.matrix), B)
    K = zl.kernel_basis(rest)
    return zl.lattice_from_columns([zl.matvec(B, v) for v in K.basis], spec.k)


def invariants(spec: GroupSpec, psi: Automorphism) -> InvariantReport:
    k = spec.k
    MI = _minus_identity(psi.matrix)
    R = spec.radical()
    d_c, r_c = k, zl.rank_z(MI)
    d_zc = R.rank
    r_zc = zl.rank_z(zl.matmul(MI, R.matrix())) if d_zc else 0
    Z = quotient_action(spec, psi)
    d_z = k - d_zc
    r_z = zl.rank_z(_minus_identity(Z)) if d_z else 0
    frak_d = (d_c - r_c) - (d_zc - r_zc)
    degen = is_degenerate(spec, psi)
    e, f = _classify(d_c - r_c, frak_d, degen)
    return InvariantReport(d_c, r_c, d_z, r_z, d_zc, r_zc, frak_d, degen, e, f)


def is_degenerate(spec: GroupSpec, psi: Automorphism) -> bool:
    if psi.eps == -1:
        return False
    return all(zl.dot(psi.psi_prime, v) == 0 for v in central_kernel(spec, psi).basis)


def _classify(exponent, frak_d, degenerate):
    if not degenerate or frak_d >= 3:
        return exponent, FACTOR_ONE
    return exponent, {2: FACTOR_LOG, 1: FACTOR_N, 0: FACTOR_N2}[frak_d]


def classify(spec: GroupSpec, psi: Automorphism):
    rep = invariants(spec, psi)
    return rep.growth_exponent, rep.growth_factor


def abelian_growth(d: int, M_bar) -> int:
    """Growth exponent d - rank(I - M_bar) for an endomorphism of Z^d."""
    if len(M_bar) != d or any(len(r) != d for r in M_bar):
        raise ValueError(f"M_bar must be {d}x{d}")
    return d - zl.rank_z(_minus_identity(M_bar))


# ---------------------------------------------------------------------------
# growth orders

def total_order(exponent, factor):
    """Normalise n^e d(n) to (polynomial degree, has log factor)."""
    extra = {FACTOR_ONE: 0, FACTOR_LOG: 0, FACTOR_N: 1, FACTOR_N2: 2}[factor]
    return exponent + extra, factor == FACTOR_LOG


def growth_string(exponent, factor):
    deg, log = total_order(exponent, factor)
    base = f"n^{exponent}"
    if factor == FACTOR_ONE:
        return base
    if factor == FACTOR_LOG:
        return base + "·log(n)"
    return f"{base}·{factor}  (= n^{deg})"


def dominated_by(order1, order2):
    """True if growth order1 ≺ order2 (both as (exponent, factor))."""
    return total_order(*order1) <= total_order(*order2)
