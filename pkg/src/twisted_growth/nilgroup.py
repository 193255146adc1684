"""Arithmetic in H_omega and in the embedded generalised Heisenberg group G.

An element is a pair ``(a, c)``: ``a`` is the image in G/G2 = Z^k and ``c`` the
center coordinate, measured in H_omega units (G2 is the even integers). The
group law is

    (a, c)(a', c') = (a + a', c + c' + a^T Omega a').

G sits inside H_omega with index two. Membership is decided by a parity
cocycle ``q(a) = a^T Q a + l.a (mod 2)``: ``(a, c) ∈ G`` iff ``c ≡ q(a)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional, Sequence

import numpy as np

from . import ztlinalg as zl


class Element(NamedTuple):
    a: tuple
    c: int

    def __str__(self):
        return ",".join(str(x) for x in (*self.a, self.c))


def element(*coords) -> Element:
    """``element(1, 0, 0)`` -> ``Element((1, 0), 0)``; last coordinate is c."""
    if len(coords) == 1 and not isinstance(coords[0], int):
        coords = tuple(coords[0])
    return Element(tuple(int(x) for x in coords[:-1]), int(coords[-1]))


def parse_element(text: str) -> Element:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) < 2:
        raise ValueError(f"cannot parse element {text!r}: need 'a1,...,ak,c'")
    return element(*(int(p) for p in parts))


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    k: int
    omega: tuple  # k x k skew matrix, tuple of row tuples
    parity_quadratic: tuple
    parity_linear: tuple

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise SpecError("; ".join(problems))

    @classmethod
    def from_lists(cls, omega, parity_quadratic=None, parity_linear=None):
        k = len(omega)
        if parity_quadratic is None:
            parity_quadratic = default_parity_quadratic(omega)
        if parity_linear is None:
            parity_linear = [0] * k
        return cls(
            k=k,
            omega=tuple(tuple(int(x) for x in row) for row in omega),
            parity_quadratic=tuple(tuple(int(x) for x in row) for row in parity_quadratic),
            parity_linear=tuple(int(x) for x in parity_linear),
        )

    def problems(self):
        k = self.k
        out = []
        if k < 1:
            return ["k must be positive"]
        for name, m in (("omega", self.omega), ("parity_quadratic", self.parity_quadratic)):
            if len(m) != k or any(len(r) != k for r in m):
                out.append(f"{name} must be {k}x{k}")
        if len(self.parity_linear) != k:
            out.append(f"parity_linear must have length {k}")
        if out:
            return out
        W, Q = self.omega, self.parity_quadratic
        if any(W[i][j] != -W[j][i] for i in range(k) for j in range(k)):
            out.append("omega is not skew-symmetric")
        if all(x == 0 for row in W for x in row):
            out.append("omega is zero (group would be abelian)")
        if any((Q[i][j] + Q[j][i] - W[i][j]) % 2 for i in range(k) for j in range(k)):
            out.append("parity cocycle violated: Q + Q^T != omega (mod 2)")
        return out

    # -- helpers -------------------------------------------------------------
    @property
    def Omega(self):
        return [list(r) for r in self.omega]

    def omega_form(self, u, v) -> int:
        return zl.bilinear(u, self.omega, v)

    def q(self, a) -> int:
        """Integer-valued representative of the parity cocycle at ``a``."""
        return zl.bilinear(a, self.parity_quadratic, a) + zl.dot(self.parity_linear, a)

    def lift(self, a) -> Element:
        """The element of G over ``a`` with center coordinate in {0, 1}."""
        return Element(tuple(a), self.q(a) % 2)

    def identity(self) -> Element:
        return Element((0,) * self.k, 0)

    def radical(self) -> zl.Lattice:
        return zl.kernel_basis(self.Omega)

    def to_json(self):
        return {
            "k": self.k,
            "omega": [list(r) for r in self.omega],
            "parity_quadratic": [list(r) for r in self.parity_quadratic],
            "parity_linear": list(self.parity_linear),
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        spec = cls.from_lists(data["omega"], data.get("parity_quadratic"),
                              data.get("parity_linear"))
        if "k" in data and int(data["k"]) != spec.k:
            raise SpecError(f"k={data['k']} does not match omega of size {spec.k}")
        return spec


def default_parity_quadratic(omega):
    """Strictly upper triangular half of omega, mod 2."""
    k = len(omega)
    return [[omega[i][j] % 2 if j > i else 0 for j in range(k)] for i in range(k)]


def load_spec(path) -> GroupSpec:
    with open(path) as fh:
        return GroupSpec.from_json(json.load(fh))


# ---------------------------------------------------------------------------
# group law

def _check(spec, *gs):
    for g in gs:
        if len(g.a) != spec.k:
            raise ValueError(f"element {g} has dimension {len(g.a)}, expected {spec.k}")


def multiply(spec: GroupSpec, g: Element, h: Element) -> Element:
    _check(spec, g, h)
    return Element(tuple(x + y for x, y in zip(g.a, h.a)),
                   g.c + h.c + spec.omega_form(g.a, h.a))


def inverse(spec: GroupSpec, g: Element) -> Element:
    return Element(tuple(-x for x in g.a), -g.c)


def commutator(spec: GroupSpec, g: Element, h: Element) -> Element:
    """``g h g^-1 h^-1``; always ``(0, 2 omega(a, a'))``."""
    gh = multiply(spec, g, h)
    return multiply(spec, gh, multiply(spec, inverse(spec, g), inverse(spec, h)))


def power(spec: GroupSpec, g: Element, n: int) -> Element:
    # omega(a, a) = 0, so g^n = (n a, n c)
    return Element(tuple(n * x for x in g.a), n * g.c)


def product(spec: GroupSpec, gs) -> Element:
    out = spec.identity()
    for g in gs:
        out = multiply(spec, out, g)
    return out


def in_G(spec: GroupSpec, g: Element) -> bool:
    return (g.c - spec.q(g.a)) % 2 == 0


# ---------------------------------------------------------------------------
# generating sets

@dataclass(frozen=True)
class GenSet:
    """Generators closed under inversion (identity excluded)."""

    elements: tuple

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


def gen_set(spec: GroupSpec, gens) -> GenSet:
    out = []
    for g in gens:
        g = g if isinstance(g, Element) else element(*g)
        _check(spec, g)
        if not in_G(spec, g):
            raise ValueError(f"generator {g} is not in G")
        for h in (g, inverse(spec, g)):
            if h != spec.identity() and h not in out:
                out.append(h)
    return GenSet(tuple(out))


def default_gens(spec: GroupSpec) -> GenSet:
    """Lifts of the standard basis of G/G2 plus the central element (0, 2)."""
    gens = [spec.lift(tuple(int(i == j) for j in range(spec.k))) for i in range(spec.k)]
    gens.append(Element((0,) * spec.k, 2))
    return gen_set(spec, gens)


def standard_heisenberg(m: int):
    """H_{2m+1}(Z): ``m`` hyperbolic pairs, standard generators."""
    if m < 1:
        raise ValueError("m must be at least 1")
    k = 2 * m
    omega = zl.zeros(k, k)
    for i in range(m):
        omega[2 * i][2 * i + 1] = 1
        omega[2 * i + 1][2 * i] = -1
    spec = GroupSpec.from_lists(omega)
    return spec, default_gens(spec)


# ---------------------------------------------------------------------------
# balls

class CoordinateOverflow(OverflowError):
    pass


class _Packer:
    """Packs (a, c) into one int64 key; bounds are checked, never wrapped."""

    def __init__(self, k, a_bound, c_bound):
        self.k = k
        self.a_off = int(a_bound)
        self.c_off = int(c_bound)
        self.a_w = 2 * self.a_off + 1
        self.c_w = 2 * self.c_off + 1
        total = self.c_w * self.a_w ** k
        if total >= 2 ** 62:
            raise CoordinateOverflow("ball too large to pack into int64 keys")

    def pack(self, A, C):
        if A.size and (np.abs(A).max() > self.a_off):
            raise CoordinateOverflow("abelian coordinate out of packing range")
        if C.size and (np.abs(C).max() > self.c_off):
            raise CoordinateOverflow("center coordinate out of packing range")
        key = np.zeros(len(C), dtype=np.int64)
        for i in range(self.k):
            key = key * self.a_w + (A[:, i] + self.a_off)
        return key * self.c_w + (C + self.c_off)


def _gen_arrays(spec, S):
    GA = np.array([g.a for g in S], dtype=np.int64).reshape(len(S), spec.k)
    GC = np.array([g.c for g in S], dtype=np.int64)
    return GA, GC


def _bounds(spec, S, radius):
    ma = max([abs(x) for g in S for x in g.a] + [1])
    mc = max([abs(g.c) for g in S] + [1])
    om = max(abs(x) for row in spec.omega for x in row)
    a_bound = radius * ma
    c_bound = radius * mc + radius * radius * spec.k * spec.k * ma * ma * om
    return a_bound, c_bound


@dataclass
class Ball:
    """All elements of norm <= radius, with their exact word norms.

    Arrays are sorted by packed key, so membership is a binary search.
    """

    spec: GroupSpec
    gens: GenSet
    radius: int
    A: np.ndarray
    C: np.ndarray
    norm: np.ndarray
    keys: np.ndarray = field(repr=False)
    packer: _Packer = field(repr=False)

    def __len__(self):
        return len(self.C)

    def elements(self, max_norm=None):
        sel = range(len(self)) if max_norm is None else np.nonzero(self.norm <= max_norm)[0]
        return [Element(tuple(int(x) for x in self.A[i]), int(self.C[i])) for i in sel]

    def norms(self):
        return {Element(tuple(int(x) for x in self.A[i]), int(self.C[i])): int(self.norm[i])
                for i in range(len(self))}

    def size(self, radius=None):
        if radius is None:
            return len(self)
        return int(np.count_nonzero(self.norm <= radius))

    def lookup(self, A, C):
        """Indices of (A[i], C[i]) in the ball, -1 where absent."""
        A = np.asarray(A, dtype=np.int64)
        C = np.asarray(C, dtype=np.int64)
        ok = (np.abs(A).max(axis=1, initial=0) <= self.packer.a_off) & (np.abs(C) <= self.packer.c_off)
        idx = np.full(len(C), -1, dtype=np.int64)
        if not ok.any():
            return idx
        keys = self.packer.pack(A[ok], C[ok])
        pos = np.searchsorted(self.keys, keys)
        pos_c = np.minimum(pos, len(self.keys) - 1)
        hit = self.keys[pos_c] == keys
        sub = np.where(hit, pos_c, -1)
        idx[np.nonzero(ok)[0]] = sub
        return idx

    def __contains__(self, g):
        return self.lookup([g.a], [g.c])[0] >= 0

    def norm_of(self, g):
        i = self.lookup([g.a], [g.c])[0]
        return None if i < 0 else int(self.norm[i])


def _layers(spec, S, radius):
    """Breadth-first layers: yields (A, C) of the sphere of each radius."""
    GA, GC = _gen_arrays(spec, S)
    Om = np.array(spec.omega, dtype=np.int64)
    shift = GA @ Om.T  # row s: Omega a_s, so a^T Omega a_s = A @ shift[s]
    a_b, c_b = _bounds(spec, S, radius)
    packer = _Packer(spec.k, a_b, c_b)
    A = np.zeros((1, spec.k), dtype=np.int64)
    C = np.zeros(1, dtype=np.int64)
    visited = packer.pack(A, C)
    yield 0, A, C, packer
    for n in range(1, radius + 1):
        if len(C) == 0:
            return
        newA = (A[None, :, :] + GA[:, None, :]).reshape(-1, spec.k)
        newC = (C[None, :] + GC[:, None] + (A @ shift.T).T).reshape(-1)
        keys = packer.pack(newA, newC)
        keys, first = np.unique(keys, return_index=True)
        fresh = ~np.isin(keys, visited, assume_unique=True)
        A, C = newA[first[fresh]], newC[first[fresh]]
        visited = np.union1d(visited, keys[fresh])
        yield n, A, C, packer


def ball(spec: GroupSpec, S: Optional[GenSet] = None, n: int = 0) -> Ball:
    """Word-metric ball of radius ``n`` by breadth-first expansion."""
    if S is None:
        S = default_gens(spec)
    for g in S:
        if not in_G(spec, g):
            raise ValueError(f"generator {g} is not in G")
    As, Cs, Ns = [], [], []
    packer = None
    for r, A, C, packer in _layers(spec, S, n):
        As.append(A)
        Cs.append(C)
        Ns.append(np.full(len(C), r, dtype=np.int64))
    A = np.concatenate(As)
    C = np.concatenate(Cs)
    N = np.concatenate(Ns)
    keys = packer.pack(A, C)
    order = np.argsort(keys, kind="stable")
    return Ball(spec, S, n, A[order], C[order], N[order], keys[order], packer)


def word_norm(spec: GroupSpec, S: Optional[GenSet], g: Element, cap: int):
    """Exact word norm of ``g``, or None if it exceeds ``cap``."""
    _check(spec, g)
    if not in_G(spec, g):
        raise ValueError(f"{g} is not in G")
    if S is None:
        S = default_gens(spec)
    target = np.array([g.a], dtype=np.int64), np.array([g.c], dtype=np.int64)
    for r, A, C, _ in _layers(spec, S, cap):
        if (np.all(A == target[0], axis=1) & (C == target[1])).any():
            return r
    return None
