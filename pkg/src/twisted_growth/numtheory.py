"""Totients, the partial sums S_{d,m}(n), and sums of gcds of affine maps."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np


@dataclass(frozen=True)
class AffineMap:
    """lambda -> slope * lambda + offset, with slope != 0."""

    slope: int
    offset: int = 0

    def __post_init__(self):
        if self.slope == 0:
            raise ValueError("affine map must be non-constant")

    def __call__(self, lam):
        return self.slope * lam + self.offset

    def root(self):
        """The unique integer zero, if any."""
        q, r = divmod(-self.offset, self.slope)
        return None if r else q


def totient_sieve(N: int) -> np.ndarray:
    """phi(0..N) by a linear sieve; index 0 holds 0."""
    if N < 1:
        raise ValueError("N must be at least 1")
    phi = [0] * (N + 1)
    phi[1] = 1
    primes = []
    composite = bytearray(N + 1)
    for i in range(2, N + 1):
        if not composite[i]:
            primes.append(i)
            phi[i] = i - 1
        pi = phi[i]
        for p in primes:
            ip = i * p
            if ip > N:
                break
            composite[ip] = 1
            if i % p == 0:
                phi[ip] = pi * p
                break
            phi[ip] = pi * (p - 1)
    return np.array(phi, dtype=np.int64)


def totient(n: int) -> int:
    """phi(n) by trial division."""
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def s_series(d: int, m: int, n: int, phi=None) -> Fraction:
    """Exact S_{d,m}(n) = sum over 0 < i < n, gcd(i, m) = 1 of phi(i) / i^d."""
    if d < 1 or m < 1:
        raise ValueError("d and m must be positive")
    if phi is None:
        phi = totient_sieve(max(n, 1))
    total = Fraction(0)
    for i in range(1, n):
        if gcd(i, m) == 1:
            total += Fraction(int(phi[i]), i ** d)
    return total


def s_series_float(d: int, m: int, n: int, phi=None) -> float:
    """Floating-point S_{d,m}(n), for ranges where exact rationals are too big."""
    if phi is None:
        phi = totient_sieve(max(n, 1))
    i = np.arange(1, n, dtype=np.int64)
    keep = np.gcd(i, m) == 1
    i = i[keep]
    terms = phi[1:n][keep].astype(np.float64) / i.astype(np.float64) ** d
    return math.fsum(terms)


def _value_histogram(theta: AffineMap, N: int):
    """{|theta(lambda)| : count} over lambda in [-N, N]."""
    vals = np.abs(theta.slope * np.arange(-N, N + 1, dtype=np.int64) + theta.offset)
    uniq, counts = np.unique(vals, return_counts=True)
    return uniq, counts


def gcd_sum(thetas, l: int, N: int) -> int:
    """Sum over lambda in [-N, N]^l of gcd(theta_1(lambda_1), ..., theta_d(lambda_d)).

    gcd(0, ..., 0) counts as 0. The l - d unused coordinates contribute the
    factor (2N + 1)^(l - d). The d-fold sum is folded one coordinate at a
    time through a histogram of partial gcd values, so it is exact and costs
    O(d * V^2) for values bounded by V instead of (2N + 1)^d.
    """
    d = len(thetas)
    if d < 1:
        raise ValueError("need at least one affine map")
    if l < d:
        raise ValueError("l must be at least the number of maps")
    if (2 * N + 1) ** d >= 2 ** 62:
        raise OverflowError("too many terms for exact int64 accumulation")
    vals, counts = _value_histogram(thetas[0], N)
    for th in thetas[1:]:
        tv, tc = _value_histogram(th, N)
        table = np.gcd.outer(vals, tv).ravel()
        weight = np.outer(counts, tc).ravel()
        acc = np.zeros(int(table.max()) + 1, dtype=np.int64)
        np.add.at(acc, table, weight)
        vals = np.nonzero(acc)[0]
        counts = acc[vals]
    hist = {int(v): int(c) for v, c in zip(vals, counts)}
    total = sum(v * c for v, c in hist.items())
    return total * (2 * N + 1) ** (l - d)


def gcd_sum_brute(thetas, l: int, N: int) -> int:
    """Direct d-nested loop; only for small N."""
    import itertools
    d = len(thetas)
    rng = range(-N, N + 1)
    total = 0
    for lams in itertools.product(rng, repeat=d):
        g = 0
        for th, lam in zip(thetas, lams):
            g = gcd(g, th(lam))
        total += g
    return total * (2 * N + 1) ** (l - d)


def gcd_sum_totient(thetas, l: int, N: int) -> int:
    """Same sum through gcd = sum_{k | gcd} phi(k): counts solutions of
    k | theta_i(lambda) per coordinate, then subtracts the all-zero tuples."""
    d = len(thetas)
    V = max(max(abs(th(-N)), abs(th(N))) for th in thetas)
    if V == 0:
        return 0
    phi = totient_sieve(V)
    zero_tuples = 1
    for th in thetas:
        r = th.root()
        zero_tuples *= int(r is not None and -N <= r <= N)
    total = 0
    for k in range(1, V + 1):
        prod = 1
        for th in thetas:
            prod *= _count_divisible(th, k, N)
            if not prod:
                break
        total += int(phi[k]) * (prod - zero_tuples)
    return total * (2 * N + 1) ** (l - d)


def _count_divisible(th: AffineMap, k: int, N: int) -> int:
    """#{lambda in [-N, N] : k | slope * lambda + offset}."""
    g = gcd(th.slope, k)
    if th.offset % g:
        return 0
    step = k // g
    # slope/g * lambda ≡ -offset/g (mod step)
    if step == 1:
        return 2 * N + 1
    inv = pow(th.slope // g, -1, step)
    lam0 = (-(th.offset // g) * inv) % step
    # count lambda ≡ lam0 (mod step) in [-N, N]
    return (N - lam0) // step - (-N - 1 - lam0) // step


def growth_model(d: int, N) -> float:
    """d_d(N): N for d = 1, ln N for d = 2, 1 for d >= 3."""
    if d == 1:
        return float(N)
    if d == 2:
        return math.log(N)
    return 1.0


@dataclass(frozen=True)
class RatioRow:
    N: int
    value: int
    model: float
    ratio: float


def ratio_diagnostics(values, l: int, d: int):
    """Ratios T(N) / (N^l d_d(N)) for a dict {N: T(N)}; returns (rows, spread)
    with spread = max/min - 1."""
    if len(values) < 3:
        raise ValueError("need at least three grid points")
    rows = []
    for N in sorted(values):
        model = float(N) ** l * growth_model(d, N)
        rows.append(RatioRow(N, int(values[N]), model, values[N] / model))
    ratios = [r.ratio for r in rows]
    return rows, max(ratios) / min(ratios) - 1.0
