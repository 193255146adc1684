"""Exact twisted-class counts in word-metric balls, a brute-force orbit oracle,
and model selection for growth tables."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .autom import FACTOR_LOG, FACTOR_ONE, Automorphism, total_order
from .nilgroup import Ball, GenSet, GroupSpec, ball, default_gens
from .twisted import twist_data


# ---------------------------------------------------------------------------
# canonical labelling of a ball

def _row_keys(A):
    """Injective int64 key per row of a small-valued integer array."""
    lo = A.min(axis=0)
    span = A.max(axis=0) - lo + 1
    if float(np.prod(span.astype(float))) >= 2.0 ** 62:
        raise OverflowError("rows too spread out to pack")
    key = np.zeros(len(A), dtype=np.int64)
    for j in range(A.shape[1]):
        key = key * span[j] + (A[:, j] - lo[j])
    return key


def _unique_rows(A):
    """(distinct rows, inverse index) of an integer array."""
    _, first, inv = np.unique(_row_keys(A), return_index=True, return_inverse=True)
    return A[first], inv.reshape(-1)


def class_labels(spec: GroupSpec, psi: Automorphism, B: Ball) -> np.ndarray:
    """Integer class id per ball element; equal ids iff psi-conjugate."""
    data = twist_data(spec, psi)
    uniqA, inv = _unique_rows(B.A)
    star_ids = {}
    sid = np.empty(len(uniqA), dtype=np.int64)
    delta = np.empty(len(uniqA), dtype=np.int64)
    mod = np.empty(len(uniqA), dtype=np.int64)
    for i, row in enumerate(uniqA.tolist()):
        a_star, d, g = data.abelian_data(tuple(row))
        sid[i] = star_ids.setdefault(a_star, len(star_ids))
        delta[i] = d
        mod[i] = g
    c = B.C + delta[inv]
    g = mod[inv]
    b = np.where(g > 0, np.mod(c, np.where(g > 0, g, 1)), c)
    _, labels = _unique_rows(np.stack([sid[inv], b], axis=1))
    return labels


def _counts_by_radius(labels, norms, radius):
    nclass = int(labels.max()) + 1 if len(labels) else 0
    first = np.full(nclass, radius + 1, dtype=np.int64)
    np.minimum.at(first, labels, norms)
    per = np.bincount(first, minlength=radius + 2)[: radius + 1]
    return np.cumsum(per)


def count_classes(spec: GroupSpec, psi: Automorphism, S: Optional[GenSet], n: int) -> int:
    B = ball(spec, S, n)
    return int(np.unique(class_labels(spec, psi, B)).size)


# ---------------------------------------------------------------------------
# growth tables

@dataclass
class GrowthTable:
    rows: list = field(default_factory=list)  # (n, classes, ball size)

    @property
    def radii(self):
        return [r[0] for r in self.rows]

    @property
    def classes(self):
        return [r[1] for r in self.rows]

    @property
    def balls(self):
        return [r[2] for r in self.rows]

    def __len__(self):
        return len(self.rows)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "classes", "ball"])
        w.writerows(self.rows)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None:
            raise ValueError("empty CSV")
        missing = {"n", "classes"} - set(reader.fieldnames)
        if missing:
            raise ValueError(f"CSV lacks columns {sorted(missing)}")
        rows = []
        for r in reader:
            n, c = int(r["n"]), int(r["classes"])
            rows.append((n, c, int(r["ball"]) if r.get("ball") not in (None, "") else c))
        if not rows:
            raise ValueError("CSV has no data rows")
        return cls(rows)


def growth_table_from_ball(spec, psi, B: Ball, n_max=None) -> GrowthTable:
    n_max = B.radius if n_max is None else n_max
    labels = class_labels(spec, psi, B)
    counts = _counts_by_radius(labels, B.norm, n_max)
    sizes = np.cumsum(np.bincount(B.norm, minlength=n_max + 1)[: n_max + 1])
    return GrowthTable([(n, int(counts[n]), int(sizes[n])) for n in range(1, n_max + 1)])


def growth_table(spec: GroupSpec, psi: Automorphism, S: Optional[GenSet], n_max: int) -> GrowthTable:
    """Class counts for radii 1..n_max from a single ball enumeration."""
    return growth_table_from_ball(spec, psi, ball(spec, S, n_max), n_max)


# ---------------------------------------------------------------------------
# brute-force oracle

@dataclass
class OraclePartition:
    labels: np.ndarray      # component id per element of the ball
    ball: Ball
    witness_radius: int     # radius at which the partition was accepted
    history: list           # number of parts after each witness radius

    @property
    def n_parts(self):
        return int(np.unique(self.labels).size)


def _merge(labels, src, dst):
    """Coarsen ``labels`` by identifying labels[src[i]] with labels[dst[i]]."""
    ls, ld = labels[src], labels[dst]
    keep = ls != ld
    if not keep.any():
        return labels, False
    n = len(labels)
    rows = np.concatenate([ls[keep], np.arange(n)])
    cols = np.concatenate([ld[keep], np.arange(n)])
    g = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, comp = connected_components(g, directed=False)
    return comp[labels], True


class _DenseIndex:
    """Ball positions stored in a dense box array for O(1) membership."""

    def __init__(self, B: Ball, a_max, c_max):
        self.k = B.A.shape[1]
        self.a_max, self.c_max = a_max, c_max
        self.side = 2 * a_max + 1
        size = self.side ** self.k * (2 * c_max + 1)
        self.table = np.full(size, -1, dtype=np.int64)
        self.table[self._flat(B.A, B.C)] = np.arange(len(B))

    def _flat(self, A, C):
        f = np.zeros(len(C), dtype=np.int64)
        for j in range(self.k):
            f = f * self.side + (A[:, j] + self.a_max)
        return f * (2 * self.c_max + 1) + (C + self.c_max)

    def lookup(self, A, C):
        ok = (np.abs(A).max(axis=1) <= self.a_max) & (np.abs(C) <= self.c_max)
        out = np.full(len(C), -1, dtype=np.int64)
        out[ok] = self.table[self._flat(A[ok], C[ok])]
        return out


class _Witnesses:
    """Witness pool drawn from a ball.

    w = (v, s) acts on (a, c) by a -> a + d and c -> c + const + X . a, so two
    witnesses with equal (d, const, X) induce the same merges; only the one of
    least norm is kept. Witnesses whose shift d leaves the target box are
    dropped since they can never hit, as are those whose center shift is too
    large for every a in the box.
    """

    def __init__(self, W: Ball, M, Om, pp, eps, a_max, c_max):
        self.ball = W
        V, Sc = W.A, W.C
        MV = V @ M.T
        D = V - MV
        const = (1 - eps) * Sc - V @ pp - np.einsum("ij,ij->i", V @ Om, MV)
        X = V @ Om - MV @ Om.T
        # |shift| must fit between two ball elements for some |a| <= a_max
        useful = np.nonzero((np.abs(D).max(axis=1, initial=0) <= 2 * a_max)
                            & (np.abs(const) <= 2 * c_max + np.abs(X).sum(axis=1) * a_max))[0]
        sig = np.concatenate([D[useful], const[useful, None], X[useful]], axis=1)
        key = _row_keys(sig)
        order = np.lexsort((W.norm[useful], key))
        first = np.ones(len(order), dtype=bool)
        first[1:] = key[order[1:]] != key[order[:-1]]
        keep = useful[order[first]]
        self.D, self.const, self.X = D[keep], const[keep], X[keep]
        self.norm = W.norm[keep]

    def between(self, lo, hi):
        return np.nonzero((self.norm > lo) & (self.norm <= hi))[0]


def brute_orbit_oracle(spec: GroupSpec, psi: Automorphism, S: Optional[GenSet], n: int,
                       witness_radius: Optional[int] = None, max_witness_radius: int = 40,
                       stable_rounds: int = 2, chunk: int = 512) -> OraclePartition:
    """Union-find over ball(n): merge g and h when w g psi(w)^-1 = h for some
    witness w of norm <= R, growing R until the number of parts is unchanged
    for ``stable_rounds`` consecutive increments.

    The stopping rule is a heuristic; every merge is an exhibited identity.
    """
    if S is None:
        S = default_gens(spec)
    R = n if witness_radius is None else witness_radius
    if R < n:
        raise ValueError("witness_radius must be at least n")
    B = ball(spec, S, n)
    M = np.array(psi.M, dtype=np.int64)
    Om = np.array(spec.omega, dtype=np.int64)
    pp = np.array(psi.psi_prime, dtype=np.int64)
    a_max = int(np.abs(B.A).max(initial=0))
    c_max = int(np.abs(B.C).max(initial=0))

    def pool(radius):
        return _Witnesses(ball(spec, S, min(radius, max_witness_radius)), M, Om, pp, psi.eps, a_max, c_max)

    W = pool(R + 4)
    index = _DenseIndex(B, a_max, c_max)
    labels = np.arange(len(B), dtype=np.int64)
    src_all = np.arange(len(B))
    history = []
    done_upto = -1
    stable = 0
    last_parts = None
    while True:
        if R > max_witness_radius:
            raise RuntimeError("oracle did not stabilise within max_witness_radius")
        if R > W.ball.radius:
            W = pool(R + 4)
        sel = W.between(done_upto, R)
        for start in range(0, len(sel), chunk):
            idx = sel[start:start + chunk]
            A2 = B.A[None, :, :] + W.D[idx][:, None, :]
            C2 = B.C[None, :] + W.const[idx][:, None] + W.X[idx] @ B.A.T
            hit = index.lookup(A2.reshape(-1, spec.k), C2.reshape(-1))
            ok = hit >= 0
            labels, _ = _merge(labels, np.tile(src_all, len(idx))[ok], hit[ok])
        done_upto = R
        parts = int(np.unique(labels).size)
        history.append((R, parts))
        if parts == last_parts:
            stable += 1
            if stable >= stable_rounds:
                return OraclePartition(labels, B, R, history)
        else:
            stable = 0
        last_parts = parts
        R += 1


def same_partition(labels1, labels2) -> bool:
    """Do two labelings induce the same partition?"""
    labels1, labels2 = np.asarray(labels1), np.asarray(labels2)
    if labels1.shape != labels2.shape:
        return False
    pairs = np.unique(np.stack([labels1, labels2], axis=1), axis=0)
    return (len(pairs) == np.unique(labels1).size == np.unique(labels2).size)


# ---------------------------------------------------------------------------
# abelian quotient

def abelian_class_counts(spec: GroupSpec, psi: Automorphism, B: Ball, n_max=None):
    """Classes of Z^k under a ~ a + (M - I) v, counted in the projected ball."""
    n_max = B.radius if n_max is None else n_max
    data = twist_data(spec, psi)
    uniqA, inv = _unique_rows(B.A)
    first = np.full(len(uniqA), n_max + 1, dtype=np.int64)
    np.minimum.at(first, inv, B.norm)
    stars = {}
    for row, nr in zip(uniqA.tolist(), first.tolist()):
        a_star, _ = data.split(tuple(row))
        stars[a_star] = min(stars.get(a_star, n_max + 1), nr)
    per = np.bincount(np.array(list(stars.values()), dtype=np.int64), minlength=n_max + 2)
    return np.cumsum(per[: n_max + 1])


# ---------------------------------------------------------------------------
# model fitting

@dataclass
class FitResult:
    exponent_estimate: float
    log_factor: bool
    residual: float
    model: tuple = (0, FACTOR_ONE)          # winning (exponent, factor)
    residuals: dict = field(default_factory=dict)

    @property
    def order(self):
        return total_order(*self.model)


def default_candidates(max_exponent=8):
    return [(e, f) for e in range(max_exponent + 1) for f in (FACTOR_ONE, FACTOR_LOG)]


def _model_residual(n, logc, deg, log):
    r = logc - deg * np.log(n) - (np.log(np.log(n)) if log else 0.0)
    return float(np.sqrt(np.mean((r - r.mean()) ** 2)))


def fit_growth(table: GrowthTable, candidates=None, min_rows: int = 6) -> FitResult:
    """Pick the candidate n^e d(n) whose log fits the upper half of the table
    best (only the multiplicative constant is free).

    Candidates are compared by their total order, so (1, "n") and (2, "1")
    describe the same model.
    """
    if len(table) < min_rows:
        raise ValueError(f"need at least {min_rows} rows, got {len(table)}")
    n = np.array(table.radii, dtype=float)
    c = np.array(table.classes, dtype=float)
    if (c <= 0).any():
        raise ValueError("counts must be positive")
    if np.all(c == c[0]):
        return FitResult(0.0, False, 0.0, (0, FACTOR_ONE), {})
    half = len(n) // 2
    n, c = n[half:], c[half:]
    keep = n > 1  # log log n is undefined at n = 1
    n, c = n[keep], c[keep]
    logc = np.log(c)
    candidates = default_candidates() if candidates is None else candidates
    residuals = {}
    for cand in candidates:
        residuals[tuple(cand)] = _model_residual(n, logc, *total_order(*cand))
    best = min(residuals, key=lambda m: (residuals[m], total_order(*m)))
    deg, log = total_order(*best)
    y = logc - (np.log(np.log(n)) if log else 0.0)
    slope = float(np.polyfit(np.log(n), y, 1)[0])
    return FitResult(max(slope, 0.0), log, residuals[best], best, residuals)


def fit_matches(fit: FitResult, predicted) -> bool:
    return fit.order == total_order(*predicted)
