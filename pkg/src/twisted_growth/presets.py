"""Standard groups and the automorphism families used across tests, scripts and the CLI."""
from __future__ import annotations

from . import ztlinalg as zl
from .autom import Automorphism, parity_correction, validate
from .constructor import build_log_automorphism
from .nilgroup import GroupSpec, standard_heisenberg


def h3() -> GroupSpec:
    return standard_heisenberg(1)[0]


def h5() -> GroupSpec:
    return standard_heisenberg(2)[0]


def central_k3() -> GroupSpec:
    """H_3 times Z: the third basis vector pairs trivially with everything."""
    return GroupSpec.from_lists([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])


SPECS = {"H3": h3, "H5": h5, "k3": central_k3}


def with_parity(spec: GroupSpec, M, eps=1, psi_prime=None) -> Automorphism:
    """Automorphism from M and eps; psi' defaults to the parity-forced 0/1 vector."""
    if psi_prime is None:
        psi_prime = parity_correction(spec, M, eps)
    psi = Automorphism.from_lists(M, eps, psi_prime)
    validate(spec, psi)
    return psi


def _blocks(spec, block, rest):
    """Place ``block`` on each symplectic pair of the standard basis; ``rest``
    is the diagonal entry used on central directions."""
    k = spec.k
    M = zl.identity(k)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k) if spec.omega[i][j]]
    used = set()
    for i, j in pairs:
        if i in used or j in used:
            continue
        used |= {i, j}
        M[i][i], M[i][j], M[j][i], M[j][j] = block[0][0], block[0][1], block[1][0], block[1][1]
    for i in range(k):
        if i not in used:
            M[i][i] = rest
    return M


def identity(spec):
    return Automorphism.identity(spec.k)


def shear(spec):
    """[[1, 1], [0, 1]] on the first pair only."""
    M = zl.identity(spec.k)
    M[0][1] = 1
    return with_parity(spec, M)


def flip(spec):
    """diag(1, -1) on every pair, eps = -1."""
    return with_parity(spec, _blocks(spec, [[1, 0], [0, -1]], 1), -1)


def hyperbolic(spec):
    """[[2, 1], [1, 1]] on every pair and -1 on central directions: M - I invertible."""
    return with_parity(spec, _blocks(spec, [[2, 1], [1, 1]], -1))


def non_degenerate(spec):
    """An eps = +1 or -1 map with psi' != 0 that is not degenerate."""
    if any(all(x == 0 for x in row) for row in spec.omega):
        # a central direction with odd-free psi' value
        k = spec.k
        c = next(i for i, row in enumerate(spec.omega) if all(x == 0 for x in row))
        pp = [0] * k
        pp[c] = 2
        return with_parity(spec, zl.identity(k), 1, pp)
    M = _blocks(spec, [[1, 0], [0, -1]], 1)
    pp = [0] * spec.k
    pp[0] = 2
    return with_parity(spec, M, -1, pp)


def constructed_log(spec):
    return build_log_automorphism(spec)


FAMILIES = {
    "identity": identity,
    "shear": shear,
    "flip": flip,
    "hyperbolic": hyperbolic,
    "nondegenerate": non_degenerate,
    "constructed-log": constructed_log,
}
