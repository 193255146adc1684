"""Ratio diagnostics for gcd sums of affine maps and for totient sums."""
import argparse
import math
from dataclasses import dataclass, field

from twisted_growth import presets
from twisted_growth.numtheory import AffineMap, gcd_sum, ratio_diagnostics, totient_sieve
from twisted_growth.twisted import theta_system


@dataclass
class GcdConfig:
    grid: list = field(default_factory=lambda: [100, 300, 1000, 3000])
    dims: list = field(default_factory=lambda: [1, 2, 3])
    totient_grid: list = field(default_factory=lambda: [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6])


def report(label, values, l, d):
    rows, spread = ratio_diagnostics(values, l, d)
    print(f"{label}: spread {spread:.4f}")
    for r in rows:
        print(f"  N={r.N:6d} value={r.value} ratio={r.ratio:.6f}")


def run(cfg: GcdConfig):
    for d in cfg.dims:
        values = {N: gcd_sum([AffineMap(1)] * d, d, N) for N in cfg.grid}
        report(f"identity maps, d={d}", values, d, d)
    spec = presets.h3()
    thetas = list(theta_system(spec, presets.identity(spec), None, (0, 0)).theta)
    values = {N: gcd_sum(thetas, len(thetas), N) for N in cfg.grid}
    report(f"H3 identity affine system {thetas}", values, len(thetas), len(thetas))
    phi = totient_sieve(max(cfg.totient_grid))
    prefix = phi.cumsum()
    print("totient sums against 3N^2/pi^2")
    for N in cfg.totient_grid:
        print(f"  N={N:8d} ratio={prefix[N] / (3 * N * N / math.pi ** 2):.8f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default="100,300,1000,3000")
    args = ap.parse_args()
    run(GcdConfig(grid=[int(x) for x in args.grid.split(",")]))


if __name__ == "__main__":
    main()
