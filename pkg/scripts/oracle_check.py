"""Compare canonical-form class labels with the brute-force orbit oracle."""
import argparse
import time
from dataclasses import dataclass, field

import numpy as np

from twisted_growth import presets
from twisted_growth.counting import brute_orbit_oracle, class_labels, same_partition


@dataclass
class OracleConfig:
    specs: list = field(default_factory=lambda: ["H3", "k3"])
    families: list = field(default_factory=lambda: ["identity", "shear", "flip", "hyperbolic",
                                                    "nondegenerate"])
    radius: int = 8
    witness_radius: int = 24  # hyperbolic twists need witnesses about three times the radius


def run(cfg: OracleConfig):
    mismatches = 0
    for sname in cfg.specs:
        spec = presets.SPECS[sname]()
        for fam in cfg.families:
            psi = presets.FAMILIES[fam](spec)
            t0 = time.perf_counter()
            part = brute_orbit_oracle(spec, psi, None, cfg.radius, witness_radius=cfg.witness_radius)
            labels = class_labels(spec, psi, part.ball)
            same = same_partition(part.labels, labels)
            mismatches += not same
            print(f"{sname:3} {fam:14} ball={len(part.ball):6d} oracle={part.n_parts:5d} "
                  f"classes={np.unique(labels).size:5d} stable_at_R={part.witness_radius} "
                  f"agree={same} {time.perf_counter() - t0:.1f}s", flush=True)
    return mismatches


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=int, default=OracleConfig.radius)
    ap.add_argument("--witness-radius", type=int, default=OracleConfig.witness_radius)
    args = ap.parse_args()
    raise SystemExit(1 if run(OracleConfig(radius=args.radius, witness_radius=args.witness_radius)) else 0)


if __name__ == "__main__":
    main()
