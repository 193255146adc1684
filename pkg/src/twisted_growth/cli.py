"""Command-line entry point: ``twisted-growth <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from .autom import (AutomorphismError, classify, invariants, load_automorphism,
                    total_order, growth_string, violations)
from .counting import GrowthTable, fit_growth, growth_table
from .nilgroup import SpecError, load_spec, parse_element
from .numtheory import AffineMap, gcd_sum, ratio_diagnostics, totient_sieve
from .twisted import NotInGroup, is_twisted_conjugate, theta_system

MAX_RADIUS = 25
MAX_GCD_N = 10 ** 4
MAX_TOTIENT_N = 10 ** 7


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    spec: Optional[str] = None
    aut: Optional[str] = None
    radius: Optional[int] = None
    N: Optional[int] = None
    grid: list = field(default_factory=list)
    out: Optional[str] = None
    force: bool = False

    def check(self):
        for path in (self.spec, self.aut):
            if path is not None and not os.path.exists(path):
                raise UsageError(f"no such file: {path}")
        if self.radius is not None and self.radius < 0:
            raise UsageError("radius must be non-negative")
        if any(N < 1 for N in self.grid):
            raise UsageError("grid values must be positive")


def _grid(text):
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc


def dump_json(obj) -> str:
    """Pretty JSON with each matrix row on one line."""
    def fmt(x, indent):
        pad = "  " * (indent + 1)
        if isinstance(x, dict):
            items = [f'{pad}{json.dumps(k)}: {fmt(v, indent + 1)}' for k, v in sorted(x.items())]
            return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
        if isinstance(x, list) and x and isinstance(x[0], list):
            rows = [pad + json.dumps(r) for r in x]
            return "[\n" + ",\n".join(rows) + "\n" + "  " * indent + "]"
        return json.dumps(x)
    return fmt(obj, 0) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_pair(cfg, need_aut=True):
    if cfg.spec is None:
        raise UsageError("--spec is required")
    spec = load_spec(cfg.spec)
    if not need_aut:
        return spec, None
    if cfg.aut is None:
        raise UsageError("--aut is required")
    psi = load_automorphism(cfg.aut)
    bad = violations(spec, psi)
    if bad:
        raise AutomorphismError(bad)
    return spec, psi


# ---------------------------------------------------------------------------
# subcommands

def cmd_classify(cfg, args):
    spec, psi = _load_pair(cfg)
    rep = invariants(spec, psi)
    lines = [f"{k}: {v}" for k, v in rep.as_dict().items()]
    lines.append(f"growth: {rep.growth_string()}")
    _emit("\n".join(lines) + "\n", cfg.out)


def cmd_decide(cfg, args):
    spec, psi = _load_pair(cfg)
    g, h = parse_element(args.g), parse_element(args.h)
    ok, w = is_twisted_conjugate(spec, psi, g, h)
    _emit(f"conjugate {w}\n" if ok else "not-conjugate\n", cfg.out)


def _radius_cap(cfg, n):
    if n < 1:
        raise UsageError("radius must be at least 1")
    if n > MAX_RADIUS and not cfg.force:
        raise UsageError(f"radius {n} exceeds cap {MAX_RADIUS}; pass --force to override")


def cmd_count(cfg, args):
    spec, psi = _load_pair(cfg)
    if cfg.radius is None:
        raise UsageError("--radius is required")
    _radius_cap(cfg, cfg.radius)
    _emit(growth_table(spec, psi, None, cfg.radius).to_csv(), cfg.out)


def cmd_fit(cfg, args):
    predicted = None
    if args.csv:
        with open(args.csv) as fh:
            table = GrowthTable.from_csv(fh.read())
        if cfg.spec and cfg.aut:
            predicted = classify(*_load_pair(cfg))
    else:
        spec, psi = _load_pair(cfg)
        if cfg.radius is None:
            raise UsageError("give a CSV file or --radius")
        _radius_cap(cfg, cfg.radius)
        table = growth_table(spec, psi, None, cfg.radius)
        predicted = classify(spec, psi)
    fit = fit_growth(table)
    e, f = fit.model
    lines = [f"selected: {growth_string(e, f)}",
             f"exponent_estimate: {fit.exponent_estimate:.4f}",
             f"log_factor: {fit.log_factor}",
             f"residual: {fit.residual:.6g}"]
    if predicted is not None:
        same = fit.order == total_order(*predicted)
        lines.append(f"predicted: {growth_string(*predicted)}")
        lines.append(f"match: {same}")
    _emit("\n".join(lines) + "\n", cfg.out)


def _parse_thetas(text):
    out = []
    for part in text.split(","):
        slope, _, offset = part.partition(":")
        out.append(AffineMap(int(slope), int(offset or 0)))
    return out


def _diagnostics_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "value", "model", "ratio"])
    for r in rows:
        w.writerow([r.N, r.value, f"{r.model:.10g}", f"{r.ratio:.10g}"])
    return buf.getvalue()


def cmd_gcdsum(cfg, args):
    if args.theta:
        thetas = _parse_thetas(args.theta)
    elif cfg.spec:
        spec, psi = _load_pair(cfg)
        a = tuple(int(x) for x in args.at.split(",")) if args.at else (0,) * spec.k
        thetas = list(theta_system(spec, psi, None, a).theta)
        if not thetas:
            raise UsageError("the affine system is empty for this automorphism")
    else:
        thetas = [AffineMap(1, 0)] * args.d
    d = len(thetas)
    l = args.l if args.l is not None else d
    grid = cfg.grid or ([cfg.N] if cfg.N else [])
    if len(grid) < 3:
        raise UsageError("need a grid of at least three N values (--grid)")
    if max(grid) > MAX_GCD_N and not cfg.force:
        raise UsageError(f"N = {max(grid)} exceeds cap {MAX_GCD_N}; pass --force to override")
    values = {N: gcd_sum(thetas, l, N) for N in grid}
    rows, spread = ratio_diagnostics(values, l, d)
    _emit(_diagnostics_csv(rows), cfg.out)
    print(f"# spread {spread:.6f}", file=sys.stderr)


def cmd_totient(cfg, args):
    grid = cfg.grid or ([cfg.N] if cfg.N else [])
    if not grid:
        raise UsageError("give --N or --grid")
    if max(grid) > MAX_TOTIENT_N and not cfg.force:
        raise UsageError(f"N = {max(grid)} exceeds cap {MAX_TOTIENT_N}; pass --force to override")
    phi = totient_sieve(max(grid))
    prefix = phi.cumsum()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "value", "model", "ratio"])
    for N in grid:
        model = 3 * N * N / math.pi ** 2
        w.writerow([N, int(prefix[N]), f"{model:.10g}", f"{prefix[N] / model:.10g}"])
    _emit(buf.getvalue(), cfg.out)


def cmd_construct_log(cfg, args):
    from .constructor import build_log_automorphism
    if args.spec_file and not cfg.spec:
        cfg.spec = args.spec_file
        cfg.check()
    spec, _ = _load_pair(cfg, need_aut=False)
    psi = build_log_automorphism(spec)
    _emit(dump_json(psi.to_json()), cfg.out)


COMMANDS = {
    "classify": cmd_classify,
    "decide": cmd_decide,
    "count": cmd_count,
    "fit": cmd_fit,
    "gcdsum": cmd_gcdsum,
    "totient": cmd_totient,
    "construct-log": cmd_construct_log,
}


def build_parser():
    p = argparse.ArgumentParser(prog="twisted-growth",
                                description="Twisted conjugacy in generalised Heisenberg groups.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="group spec JSON")
    common.add_argument("--aut", help="automorphism JSON")
    common.add_argument("--radius", type=int)
    common.add_argument("--N", type=int)
    common.add_argument("--grid", type=_grid, default=[], help="comma-separated N values")
    common.add_argument("--out", "-o", help="write output here instead of stdout")
    common.add_argument("--force", action="store_true", help="override size caps")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="invariants and predicted growth")
    d = sub.add_parser("decide", parents=[common], help="decide g ~ h")
    d.add_argument("g")
    d.add_argument("h")
    sub.add_parser("count", parents=[common], help="class counts per radius as CSV")
    f = sub.add_parser("fit", parents=[common], help="select a growth model")
    f.add_argument("csv", nargs="?")
    g = sub.add_parser("gcdsum", parents=[common], help="gcd sums and ratio diagnostics")
    g.add_argument("--d", type=int, default=2, help="number of identity maps")
    g.add_argument("--l", type=int, help="total number of coordinates")
    g.add_argument("--theta", help="maps as slope:offset,slope:offset,...")
    g.add_argument("--at", help="base point a for the affine system of --spec/--aut")
    sub.add_parser("totient", parents=[common], help="totient summatory diagnostics")
    c = sub.add_parser("construct-log", parents=[common], help="build a log-growth automorphism")
    c.add_argument("spec_file", nargs="?")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = RunConfig(args.command, args.spec, args.aut, args.radius, args.N,
                    args.grid, args.out, args.force)
    try:
        cfg.check()
        COMMANDS[args.command](cfg, args)
    except AutomorphismError as exc:
        print("invalid automorphism:", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return 2
    except (SpecError, NotInGroup, UsageError, ValueError, OverflowError,
            OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
