"""Write the preset group specs and automorphisms to configs/ as JSON."""
import argparse
from pathlib import Path

from twisted_growth import presets
from twisted_growth.cli import dump_json


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "configs"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for sname, make in presets.SPECS.items():
        spec = make()
        (out / f"{sname.lower()}.json").write_text(dump_json(spec.to_json()))
        for fname, family in presets.FAMILIES.items():
            psi = family(spec)
            (out / f"{sname.lower()}_{fname}.json").write_text(dump_json(psi.to_json()))
    print(f"wrote configs to {out}")


if __name__ == "__main__":
    main()
