"""Download SATLIB benchmark archives for larger-scale experiments.

The test suite and the bundled presets never require these files: the
package ships five small satisfiable 20-variable instances under
src/restartbandits/data/. This script exists for reproducing experiments
on the standard uniform-random 3-SAT families, which are distributed at:

    https://www.cs.ubc.ca/~hoos/SATLIB/benchm.html
    https://www.cs.ubc.ca/~hoos/SATLIB/Benchmarks/SAT/RND3SAT/uf20-91.tar.gz
    https://www.cs.ubc.ca/~hoos/SATLIB/Benchmarks/SAT/RND3SAT/uf50-218.tar.gz
    https://www.cs.ubc.ca/~hoos/SATLIB/Benchmarks/SAT/RND3SAT/uf100-430.tar.gz
    https://www.cs.ubc.ca/~hoos/SATLIB/Benchmarks/SAT/RND3SAT/uf250-1065.tar.gz

Usage:

    python3 scripts/fetch_satlib.py --family uf100-430 --dest data/satlib

The archives unpack to one DIMACS .cnf file per instance; point the `sat`
subcommand at them with an instances config of kind "files". Note that
SATLIB archives may append a '%' terminator block after the clauses; the
parser tolerates it.
"""

import argparse
import sys
import tarfile
import urllib.request
from pathlib import Path

BASE = "https://www.cs.ubc.ca/~hoos/SATLIB/Benchmarks/SAT/RND3SAT"
FAMILIES = ("uf20-91", "uf50-218", "uf100-430", "uf250-1065")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--family", choices=FAMILIES, default="uf100-430")
    parser.add_argument("--dest", type=Path, default=Path("data/satlib"))
    args = parser.parse_args()

    url = f"{BASE}/{args.family}.tar.gz"
    args.dest.mkdir(parents=True, exist_ok=True)
    archive = args.dest / f"{args.family}.tar.gz"
    if archive.exists():
        print(f"{archive} already present, skipping download")
    else:
        print(f"fetching {url}")
        try:
            urllib.request.urlretrieve(url, archive)
        except OSError as exc:
            print(f"download failed: {exc}", file=sys.stderr)
            print("this script needs network access; the test suite does not",
                  file=sys.stderr)
            return 1
    with tarfile.open(archive) as tar:
        tar.extractall(args.dest, filter="data")
    n = len(list(args.dest.glob("*.cnf")))
    print(f"extracted {n} instances under {args.dest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
