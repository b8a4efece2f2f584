#!/usr/bin/env python3
"""Extract the six UCI "multiple features" views as whitespace tables.

Reads the CSV copies shipped inside an mvlearn wheel (each with a header row
and a trailing label column) and writes mfeat-{fou,fac,kar,pix,zer,mor} in
the original UCI layout: 2000 rows, 200 per digit, digits 0..9 in order.

usage: fetch_mfeat.py <mvlearn-wheel> <out-dir>
"""

import csv
import io
import sys
import zipfile
from pathlib import Path

VIEWS = ["pix", "fou", "kar", "fac", "zer", "mor"]


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    wheel, out = Path(sys.argv[1]), Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(wheel) as zf:
        for view in VIEWS:
            name = f"mvlearn/datasets/UCImultifeature/mfeat-{view}.csv"
            rows = list(csv.reader(io.TextIOWrapper(zf.open(name), "utf-8")))[1:]
            labels = [int(float(r[-1])) for r in rows]
            if labels != sorted(labels) or len(rows) != 2000:
                raise SystemExit(f"{view}: unexpected row layout")
            with open(out / f"mfeat-{view}", "w") as f:
                for r in rows:
                    f.write(" ".join(repr(float(v)) for v in r[:-1]) + "\n")
            print(f"{view}: {len(rows)} x {len(rows[0]) - 1}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
