"""Print a compact detection-count table and write the full curve to CSV.

    python scripts/detnum_curve.py --out detnum.csv
"""

import argparse

from lipevent.analysis import detnum_curve, write_detnum_csv
from lipevent.detector import DEFAULT_LADDER


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-gt", type=int, default=300)
    ap.add_argument("--out", default="detnum.csv")
    args = ap.parse_args()
    ladders = [DEFAULT_LADDER[i:] for i in range(len(DEFAULT_LADDER))]
    rows = detnum_curve(range(1, args.max_gt + 1), ladders)
    write_detnum_csv(rows, args.out)
    counts = {(gt0, ladder): n for gt0, ladder, n in rows}
    names = ["-".join(map(str, lad)) for lad in ladders]
    print(f"{'gt0':>5}" + "".join(f"{n:>14}" for n in names))
    for gt0 in range(30, args.max_gt + 1, 30):
        print(f"{gt0:>5}" + "".join(f"{counts[gt0, lad]:>14}" for lad in ladders))
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
