"""Download the four regression benchmarks into ``data/`` as plain CSV.

Each output is verified against its expected (rows, columns) shape, the
same check ``wlsh_krr.data.load_csv`` applies when given the dataset name.

    python3 scripts/fetch_datasets.py            # all datasets
    python3 scripts/fetch_datasets.py wine       # one dataset
"""

import argparse
import csv
import gzip
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
DATA = Path(__file__).resolve().parent.parent / "data"

EXPECTED = {
    "wine": ("winequality.csv", (6497, 12)),
    "insurance": ("insurance.csv", (9822, 86)),
    "ct": ("ct_slices.csv", (53500, 385)),
    "covertype": ("covtype.csv", (581012, 55)),
}


def _get(url):
    print(f"fetching {url}", file=sys.stderr)
    with urllib.request.urlopen(url, timeout=120) as resp:
        return resp.read()


def _rows(text, delimiter):
    return [r for r in csv.reader(io.StringIO(text), delimiter=delimiter) if r]


def wine():
    """Red and white wines stacked; 11 physico-chemical features, quality label last."""
    header, rows = None, []
    for colour in ("red", "white"):
        part = _rows(_get(f"{UCI}/wine-quality/winequality-{colour}.csv").decode(), ";")
        header = header or part[0]
        rows.extend(part[1:])
    return header, rows


def insurance():
    """Training and evaluation parts of the insurance company benchmark; caravan label last."""
    train = _rows(_get(f"{UCI}/tic-mld/ticdata2000.txt").decode(), "\t")
    evals = _rows(_get(f"{UCI}/tic-mld/ticeval2000.txt").decode(), "\t")
    targets = _get(f"{UCI}/tic-mld/tictgts2000.txt").decode().split()
    return None, train + [r + [t] for r, t in zip(evals, targets)]


def ct():
    """Axial CT slice localisation; patient id dropped, reference location last."""
    raw = _get(f"{UCI}/00206/slice_localization_data.zip")
    with zipfile.ZipFile(io.BytesIO(raw)) as zf:
        name = next(n for n in zf.namelist() if n.endswith(".csv"))
        rows = _rows(zf.read(name).decode(), ",")
    return rows[0][1:], [r[1:] for r in rows[1:]]


def covertype():
    """Forest cover type; 54 cartographic features, cover class last."""
    rows = _rows(gzip.decompress(_get(f"{UCI}/covtype/covtype.data.gz")).decode(), ",")
    return None, rows


def fetch(name):
    filename, shape = EXPECTED[name]
    header, rows = globals()[name]()
    got = (len(rows), len(rows[0]))
    if got != shape:
        raise SystemExit(f"{name}: got shape {got}, expected {shape}")
    DATA.mkdir(exist_ok=True)
    out = DATA / filename
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        w.writerows(rows)
    print(f"{name}: wrote {out} {shape} header={'yes' if header else 'no'}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("names", nargs="*", metavar="name", help=f"any of {', '.join(EXPECTED)} (default: all)")
    names = p.parse_args().names or list(EXPECTED)
    unknown = sorted(set(names) - set(EXPECTED))
    if unknown:
        p.error(f"unknown dataset(s): {', '.join(unknown)}")
    for name in names:
        fetch(name)


if __name__ == "__main__":
    main()
