#!/usr/bin/env python3
"""Build the benchmark CSVs under data/.

Sources, in order of preference:
  * breast_cancer  - scikit-learn's bundled copy of UCI WDBC (569 x 30)
  * diabetes       - Pima Indians diabetes (768 x 8), KEEL copy shipped in the
                     `imbalanced-databases` wheel
  * haberman       - Haberman survival (306 x 3), same wheel
  * banknote       - UCI banknote authentication (1372 x 4), downloaded
  * transfusion    - UCI blood transfusion service center (748 x 4), downloaded

Every output file has one header row and the class label in the last column.
Datasets that cannot be obtained are reported and skipped.
"""

import argparse
import csv
import io
import os
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
DOWNLOADS = {
    "banknote": (
        f"{UCI}/00267/data_banknote_authentication.txt",
        ["variance", "skewness", "curtosis", "entropy", "class"],
        False,
    ),
    "transfusion": (
        f"{UCI}/blood-transfusion/transfusion.data",
        ["recency", "frequency", "monetary", "time", "donated"],
        True,
    ),
}


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def breast_cancer(out):
    from sklearn.datasets import load_breast_cancer

    bunch = load_breast_cancer()
    header = [n.replace(" ", "_") for n in bunch.feature_names] + ["diagnosis"]
    names = list(bunch.target_names)
    rows = [
        [repr(float(v)) for v in x] + [names[int(y)]]
        for x, y in zip(bunch.data, bunch.target)
    ]
    write_csv(os.path.join(out, "breast_cancer.csv"), header, rows)


def parse_keel(text):
    header, rows, in_data = [], [], False
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if in_data:
            rows.append([c.strip() for c in line.split(",")])
        elif line.lower().startswith("@attribute"):
            header.append(line.split()[1].lower())
        elif line.lower().startswith("@data"):
            in_data = True
    return header, rows


def keel_sets(out):
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
             "-d", tmp, "imbalanced-databases==0.1.1"],
            check=True,
        )
        wheel = next(f for f in os.listdir(tmp) if f.endswith(".whl"))
        z = zipfile.ZipFile(os.path.join(tmp, wheel))
        for src, dst in (("pima", "diabetes"), ("haberman", "haberman")):
            text = z.read(f"imbalanced_databases/data/{src}/{src}.dat").decode()
            header, rows = parse_keel(text)
            write_csv(os.path.join(out, f"{dst}.csv"), header, rows)


def downloaded(out):
    for name, (url, header, skip_header) in DOWNLOADS.items():
        try:
            with urllib.request.urlopen(url, timeout=20) as resp:
                text = resp.read().decode()
        except Exception as exc:  # network is optional
            print(f"skipped {name}: {exc}", file=sys.stderr)
            continue
        lines = [l for l in text.splitlines() if l.strip()]
        if skip_header:
            lines = lines[1:]
        rows = list(csv.reader(io.StringIO("\n".join(lines))))
        write_csv(os.path.join(out, f"{name}.csv"), header,
                  [[c.strip() for c in r] for r in rows])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "data"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    breast_cancer(args.out)
    keel_sets(args.out)
    downloaded(args.out)


if __name__ == "__main__":
    main()
