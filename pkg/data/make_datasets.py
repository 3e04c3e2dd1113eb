"""Regenerate the bundled UCI benchmark CSVs from scikit-learn's packaged
copies (development helper; scikit-learn is not a package dependency).

Layout: one sample per row, features then label, no header.  Iris keeps its
species names; Wine uses 1-based integer class labels.
"""

import csv
from pathlib import Path

from sklearn.datasets import load_iris, load_wine

HERE = Path(__file__).parent


def write(path, features, labels):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row, label in zip(features, labels):
            writer.writerow([repr(float(v)) for v in row] + [label])


def main():
    iris = load_iris()
    write(HERE / "iris.csv", iris.data, [iris.target_names[t] for t in iris.target])
    wine = load_wine()
    write(HERE / "wine.csv", wine.data, [int(t) + 1 for t in wine.target])
    print("wrote iris.csv and wine.csv")


if __name__ == "__main__":
    main()
