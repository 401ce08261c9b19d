"""Export the bundled fixture datasets to CSV.

Sources are the copies shipped inside scikit-learn and statsmodels, so no
network access is needed. Every file has a header row and the label in the
last column, named `class`.
"""

import csv
import pathlib

import numpy as np
from sklearn import datasets as skd
import statsmodels.api as sm

OUT = pathlib.Path(__file__).resolve().parent


def write(name, x, y, feature_names):
    path = OUT / f"{name}.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(feature_names) + ["class"])
        for row, label in zip(x, y):
            w.writerow([repr(float(v)) for v in row] + [label])
    print(f"{path.name}: n={len(y)} d={x.shape[1]} classes={len(set(y))}")


def main():
    wine = skd.load_wine()
    write("wine", wine.data, [f"c{t + 1}" for t in wine.target], wine.feature_names)

    iris = skd.load_iris()
    write("iris", iris.data, [iris.target_names[t] for t in iris.target], iris.feature_names)

    wdbc = skd.load_breast_cancer()
    write("wdbc", wdbc.data, [wdbc.target_names[t] for t in wdbc.target],
          [f.replace(" ", "_") for f in wdbc.feature_names])

    anes = sm.datasets.anes96.load_pandas().data
    cols = ["popul", "TVnews", "selfLR", "ClinLR", "DoleLR", "PID", "age", "educ", "income"]
    write("anes96", anes[cols].to_numpy(), ["dole" if v else "clinton" for v in anes["vote"]], cols)

    # Affairs survey, stratified subsample of 1000 rows.
    fair = sm.datasets.fair.load_pandas().data
    cols = ["rate_marriage", "age", "yrs_married", "children", "religious",
            "educ", "occupation", "occupation_husb"]
    y = np.where(fair["affairs"].to_numpy() > 0, "yes", "no")
    rng = np.random.default_rng(20240601)
    keep = []
    for label in ("no", "yes"):
        idx = np.flatnonzero(y == label)
        share = round(1000 * len(idx) / len(y))
        keep.extend(rng.choice(idx, size=share, replace=False))
    keep = np.sort(np.array(keep))
    write("fair", fair[cols].to_numpy()[keep], y[keep], cols)


if __name__ == "__main__":
    main()
