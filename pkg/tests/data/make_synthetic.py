"""Regenerate synthetic.csv (run from this directory)."""

import numpy as np

rng = np.random.default_rng(20230601)
n = 240
x1 = rng.uniform(0.2, 3.0, n)
x2 = 0.5 * x1 + rng.uniform(0.0, 2.0, n)
x3 = rng.gamma(4.0, 2.0, n)
x4 = rng.uniform(0.05, 0.4, n)
y = (
    60
    + 8 * np.sin(1.5 * x1)
    + 3 * x2
    + 0.15 * (x3 - 8) ** 2
    + 90 * x4
    + rng.normal(0.0, 4.0, n)
)
rows = np.column_stack([y, x1, x2, x3, x4])
with open("synthetic.csv", "w") as fh:
    fh.write("mort,a,b,c,d\n")
    for i, r in enumerate(rows):
        cells = [f"{v:.6g}" for v in r]
        if i == 17:
            cells[3] = "NA"
        fh.write(",".join(cells) + "\n")
