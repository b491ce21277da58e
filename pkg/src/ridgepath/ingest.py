"""CSV loading, standardization and Pearson correlation tables."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

MISSING_TOKENS = frozenset({"", "NA"})


class DataError(ValueError):
    """Raised when input data cannot be loaded or violates a precondition."""


@dataclass(frozen=True)
class Dataset:
    """Outcome vector ``y`` and predictor matrix ``X`` with column labels.

    ``names`` holds the outcome label followed by the predictor labels, in
    the order requested at load time.
    """

    names: list[str]
    y: np.ndarray
    X: np.ndarray
    dropped: int = 0

    def __post_init__(self):
        if self.X.ndim != 2 or self.y.ndim != 1:
            raise DataError("y must be 1-D and X 2-D")
        if self.X.shape[0] != self.y.shape[0]:
            raise DataError("y and X have different row counts")
        if len(self.names) != self.X.shape[1] + 1:
            raise DataError("names must list y followed by every X column")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def y_name(self) -> str:
        return self.names[0]

    @property
    def x_names(self) -> list[str]:
        return list(self.names[1:])

    def column(self, name: str) -> np.ndarray:
        if name == self.y_name:
            return self.y
        try:
            return self.X[:, self.x_names.index(name)]
        except ValueError:
            raise DataError(f"unknown column {name!r}") from None


@dataclass(frozen=True)
class StandardizedDesign:
    Xs: np.ndarray
    ys: np.ndarray
    x_means: np.ndarray
    x_sds: np.ndarray
    y_mean: float
    y_sd: float
    names: list[str] = field(default_factory=list)

    def to_json(self) -> list[dict]:
        """Export ``{column, mean, sd}`` records, outcome first."""
        names = self.names or ["y"] + [f"x{j + 1}" for j in range(self.Xs.shape[1])]
        means = [self.y_mean, *self.x_means.tolist()]
        sds = [self.y_sd, *self.x_sds.tolist()]
        return [
            {"column": c, "mean": float(m), "sd": float(s)}
            for c, m, s in zip(names, means, sds)
        ]


def _parse_cell(raw: str, column: str, line: int) -> float:
    text = raw.strip()
    if text in MISSING_TOKENS:
        return math.nan
    try:
        value = float(text)
    except ValueError:
        raise DataError(
            f"non-numeric value {raw!r} in column {column!r} (line {line})"
        ) from None
    if not math.isfinite(value):
        raise DataError(f"non-finite value {raw!r} in column {column!r} (line {line})")
    return value


def load_csv(path: str | Path, y: str, x: Sequence[str]) -> Dataset:
    """Read the outcome ``y`` and predictors ``x`` from a comma-separated file.

    Rows with a missing value (``NA`` or empty) in any selected column are
    dropped; the count is kept in ``Dataset.dropped``.
    """
    x = list(x)
    wanted = [y, *x]
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file, no header row") from None
        missing = [c for c in wanted if c not in header]
        if missing:
            raise DataError(f"column(s) not found in {path}: {', '.join(missing)}")
        idx = [header.index(c) for c in wanted]
        rows = []
        dropped = 0
        for line, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) < len(header):
                record = record + [""] * (len(header) - len(record))
            values = [_parse_cell(record[i], c, line) for i, c in zip(idx, wanted)]
            if any(math.isnan(v) for v in values):
                dropped += 1
                continue
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: no usable rows after dropping missing values")
    data = np.asarray(rows, dtype=float)
    return Dataset(names=wanted, y=data[:, 0].copy(), X=data[:, 1:].copy(), dropped=dropped)


def _moments(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return a.mean(axis=0), a.std(axis=0, ddof=1)


def standardize(d: Dataset) -> StandardizedDesign:
    """Center every column and scale it to unit sample standard deviation."""
    if d.n < 2:
        raise DataError("at least two rows are needed to standardize")
    x_means, x_sds = _moments(d.X)
    y_mean, y_sd = _moments(d.y)
    for name, sd in zip(d.names, [y_sd, *x_sds]):
        if not sd > 0:
            raise DataError(f"column {name!r} has zero variance")
    Xs = (d.X - x_means) / x_sds
    ys = (d.y - y_mean) / y_sd
    return StandardizedDesign(
        Xs=Xs,
        ys=ys,
        x_means=x_means,
        x_sds=x_sds,
        y_mean=float(y_mean),
        y_sd=float(y_sd),
        names=list(d.names),
    )


def save_standardization(sd: StandardizedDesign, path: str | Path) -> None:
    Path(path).write_text(json.dumps(sd.to_json(), indent=2) + "\n", encoding="utf-8")


def pearson_corr(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DataError("pearson_corr needs two 1-D vectors of equal length")
    if a.size < 3:
        raise DataError("pearson_corr needs at least 3 observations")
    da = a - a.mean()
    db = b - b.mean()
    saa = float(da @ da)
    sbb = float(db @ db)
    if saa == 0 or sbb == 0:
        raise DataError("pearson_corr: constant input vector")
    # sqrt(s*s) == s in IEEE arithmetic, so cor(v, v) is exactly 1
    r = float(da @ db) / math.sqrt(saa * sbb)
    return min(1.0, max(-1.0, r))


def corr_table(columns: Sequence) -> np.ndarray:
    """Lower-triangular correlation matrix; entries above the diagonal are NaN."""
    k = len(columns)
    out = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(i):
            out[i, j] = pearson_corr(columns[i], columns[j])
        out[i, i] = 1.0
    return out
