"""TRACE series, linear-vs-np comparison tables, and their file emitters."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ridgepath._threads import resolve_threads
from ridgepath.grrcore import (
    CanonicalModel,
    ShrinkagePath,
    beta_at,
    canonical_decompose,
    delta_at,
    destandardize,
    dmse_factors,
    intercept_at,
    relative_risk_at,
)
from ridgepath.ingest import Dataset, StandardizedDesign, pearson_corr, standardize
from ridgepath import svg

DEFAULT_STEPS = 101


@dataclass(frozen=True)
class TraceSeries:
    m_grid: np.ndarray
    delta: np.ndarray  # (len(m_grid), p)
    coef: np.ndarray
    risk: np.ndarray
    m_star: float
    labels: list[str] = field(default_factory=list)

    @property
    def p(self) -> int:
        return self.coef.shape[1]

    @property
    def knot_index(self) -> int:
        return int(np.flatnonzero(self.m_grid == self.m_star)[0])


def trace_grid(p: int, m_star: float, steps: int = DEFAULT_STEPS) -> np.ndarray:
    if steps < 2:
        raise ValueError("steps must be >= 2")
    grid = np.linspace(0.0, float(p), steps)
    return np.unique(np.r_[grid, m_star])


def build_traces(
    cm: CanonicalModel,
    path: ShrinkagePath,
    steps: int = DEFAULT_STEPS,
    labels: Sequence[str] | None = None,
    threads: int | None = None,
) -> TraceSeries:
    grid = trace_grid(cm.p, path.m_star, steps)

    def row(m):
        return delta_at(path, m), beta_at(cm, path, m), relative_risk_at(cm, path, m)

    workers = resolve_threads(threads)
    if workers <= 1:
        rows = [row(m) for m in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, grid))
    delta, coef, risk = (np.array(col) for col in zip(*rows))
    return TraceSeries(
        m_grid=grid,
        delta=delta,
        coef=coef,
        risk=risk,
        m_star=path.m_star,
        labels=list(labels) if labels else [f"x{j + 1}" for j in range(cm.p)],
    )


def _fmt(v: float) -> str:
    # repr is the shortest exact round-trip form and ignores locale
    return repr(float(v))


def emit_trace_csv(t: TraceSeries, path: str | Path) -> Path:
    p = t.p
    header = (
        ["m"]
        + [f"delta_{j}" for j in range(1, p + 1)]
        + [f"beta_{j}" for j in range(1, p + 1)]
        + [f"risk_{j}" for j in range(1, p + 1)]
        + ["knot"]
    )
    knot = t.knot_index
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, m in enumerate(t.m_grid):
            w.writerow(
                [_fmt(m)]
                + [_fmt(v) for v in t.delta[i]]
                + [_fmt(v) for v in t.coef[i]]
                + [_fmt(v) for v in t.risk[i]]
                + ["1" if i == knot else "0"]
            )
    return path


def load_trace_csv(path: str | Path, labels: Sequence[str] | None = None) -> TraceSeries:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    p = sum(h.startswith("delta_") for h in header)
    data = np.array([[float(v) for v in r[:-1]] for r in body])
    knot = [int(r[-1]) for r in body].index(1)
    return TraceSeries(
        m_grid=data[:, 0],
        delta=data[:, 1 : 1 + p],
        coef=data[:, 1 + p : 1 + 2 * p],
        risk=data[:, 1 + 2 * p : 1 + 3 * p],
        m_star=float(data[knot, 0]),
        labels=list(labels) if labels else [f"x{j + 1}" for j in range(p)],
    )


def emit_trace_svg(t: TraceSeries, kind: str, path: str | Path, title: str | None = None) -> Path:
    if kind not in ("coef", "risk"):
        raise ValueError("kind must be 'coef' or 'risk'")
    if t.m_grid.size == 0:
        raise ValueError("empty trace series")
    values = t.coef if kind == "coef" else t.risk
    if title is None:
        title = "coef TRACE" if kind == "coef" else "rmse TRACE (relative MSE risk)"
    doc = svg.line_chart(
        x=t.m_grid,
        series=[values[:, j] for j in range(t.p)],
        labels=t.labels or [f"x{j + 1}" for j in range(t.p)],
        marker_x=t.m_star,
        x_label="m",
        y_label="value",
        title=title,
    )
    path = Path(path)
    path.write_text(doc, encoding="utf-8")
    return path


@dataclass(frozen=True)
class FittedModel:
    """Everything stage 2 produces for one predictor set."""

    label: str
    names: list[str]
    sd: StandardizedDesign
    cm: CanonicalModel
    path: ShrinkagePath


def fit_model(label: str, d: Dataset) -> FittedModel:
    sd = standardize(d)
    cm = canonical_decompose(sd)
    return FittedModel(label=label, names=d.x_names, sd=sd, cm=cm, path=dmse_factors(cm))


@dataclass(frozen=True)
class ModelSummary:
    label: str
    names: list[str]
    formula: str
    residual_mean_square: float
    residual_se: float
    beta_ols: np.ndarray
    beta_ml: np.ndarray
    relrisk_ols: np.ndarray
    relrisk_ml: np.ndarray
    dmse: np.ndarray
    m_star: float
    residual_se_orig: float
    beta_ols_orig: np.ndarray
    beta_ml_orig: np.ndarray
    intercept_ols: float
    intercept_ml: float

    def to_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return out


def summarize(model: FittedModel) -> ModelSummary:
    cm, path, sd = model.cm, model.path, model.sd
    beta_ml = beta_at(cm, path, path.m_star)
    return ModelSummary(
        label=model.label,
        names=list(model.names),
        formula=f"{model.sd.names[0] if model.sd.names else 'y'} ~ " + " + ".join(model.names),
        residual_mean_square=cm.rms_ols,
        residual_se=cm.resid_se,
        beta_ols=cm.beta_ols,
        beta_ml=beta_ml,
        relrisk_ols=relative_risk_at(cm, path, 0.0),
        relrisk_ml=relative_risk_at(cm, path, path.m_star),
        dmse=path.dmse,
        m_star=path.m_star,
        residual_se_orig=cm.resid_se * sd.y_sd,
        beta_ols_orig=destandardize(cm.beta_ols, sd),
        beta_ml_orig=destandardize(beta_ml, sd),
        intercept_ols=intercept_at(sd, cm.beta_ols),
        intercept_ml=intercept_at(sd, beta_ml),
    )


@dataclass(frozen=True)
class ComparisonReport:
    linear: ModelSummary
    nonparametric: ModelSummary
    risk_product_linear: np.ndarray
    risk_product_np: np.ndarray
    winner: list[str]  # per variable: "np", "linear" or "tie"

    @property
    def np_wins(self) -> int:
        return self.winner.count("np")

    @property
    def linear_wins(self) -> int:
        return self.winner.count("linear")

    @property
    def ties(self) -> int:
        return self.winner.count("tie")

    def to_dict(self) -> dict:
        return {
            "models": {"linear": self.linear.to_dict(), "np": self.nonparametric.to_dict()},
            "risk_product_linear": self.risk_product_linear.tolist(),
            "risk_product_np": self.risk_product_np.tolist(),
            "winner": self.winner,
            "np_wins": self.np_wins,
            "linear_wins": self.linear_wins,
            "ties": self.ties,
        }


def compare_models(linear: ModelSummary, npm: ModelSummary) -> ComparisonReport:
    """Absolute ML risk (residual mean square x relative risk) per variable.

    The smaller product wins the variable.
    """
    if linear.beta_ols.size != npm.beta_ols.size:
        raise ValueError("models have different numbers of predictors")
    a = linear.residual_mean_square * linear.relrisk_ml
    b = npm.residual_mean_square * npm.relrisk_ml
    winner = ["np" if bj < aj else "linear" if aj < bj else "tie" for aj, bj in zip(a, b)]
    return ComparisonReport(
        linear=linear, nonparametric=npm, risk_product_linear=a, risk_product_np=b, winner=winner
    )


def write_json(payload, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def pairs_data(columns: Mapping[str, Sequence[float]], selection: Sequence[str]) -> list[tuple]:
    """Long-format rows ``(pairIndex, xName, yName, xValue, yValue)``.

    One block per lower-panel cell of a pairs plot: the variable later in
    ``selection`` goes on the vertical axis.
    """
    unknown = [s for s in selection if s not in columns]
    if unknown:
        raise KeyError(f"unknown column(s): {', '.join(unknown)}")
    n = {len(columns[s]) for s in selection}
    if len(n) > 1:
        raise ValueError("selected columns have different lengths")
    rows = []
    cells = [(i, j) for j in range(len(selection)) for i in range(j)]
    for block, (i, j) in enumerate(cells):
        xn, yn = selection[i], selection[j]
        for xv, yv in zip(columns[xn], columns[yn]):
            rows.append((block, xn, yn, float(xv), float(yv)))
    return rows


def emit_pairs_csv(rows: list[tuple], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["pairIndex", "xName", "yName", "xValue", "yValue"])
        for block, xn, yn, xv, yv in rows:
            w.writerow([block, xn, yn, _fmt(xv), _fmt(yv)])
    return path


def format_corr_table(names: Sequence[str], table: np.ndarray, digits: int = 4) -> str:
    width = max(8, digits + 4, *(len(n) + 1 for n in names))
    lines = ["variable".ljust(width) + "".join(n.rjust(width) for n in names)]
    for i, name in enumerate(names):
        cells = [f"{table[i, j]:.{digits}f}".rjust(width) for j in range(i + 1)]
        lines.append(name.ljust(width) + "".join(cells))
    return "\n".join(lines)


def emit_corr_csv(names: Sequence[str], table: np.ndarray, path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["variable", *names])
        for i, name in enumerate(names):
            w.writerow([name] + [_fmt(table[i, j]) for j in range(i + 1)] + [""] * (len(names) - i - 1))
    return path


def top_predictors(d: Dataset, count: int = 2) -> list[int]:
    """Indices of the ``count`` x columns most correlated (in absolute value) with y."""
    cors = [abs(pearson_corr(d.y, d.X[:, j])) for j in range(d.p)]
    return sorted(range(d.p), key=lambda j: (-cors[j], j))[:count]


__all__ = [
    "ComparisonReport",
    "FittedModel",
    "ModelSummary",
    "TraceSeries",
    "build_traces",
    "compare_models",
    "emit_corr_csv",
    "emit_pairs_csv",
    "emit_trace_csv",
    "emit_trace_svg",
    "fit_model",
    "format_corr_table",
    "load_trace_csv",
    "pairs_data",
    "summarize",
    "top_predictors",
    "trace_grid",
    "write_json",
]

