"""Stage 1: univariate penalized B-spline smoothers with GCV selection.

Each predictor column gets its own cubic P-spline fit of the outcome; the
fitted vectors become the ``np`` predictors of the second stage.
"""

from __future__ import annotations

import json
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import BSpline

from ridgepath._threads import resolve_threads
from ridgepath.ingest import Dataset, DataError

log = logging.getLogger(__name__)

DEFAULT_K = 10
LAMBDA_GRID = np.logspace(-8.0, 8.0, 201)
GOLDEN_TOL = 1e-6
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class SmootherError(ArithmeticError):
    """The penalized normal equations are singular."""


@dataclass(frozen=True)
class SplineBasis:
    knots: np.ndarray  # interior knots only
    degree: int
    k: int
    boundary: tuple[float, float]
    note: str | None = None

    @property
    def full_knots(self) -> np.ndarray:
        lo, hi = self.boundary
        d = self.degree + 1
        return np.r_[np.full(d, lo), self.knots, np.full(d, hi)]

    def design(self, x) -> np.ndarray:
        """Dense ``n x k`` basis matrix; ``x`` must lie within the boundary."""
        x = np.asarray(x, dtype=float)
        return BSpline.design_matrix(x, self.full_knots, self.degree).toarray()

    def greville(self) -> np.ndarray:
        t = self.full_knots
        return np.array(
            [t[i + 1 : i + self.degree + 1].mean() for i in range(self.k)]
        )

    def penalty(self) -> np.ndarray:
        """Second-order divided-difference penalty over the Greville abscissae.

        Dividing by the abscissa spacing keeps every linear function
        penalty-free even when the quantile knots are unevenly spaced; with
        evenly spaced abscissae it reduces to the usual ``D2'D2``.
        """
        if self.k < 3:
            return np.zeros((self.k, self.k))
        h = np.diff(self.greville())
        D1 = np.diff(np.eye(self.k), axis=0) / h[:, None]
        D2 = np.diff(D1, axis=0) * h.mean()
        return D2.T @ D2


@dataclass(frozen=True)
class SmootherFit:
    """One fitted smoother.

    ``lam`` is measured relative to the mean eigenvalue of ``B'B``.
    ``fitted`` is ``None`` for fits restored from JSON.
    """

    basis: SplineBasis
    coef: np.ndarray
    lam: float
    edf: float
    gcv: float
    fitted: np.ndarray | None = None

    def roughness(self) -> float:
        return float(self.coef @ self.basis.penalty() @ self.coef)

    def to_dict(self) -> dict:
        return {
            "knots": self.basis.knots.tolist(),
            "degree": self.basis.degree,
            "coef": self.coef.tolist(),
            "lambda": self.lam,
            "edf": self.edf,
            "gcv": self.gcv,
            "boundary": list(self.basis.boundary),
            "note": self.basis.note,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SmootherFit":
        knots = np.asarray(data["knots"], dtype=float)
        coef = np.asarray(data["coef"], dtype=float)
        basis = SplineBasis(
            knots=knots,
            degree=int(data["degree"]),
            k=coef.size,
            boundary=tuple(float(b) for b in data["boundary"]),
            note=data.get("note"),
        )
        return cls(
            basis=basis,
            coef=coef,
            lam=float(data["lambda"]),
            edf=float(data["edf"]),
            gcv=float(data.get("gcv", math.nan)),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SmootherFit":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def build_basis(x, k: int = DEFAULT_K, degree: int = 3) -> SplineBasis:
    """Cubic B-spline basis with interior knots at quantiles of the distinct x.

    With fewer than ``k`` distinct values ``k`` shrinks to that count; with
    fewer than 4 the basis degrades to a straight line (degree 1, no interior
    knots). Both cases are recorded in ``note`` and raised as warnings.
    """
    if k < 4:
        raise ValueError("k must be at least 4")
    ux = np.unique(np.asarray(x, dtype=float))
    if ux.size < 2:
        raise DataError("cannot build a basis on a constant x")
    boundary = (float(ux[0]), float(ux[-1]))
    note = None
    if ux.size < 4:
        note = f"only {ux.size} distinct x values; fell back to linear regression"
        warnings.warn(note, stacklevel=2)
        return SplineBasis(knots=np.empty(0), degree=1, k=2, boundary=boundary, note=note)
    if ux.size < k:
        note = f"k reduced from {k} to {ux.size} (distinct x values)"
        warnings.warn(note, stacklevel=2)
        k = int(ux.size)
    n_interior = k - degree - 1
    probs = np.arange(1, n_interior + 1) / (n_interior + 1)
    knots = np.quantile(ux, probs)
    return SplineBasis(knots=knots, degree=degree, k=k, boundary=boundary, note=note)


class _PenalizedProblem:
    """Cached cross-products for repeated solves at different lambda."""

    def __init__(self, x, y, basis: SplineBasis):
        self.y = np.asarray(y, dtype=float)
        self.basis = basis
        self.B = basis.design(x)
        if self.B.shape[0] != self.y.size:
            raise DataError("x and y lengths differ")
        self.BtB = self.B.T @ self.B
        self.Bty = self.B.T @ self.y
        self.P = basis.penalty()
        self.scale = np.trace(self.BtB) / basis.k
        self.n = self.y.size

    def solve(self, lam: float) -> SmootherFit:
        if lam < 0:
            raise ValueError("lambda must be >= 0")
        A = self.BtB + lam * self.scale * self.P
        if lam == 0 and np.linalg.matrix_rank(self.B) < self.basis.k:
            raise SmootherError("basis matrix is rank deficient and lambda = 0")
        try:
            L = np.linalg.cholesky(A)
        except np.linalg.LinAlgError:
            raise SmootherError("penalized normal equations are not positive definite") from None

        def chol_solve(rhs):
            return np.linalg.solve(L.T, np.linalg.solve(L, rhs))

        coef = chol_solve(self.Bty)
        edf = float(np.trace(chol_solve(self.BtB)))
        fitted = self.B @ coef
        resid = self.y - fitted
        rss = float(resid @ resid)
        denom = self.n - edf
        gcv = self.n * rss / denom**2 if denom > 0 else math.inf
        return SmootherFit(
            basis=self.basis, coef=coef, lam=float(lam), edf=edf, gcv=gcv, fitted=fitted
        )


def fit_penalized(x, y, basis: SplineBasis, lam: float) -> SmootherFit:
    """Minimize ``||y - Bc||^2 + lam * s * c'Pc`` with ``s`` the mean eigenvalue of B'B."""
    return _PenalizedProblem(x, y, basis).solve(lam)


def _golden(f, a: float, b: float, tol: float = GOLDEN_TOL) -> float:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def gcv_select(x, y, basis: SplineBasis, grid=LAMBDA_GRID) -> SmootherFit:
    """Pick lambda minimizing GCV on a log grid, then refine by golden section."""
    prob = _PenalizedProblem(x, y, basis)
    if basis.k < 3:
        # penalty-free straight line
        return prob.solve(0.0)
    grid = np.asarray(grid, dtype=float)
    fits = [prob.solve(lam) for lam in grid]
    scores = np.array([f.gcv for f in fits])
    # ties go to the larger lambda
    best = len(scores) - 1 - int(np.argmin(scores[::-1]))
    lo = math.log10(grid[max(best - 1, 0)])
    hi = math.log10(grid[min(best + 1, len(grid) - 1)])
    refined = prob.solve(10.0 ** _golden(lambda t: prob.solve(10.0**t).gcv, lo, hi))
    return refined if refined.gcv < fits[best].gcv else fits[best]


def predict(fit: SmootherFit, x_new) -> np.ndarray:
    """Evaluate the smoother; beyond the training range it continues linearly."""
    x_new = np.asarray(x_new, dtype=float)
    lo, hi = fit.basis.boundary
    spline = BSpline(fit.basis.full_knots, fit.coef, fit.basis.degree, extrapolate=False)
    slope = spline.derivative()
    inside = np.clip(x_new, lo, hi)
    out = spline(inside)
    below = x_new < lo
    above = x_new > hi
    if below.any():
        out[below] = spline(lo) + slope(lo) * (x_new[below] - lo)
    if above.any():
        out[above] = spline(hi) + slope(hi) * (x_new[above] - hi)
    return out


def smooth_column(x, y, k: int = DEFAULT_K) -> SmootherFit:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        basis = build_basis(x, k)
    if basis.note:
        log.warning("%s", basis.note)
    return gcv_select(x, y, basis)


def np_names(p: int) -> list[str]:
    return [f"np{j + 1}" for j in range(p)]


def np_transform(
    d: Dataset, k: int = DEFAULT_K, threads: int | None = None
) -> tuple[np.ndarray, list[SmootherFit]]:
    """Fit one smoother per predictor; returns the ``n x p`` np matrix and the fits."""
    workers = min(resolve_threads(threads), d.p)
    cols = [d.X[:, j] for j in range(d.p)]
    if workers <= 1:
        fits = [smooth_column(x, d.y, k) for x in cols]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fits = list(pool.map(lambda x: smooth_column(x, d.y, k), cols))
    return np.column_stack([f.fitted for f in fits]), fits


def two_stage_frame(d: Dataset, npmat: np.ndarray) -> tuple[list[str], np.ndarray]:
    """The ``2p + 1`` column frame: y, the x columns, then np1..npp."""
    names = [d.y_name, *d.x_names, *np_names(d.p)]
    return names, np.column_stack([d.y, d.X, npmat])
