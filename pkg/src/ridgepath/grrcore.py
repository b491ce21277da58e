"""Stage 2: generalized ridge regression along the efficient shrinkage path.

Everything works in the canonical (principal-axis) coordinates of the
standardized design ``Xs = U diag(s) V'``. Component ``i`` of the OLS fit,
``c[i]``, is shrunk by a factor ``delta[i]`` in [0, 1]. The path is indexed by
the multicollinearity allowance ``m = p - sum(delta)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ridgepath.ingest import StandardizedDesign

KNOT_EPS = 1e-10
ORTHO_TOL = 1e-10


class RankDeficientError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class CanonicalModel:
    V: np.ndarray
    eig: np.ndarray  # eigenvalues of Xs'Xs, descending
    c: np.ndarray  # canonical OLS components
    beta_ols: np.ndarray
    sigma2: float
    n: int
    p: int

    @property
    def resid_se(self) -> float:
        return float(np.sqrt(self.sigma2))

    @property
    def rms_ols(self) -> float:
        return self.sigma2

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "eigenvalues": self.eig.tolist(),
            "V": self.V.ravel(order="C").tolist(),
            "c_hat": self.c.tolist(),
            "beta_ols": self.beta_ols.tolist(),
            "sigma2": self.sigma2,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CanonicalModel":
        p = int(data["p"])
        return cls(
            V=np.asarray(data["V"], dtype=float).reshape(p, p),
            eig=np.asarray(data["eigenvalues"], dtype=float),
            c=np.asarray(data["c_hat"], dtype=float),
            beta_ols=np.asarray(data["beta_ols"], dtype=float),
            sigma2=float(data["sigma2"]),
            n=int(data["n"]),
            p=p,
        )


@dataclass(frozen=True)
class ShrinkagePath:
    dmse: np.ndarray
    m_star: float

    @property
    def p(self) -> int:
        return self.dmse.size

    def to_dict(self) -> dict:
        return {"dMSE": self.dmse.tolist(), "mStar": self.m_star, "p": self.p}

    @classmethod
    def from_dict(cls, data: dict) -> "ShrinkagePath":
        return cls(dmse=np.asarray(data["dMSE"], dtype=float), m_star=float(data["mStar"]))


@dataclass(frozen=True)
class PathPoint:
    m: float
    delta: np.ndarray
    beta: np.ndarray
    intercept: float
    rel_risk: np.ndarray


def canonical_decompose(sd: StandardizedDesign) -> CanonicalModel:
    Xs, ys = sd.Xs, sd.ys
    n, p = Xs.shape
    if n < p + 2:
        raise ValueError(f"need n >= p + 2 observations, got n={n}, p={p}")
    XtX = Xs.T @ Xs
    diag = np.diag(XtX)
    off = XtX - np.diag(diag)
    if np.all(np.abs(off) <= ORTHO_TOL * diag.max()):
        # orthogonal columns: eigenvectors are the coordinate axes (the SVD
        # would return an arbitrary rotation when eigenvalues coincide)
        order = np.argsort(-np.round(diag / diag.max(), 10), kind="stable")
        V = np.eye(p)[:, order]
        eig = diag[order]
        s = np.sqrt(eig)
        U = (Xs @ V) / s
    else:
        U, s, Vt = np.linalg.svd(Xs, full_matrices=False)
        eig = s**2
        V = Vt.T
        # deterministic orientation: largest-magnitude entry of each column positive
        flip = np.sign(V[np.argmax(np.abs(V), axis=0), np.arange(p)])
        V = V * flip
        U = U * flip
    if eig[-1] < p * np.finfo(float).eps * eig[0]:
        raise RankDeficientError(
            f"design has numerical rank < {p} (eigenvalue ratio {eig[-1] / eig[0]:.3g})"
        )
    c = (U.T @ ys) / s
    beta = V @ c
    resid = ys - Xs @ beta
    sigma2 = float(resid @ resid) / (n - p - 1)
    return CanonicalModel(V=V, eig=eig, c=c, beta_ols=beta, sigma2=sigma2, n=n, p=p)


def dmse_factors(cm: CanonicalModel) -> ShrinkagePath:
    """Per-component shrinkage minimizing the estimated MSE risk.

    ``delta_i = c_i^2 / (c_i^2 + sigma2 / eig_i)``, i.e. ``t^2 / (t^2 + 1)``
    with ``t`` the component's t-statistic.
    """
    c2 = cm.c**2
    noise = cm.sigma2 / cm.eig
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(c2 == 0.0, 0.0, c2 / (c2 + noise))
    return ShrinkagePath(dmse=d, m_star=float(cm.p - d.sum()))


def _check_extent(m: float, p: int) -> float:
    m = float(m)
    if not 0.0 <= m <= p:
        raise ValueError(f"extent m={m} outside [0, {p}]")
    return m


def delta_at(path: ShrinkagePath, m: float) -> np.ndarray:
    """Shrinkage factors on the two-piece linear path at extent ``m``.

    Runs from all ones at ``m = 0`` through ``dmse`` at ``m_star`` to zeros at
    ``m = p``; ``sum(delta) == p - m`` on both pieces.
    """
    p = path.p
    m = _check_extent(m, p)
    d, ms = path.dmse, path.m_star
    if m == ms:
        return d.copy()
    if ms < KNOT_EPS:
        return np.full(p, (p - m) / p)
    if m < ms:
        return 1.0 - (m / ms) * (1.0 - d)
    tail = p - ms
    if tail < KNOT_EPS:
        return np.full(p, (p - m) / p)
    return d * ((p - m) / tail)


def beta_at(cm: CanonicalModel, path: ShrinkagePath, m: float) -> np.ndarray:
    """Standardized-scale coefficients ``V diag(delta(m)) c``."""
    if m == 0:
        return cm.beta_ols.copy()
    return cm.V @ (delta_at(path, m) * cm.c)


def relative_risk_at(cm: CanonicalModel, path: ShrinkagePath, m: float) -> np.ndarray:
    """Diagonal of the estimated coefficient MSE matrix divided by ``sigma2``.

    Variance part ``V diag(delta^2 / eig) V'`` plus the plug-in squared bias
    ``(V diag(1 - delta) c)^2 / sigma2``.
    """
    d = delta_at(path, m)
    variance = (cm.V**2) @ (d**2 / cm.eig)
    bias = cm.V @ ((1.0 - d) * cm.c)
    if cm.sigma2 == 0:
        return np.where(bias == 0, variance, np.inf)
    return variance + bias**2 / cm.sigma2


def destandardize(beta, sd: StandardizedDesign) -> np.ndarray:
    return np.asarray(beta, dtype=float) * (sd.y_sd / sd.x_sds)


def intercept_at(sd: StandardizedDesign, beta) -> float:
    """Intercept in original y-units for standardized coefficients ``beta``.

    The fitted hyperplane always passes through the point of means.
    """
    return float(sd.y_mean - sd.x_means @ destandardize(beta, sd))


def path_point(
    cm: CanonicalModel, path: ShrinkagePath, sd: StandardizedDesign, m: float
) -> PathPoint:
    beta = beta_at(cm, path, m)
    return PathPoint(
        m=float(m),
        delta=delta_at(path, m),
        beta=beta,
        intercept=intercept_at(sd, beta),
        rel_risk=relative_risk_at(cm, path, m),
    )


def save_audit(cm: CanonicalModel, path: ShrinkagePath, out: str | Path) -> None:
    payload = {"canonical": cm.to_dict(), "path": path.to_dict()}
    Path(out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
