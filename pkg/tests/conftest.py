import os
from pathlib import Path

import numpy as np
import pytest

from ridgepath.ingest import Dataset

DATA_DIR = Path(__file__).parent / "data"
SYNTHETIC_CSV = DATA_DIR / "synthetic.csv"
SYNTHETIC_Y = "mort"
SYNTHETIC_X = ["a", "b", "c", "d"]

DRYAD_Y = "AACRmort"
DRYAD_X = ["Avoc", "Bvoc", "PREMdeath", "ASmoke", "ChildPOV", "IncomIEQ"]

# Lower triangle of the printed x-block correlations (y, x1..x6).
PUBLISHED_CORR_X = [
    [1.0],
    [0.2489, 1.0],
    [0.4589, 0.58472, 1.0],
    [0.6421, 0.08896, 0.4217, 1.0],
    [0.6047, 0.32707, 0.4622, 0.67611, 1.0],
    [0.5524, 0.11336, 0.4884, 0.69932, 0.6605, 1.0],
    [0.3040, 0.13933, 0.4163, 0.41804, 0.3800, 0.5708, 1.0],
]
PUBLISHED_CORR_NP = [
    [1.0],
    [0.3888, 1.0],
    [0.4809, 0.5991, 1.0],
    [0.6769, 0.3077, 0.5117, 1.0],
    [0.6156, 0.5002, 0.5485, 0.6621, 1.0],
    [0.5656, 0.3029, 0.5192, 0.7348, 0.6607, 1.0],
    [0.3379, 0.1884, 0.4378, 0.4389, 0.3775, 0.5775, 1.0],
]

PUBLISHED_FITS = {
    "linear": {
        "rms": 0.506395,
        "rse": 0.711615,
        "beta_ols": [0.060975, 0.136652, 0.389470, 0.216750, 0.099290, -0.063270],
        "beta_ml": [0.064848, 0.134431, 0.384555, 0.218586, 0.101132, -0.062424],
        "risk_ols": [0.000613, 0.000745, 0.000821, 0.000822, 0.000968, 0.000519],
        "risk_ml": [0.000292, 0.000428, 0.000756, 0.000380, 0.000524, 0.000488],
        "dmse": [0.9996, 0.9413, 0.9964, 0.9429, 0.9728, 0.003282],
    },
    "np": {
        "rms": 0.479143,
        "rse": 0.692202,
        "beta_ols": [0.098704, 0.056765, 0.451541, 0.214582, 0.035727, -0.005387],
        "beta_ml": [0.103079, 0.056651, 0.443230, 0.221146, 0.034597, -0.006164],
        "risk_ols": [0.000590, 0.000715, 0.000852, 0.000815, 0.000996, 0.000533],
        "risk_ml": [0.000380, 0.000559, 0.000911, 0.000790, 0.000939, 0.000453],
        "dmse": [0.9997, 0.4332, 0.9961, 0.8721, 0.9359, 0.9882],
    },
}
NP_M_STAR = 0.775


def full_matrix(lower) -> np.ndarray:
    k = len(lower)
    R = np.eye(k)
    for i, row in enumerate(lower):
        for j, v in enumerate(row):
            R[i, j] = R[j, i] = v
    return R


def dataset_with_correlation(R: np.ndarray, n: int, seed: int = 0) -> Dataset:
    """Data whose sample correlation matrix equals ``R`` exactly."""
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n, R.shape[0]))
    Z -= Z.mean(axis=0)
    S = np.cov(Z, rowvar=False)
    Z = Z @ np.linalg.inv(np.linalg.cholesky(S)).T
    Z = Z @ np.linalg.cholesky(R).T
    names = ["y"] + [f"x{j}" for j in range(1, R.shape[0])]
    return Dataset(names=names, y=Z[:, 0].copy(), X=Z[:, 1:].copy())


def random_dataset(rng, n: int, p: int, offset: bool = True) -> Dataset:
    X = rng.standard_normal((n, p)) @ rng.uniform(-1, 1, (p, p))
    X += rng.standard_normal((n, p)) * 0.5
    if offset:
        X = X * rng.uniform(0.1, 20, p) + rng.uniform(-50, 50, p)
    beta = rng.standard_normal(p)
    y = X @ beta + rng.standard_normal(n) * rng.uniform(0.5, 5) + (7.0 if offset else 0.0)
    names = ["y"] + [f"x{j + 1}" for j in range(p)]
    return Dataset(names=names, y=y, X=X)


def dryad_path() -> Path | None:
    env = os.environ.get("RIDGEPATH_DRYAD_CSV")
    candidates = [Path(env)] if env else []
    candidates.append(DATA_DIR / "dryad.csv")
    for c in candidates:
        if c.is_file():
            return c
    return None


@pytest.fixture
def synthetic_csv() -> Path:
    return SYNTHETIC_CSV


@pytest.fixture(scope="session")
def dryad_csv() -> Path:
    path = dryad_path()
    if path is None:
        pytest.skip(
            "Dryad EPA CSV not found: set RIDGEPATH_DRYAD_CSV or place it at "
            "tests/data/dryad.csv (see `ridgepath fetch-instructions`)"
        )
    return path


# --- acceptance summary -----------------------------------------------------

_CRITERIA: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        _CRITERIA.setdefault(marker.args[0], []).append(status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        statuses = _CRITERIA[n]
        if "FAIL" in statuses:
            verdict = "FAIL"
        elif all(s == "SKIP" for s in statuses):
            verdict = "SKIP"
        else:
            verdict = "PASS" if "PASS" in statuses else "SKIP"
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  ({len(statuses)} check(s))")
