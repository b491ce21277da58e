"""Two-stage nonparametric generalized ridge regression."""

from ridgepath.ingest import (
    Dataset,
    StandardizedDesign,
    corr_table,
    load_csv,
    pearson_corr,
    standardize,
)
from ridgepath.npsmooth import (
    SmootherFit,
    SplineBasis,
    build_basis,
    fit_penalized,
    gcv_select,
    np_transform,
    predict,
)
from ridgepath.grrcore import (
    CanonicalModel,
    PathPoint,
    ShrinkagePath,
    beta_at,
    canonical_decompose,
    delta_at,
    destandardize,
    dmse_factors,
    intercept_at,
    path_point,
    relative_risk_at,
)

__version__ = "0.1.0"

__all__ = [
    "CanonicalModel",
    "Dataset",
    "PathPoint",
    "ShrinkagePath",
    "SmootherFit",
    "SplineBasis",
    "StandardizedDesign",
    "beta_at",
    "build_basis",
    "canonical_decompose",
    "corr_table",
    "delta_at",
    "destandardize",
    "dmse_factors",
    "fit_penalized",
    "gcv_select",
    "intercept_at",
    "load_csv",
    "np_transform",
    "path_point",
    "pearson_corr",
    "predict",
    "relative_risk_at",
    "standardize",
]
