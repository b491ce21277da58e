"""Command-line driver: ``ridgepath {smooth,fit,corr,fetch-instructions}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ridgepath import report
from ridgepath.grrcore import save_audit
from ridgepath.ingest import Dataset, DataError, corr_table, load_csv, save_standardization
from ridgepath.npsmooth import DEFAULT_K, np_names, np_transform, two_stage_frame

log = logging.getLogger("ridgepath")

EXIT_USAGE = 2

DRYAD_COLUMNS = ["AACRmort", "Avoc", "Bvoc", "PREMdeath", "ASmoke", "ChildPOV", "IncomIEQ"]

FETCH_TEXT = f"""\
EPA particulate matter / county mortality data (not bundled).

  "EPA Particulate Matter Data" (2022),
  Dryad [Data Archive]. https://doi.org/10.5061/dryad.63xsj3v58

Download the CSV manually, then run for example:

  ridgepath fit --input <file>.csv --y {DRYAD_COLUMNS[0]} \\
      --x {",".join(DRYAD_COLUMNS[1:])} --mode both --out results/

Expected columns:
  y : {DRYAD_COLUMNS[0]}  (age adjusted circulatory-respiratory mortality)
  x : {", ".join(DRYAD_COLUMNS[1:])}

Set RIDGEPATH_DRYAD_CSV=<file>.csv to enable the data-dependent acceptance tests.
"""


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    input: str = ""
    y: str = ""
    x: list[str] = field(default_factory=list)
    k: int = DEFAULT_K
    steps: int = report.DEFAULT_STEPS
    out: str = "."
    mode: str = "both"
    seed: int = 0

    def validate(self) -> "RunConfig":
        if not self.input:
            raise ConfigError("--input is required")
        if not self.y:
            raise ConfigError("--y is required")
        if not self.x:
            raise ConfigError("--x needs at least one column")
        if len(set(self.x)) != len(self.x):
            raise ConfigError("--x columns must be distinct")
        if self.y in self.x:
            raise ConfigError(f"y column {self.y!r} is also listed in --x")
        if self.k < 4:
            raise ConfigError("--k must be >= 4")
        if self.steps < 2:
            raise ConfigError("--steps must be >= 2")
        if self.mode not in ("linear", "np", "both"):
            raise ConfigError("--mode must be linear, np or both")
        return self


def _split(value) -> list[str]:
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return [str(v) for v in value]


def resolve_config(args: argparse.Namespace) -> RunConfig:
    merged = asdict(RunConfig())
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(data) - set(merged)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        merged.update(data)
    for key in merged:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    merged["x"] = _split(merged["x"])
    return RunConfig(**merged).validate()


def _write_frame(names, matrix: np.ndarray, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _load(cfg: RunConfig) -> Dataset:
    d = load_csv(cfg.input, cfg.y, cfg.x)
    if d.dropped:
        log.info("dropped %d row(s) with missing values", d.dropped)
    return d


def _np_dataset(d: Dataset, npmat: np.ndarray) -> Dataset:
    return Dataset(names=[d.y_name, *np_names(d.p)], y=d.y, X=npmat, dropped=d.dropped)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_smooth(cfg: RunConfig) -> list[Path]:
    d = _load(cfg)
    out = _out_dir(cfg)
    npmat, fits = np_transform(d, k=cfg.k)
    names, frame = two_stage_frame(d, npmat)
    written = [out / "np_frame.csv"]
    _write_frame(names, frame, written[0])
    fit_dir = out / "fits"
    fit_dir.mkdir(exist_ok=True)
    for name, fit in zip(np_names(d.p), fits):
        target = fit_dir / f"{name}.json"
        payload = {"x": d.x_names[int(name[2:]) - 1], **fit.to_dict()}
        target.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        written.append(target)
    return written


def _emit_model(model: report.FittedModel, steps: int, out: Path) -> list[Path]:
    traces = report.build_traces(model.cm, model.path, steps, labels=model.names)
    tag = model.label
    files = [
        report.emit_trace_csv(traces, out / f"{tag}_trace.csv"),
        report.emit_trace_svg(traces, "coef", out / f"{tag}_coef.svg", title=f"{tag}: coef TRACE"),
        report.emit_trace_svg(
            traces, "risk", out / f"{tag}_risk.svg", title=f"{tag}: relative MSE risk TRACE"
        ),
    ]
    save_audit(model.cm, model.path, out / f"{tag}_model.json")
    save_standardization(model.sd, out / f"{tag}_standardization.json")
    files += [out / f"{tag}_model.json", out / f"{tag}_standardization.json"]
    return files


def cmd_fit(cfg: RunConfig) -> list[Path]:
    d = _load(cfg)
    out = _out_dir(cfg)
    models: dict[str, report.FittedModel] = {}
    npmat = None
    if cfg.mode in ("linear", "both"):
        models["linear"] = report.fit_model("linear", d)
    if cfg.mode in ("np", "both"):
        npmat, _ = np_transform(d, k=cfg.k)
        models["np"] = report.fit_model("np", _np_dataset(d, npmat))
    written: list[Path] = []
    for model in models.values():
        written += _emit_model(model, cfg.steps, out)
    summaries = {label: report.summarize(m) for label, m in models.items()}
    payload = {
        "n": d.n,
        "p": d.p,
        "dropped_rows": d.dropped,
        "y": d.y_name,
        "x": d.x_names,
        "models": {label: s.to_dict() for label, s in summaries.items()},
    }
    if cfg.mode == "both":
        comparison = report.compare_models(summaries["linear"], summaries["np"])
        payload["comparison"] = {
            k: v for k, v in comparison.to_dict().items() if k != "models"
        }
        top = report.top_predictors(d, min(2, d.p))
        selection = [d.y_name]
        columns = {d.y_name: d.y}
        for j in top:
            xn, nn = d.x_names[j], np_names(d.p)[j]
            columns[xn], columns[nn] = d.X[:, j], npmat[:, j]
            selection += [xn, nn]
        rows = report.pairs_data(columns, selection)
        written.append(report.emit_pairs_csv(rows, out / "pairs.csv"))
    written.append(report.write_json(payload, out / "report.json"))
    return written


def cmd_corr(cfg: RunConfig) -> list[Path]:
    d = _load(cfg)
    out = _out_dir(cfg)
    npmat, _ = np_transform(d, k=cfg.k)
    x_names = [d.y_name, *d.x_names]
    x_tab = corr_table([d.y, *d.X.T])
    n_names = [d.y_name, *np_names(d.p)]
    n_tab = corr_table([d.y, *npmat.T])
    print(report.format_corr_table(x_names, x_tab))
    print()
    print(report.format_corr_table(n_names, n_tab))
    return [
        report.emit_corr_csv(x_names, x_tab, out / "corr_x.csv"),
        report.emit_corr_csv(n_names, n_tab, out / "corr_np.csv"),
    ]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="CSV file with a header row")
    common.add_argument("--y", help="outcome column")
    common.add_argument("--x", help="comma-separated predictor columns")
    common.add_argument("--k", type=int, help=f"spline basis size (default {DEFAULT_K})")
    common.add_argument(
        "--steps", type=int, help=f"uniform trace grid points (default {report.DEFAULT_STEPS})"
    )
    common.add_argument("--mode", choices=["linear", "np", "both"], help="models to fit (fit only)")
    common.add_argument("--out", help="output directory (default .)")
    common.add_argument("--config", help="JSON config; command-line flags take precedence")
    common.add_argument("--seed", type=int, help=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="ridgepath",
        description="Two-stage nonparametric generalized ridge regression.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("smooth", parents=[common], help="stage 1: write the 2p+1 column np frame")
    sub.add_parser("fit", parents=[common], help="stage 2: traces, SVGs and comparison report")
    sub.add_parser("corr", parents=[common], help="correlation tables for the x and np blocks")
    sub.add_parser("fetch-instructions", help="where to get the EPA data set")
    return parser


COMMANDS = {"smooth": cmd_smooth, "fit": cmd_fit, "corr": cmd_corr}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "fetch-instructions":
        sys.stdout.write(FETCH_TEXT)
        return 0
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        cfg = resolve_config(args)
        written = COMMANDS[args.command](cfg)
    except (ConfigError, DataError, FileNotFoundError) as exc:
        print(f"ridgepath {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"ridgepath {args.command}: error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
