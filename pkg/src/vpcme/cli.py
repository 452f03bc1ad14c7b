"""Command-line interface.

Subcommands: stats, cv, sweep-theta, sweep-size, compare, train, predict.
Reports are JSON documents written to --out (or stdout); they are
byte-identical across reruns with the same flags, so wall time goes to
stderr only.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from ._kernels import active_backend
from .dataset import MultiLabelDataset, compute_stats, load_csv
from .ensemble import load_model, predict_ensemble, save_model
from .errors import CsvFormatError, VpcmeError
from .harness import (
    DEFAULT_SIZE_VALUES,
    DEFAULT_THETA_VALUES,
    METHODS,
    ExperimentConfig,
    SweepSpec,
    compare_methods,
    cross_validate,
    run_sweep,
    _experiment_vpcme_config,
    _trainer_for,
    _zscore_params,
)

REPORT_SCHEMA = "vpcme-report/1"


def _add_common(parser, method=True):
    parser.add_argument("--data", required=True, help="dataset CSV path")
    parser.add_argument("--labels", required=True, type=int,
                        help="number of trailing label columns")
    if method:
        parser.add_argument("--method", default="vpcme", help=f"one of {', '.join(METHODS)}")
    parser.add_argument("--theta", type=float, default=0.6, help="constraint threshold")
    parser.add_argument("--ensemble-size", type=int, default=30, dest="ensemble_size")
    parser.add_argument("--k", type=int, default=10, help="MLKNN neighbor count")
    parser.add_argument("--smoothing", type=float, default=1.0, help="MLKNN Laplace smoothing")
    parser.add_argument("--folds", type=int, default=5)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--zscore", action="store_true",
                        help="standardize features per training fold")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vpcme",
                                     description="Multi-label ensemble via pairwise constraint projection")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="dataset statistics")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", required=True, type=int)
    p.add_argument("--out", default=None)

    p = sub.add_parser("cv", help="repeated k-fold cross-validation")
    _add_common(p)

    p = sub.add_parser("sweep-theta", help="cross-validate over a threshold list")
    _add_common(p)
    p.add_argument("--values", default=None,
                   help="comma-separated thresholds (default 0.1..1.0 step 0.1)")

    p = sub.add_parser("sweep-size", help="cross-validate over ensemble sizes")
    _add_common(p)
    p.add_argument("--values", default=None,
                   help="comma-separated sizes (default 1,10,20,30,40,50)")

    p = sub.add_parser("compare", help="run methods on identical splits and t-test them")
    _add_common(p, method=False)
    p.add_argument("--method", default=",".join(METHODS),
                   help="comma-separated method list; the first is the reference")

    p = sub.add_parser("train", help="train on the full dataset and persist the model")
    _add_common(p)

    p = sub.add_parser("predict", help="emit per-instance scores and bipartitions as CSV")
    p.add_argument("--model", required=True, help="model file written by train")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", type=int, default=0,
                   help="trailing label columns to strip (0 = features only)")
    p.add_argument("--out", default=None)
    return parser


def _experiment_config(args, method=None) -> ExperimentConfig:
    return ExperimentConfig(
        data=args.data,
        label_count=args.labels,
        method=method if method is not None else args.method,
        theta=args.theta,
        ensemble_size=args.ensemble_size,
        k_neighbors=args.k,
        smoothing=args.smoothing,
        folds=args.folds,
        repeats=args.repeats,
        seed=args.seed,
        zscore=args.zscore,
    )


def _config_echo(cfg: ExperimentConfig) -> dict:
    return {
        "data": cfg.data,
        "label_count": cfg.label_count,
        "method": cfg.method,
        "theta": cfg.theta,
        "ensemble_size": cfg.ensemble_size,
        "k_neighbors": cfg.k_neighbors,
        "smoothing": cfg.smoothing,
        "folds": cfg.folds,
        "repeats": cfg.repeats,
        "seed": cfg.seed,
        "zscore": cfg.zscore,
    }


def _document(command: str, config: dict, body: dict) -> dict:
    doc = {
        "schema": REPORT_SCHEMA,
        "command": command,
        "version": __version__,
        "backend": active_backend(),
        "config": config,
    }
    doc.update(body)
    return doc


def _emit(doc: dict, out_path) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _print_metric_table(rows, stream=sys.stderr):
    """Aligned metric table on stderr: one row per (label, report)."""
    if not rows:
        return
    names = list(rows[0][1].metrics.keys())
    header = ["run"] + names
    widths = [max(len(header[0]), max(len(str(r[0])) for r in rows))]
    widths += [max(len(n), 15) for n in names]
    line = "  ".join(h.ljust(w) for h, w in zip(header, widths))
    print(line, file=stream)
    for label, report in rows:
        cells = [str(label).ljust(widths[0])]
        for i, name in enumerate(names):
            s = report.metrics[name]
            cells.append(f"{s.mean:.4f} ±{s.std:.4f}".ljust(widths[i + 1]))
        print("  ".join(cells), file=stream)


def _parse_values(raw, parameter):
    if raw is None:
        return None
    kind = float if parameter == "theta" else int
    try:
        return tuple(kind(part) for part in raw.split(",") if part.strip() != "")
    except ValueError:
        raise VpcmeError(f"--values must be a comma-separated list of {kind.__name__}s") from None


def _load_feature_rows(path):
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().split("\n")
    while lines and lines[-1].strip() == "":
        lines.pop()
    if not lines:
        raise CsvFormatError(f"{path}: file contains no data rows")
    width = None
    for lineno, line in enumerate(lines, start=1):
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise CsvFormatError(f"{path}: line {lineno} has {len(fields)} fields, expected {width}")
        try:
            rows.append([float(x) for x in fields])
        except ValueError:
            raise CsvFormatError(f"{path}: line {lineno} has a non-numeric field") from None
    return np.array(rows, dtype=np.float64)


def _cmd_stats(args):
    ds = load_csv(args.data, args.labels)
    stats = compute_stats(ds)
    doc = _document(
        "stats",
        {"data": args.data, "label_count": args.labels},
        {
            "stats": {
                "instances": stats.instances,
                "features": stats.features,
                "labels": stats.labels,
                "distinct": stats.distinct,
                "cardinality": stats.cardinality,
                "density": stats.density,
            }
        },
    )
    _emit(doc, args.out)


def _cmd_cv(args):
    cfg = _experiment_config(args)
    report = cross_validate(cfg)
    doc = _document("cv", _config_echo(cfg), report.to_dict())
    _emit(doc, args.out)
    _print_metric_table([(cfg.method, report)])


def _cmd_sweep(args, parameter):
    cfg = _experiment_config(args)
    spec = SweepSpec(parameter=parameter, values=_parse_values(args.values, parameter))
    results = run_sweep(cfg, spec)
    body = {
        "sweep": {"parameter": parameter, "values": list(spec.values)},
        "results": [
            {"value": value, **report.to_dict()} for value, report in results
        ],
    }
    command = "sweep-theta" if parameter == "theta" else "sweep-size"
    doc = _document(command, _config_echo(cfg), body)
    _emit(doc, args.out)
    _print_metric_table([(f"{parameter}={value}", report) for value, report in results])


def _cmd_compare(args):
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    cfgs = [_experiment_config(args, method=m) for m in methods]
    comparison = compare_methods(cfgs)
    body = {
        "methods": comparison["methods"],
        "reference": comparison["reference"],
        "results": {m: r.to_dict() for m, r in comparison["reports"].items()},
        "tests": comparison["tests"],
    }
    doc = _document("compare", _config_echo(cfgs[0]), body)
    _emit(doc, args.out)
    _print_metric_table([(m, comparison["reports"][m]) for m in comparison["methods"]])


def _cmd_train(args):
    if not args.out:
        raise VpcmeError("train requires --out for the model file")
    cfg = _experiment_config(args)
    ds = load_csv(args.data, args.labels)
    scaler = None
    if cfg.zscore:
        mean, scale = _zscore_params(ds.features)
        ds = MultiLabelDataset((ds.features - mean) / scale, ds.labels, ds.label_names)
        scaler = (mean, scale)
    trainer = _trainer_for(cfg.method)
    model = trainer(ds, _experiment_vpcme_config(cfg, cfg.seed))
    save_model(model, args.out, scaler=scaler)
    print(f"model with {len(model.members)} member(s) written to {args.out}", file=sys.stderr)


def _cmd_predict(args):
    model, scaler = load_model(args.model)
    if args.labels > 0:
        features = load_csv(args.data, args.labels).features
    else:
        features = _load_feature_rows(args.data)
    if features.shape[1] != model.feature_count:
        raise VpcmeError(
            f"{args.data}: expected {model.feature_count} feature columns, got {features.shape[1]}"
        )
    if scaler is not None:
        mean, scale = scaler
        features = (features - mean) / scale
    bipartitions, scores = predict_ensemble(model, features)
    r = model.label_count
    header = [f"score_{i}" for i in range(r)] + [f"pred_{i}" for i in range(r)]
    lines = [",".join(header)]
    for i in range(features.shape[0]):
        cells = [repr(float(v)) for v in scores[i]] + ["1" if v else "0" for v in bipartitions[i]]
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        if args.command == "stats":
            _cmd_stats(args)
        elif args.command == "cv":
            _cmd_cv(args)
        elif args.command == "sweep-theta":
            _cmd_sweep(args, "theta")
        elif args.command == "sweep-size":
            _cmd_sweep(args, "ensemble_size")
        elif args.command == "compare":
            _cmd_compare(args)
        elif args.command == "train":
            _cmd_train(args)
        elif args.command == "predict":
            _cmd_predict(args)
    except VpcmeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{args.command} finished in {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
