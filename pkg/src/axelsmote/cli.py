"""Batch command line front end.

Four subcommands: ``resample`` (load -> impute -> normalize -> oversample ->
export), ``stats`` (class counts, imbalance ratio, minority set),
``evaluate`` (stratified split, optional training-fold resampling, k-NN
scoring over several seeded runs), and ``simulate-axelrod`` (lattice
culture model).  Every run is deterministic given its full flag set
including --seed, and every report embeds the resolved configuration.

Exit codes: 0 success, 2 configuration error, 3 data error,
4 stratification failure.  Diagnostics go to stderr, reports to stdout.
Set AXELSMOTE_LOG=info or =debug for progress messages.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional

import numpy as np

from .axelrod import grid_to_csv, init_grid, run
from .axelsmote import resample
from .core import (
    AxelParams,
    BalanceToMajority,
    Dataset,
    Ratio,
    class_counts,
    derive_stream,
)
from .errors import (
    AxelsmoteError,
    InvalidDimension,
    StratificationError,
    TraitCountExceedsFeatures,
)
from .io import CsvSchema, export_csv, impute_missing, load_csv, normalize
from .metrics import (
    balanced_accuracy,
    f1_score,
    imbalance_ratio,
    knn_classify,
    minority_classes,
    stratified_split,
)
from .smote import smote_resample

__all__ = ["RunConfig", "build_parser", "main"]

log = logging.getLogger("axelsmote")


@dataclass(frozen=True)
class RunConfig:
    """Resolved invocation record: subcommand plus every effective option."""

    command: str
    options: Dict[str, object]

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        skip = {"func", "command", "json"}
        options = {
            key: value
            for key, value in sorted(vars(args).items())
            if key not in skip
        }
        return cls(command=args.command, options=options)

    def audit_line(self) -> str:
        parts = " ".join(f"{k}={v}" for k, v in self.options.items())
        return f"config  command={self.command} {parts}"


def _emit(args, config: RunConfig, results: dict) -> None:
    """Print the run record: JSON document or human-readable lines."""
    if args.json:
        doc = {
            "command": config.command,
            "seed": config.options.get("seed"),
            "config": {k: _jsonable(v) for k, v in config.options.items()},
            "results": _jsonable(results),
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
        return
    print(config.audit_line())
    for key, value in results.items():
        print(f"{key}: {_human(value)}")


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(v) for v in items]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


def _human(value) -> str:
    if isinstance(value, float):
        return format(value, ".6g")
    if isinstance(value, dict):
        return ", ".join(f"{k}={_human(v)}" for k, v in value.items())
    if isinstance(value, (set, frozenset)):
        inner = ", ".join(str(v) for v in sorted(value))
        return "{" + inner + "}"
    return str(value)


# ---------------------------------------------------------------------------
# shared argument groups


def _csv_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--label-col",
        default="label",
        help="label column name, or 0-based index when all digits (default: label)",
    )
    parser.add_argument("--delimiter", default=",", help="field delimiter")
    parser.add_argument(
        "--no-header",
        action="store_true",
        help="file has no header row; --label-col must be an index",
    )


def _sampler_options(parser: argparse.ArgumentParser, with_none: bool) -> None:
    methods = ["axelsmote", "smote"] + (["none"] if with_none else [])
    parser.add_argument("--method", choices=methods, default="axelsmote")
    parser.add_argument("--k", type=int, default=2, help="same-class neighbors")
    parser.add_argument("--traits", type=int, default=4, help="trait count")
    parser.add_argument("--theta", type=float, default=0.4, help="similarity gate")
    parser.add_argument("--alpha", type=float, default=0.4, help="exchange probability")
    parser.add_argument("--noise-scale", type=float, default=0.05)
    parser.add_argument(
        "--no-diversity", action="store_true", help="disable post-blend noise"
    )
    parser.add_argument("--neighbor-subset", choices=["uniform", "full"], default="uniform")
    parser.add_argument("--clip-to-unit", action="store_true")
    parser.add_argument("--strategy", choices=["balance", "ratio"], default="balance")
    parser.add_argument(
        "--ratio",
        type=float,
        default=1.0,
        help="target fraction of the majority count for --strategy ratio",
    )
    parser.add_argument(
        "--gamma",
        type=float,
        default=None,
        help="with --strategy balance, grow only classes below gamma * majority",
    )
    parser.add_argument("--impute", choices=["mean", "median", "zero"], default="mean")
    parser.add_argument("--workers", type=int, default=1)


def _schema_from_args(args) -> CsvSchema:
    label = args.label_col
    if isinstance(label, str) and label.isdigit():
        label = int(label)
    return CsvSchema(
        label_column=label,
        delimiter=args.delimiter,
        has_header=not args.no_header,
    )


def _strategy_from_args(args):
    if args.strategy == "ratio":
        return Ratio(target_fraction=args.ratio)
    return BalanceToMajority(gamma=args.gamma)


def _params_from_args(args) -> AxelParams:
    return AxelParams(
        k=args.k,
        t=args.traits,
        theta=args.theta,
        alpha=args.alpha,
        noise_scale=args.noise_scale,
        diversity_injection=not args.no_diversity,
        neighbor_subset=args.neighbor_subset,
        clip_to_unit=args.clip_to_unit,
        strategy=_strategy_from_args(args),
        seed=args.seed,
    )


def _load_pipeline(args):
    """load -> impute -> normalize; returns (dataset, mapping, norm params)."""
    schema = _schema_from_args(args)
    ds, mapping = load_csv(args.input, schema)
    log.info("loaded %d rows, %d features", ds.n_samples, ds.n_features)
    ds = impute_missing(ds, args.impute)
    ds, norm = normalize(ds)
    return ds, mapping, norm


def _decode_counts(counts: Dict[int, int], mapping: Dict[str, int]) -> Dict[str, int]:
    decode = {v: k for k, v in mapping.items()}
    return {decode.get(cid, str(cid)): n for cid, n in sorted(counts.items())}


# ---------------------------------------------------------------------------
# subcommands


def cmd_resample(args) -> int:
    ds, mapping, norm = _load_pipeline(args)
    before = class_counts(ds.labels)
    ir_before = imbalance_ratio(ds)

    if args.method == "axelsmote":
        params = _params_from_args(args)
        out_ds, batch = resample(ds, params, n_workers=args.workers)
    else:
        out_ds = smote_resample(
            ds, k=args.k, strategy=_strategy_from_args(args), seed=args.seed
        )
        batch = None
    after = class_counts(out_ds.labels)
    ir_after = imbalance_ratio(out_ds)
    log.info("synthesized %d rows", out_ds.n_samples - ds.n_samples)

    if not args.keep_normalized:
        out_ds = Dataset(
            features=norm.inverse(out_ds.features),
            labels=out_ds.labels,
            feature_names=out_ds.feature_names,
            normalized=False,
        )
    label_name = args.label_col if not str(args.label_col).isdigit() else "label"
    export_csv(
        out_ds,
        mapping,
        args.output,
        include_provenance=args.provenance,
        batch=batch,
        label_column_name=label_name,
        n_original=ds.n_samples,
    )

    config = RunConfig.from_args(args)
    _emit(
        args,
        config,
        {
            "before": _decode_counts(before, mapping),
            "after": _decode_counts(after, mapping),
            "imbalance_ratio_before": ir_before,
            "imbalance_ratio_after": ir_after,
            "n_synthetic": out_ds.n_samples - ds.n_samples,
            "output": str(args.output),
        },
    )
    return 0


def cmd_stats(args) -> int:
    schema = _schema_from_args(args)
    ds, mapping = load_csv(args.input, schema)
    counts = class_counts(ds.labels)
    decode = {v: k for k, v in mapping.items()}
    minority = minority_classes(ds, args.gamma)

    config = RunConfig.from_args(args)
    _emit(
        args,
        config,
        {
            "counts": _decode_counts(counts, mapping),
            "imbalance_ratio": imbalance_ratio(ds),
            "minority": {decode.get(cid, str(cid)) for cid in minority},
        },
    )
    return 0


def _evaluate_one_run(ds: Dataset, args, run_index: int):
    run_seed = int(derive_stream(args.seed, "evaluate", 0, run_index).integers(1 << 62))
    split_rng = derive_stream(run_seed, "split")
    train_idx, test_idx = stratified_split(ds.labels, args.test_fraction, split_rng)
    train = Dataset(
        features=ds.features[train_idx],
        labels=ds.labels[train_idx],
        feature_names=ds.feature_names,
        normalized=ds.normalized,
    )
    if args.method == "axelsmote":
        params = replace(_params_from_args(args), seed=run_seed)
        train, _ = resample(train, params)
    elif args.method == "smote":
        train = smote_resample(
            train, k=args.k, strategy=_strategy_from_args(args), seed=run_seed
        )
    predicted = knn_classify(train, ds.features[test_idx], args.knn_k)
    truth = ds.labels[test_idx]
    return (
        f1_score(truth, predicted, averaging="macro"),
        balanced_accuracy(truth, predicted),
        int(test_idx.size),
    )


def cmd_evaluate(args) -> int:
    ds, mapping, _ = _load_pipeline(args)

    runs = list(range(args.runs))
    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            outcomes = list(pool.map(lambda r: _evaluate_one_run(ds, args, r), runs))
    else:
        outcomes = [_evaluate_one_run(ds, args, r) for r in runs]

    f1s = np.array([o[0] for o in outcomes])
    bas = np.array([o[1] for o in outcomes])

    def summary(values: np.ndarray) -> dict:
        out = {"per_run": [float(v) for v in values], "mean": float(values.mean())}
        out["std"] = float(values.std()) if values.size > 1 else None
        return out

    config = RunConfig.from_args(args)
    if args.json:
        _emit(
            args,
            config,
            {
                "runs": args.runs,
                "test_size": outcomes[0][2],
                "macro_f1": summary(f1s),
                "balanced_accuracy": summary(bas),
            },
        )
        return 0

    print(config.audit_line())
    print(f"runs: {args.runs}")
    print(f"test_size: {outcomes[0][2]}")
    for name, values in (("macro_f1", f1s), ("balanced_accuracy", bas)):
        if args.runs > 1:
            print(f"{name}: {values.mean():.6f} ± {values.std():.6f}")
        else:
            print(f"{name}: {values.mean():.6f}")
    return 0


def cmd_simulate_axelrod(args) -> int:
    grid = init_grid(args.L, args.f, args.q, seed=args.seed, boundary=args.boundary)
    report = run(grid, max_steps=args.max_steps, check_interval=args.check_interval)
    if args.dump_grid:
        grid_to_csv(report.final_grid, args.dump_grid)
        log.info("grid written to %s", args.dump_grid)

    config = RunConfig.from_args(args)
    _emit(
        args,
        config,
        {
            "steps_executed": report.steps_executed,
            "converged": report.converged,
            "region_count": report.region_count,
            "grid_dump": str(args.dump_grid) if args.dump_grid else None,
        },
    )
    return 0


# ---------------------------------------------------------------------------
# parser and dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="axelsmote",
        description="Deterministic minority oversampling and lattice culture simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_res = sub.add_parser("resample", help="oversample a CSV and write the result")
    p_res.add_argument("input", help="input CSV path")
    p_res.add_argument("output", help="output CSV path")
    _csv_options(p_res)
    _sampler_options(p_res, with_none=False)
    p_res.add_argument("--seed", type=int, default=0)
    p_res.add_argument(
        "--provenance",
        action="store_true",
        help="append is_synthetic and base_index columns",
    )
    p_res.add_argument(
        "--keep-normalized",
        action="store_true",
        help="write [0, 1]-scaled features instead of inverting to the input scale",
    )
    p_res.add_argument("--json", action="store_true", help="JSON report to stdout")
    p_res.set_defaults(func=cmd_resample)

    p_stats = sub.add_parser("stats", help="class counts and imbalance summary")
    p_stats.add_argument("input", help="input CSV path")
    _csv_options(p_stats)
    p_stats.add_argument(
        "--gamma", type=float, default=0.5, help="minority threshold fraction"
    )
    p_stats.add_argument("--seed", type=int, default=0, help=argparse.SUPPRESS)
    p_stats.add_argument("--json", action="store_true", help="JSON report to stdout")
    p_stats.set_defaults(func=cmd_stats)

    p_eval = sub.add_parser(
        "evaluate", help="split, optionally resample the training fold, score k-NN"
    )
    p_eval.add_argument("input", help="input CSV path")
    _csv_options(p_eval)
    _sampler_options(p_eval, with_none=True)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--runs", type=int, default=10)
    p_eval.add_argument("--knn-k", type=int, default=3)
    p_eval.add_argument("--test-fraction", type=float, default=0.2)
    p_eval.add_argument("--json", action="store_true", help="JSON report to stdout")
    p_eval.set_defaults(func=cmd_evaluate)

    p_sim = sub.add_parser("simulate-axelrod", help="run the lattice culture model")
    p_sim.add_argument("--L", type=int, default=10, help="lattice side length")
    p_sim.add_argument("--f", type=int, default=3, help="features per agent")
    p_sim.add_argument("--q", type=int, default=5, help="traits per feature")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--max-steps", type=int, default=1_000_000)
    p_sim.add_argument("--check-interval", type=int, default=1000)
    p_sim.add_argument("--boundary", choices=["open", "periodic"], default="open")
    p_sim.add_argument("--dump-grid", default=None, help="write final grid as CSV")
    p_sim.add_argument("--json", action="store_true", help="JSON report to stdout")
    p_sim.set_defaults(func=cmd_simulate_axelrod)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    level = os.environ.get("AXELSMOTE_LOG", "warning").upper()
    logging.basicConfig(
        stream=sys.stderr, level=getattr(logging, level, logging.WARNING)
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StratificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (TraitCountExceedsFeatures, InvalidDimension, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AxelsmoteError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
