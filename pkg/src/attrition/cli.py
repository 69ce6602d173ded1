"""``attrition`` command-line driver.

Subcommands: describe, correlate, train, evaluate, benchmark, roc. All of
them read one INI run configuration (``--config``); individual settings can
be overridden with flags or ``--set section.key=value``.

Exit status: 0 on success, 2 for usage or configuration errors, 1 when a
pipeline stage fails (the message names the stage).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from attrition import __version__
from attrition.config import RunConfig, load_config
from attrition.dataset import Dataset, SplitSpec, load_csv, encode, load_schema, split_indices
from attrition.errors import AttritionError, ConfigError
from attrition.evaluation import evaluate, iteration_seed, run_benchmark, train_model, with_seed
from attrition.render import (
    correlation_csv,
    correlation_svg,
    histogram_csv,
    roc_csv,
    roc_svg,
    scatter_csv,
)
from attrition.rng import mix
from attrition.serialize import dumps, loads
from attrition.stats import HEATMAP_PAIRS, SCATTER_TRIPLES, histogram2d, pearson_matrix, scatter3d, strongest_pairs

log = logging.getLogger("attrition")


def write_atomic(path: Path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_all(outputs: dict[Path, str]) -> None:
    for path, text in outputs.items():
        write_atomic(path, text)
        print(path)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def load_data(cfg: RunConfig) -> Dataset:
    if cfg.data_path is None:
        raise ConfigError("no dataset path: set [data] path in the config or pass --data")
    schema = load_schema(cfg.schema_path)
    return encode(load_csv(cfg.data_path, schema), schema, cfg.drop, cfg.encoding)


def _split_for(cfg: RunConfig, iteration: int) -> SplitSpec:
    return SplitSpec(cfg.test_fraction, iteration_seed(cfg.seed, iteration - 1), cfg.stratified)


def cmd_describe(cfg: RunConfig, args) -> dict:
    data = load_data(cfg)
    positives = int(data.labels.sum())
    summary = {
        "source": str(cfg.data_path),
        "rows": data.n,
        "features": data.d,
        "feature_names": list(data.feature_names),
        "feature_kinds": dict(zip(data.feature_names, data.kinds)),
        "label": data.label_name,
        "label_counts": {"No": data.n - positives, "Yes": positives},
        "majority_baseline": data.majority_baseline(),
        "dropped": list(data.drop),
        "encoding": data.policy,
    }
    return {cfg.output_dir / "describe.json": _json(summary)}


def cmd_correlate(cfg: RunConfig, args) -> dict:
    data = load_data(cfg)
    corr = pearson_matrix(data)
    out = {
        cfg.output_dir / "correlation.csv": correlation_csv(corr),
        cfg.output_dir / "correlation.svg": correlation_svg(corr),
        cfg.output_dir / "correlation_top.json": _json(
            [{"a": a, "b": b, "r": r} for a, b, r in strongest_pairs(corr, args.top)]
        ),
    }
    names = set(data.feature_names) | {data.label_name}
    figures = cfg.output_dir / "figures"
    for x, y in HEATMAP_PAIRS:
        if {x, y} <= names:
            out[figures / f"heatmap_{x}_{y}.csv"] = histogram_csv(histogram2d(data, x, y))
    for x, y, z in SCATTER_TRIPLES:
        if {x, y, z} <= names:
            out[figures / f"scatter_{x}_{y}_{z}.csv"] = scatter_csv(scatter3d(data, x, y, z))
    return out


def _train_one(cfg: RunConfig, data: Dataset, name: str, split: SplitSpec):
    spec = cfg.model(name)
    position = [m.name for m in cfg.models].index(name)
    train_idx, test_idx = split_indices(data.labels, split)
    model = train_model(with_seed(spec, mix(split.seed, position + 1)), data.subset(train_idx))
    return model, data.subset(test_idx)


def cmd_train(cfg: RunConfig, args) -> dict:
    data = load_data(cfg)
    split = _split_for(cfg, args.iteration)
    model, _ = _train_one(cfg, data, args.model, split)
    extra = {
        "name": args.model,
        "split": {
            "iteration": args.iteration,
            "seed": split.seed,
            "test_fraction": split.test_fraction,
            "stratified": split.stratified,
        },
        "dataset": {"rows": data.n, "encoding": data.policy, "dropped": list(data.drop)},
    }
    path = Path(args.out) if args.out else cfg.output_dir / "models" / f"{args.model}.json"
    return {path: dumps(model, data.feature_names, extra)}


def cmd_evaluate(cfg: RunConfig, args) -> dict:
    try:
        text = Path(args.model_file).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read model file: {exc}") from exc
    model, doc = loads(text)
    data = load_data(cfg)
    if doc.get("feature_names") and tuple(doc["feature_names"]) != data.feature_names:
        raise ConfigError("model was trained on different feature columns than the configured dataset")
    s = doc.get("split") or {}
    split = SplitSpec(
        s.get("test_fraction", cfg.test_fraction),
        s.get("seed", iteration_seed(cfg.seed, 0)),
        s.get("stratified", cfg.stratified),
    )
    _, test_idx = split_indices(data.labels, split)
    name = doc.get("name", doc["kind"])
    report = evaluate(model, data.subset(test_idx), name, split)
    path = Path(args.out) if args.out else cfg.output_dir / "reports" / f"{name}_eval.json"
    payload = report.as_dict()
    payload["dataset_majority_baseline"] = data.majority_baseline()
    return {path: _json(payload)}


def cmd_benchmark(cfg: RunConfig, args) -> dict:
    data = load_data(cfg)
    table = run_benchmark(data, cfg.models, cfg.iterations, cfg.seed, cfg.test_fraction, cfg.stratified)
    return {
        cfg.output_dir / "benchmark.csv": table.to_csv(),
        cfg.output_dir / "benchmark.json": _json(table.as_dict()),
    }


def cmd_roc(cfg: RunConfig, args) -> dict:
    data = load_data(cfg)
    split = _split_for(cfg, args.iteration)
    out, curves, summary = {}, {}, {}
    for spec in cfg.models:
        model, test = _train_one(cfg, data, spec.name, split)
        report = evaluate(model, test, spec.name, split)
        curves[spec.name] = (report.roc, report.auc)
        summary[spec.name] = {"auc": report.auc, "accuracy": report.accuracy}
        out[cfg.output_dir / "roc" / f"roc_{spec.name}.csv"] = roc_csv(report.roc)
    out[cfg.output_dir / "roc" / "roc.svg"] = roc_svg(curves)
    meta = {"iteration": args.iteration, "split_seed": split.seed, "test_fraction": split.test_fraction, "models": summary}
    out[cfg.output_dir / "roc" / "roc.json"] = _json(meta)
    return out


COMMANDS = {
    "describe": (cmd_describe, "summarize the encoded dataset"),
    "correlate": (cmd_correlate, "Pearson correlation matrix plus heatmap/scatter data"),
    "train": (cmd_train, "train one model on an iteration's training split"),
    "evaluate": (cmd_evaluate, "score a saved model on its held-out split"),
    "benchmark": (cmd_benchmark, "accuracy table over repeated random splits"),
    "roc": (cmd_roc, "ROC curves and AUC of every model on one split"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="INI run configuration")
    common.add_argument("--data", help="dataset CSV (overrides [data] path)")
    common.add_argument("--schema", help="column schema file (default: bundled IBM HR schema)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--iterations", type=int, help="benchmark iterations")
    common.add_argument("--test-fraction", type=float)
    common.add_argument("--stratified", action=argparse.BooleanOptionalAction, default=None)
    common.add_argument("--encoding", choices=("integer", "onehot"))
    common.add_argument("--output-dir", "-o", help="output directory (env: ATTRITION_OUTPUT_DIR)")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE")
    common.add_argument("--verbose", "-v", action="store_true")

    parser = argparse.ArgumentParser(prog="attrition", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}", required=True)
    subs = {name: sub.add_parser(name, parents=[common], help=text) for name, (_, text) in COMMANDS.items()}
    subs["correlate"].add_argument("--top", type=int, default=10, help="number of strongest pairs to list")
    subs["train"].add_argument("--model", "-m", required=True, help="configured model name")
    subs["train"].add_argument("--iteration", type=int, default=1, help="split to train on (1-based)")
    subs["train"].add_argument("--out", help="model file path")
    subs["evaluate"].add_argument("--model-file", required=True)
    subs["evaluate"].add_argument("--out", help="report path")
    subs["roc"].add_argument("--iteration", type=int, default=1, help="split to evaluate (1-based)")
    return parser


def _overrides(args) -> list[str]:
    flags = {
        "data.path": args.data,
        "data.schema": args.schema,
        "data.encoding": args.encoding,
        "run.seed": args.seed,
        "run.iterations": args.iterations,
        "run.output_dir": args.output_dir,
        "split.test_fraction": args.test_fraction,
        "split.stratified": args.stratified,
    }
    return list(args.set) + [f"{k}={v}" for k, v in flags.items() if v is not None]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = load_config(args.config, _overrides(args))
        if getattr(args, "iteration", 1) < 1:
            raise ConfigError("--iteration must be at least 1")
        outputs = COMMANDS[args.command][0](cfg, args)
        write_all(outputs)
    except ConfigError as exc:
        print(f"attrition: config error: {exc}", file=sys.stderr)
        return 2
    except AttritionError as exc:
        print(f"attrition: error in {exc.module}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
