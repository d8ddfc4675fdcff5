"""Command-line frontend.

Subcommands: train, optimize, sweep, eval, synth, export-embeddings.
Flags override values from an optional JSON config file (--config); every
run logs its fully resolved configuration so results can be reproduced.
Exit codes: 0 success, 2 for bad input (missing files, malformed data).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

import numpy as np

from . import __version__
from .data import (
    Dataset,
    calibrate_quantizer,
    export_sample_hypervectors,
    generate_motivational,
    load_dataset_csv,
    load_model,
    save_dataset_csv,
    save_model,
    _atomic_open,
)
from .errors import HvError
from .evolve import GAConfig, run_optimization
from .model import fit_baseline, predict_batch, train_model
from .objectives import (
    avg_similarity,
    confusion_matrix,
    total_accuracy,
    weighted_accuracy,
)

log = logging.getLogger("hvdesign")


def _label_column(value: str):
    try:
        return int(value)
    except ValueError:
        return value


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0, help="master RNG seed")
    parser.add_argument("--config", help="JSON file with defaults; flags override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hvdesign",
        description="HDC classification with evolutionary flip-budget design",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a baseline (uniform budget) model")
    p.add_argument("--data", required=True, help="training CSV")
    p.add_argument("--test", help="optional test CSV")
    p.add_argument("--label-col", type=_label_column, default="label")
    p.add_argument("--dim", type=int, default=2048)
    p.add_argument("--levels", type=int, default=20)
    p.add_argument("--out", help="model file to write")
    p.add_argument("--metrics-out", help="write metrics as JSON here")
    _add_common(p)

    p = sub.add_parser("optimize", help="search flip budgets, export the Pareto front")
    p.add_argument("--data", required=True)
    p.add_argument("--label-col", type=_label_column, default="label")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--levels", type=int, default=20)
    p.add_argument("--pop", type=int, default=200)
    p.add_argument("--gens", type=int, default=150)
    p.add_argument("--crossover", type=float, default=0.9)
    p.add_argument("--mutation", type=float, default=0.1)
    p.add_argument("--out", required=True, help="Pareto front CSV")
    p.add_argument(
        "--best-models-out",
        help="prefix; writes <prefix>-accuracy.hdcm and <prefix>-robustness.hdcm",
    )
    _add_common(p)

    p = sub.add_parser("sweep", help="baseline metrics across dimensions")
    p.add_argument("--data", required=True)
    p.add_argument("--label-col", type=_label_column, default="label")
    p.add_argument("--dims", required=True, help="comma-separated even dimensions")
    p.add_argument("--levels", type=int, default=20)
    p.add_argument("--out", required=True, help="metrics CSV")
    _add_common(p)

    p = sub.add_parser("eval", help="evaluate a saved model on a CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label-col", type=_label_column, default="label")
    p.add_argument("--metrics-out", help="write metrics as JSON here")
    _add_common(p)

    p = sub.add_parser("synth", help="generate the synthetic four-class dataset")
    p.add_argument("--grid", type=int, default=40, help="grid points per axis")
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("export-embeddings", help="dump sample hypervectors as CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label-col", type=_label_column, default="label")
    p.add_argument("--out", required=True)
    _add_common(p)

    return parser


def _config_file_defaults(argv) -> dict:
    """Read --config early so its values become parser defaults; explicit
    flags then override them."""
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif arg.startswith("--config="):
            path = arg.split("=", 1)[1]
        else:
            continue
        with open(path) as fh:
            return {k.replace("-", "_"): v for k, v in json.load(fh).items()}
    return {}


def _resolved(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("command", "config")}


def _load(path, label_col, label_names=None, split="train") -> Dataset:
    return load_dataset_csv(path, label_col, label_names=label_names, split=split)


def _metrics(model, data: Dataset) -> dict:
    start = time.perf_counter()
    predicted = predict_batch(data.features, model)
    elapsed = time.perf_counter() - start
    confusion = confusion_matrix(data.labels, predicted, model.n_classes)
    recalls = {}
    for k in range(model.n_classes):
        row = confusion[k].sum()
        recalls[model.labels[k]] = float(confusion[k, k] / row) if row else None
    return {
        "wAcc": weighted_accuracy(confusion),
        "totalAcc": total_accuracy(confusion),
        "avgSim": avg_similarity(model.encoders),
        "perClassRecall": recalls,
        "confusion": confusion.tolist(),
        "samples": int(data.n_samples),
        "inferenceMsPerSample": 1000.0 * elapsed / data.n_samples,
    }


def _print_metrics(tag: str, metrics: dict) -> None:
    print(f"[{tag}] wAcc={metrics['wAcc']:.4f} totalAcc={metrics['totalAcc']:.4f} "
          f"avgSim={metrics['avgSim']:.4f} samples={metrics['samples']} "
          f"infTime={metrics['inferenceMsPerSample']:.4f}ms/sample")


def cmd_train(args) -> int:
    train = _load(args.data, args.label_col)
    model = fit_baseline(train, args.dim, args.levels, args.seed)
    report = {"train": _metrics(model, train)}
    _print_metrics("train", report["train"])
    if args.test:
        test = _load(args.test, args.label_col, label_names=train.label_names, split="test")
        report["test"] = _metrics(model, test)
        _print_metrics("test", report["test"])
    if args.out:
        save_model(model, args.out)
        import os

        report["modelBytes"] = os.path.getsize(args.out)
        print(f"model written to {args.out} ({report['modelBytes']} bytes)")
    if args.metrics_out:
        with _atomic_open(args.metrics_out) as fh:
            json.dump(report, fh, indent=2)
    return 0


def cmd_optimize(args) -> int:
    train = _load(args.data, args.label_col)
    quantizer = calibrate_quantizer(train, args.levels)
    config = GAConfig(
        population_size=args.pop,
        generations=args.gens,
        crossover_rate=args.crossover,
        mutation_rate=args.mutation,
        seed=args.seed,
        dim=args.dim,
        levels=args.levels,
    )
    front = run_optimization(train, quantizer, config)
    front.write_csv(args.out)
    best = max(front.members, key=lambda m: m[1].wacc)
    robust = min(front.members, key=lambda m: m[1].avg_sim)
    print(f"front size {len(front.members)}; best wAcc={best[1].wacc:.4f}, "
          f"most robust avgSim={robust[1].avg_sim:.4g}; written to {args.out}")
    if args.best_models_out:
        for tag, (budget, _) in (("accuracy", best), ("robustness", robust)):
            model = train_model(train, quantizer, budget, args.seed)
            save_model(model, f"{args.best_models_out}-{tag}.hdcm")
        print(f"best-member models written with prefix {args.best_models_out}")
    return 0


def cmd_sweep(args) -> int:
    import csv as _csv

    dims = [int(d) for d in str(args.dims).split(",") if d]
    if not dims or any(d % 2 for d in dims):
        raise HvError(f"--dims must list even dimensions, got {args.dims!r}")
    train = _load(args.data, args.label_col)
    rows = []
    for dim in dims:
        model = fit_baseline(train, dim, args.levels, args.seed)
        metrics = _metrics(model, train)
        import os, tempfile

        tmp = tempfile.NamedTemporaryFile(suffix=".hdcm", delete=False)
        tmp.close()
        save_model(model, tmp.name)
        size = os.path.getsize(tmp.name)
        os.unlink(tmp.name)
        rows.append((dim, metrics["wAcc"], metrics["totalAcc"], metrics["avgSim"], size))
        print(f"D={dim}: wAcc={metrics['wAcc']:.4f} totalAcc={metrics['totalAcc']:.4f} "
              f"avgSim={metrics['avgSim']:.4f} modelBytes={size}")
    with _atomic_open(args.out) as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(["D", "wAcc", "totalAcc", "avgSim", "modelBytes"])
        for dim, wacc, total, sim, size in rows:
            writer.writerow([dim, repr(wacc), repr(total), repr(sim), size])
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.model)
    data = _load(args.data, args.label_col, label_names=model.labels, split="test")
    if data.n_features != model.table.features:
        raise HvError(
            f"model expects {model.table.features} features, data has {data.n_features}"
        )
    metrics = _metrics(model, data)
    _print_metrics("eval", metrics)
    for name, recall in metrics["perClassRecall"].items():
        print(f"  recall[{name}] = {'n/a' if recall is None else f'{recall:.4f}'}")
    print(f"  confusion = {metrics['confusion']}")
    if args.metrics_out:
        with _atomic_open(args.metrics_out) as fh:
            json.dump(metrics, fh, indent=2)
    return 0


def cmd_synth(args) -> int:
    dataset = generate_motivational(args.grid, seed=args.seed)
    save_dataset_csv(dataset, args.out)
    print(f"{dataset.n_samples} samples, {dataset.n_classes} classes written to {args.out}")
    return 0


def cmd_export_embeddings(args) -> int:
    model = load_model(args.model)
    data = _load(args.data, args.label_col, label_names=model.labels)
    export_sample_hypervectors(model, data, args.out)
    print(f"{data.n_samples} x {model.table.dim} hypervector matrix written to {args.out}")
    return 0


COMMANDS = {
    "train": cmd_train,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "eval": cmd_eval,
    "synth": cmd_synth,
    "export-embeddings": cmd_export_embeddings,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    defaults = _config_file_defaults(argv)
    if defaults:
        for sub_action in parser._subparsers._group_actions[0].choices.values():
            sub_action.set_defaults(**{
                k: v for k, v in defaults.items()
                if any(a.dest == k for a in sub_action._actions)
            })
    args = parser.parse_args(argv)
    log.info("resolved config: %s", json.dumps(_resolved(args), default=str, sort_keys=True))
    try:
        return COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
