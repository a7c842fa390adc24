"""Generate data, train and evaluate the classifier, run graph Fourier transforms.

Usage: ``gftmpnn <command> ...`` or ``python -m gftmpnn <command> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
``generate`` and ``train`` accept ``--config FILE``, a JSON object whose keys are the
command's long flag names (dashes or underscores); explicit flags win.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import datagen, graph, pipeline, spectral
from .errors import DataError, NumericError
from .mpnn import TrainConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("gftmpnn")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# (flag, dest, type, default, help); defaults are applied after merging --config.
_GENERATE_OPTS = [
    ("--domain", "domain", str, "A", "A, C-train or C-test"),
    ("--num-features", "num_features", int, 64, "feature dimension D"),
    ("--samples-per-failure-class", "samples_per_failure_class", int, None,
     "defaults to 80 for A, 10 for C"),
    ("--normal-fraction", "normal_fraction", float, 0.67, "share of the normal class"),
    ("--noise-sigma", "noise_sigma", float, 0.1, "Gaussian noise level"),
    ("--domain-shift", "domain_shift", float, None, "defaults to 0 for A, 0.15 for C"),
    ("--seed", "seed", int, 42, "random seed"),
]
_TRAIN_OPTS = [
    ("--epochs", "epochs", int, 500, "training epochs"),
    ("--hidden-dim", "hidden_dim", int, 64, "hidden units per layer"),
    ("--lr", "lr", float, 0.001, "Adam learning rate"),
    ("--knn-k", "knn_k", int, 5, "neighbours per sample in the sample graph"),
    ("--knn-metric", "knn_metric", str, "cosine", "cosine or euclidean"),
    ("--adjacency", "adjacency", str, "normalized", "normalized or faithful"),
    ("--seed", "seed", int, 42, "random seed"),
]


def _add_opts(p: argparse.ArgumentParser, opts) -> None:
    for flag, dest, typ, default, help_ in opts:
        choices = None
        if dest == "adjacency":
            choices = ["normalized", "faithful"]
        elif dest == "knn_metric":
            choices = ["cosine", "euclidean"]
        elif dest == "domain":
            choices = list(datagen.DOMAINS)
        p.add_argument(flag, dest=dest, type=typ, default=None, choices=choices,
                       help=f"{help_} (default: {default})")


def _resolve(args: argparse.Namespace, opts, flags: tuple[str, ...] = ()) -> dict:
    """Merge built-in defaults, the --config file, and explicit flags."""
    values = {dest: default for _, dest, _, default, _ in opts}
    for name in flags:
        values[name] = False
    known = set(values)
    if getattr(args, "config", None):
        obj = pipeline.load_json(args.config)
        if not isinstance(obj, dict):
            raise UsageError(f"{args.config}: config must be a JSON object")
        for key, value in obj.items():
            key = key.replace("-", "_")
            if key not in known:
                raise UsageError(f"{args.config}: unknown config key {key!r}")
            values[key] = value
    for key in known:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            values[key] = value
    return values


def _require_parent(path: str) -> None:
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise UsageError(f"output directory {parent} does not exist")


def _require_file(path: str) -> None:
    if not Path(path).is_file():
        raise DataError(f"{path}: no such file")


def _write_meta(path: str, command: str, config: dict) -> None:
    """Sidecar ``<path>.meta.json`` for CSV outputs, which have no room for metadata."""
    pipeline.dump_json({"command": command, "config": config, "seed": config.get("seed")},
                       f"{path}.meta.json")


def _train_config(values: dict) -> TrainConfig:
    return TrainConfig(
        hidden_dim=values["hidden_dim"],
        learning_rate=values["lr"],
        num_epochs=values["epochs"],
        knn_k=values["knn_k"],
        knn_metric=values["knn_metric"],
        adjacency_mode=values["adjacency"],
        faithful_mpnn=bool(values["faithful_mpnn"]),
        seed=values["seed"],
    )


def cmd_generate(args) -> int:
    values = _resolve(args, _GENERATE_OPTS)
    _require_parent(args.out)
    spec = datagen.DomainSpec(**values).resolved()
    data = datagen.generate_dataset(spec)
    datagen.write_dataset(data, args.out)
    _write_meta(args.out, "generate", spec.to_json())
    counts = data.class_counts()
    print(f"{'class':>5}  {'name':<34}{'count':>7}")
    for c, name in enumerate(data.label_names):
        print(f"{c:>5}  {name:<34}{counts[c]:>7}")
    print(f"{'':>5}  {'total':<34}{counts.sum():>7}")
    return EXIT_OK


def cmd_train(args) -> int:
    values = _resolve(args, _TRAIN_OPTS, flags=("faithful_mpnn",))
    cfg = _train_config(values)
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _require_file(args.data)
    _require_parent(args.model_out)
    history_out = args.history_out or str(Path(args.model_out).with_suffix("")) + ".history.csv"
    _require_parent(history_out)

    data = datagen.read_dataset(args.data)
    model = pipeline.train_model(data, cfg)
    pipeline.save_model(model, args.model_out)
    pipeline.write_history(model.history, history_out)
    _write_meta(history_out, "train", asdict(cfg))
    if model.history.loss:
        print(f"epochs {len(model.history.loss)}  initial loss {model.history.initial_loss:.6f}  "
              f"final loss {model.history.loss[-1]:.6f}  "
              f"train accuracy {model.history.accuracy[-1]:.4f}")
    else:
        print(f"epochs 0  initial loss {model.history.initial_loss:.6f}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    _require_file(args.model)
    _require_file(args.data)
    _require_parent(args.report_out)
    model = pipeline.load_model(args.model)
    data = datagen.read_dataset(args.data, model.label_names)
    result = pipeline.evaluate_model(model, data)
    rep = result.to_json({"seed": model.config.seed, "config": asdict(model.config),
                          "num_samples": data.num_samples})
    pipeline.dump_json(rep, args.report_out)
    print(pipeline.format_report(rep))
    return EXIT_OK


def cmd_report(args) -> int:
    _require_file(args.report)
    rep = pipeline.load_json(args.report)
    try:
        print(pipeline.format_report(rep))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{args.report}: not a report file ({exc})") from None
    return EXIT_OK


def _read_rows(path: str) -> list[list[str]]:
    _require_file(path)
    with open(path, encoding="utf-8", newline="") as fh:
        return [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]


def _floats(rows: list[list[str]], path: str) -> np.ndarray:
    try:
        return np.array([[float(c) for c in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


def _read_signal(path: str) -> np.ndarray:
    rows = _read_rows(path)
    if any(len(r) != 1 for r in rows):
        raise DataError(f"{path}: expected one value per line")
    return _floats(rows, path).ravel()


def _read_spectrum(path: str) -> np.ndarray:
    rows = _read_rows(path)
    if not rows or rows[0] != ["index", "eigenvalue", "coefficient"]:
        raise DataError(f"{path}: expected header index,eigenvalue,coefficient")
    table = _floats(rows[1:], path)
    if table.ndim != 2 or table.shape[1] != 3:
        raise DataError(f"{path}: expected three columns")
    if not np.array_equal(table[:, 0], np.arange(table.shape[0])):
        raise DataError(f"{path}: indices must run 0..N-1 in order")
    return table[:, 2]


def _read_matrix(path: str) -> np.ndarray:
    rows = _read_rows(path)
    if not rows or len({len(r) for r in rows}) != 1:
        raise DataError(f"{path}: expected a non-empty rectangular matrix")
    return _floats(rows, path)


def _write_lines(path: str, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def cmd_gft(args) -> int:
    _require_parent(args.out)
    _require_file(args.graph)
    eig = spectral.eigendecompose_symmetric(graph.laplacian(graph.load_graph(args.graph)))
    if args.inverse:
        f = spectral.igft(_read_spectrum(args.signal), eig)
        _write_lines(args.out, (repr(v) for v in f.tolist()))
    else:
        s = spectral.gft(_read_signal(args.signal), eig)
        _write_lines(args.out, ["index,eigenvalue,coefficient", *(
            f"{k},{lam!r},{c!r}"
            for k, (lam, c) in enumerate(zip(s.eigenvalues.tolist(), s.coefficients.tolist()))
        )])
    _write_meta(args.out, "gft", {"graph": args.graph, "signal": args.signal,
                                  "inverse": args.inverse, "seed": None})
    return EXIT_OK


def cmd_twin_gft(args) -> int:
    _require_parent(args.out)
    eigs = []
    for path in (args.graph1, args.graph2):
        _require_file(path)
        eigs.append(spectral.eigendecompose_symmetric(graph.laplacian(graph.load_graph(path))))
    mat = _read_matrix(args.matrix)
    fn = spectral.itwin_gft if args.inverse else spectral.twin_gft
    out = fn(mat, *eigs)
    out = out.coefficients if isinstance(out, spectral.Spectrum2D) else out
    _write_lines(args.out, (",".join(repr(v) for v in row) for row in out.tolist()))
    _write_meta(args.out, "twin-gft", {"graph1": args.graph1, "graph2": args.graph2,
                                       "matrix": args.matrix, "inverse": args.inverse,
                                       "seed": None})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gftmpnn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a synthetic dataset CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    _add_opts(p, _GENERATE_OPTS)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train a model on a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--model-out", required=True)
    p.add_argument("--history-out", help="default: <model-out stem>.history.csv")
    p.add_argument("--config")
    _add_opts(p, _TRAIN_OPTS)
    p.add_argument("--faithful-mpnn", dest="faithful_mpnn", action="store_true",
                   help="literal h2 = ReLU(A h1): W_mp2 = I and b_mp2 = 0, frozen")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a dataset CSV with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report-out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="pretty-print a report JSON")
    p.add_argument("report")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("gft", help="graph Fourier transform of a vertex signal")
    p.add_argument("--graph", required=True)
    p.add_argument("--signal", required=True, help="signal CSV, or spectrum CSV with --inverse")
    p.add_argument("--out", required=True)
    p.add_argument("--inverse", action="store_true")
    p.set_defaults(func=cmd_gft)

    p = sub.add_parser("twin-gft", help="twin GFT of a matrix signal on a product graph")
    p.add_argument("--graph1", required=True)
    p.add_argument("--graph2", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--inverse", action="store_true")
    p.set_defaults(func=cmd_twin_gft)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gftmpnn: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"gftmpnn: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, OSError, json.JSONDecodeError) as exc:
        print(f"gftmpnn: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
