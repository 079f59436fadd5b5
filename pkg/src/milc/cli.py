"""Command-line interface.

Subcommands: ``train``, ``eval``, ``bounds-curve``, ``gauss-mi``,
``gauss-bound``, ``datagen``, ``sweep``. Every run prints a machine-readable
summary JSON ``{subcommand, elapsed_seconds, outputs, headline_metrics}`` on
success; when ``--out -`` sends the payload itself to stdout, the summary
moves to stderr so stdout stays parseable.

Exit codes: 0 success, 1 validation/usage error, 2 numeric failure,
3 I/O failure.

Flag defaults can come from a ``--config`` file of flat ``key = value``
lines (``#`` comments); keys mirror the TrainConfig field names in
lower_snake_case (``--loss`` maps to ``loss_kind``), and unknown keys are
rejected. Explicit flags override config values. The ``MILC_SEED``
environment variable supplies the default seed.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import time

import numpy as np

from . import bounds as bounds_mod
from . import gauss as gauss_mod
from .data import (
    load_idx_dataset,
    parse_config_file,
    write_gauss_dataset,
    write_metrics_csv,
)
from .harness import TrainConfig, evaluate, train
from .info import LN2, entropy
from .losses import LossConfig
from .nn import load_checkpoint
from .validation import NumericError

__all__ = ["main"]


class _UsageError(Exception):
    """Raised for argparse-level problems so main can exit 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise _UsageError(message)


def _default_seed() -> int:
    raw = os.environ.get("MILC_SEED", "0")
    try:
        return int(raw)
    except ValueError as exc:
        raise _UsageError(f"MILC_SEED must be an integer, got {raw!r}") from exc


def _comma_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in str(text).split(",") if tok != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _comma_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in str(text).split(",") if tok != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def _sigma_matrix(values: list[float]) -> np.ndarray:
    if len(values) == 1:
        return np.array([[values[0]]])
    n = int(round(len(values) ** 0.5))
    if n * n != len(values):
        raise _UsageError(
            f"--sigma takes 1 value (variance) or n*n covariance entries, got {len(values)}"
        )
    return np.array(values, dtype=float).reshape(n, n)


# Per-subcommand converters: config-file keys -> value parser. Filled while
# the subparsers are built so config handling and flags cannot drift apart.
_CONVERTERS: dict[str, dict[str, object]] = {}


def _add(sub, name: str, *args, ctype=None, **kwargs):
    action = sub.add_argument(*args, **kwargs)
    if ctype is not None:
        _CONVERTERS.setdefault(name, {})[action.dest] = ctype
    return action


def _build_parser() -> _Parser:
    parser = _Parser(prog="milc", description=__doc__.split("\n")[0])
    subs = parser.add_subparsers(dest="subcommand", metavar="subcommand")

    def common(sp, name):
        _add(sp, name, "--seed", type=int, default=None, ctype=int,
             help="seed (default: MILC_SEED env var, else 0)")
        sp.add_argument("--config", default=None,
                        help="flat key = value file supplying flag defaults")

    def train_flags(sp, name):
        _add(sp, name, "--loss", dest="loss_kind", default="cel",
             choices=("cel", "cel_lsr", "cel_cp", "cel_lc", "mil"), ctype=str,
             help="training objective (default: cel)")
        _add(sp, name, "--epsilon", type=float, default=0.1, ctype=float,
             help="lsr/cp/lc mixture weight (default: 0.1)")
        _add(sp, name, "--lambda-ent", dest="lambda_ent", type=float, default=50.0,
             ctype=float, help="mil marginal weight (default: 50)")
        _add(sp, name, "--learning-rate", "--lr", dest="learning_rate", type=float,
             default=1e-3, ctype=float, help="constant SGD step (default: 1e-3)")
        _add(sp, name, "--momentum", type=float, default=0.9, ctype=float,
             help="heavy-ball coefficient (default: 0.9)")
        _add(sp, name, "--batch-size", dest="batch_size", type=int, default=512,
             ctype=int, help="minibatch size (default: 512)")
        _add(sp, name, "--epochs", type=int, default=77, ctype=int,
             help="training epochs (default: 77)")
        _add(sp, name, "--layer-sizes", dest="layer_sizes", type=_comma_ints,
             default=(784, 64, 64, 10), ctype=_comma_ints,
             help="comma-separated widths (default: 784,64,64,10)")
        _add(sp, name, "--train-images", dest="train_images", default=None, ctype=str,
             help="IDX image file for the train split")
        _add(sp, name, "--train-labels", dest="train_labels", default=None, ctype=str,
             help="IDX label file for the train split")
        _add(sp, name, "--test-images", dest="test_images", default=None, ctype=str,
             help="IDX image file for the test split")
        _add(sp, name, "--test-labels", dest="test_labels", default=None, ctype=str,
             help="IDX label file for the test split")
        _add(sp, name, "--checkpoint-interval", dest="checkpoint_interval", type=int,
             default=0, ctype=int, help="epochs between checkpoints (0: final only)")
        _add(sp, name, "--train-marginal-scope", dest="train_marginal_scope",
             choices=("batch", "dataset"), default="batch", ctype=str,
             help="label-distribution scope of the mil marginal term")
        _add(sp, name, "--eval-marginal-scope", dest="eval_marginal_scope",
             choices=("batch", "dataset"), default="dataset", ctype=str,
             help="statistic scope for evaluation metrics")

    sp = subs.add_parser("train", help="train a model and log per-epoch metrics")
    train_flags(sp, "train")
    sp.add_argument("--out", required=True, help="output directory")
    common(sp, "train")

    sp = subs.add_parser("eval", help="evaluate a checkpoint on a dataset")
    _add(sp, "eval", "--checkpoint", required=True, ctype=str, help="checkpoint file")
    _add(sp, "eval", "--images", required=True, ctype=str, help="IDX image file")
    _add(sp, "eval", "--labels", required=True, ctype=str, help="IDX label file")
    _add(sp, "eval", "--loss", dest="loss_kind", default="cel",
         choices=("cel", "cel_lsr", "cel_cp", "cel_lc", "mil"), ctype=str,
         help="loss to report (default: cel)")
    _add(sp, "eval", "--epsilon", type=float, default=0.1, ctype=float,
         help="lsr/cp/lc mixture weight (default: 0.1)")
    _add(sp, "eval", "--lambda-ent", dest="lambda_ent", type=float, default=50.0,
         ctype=float, help="mil marginal weight (default: 50)")
    sp.add_argument("--out", default="-", help="metrics CSV path, - for stdout")
    common(sp, "eval")

    sp = subs.add_parser("bounds-curve", help="error lower-bound rows over an MI grid")
    _add(sp, "bounds-curve", "--classes", dest="n_classes", type=int, required=True,
         ctype=int, help="label cardinality C >= 2")
    _add(sp, "bounds-curve", "--skew", type=float, default=None, ctype=float,
         help="dominant class mass p0 in (1/C, 1); omit for uniform labels")
    _add(sp, "bounds-curve", "--mi", type=_comma_floats, default=None, ctype=_comma_floats,
         help="comma-separated MI values in bits")
    _add(sp, "bounds-curve", "--mi-grid", dest="mi_grid", default=None, ctype=str,
         help="START:STOP:COUNT evenly spaced MI values in bits")
    sp.add_argument("--out", default="-", help="CSV path, - for stdout")
    common(sp, "bounds-curve")

    def gauss_flags(sp, name):
        _add(sp, name, "--q", type=float, required=True, ctype=float,
             help="P(Y = -1), strictly in (0, 1)")
        _add(sp, name, "--mu", type=_comma_floats, required=True, ctype=_comma_floats,
             help="mean vector (one value or comma list)")
        _add(sp, name, "--sigma", type=_comma_floats, required=True, ctype=_comma_floats,
             help="variance (one value) or row-major covariance entries")

    sp = subs.add_parser("gauss-mi", help="closed-form MI bounds plus oracle estimates")
    gauss_flags(sp, "gauss-mi")
    _add(sp, "gauss-mi", "--oracle", choices=("quadrature", "mc", "both", "none"),
         default="quadrature", ctype=str, help="independent estimator to run")
    _add(sp, "gauss-mi", "--samples", type=int, default=1_000_000, ctype=int,
         help="Monte-Carlo sample count (default: 1e6)")
    _add(sp, "gauss-mi", "--points", type=int, default=200_001, ctype=int,
         help="quadrature grid points (default: 200001)")
    sp.add_argument("--out", default="-", help="JSON path, - for stdout")
    common(sp, "gauss-mi")

    sp = subs.add_parser("gauss-bound", help="error lower bound for the Gaussian model")
    gauss_flags(sp, "gauss-bound")
    sp.add_argument("--out", default="-", help="JSON path, - for stdout")
    common(sp, "gauss-bound")

    sp = subs.add_parser("datagen", help="sample the Gaussian model to a dataset file")
    gauss_flags(sp, "datagen")
    _add(sp, "datagen", "--count", type=int, required=True, ctype=int,
         help="number of samples")
    sp.add_argument("--out", required=True, help="output dataset file")
    common(sp, "datagen")

    sp = subs.add_parser("sweep", help="train over a grid of one hyperparameter")
    train_flags(sp, "sweep")
    _add(sp, "sweep", "--param", choices=("batch_size", "lambda_ent"), required=True,
         ctype=str, help="hyperparameter to sweep")
    _add(sp, "sweep", "--values", required=True, ctype=str,
         help="comma-separated grid values")
    _add(sp, "sweep", "--jobs", type=int, default=1, ctype=int,
         help="parallel worker processes (default: 1, sequential)")
    sp.add_argument("--out", required=True, help="output directory")
    common(sp, "sweep")

    return parser


def _apply_config_file(args: argparse.Namespace, argv: list[str]) -> None:
    """Fill unset flags from the config file; explicit flags keep priority."""
    if not getattr(args, "config", None):
        return
    values = parse_config_file(args.config)
    converters = _CONVERTERS.get(args.subcommand, {})
    unknown = sorted(set(values) - set(converters))
    if unknown:
        raise _UsageError(
            f"unknown config key(s) for {args.subcommand}: {', '.join(unknown)}"
        )
    explicit = _explicit_dests(argv)
    for key, raw in values.items():
        if key in explicit:
            continue
        conv = converters[key]
        try:
            setattr(args, key, conv(raw))
        except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
            raise _UsageError(f"config key {key}: {exc}") from exc


_FLAG_TO_DEST = {
    "--loss": "loss_kind",
    "--lambda-ent": "lambda_ent",
    "--lr": "learning_rate",
    "--learning-rate": "learning_rate",
    "--batch-size": "batch_size",
    "--layer-sizes": "layer_sizes",
    "--train-images": "train_images",
    "--train-labels": "train_labels",
    "--test-images": "test_images",
    "--test-labels": "test_labels",
    "--checkpoint-interval": "checkpoint_interval",
    "--train-marginal-scope": "train_marginal_scope",
    "--eval-marginal-scope": "eval_marginal_scope",
    "--mi-grid": "mi_grid",
    "--classes": "n_classes",
}


def _explicit_dests(argv: list[str]) -> set[str]:
    dests = set()
    for tok in argv:
        if not tok.startswith("--"):
            continue
        flag = tok.split("=", 1)[0]
        dests.add(_FLAG_TO_DEST.get(flag, flag[2:].replace("-", "_")))
    return dests


def _resolve_seed(args: argparse.Namespace) -> int:
    seed = getattr(args, "seed", None)
    return _default_seed() if seed is None else int(seed)


def _write_text(out: str, text: str) -> tuple[list[str], bool]:
    """Write payload text to a path or stdout; returns (paths, used_stdout)."""
    if out == "-":
        sys.stdout.write(text)
        return [], True
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return [out], False


def _json_payload(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _cmd_train(args) -> tuple[list[str], dict, bool]:
    seed = _resolve_seed(args)
    for flag in ("train_images", "train_labels", "test_images", "test_labels"):
        if not getattr(args, flag):
            raise _UsageError(f"--{flag.replace('_', '-')} is required for train")
    config = TrainConfig(
        loss_kind=args.loss_kind,
        epsilon=args.epsilon,
        lambda_ent=args.lambda_ent,
        learning_rate=args.learning_rate,
        momentum=args.momentum,
        batch_size=args.batch_size,
        epochs=args.epochs,
        seed=seed,
        layer_sizes=tuple(args.layer_sizes),
        train_images=args.train_images,
        train_labels=args.train_labels,
        test_images=args.test_images,
        test_labels=args.test_labels,
        checkpoint_interval=args.checkpoint_interval,
        train_marginal_scope=args.train_marginal_scope,
        eval_marginal_scope=args.eval_marginal_scope,
    )
    n_classes = config.layer_sizes[-1]
    train_set = load_idx_dataset(config.train_images, config.train_labels, n_classes)
    test_set = load_idx_dataset(config.test_images, config.test_labels, n_classes)
    os.makedirs(args.out, exist_ok=True)

    def progress(row_train, row_test):
        print(
            f"epoch {row_test.epoch}: train_err {row_train.error_rate:.4f} "
            f"test_err {row_test.error_rate:.4f} test_mi_bits {row_test.mi_bits:.4f}",
            file=sys.stderr,
        )

    _, metrics = train(config, train_set, test_set, out_dir=args.out, on_epoch=progress)
    metrics_path = os.path.join(args.out, "metrics.csv")
    write_metrics_csv(metrics_path, [m.as_row() for m in metrics])
    outputs = [metrics_path, os.path.join(args.out, "checkpoint.bin")]
    if config.checkpoint_interval > 0:
        outputs.extend(
            os.path.join(args.out, f"checkpoint_epoch{e:04d}.bin")
            for e in range(config.checkpoint_interval, config.epochs + 1,
                           config.checkpoint_interval)
        )
    test_rows = [m for m in metrics if m.split == "test"]
    headline: dict = {"epochs": config.epochs, "loss": config.loss_kind}
    if test_rows:
        final = test_rows[-1]
        best = min(test_rows, key=lambda m: (m.error_rate, m.epoch))
        headline.update(
            final_test_error_rate=final.error_rate,
            final_test_accuracy=1.0 - final.error_rate,
            final_test_mi_bits=final.mi_bits,
            best_test_accuracy=1.0 - best.error_rate,
            best_test_epoch=best.epoch,
        )
    return outputs, headline, False


def _cmd_eval(args) -> tuple[list[str], dict, bool]:
    model, epoch = load_checkpoint(args.checkpoint)
    dataset = load_idx_dataset(args.images, args.labels, model.layer_sizes[-1])
    row = evaluate(
        model,
        dataset,
        loss_kind=args.loss_kind,
        loss_config=LossConfig(epsilon=args.epsilon, lambda_ent=args.lambda_ent),
        epoch=epoch,
        split="test",
    )
    text_rows = [row.as_row()]
    buf = io.StringIO()
    write_metrics_csv(buf, text_rows)
    outputs, used_stdout = _write_text(args.out, buf.getvalue())
    headline = {
        "error_rate": row.error_rate,
        "accuracy": 1.0 - row.error_rate,
        "mi_bits": row.mi_bits,
        "loss_nats": row.loss_nats,
    }
    return outputs, headline, used_stdout


def _cmd_bounds_curve(args) -> tuple[list[str], dict, bool]:
    if args.mi is None and args.mi_grid is None:
        raise _UsageError("one of --mi or --mi-grid is required")
    if args.mi is not None and args.mi_grid is not None:
        raise _UsageError("--mi and --mi-grid are mutually exclusive")
    if args.mi is not None:
        grid = list(args.mi)
    else:
        parts = str(args.mi_grid).split(":")
        if len(parts) != 3:
            raise _UsageError("--mi-grid expects START:STOP:COUNT")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise _UsageError("--mi-grid COUNT must be >= 1")
        grid = np.linspace(start, stop, count).tolist()
    points = bounds_mod.bound_curve(args.n_classes, grid, skew=args.skew)
    lines = ["mi_bits,h_y_bits,p_error_lower_bound,classical_fano_lower_bound"]
    for p in points:
        classical = bounds_mod.classical_fano_lower_bound(
            p.h_y_bits, p.mi_bits, args.n_classes
        )
        lines.append(
            f"{p.mi_bits:.6f},{p.h_y_bits:.6f},{p.lower_bound:.6f},{classical:.6f}"
        )
    outputs, used_stdout = _write_text(args.out, "\n".join(lines) + "\n")
    headline = {
        "rows": len(points),
        "h_y_bits": points[0].h_y_bits if points else None,
        "max_lower_bound": max((p.lower_bound for p in points), default=None),
    }
    return outputs, headline, used_stdout


def _make_model(args) -> gauss_mod.GaussBinaryModel:
    mu = np.array(args.mu, dtype=float)
    sigma = _sigma_matrix(args.sigma)
    return gauss_mod.GaussBinaryModel(args.q, mu, sigma)


def _cmd_gauss_mi(args) -> tuple[list[str], dict, bool]:
    model = _make_model(args)
    seed = _resolve_seed(args)
    lower, upper = gauss_mod.mi_bounds(model)
    h_y = gauss_mod.label_entropy_nats(model)
    payload = {
        "q": model.q,
        "mu": model.mu.tolist(),
        "sigma": model.sigma.tolist(),
        "separation": model.separation(),
        "bound_lower_nats": lower,
        "bound_upper_nats": upper,
        "label_entropy_nats": h_y,
        "oracles": {},
    }
    oracle_values = []
    if args.oracle in ("quadrature", "both"):
        if model.n != 1:
            raise _UsageError("--oracle quadrature requires a 1-D model")
        value = gauss_mod.quadrature_mi_1d(model, n_points=args.points)
        payload["oracles"]["quadrature"] = {"estimate_nats": value}
        oracle_values.append((value, 0.0))
    if args.oracle in ("mc", "both"):
        est, se = gauss_mod.mc_mi(model, args.samples, seed)
        payload["oracles"]["mc"] = {"estimate_nats": est, "stderr_nats": se}
        oracle_values.append((est, se))
    exceeds_h_y = lower > h_y + 1e-12
    exceeds_oracle = any(lower > est + 3.0 * se + 1e-9 for est, se in oracle_values)
    payload["discrepancy"] = {
        "lower_bound_exceeds_label_entropy": bool(exceeds_h_y),
        "lower_bound_exceeds_oracle": bool(exceeds_oracle),
        "flag": bool(exceeds_h_y or exceeds_oracle),
    }
    outputs, used_stdout = _write_text(args.out, _json_payload(payload))
    headline = {
        "bound_lower_nats": lower,
        "bound_upper_nats": upper,
        "discrepancy": payload["discrepancy"]["flag"],
    }
    if oracle_values:
        headline["oracle_estimate_nats"] = oracle_values[0][0]
    return outputs, headline, used_stdout


def _cmd_gauss_bound(args) -> tuple[list[str], dict, bool]:
    model = _make_model(args)
    bound = bounds_mod.gauss_error_lower_bound(model)
    _, upper_nats = gauss_mod.mi_bounds(model)
    payload = {
        "q": model.q,
        "mu": model.mu.tolist(),
        "sigma": model.sigma.tolist(),
        "h_y_bits": entropy([model.q, 1.0 - model.q], base="bits"),
        "mi_upper_bits": upper_nats / LN2,
        "p_error_lower_bound": bound,
    }
    outputs, used_stdout = _write_text(args.out, _json_payload(payload))
    return outputs, {"p_error_lower_bound": bound}, used_stdout


def _cmd_datagen(args) -> tuple[list[str], dict, bool]:
    if args.out == "-":
        raise _UsageError("datagen writes a binary container; --out must be a path")
    model = _make_model(args)
    seed = _resolve_seed(args)
    x, labels = gauss_mod.sample(model, args.count, seed)
    write_gauss_dataset(args.out, x, labels, model.q, model.mu, model.sigma, seed)
    headline = {
        "count": int(args.count),
        "n": model.n,
        "label_minus_fraction": float(np.mean(labels == -1)),
    }
    return [args.out], headline, False


def _sweep_point(config_kwargs: dict, out_dir: str) -> dict:
    config = TrainConfig(**config_kwargs)
    train_set = load_idx_dataset(
        config.train_images, config.train_labels, config.layer_sizes[-1]
    )
    test_set = load_idx_dataset(
        config.test_images, config.test_labels, config.layer_sizes[-1]
    )
    os.makedirs(out_dir, exist_ok=True)
    _, metrics = train(config, train_set, test_set, out_dir=out_dir)
    write_metrics_csv(
        os.path.join(out_dir, "metrics.csv"), [m.as_row() for m in metrics]
    )
    final = [m for m in metrics if m.split == "test"][-1]
    return {
        "error_rate": final.error_rate,
        "accuracy": 1.0 - final.error_rate,
        "mi_bits": final.mi_bits,
    }


def _cmd_sweep(args) -> tuple[list[str], dict, bool]:
    seed = _resolve_seed(args)
    for flag in ("train_images", "train_labels", "test_images", "test_labels"):
        if not getattr(args, flag):
            raise _UsageError(f"--{flag.replace('_', '-')} is required for sweep")
    raw_values = [tok for tok in str(args.values).split(",") if tok != ""]
    if not raw_values:
        raise _UsageError("--values must name at least one grid value")
    cast = int if args.param == "batch_size" else float
    try:
        values = [cast(tok) for tok in raw_values]
    except ValueError as exc:
        raise _UsageError(f"--values: {exc}") from exc

    base_kwargs = dict(
        loss_kind=args.loss_kind,
        epsilon=args.epsilon,
        lambda_ent=args.lambda_ent,
        learning_rate=args.learning_rate,
        momentum=args.momentum,
        batch_size=args.batch_size,
        epochs=args.epochs,
        seed=seed,
        layer_sizes=tuple(args.layer_sizes),
        train_images=args.train_images,
        train_labels=args.train_labels,
        test_images=args.test_images,
        test_labels=args.test_labels,
        checkpoint_interval=args.checkpoint_interval,
        train_marginal_scope=args.train_marginal_scope,
        eval_marginal_scope=args.eval_marginal_scope,
    )
    os.makedirs(args.out, exist_ok=True)
    jobs = []
    for value in values:
        kwargs = dict(base_kwargs)
        kwargs[args.param] = value
        point_dir = os.path.join(args.out, f"point_{args.param}_{value}")
        jobs.append((kwargs, point_dir, value))

    results = []
    if int(args.jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=int(args.jobs)) as pool:
            futures = [pool.submit(_sweep_point, k, d) for k, d, _ in jobs]
            results = [f.result() for f in futures]
    else:
        results = [_sweep_point(k, d) for k, d, _ in jobs]

    summary_path = os.path.join(args.out, "sweep_summary.csv")
    lines = ["param,value,final_test_error_rate,final_test_accuracy,final_test_mi_bits"]
    for (_, _, value), res in zip(jobs, results):
        lines.append(
            f"{args.param},{value},{res['error_rate']:.6f},"
            f"{res['accuracy']:.6f},{res['mi_bits']:.6f}"
        )
    with open(summary_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    outputs = [summary_path] + [d for _, d, _ in jobs]
    best = max(range(len(results)), key=lambda k: results[k]["accuracy"])
    headline = {
        "points": len(values),
        "best_value": values[best],
        "best_accuracy": results[best]["accuracy"],
    }
    return outputs, headline, False


_COMMANDS = {
    "train": _cmd_train,
    "eval": _cmd_eval,
    "bounds-curve": _cmd_bounds_curve,
    "gauss-mi": _cmd_gauss_mi,
    "gauss-bound": _cmd_gauss_bound,
    "datagen": _cmd_datagen,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    """Entry point; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    started = time.monotonic()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "subcommand", None):
            parser.print_usage(sys.stderr)
            return 1
        _apply_config_file(args, argv)
        outputs, headline, used_stdout = _COMMANDS[args.subcommand](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    summary = {
        "subcommand": args.subcommand,
        "elapsed_seconds": round(time.monotonic() - started, 6),
        "outputs": outputs,
        "headline_metrics": headline,
    }
    stream = sys.stderr if used_stdout else sys.stdout
    print(json.dumps(summary, sort_keys=True), file=stream)
    return 0


if __name__ == "__main__":
    sys.exit(main())
