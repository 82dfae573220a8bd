"""Command-line front end: generate data, score it, evaluate and plot.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import datagen
from .core import Dataset, DatasetError, ScoreVector, load_dataset
from .detectors import ALGORITHMS, FULL, SECODA, DetectorSpec, normalize_algorithm, run_detector
from .evaluation import evaluate, topk_mask
from .hmdh import WEIGHT_MODES, HmdhConfig, hmdh
from .ipp import AUTO, IppConfig, ipp
from .plotting import scatter_svg
from .secoda import EQUIDEPTH, EQUIWIDTH

logger = logging.getLogger("hdadetect")

IPP = "ipp"
HMDH = "hmdh"
ALGO_CHOICES = tuple(a.replace("_", "-") for a in ALGORITHMS) + (IPP, HMDH)
UNDERLYING_CHOICES = tuple(a.replace("_", "-") for a in ALGORITHMS)
DEFAULT_LABEL_COLUMN = "hda"


class UsageError(Exception):
    """Flag combination or input shape problem; reported with exit code 2."""


def _qfb_arg(text: str):
    if text.strip().lower() == AUTO:
        return AUTO
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a number, got {text!r}") from None
    if not math.isfinite(v) or v < 0:
        raise argparse.ArgumentTypeError(f"QFB must be a finite number >= 0, got {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _non_negative_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {v}")
    return v


def _scale_arg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"scale must be in (0, 1], got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    p = argparse.ArgumentParser(prog="hdadetect", description="High-density anomaly detection toolkit")
    sub = p.add_subparsers(dest="command", required=True, metavar="{generate,detect,evaluate,plot}")

    g = sub.add_parser("generate", parents=[common], help="write a synthetic labeled dataset and its manifest")
    g.add_argument("--set", dest="set_name", required=True, choices=datagen.SET_NAMES)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--scale", type=_scale_arg, default=1.0, help="fraction of the full case count, in (0, 1]")
    g.add_argument("--out", required=True, help="CSV path; the manifest is written next to it")

    d = sub.add_parser("detect", parents=[common], help="score a dataset (lowest score = most anomalous)")
    d.add_argument("--algo", required=True, choices=ALGO_CHOICES)
    d.add_argument("--in", dest="input", required=True, help="dataset CSV")
    d.add_argument("--out", required=True, help="scores CSV (id,score,provenance)")
    d.add_argument("--underlying", choices=UNDERLYING_CHOICES, help="detector inside ipp/hmdh")
    d.add_argument("--qd", type=_positive_int, help="IPP quantile denominator (default 100)")
    d.add_argument("--qfb", type=_qfb_arg, help="IPP QuantileFilterBoost: 'auto' or a number >= 0")
    d.add_argument("--weight", choices=WEIGHT_MODES, help="HMDH weight mode (default sden)")
    d.add_argument("--discretization", choices=(EQUIWIDTH, EQUIDEPTH), help="SECODA binning")
    d.add_argument("--seed", type=int, default=0, help="QSP sampling seed")
    d.add_argument("--k-min", type=_positive_int, default=1)
    d.add_argument("--k-max", type=_positive_int, default=10)
    d.add_argument("--min-pts", type=_positive_int, default=10)
    d.add_argument("--sample-size", type=_positive_int, help="QSP sample size (default min(3000, n))")
    d.add_argument("--label-column", default=DEFAULT_LABEL_COLUMN, help="column excluded from the features if present")

    e = sub.add_parser("evaluate", parents=[common], help="score quality against ground-truth labels")
    e.add_argument("--scores", required=True, help="scores CSV written by detect")
    e.add_argument("--in", dest="input", help="dataset CSV holding the label column")
    e.add_argument("--manifest", help="manifest JSON written by generate (alternative label source)")
    e.add_argument("--label-column", default=DEFAULT_LABEL_COLUMN)
    e.add_argument("--out", help="report JSON path (default: stdout)")

    pl = sub.add_parser("plot", parents=[common], help="2-D SVG scatter with the top anomalies enlarged")
    pl.add_argument("--in", dest="input", required=True, help="dataset CSV")
    pl.add_argument("--scores", help="scores CSV written by detect")
    pl.add_argument("--x", required=True, help="numeric column on the horizontal axis")
    pl.add_argument("--y", required=True, help="numeric column on the vertical axis")
    pl.add_argument("--top", type=_non_negative_int, default=0, help="number of lowest-scored cases to enlarge")
    pl.add_argument("--label-column", default=DEFAULT_LABEL_COLUMN)
    pl.add_argument("--title", default="")
    pl.add_argument("--out", required=True, help="SVG path")
    return p


def _csv_header(path: str | Path) -> list[str]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if row:
                return [h.strip() for h in row]
    raise DatasetError(f"{path} is empty")


def read_dataset(path: str | Path, label_column: str) -> Dataset:
    """Load a dataset, treating ``label_column`` as labels when it is present."""
    has_labels = label_column in _csv_header(path)
    return load_dataset(path, label_column=label_column if has_labels else None)


def write_scores(scores: ScoreVector, path: str | Path, default_provenance: str) -> None:
    prov = scores.provenance if scores.provenance is not None else [default_provenance] * len(scores)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "score", "provenance"])
        for i, (v, pr) in enumerate(zip(scores.values, prov), start=1):
            w.writerow([i, repr(float(v)), pr])


def read_scores(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Scores and provenance ordered by id; ids must be exactly ``1..n``."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows or [h.strip() for h in rows[0][:2]] != ["id", "score"]:
        raise DatasetError(f"{path} is not a scores file (expected header id,score,provenance)")
    ids, vals, prov = [], [], []
    for line, r in enumerate(rows[1:], start=2):
        try:
            ids.append(int(r[0]))
            vals.append(float(r[1]))
        except (ValueError, IndexError):
            raise DatasetError(f"malformed scores row {line} in {path}") from None
        prov.append(r[2] if len(r) > 2 else "")
    order = np.argsort(ids, kind="stable")
    ids_sorted = np.asarray(ids)[order]
    if not np.array_equal(ids_sorted, np.arange(1, len(ids) + 1)):
        raise DatasetError(f"{path}: ids must be 1..n without gaps or duplicates")
    values = np.asarray(vals)[order]
    if not np.all(np.isfinite(values)):
        raise DatasetError(f"{path}: scores must be finite")
    return values, np.asarray(prov, dtype=object)[order]


def _detector_spec(args, algorithm: str) -> DetectorSpec:
    return DetectorSpec(
        algorithm=algorithm,
        k_min=args.k_min,
        k_max=args.k_max,
        min_pts=args.min_pts,
        sample_size=args.sample_size,
        seed=args.seed,
        discretization=args.discretization or EQUIWIDTH,
    )


def _check_detect_flags(args) -> None:
    algo = args.algo
    if args.weight is not None and algo != HMDH:
        raise UsageError("--weight is only valid with --algo hmdh")
    if (args.qd is not None or args.qfb is not None) and algo != IPP:
        raise UsageError("--qd and --qfb are only valid with --algo ipp")
    if args.underlying is not None and algo not in (IPP, HMDH):
        raise UsageError("--underlying is only valid with --algo ipp or hmdh")
    if args.discretization is not None:
        inner = args.underlying or (SECODA if algo == HMDH else "knn-agg")
        target = inner if algo in (IPP, HMDH) else algo
        if normalize_algorithm(target) != SECODA:
            raise UsageError("--discretization only applies when SECODA is the detector")
    if args.k_min > args.k_max:
        raise UsageError("--k-min must not exceed --k-max")


def cmd_generate(args) -> int:
    gs = datagen.generate(datagen.GenSpec(args.set_name, args.seed, args.scale))
    csv_path, man_path = gs.write(args.out)
    print(f"wrote {csv_path} and {man_path}: n={gs.dataset.n_cases}, hdas={len(gs.manifest)}")
    return 0


def cmd_detect(args) -> int:
    _check_detect_flags(args)
    ds = read_dataset(args.input, args.label_column)
    if args.algo == IPP:
        inner = normalize_algorithm(args.underlying or "knn-agg")
        cfg = IppConfig(
            qd=args.qd if args.qd is not None else 100,
            qfb=args.qfb if args.qfb is not None else AUTO,
            underlying=_detector_spec(args, inner),
        )
        scores = ipp(ds, cfg)
        logger.info("IPP QFB used: %s", scores.meta.get("qfb"))
    elif args.algo == HMDH:
        inner = normalize_algorithm(args.underlying or SECODA)
        cfg = HmdhConfig(weight_mode=args.weight or "sden", underlying=_detector_spec(args, inner))
        scores = hmdh(ds, cfg)
        logger.info("HMDH weight: %s", scores.meta.get("weight"))
    else:
        algo = normalize_algorithm(args.algo)
        scores = run_detector(_detector_spec(args, algo), ds, FULL)
    write_scores(scores, args.out, args.algo)
    print(f"wrote {args.out}: {len(scores)} scores ({args.algo})")
    return 0


def _labels_from_manifest(path: str | Path) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    payload = json.loads(path.read_text(encoding="utf-8"))
    try:
        n = int(payload["n_cases"])
        ids = [int(rec["id"]) for rec in payload["hdas"]]
    except (KeyError, TypeError, ValueError):
        raise DatasetError(f"{path} is not a dataset manifest") from None
    labels = np.zeros(n, dtype=bool)
    for i in ids:
        if not 1 <= i <= n:
            raise DatasetError(f"{path}: HDA id {i} outside 1..{n}")
        labels[i - 1] = True
    return labels


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not serializable: {type(o).__name__}")


def cmd_evaluate(args) -> int:
    if (args.input is None) == (args.manifest is None):
        raise UsageError("give exactly one label source: --in or --manifest")
    scores, _ = read_scores(args.scores)
    if args.input is not None:
        if args.label_column not in _csv_header(args.input):
            raise UsageError(f"{args.input} has no label column {args.label_column!r}")
        labels = load_dataset(args.input, label_column=args.label_column).labels
    else:
        labels = _labels_from_manifest(args.manifest)
    if len(labels) != len(scores):
        raise UsageError(f"{len(scores)} scores but {len(labels)} labels")
    if labels.all() or not labels.any():
        print("warning: labels contain a single class; AUC fields are null", file=sys.stderr)
    report = evaluate(scores, labels)
    report["scores"] = str(args.scores)
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    tk = report["topk"]
    print(
        f"top-{tk['k']}: sensitivity={tk['sensitivity']:.4f} precision={tk['precision']:.4f}"
        + (f" roc_auc={report['roc_auc']:.6f}" if report["roc_auc"] is not None else ""),
        file=sys.stderr if not args.out else sys.stdout,
    )
    return 0


def cmd_plot(args) -> int:
    ds = read_dataset(args.input, args.label_column)
    numeric = {c.name for c in ds.numeric_columns}
    for flag, name in (("--x", args.x), ("--y", args.y)):
        if name not in numeric:
            raise UsageError(f"{flag} {name!r} is not a numeric column; choose from {sorted(numeric)}")
    highlight = None
    if args.top > 0:
        if args.scores is None:
            raise UsageError("--top needs --scores")
        scores, _ = read_scores(args.scores)
        if len(scores) != ds.n_cases:
            raise UsageError(f"{len(scores)} scores but {ds.n_cases} cases")
        highlight = topk_mask(scores, min(args.top, ds.n_cases))
    if ds.categorical_columns:
        groups = [" | ".join(c) for c in ds.class_combinations()]
    else:
        groups = ["all"] * ds.n_cases
    svg = scatter_svg(
        ds.column(args.x).values,
        ds.column(args.y).values,
        groups,
        highlight,
        x_label=args.x,
        y_label=args.y,
        title=args.title,
    )
    Path(args.out).write_text(svg, encoding="utf-8")
    print(f"wrote {args.out}: {ds.n_cases} cases, {int(highlight.sum()) if highlight is not None else 0} enlarged")
    return 0


COMMANDS = {"generate": cmd_generate, "detect": cmd_detect, "evaluate": cmd_evaluate, "plot": cmd_plot}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (DatasetError, OSError, ValueError, RuntimeError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
