"""Command-line surface for learning, prediction, evaluation, and export.

Every subcommand is deterministic given its full flag set (seeds included).
Library errors map to distinct nonzero exit codes; argparse usage errors
exit with status 2.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
from pathlib import Path

import numpy as np

from .core import Role
from .data_io import ingest_csv, write_csv
from .dot_export import export_dot
from .errors import EntbnError, IngestionError, InputError
from .inference import InferenceMethod
from .model_io import load_model, save_model
from .parameters import fit_mle
from .pipeline import (
    SplitSpec,
    ZeroDivision,
    compare_models,
    compare_report_csv,
    compare_report_text,
    evaluate,
    evaluation_text,
    predict_dataset,
)
from .scoring import ScoreKind, ScoreMetric
from .structure import SearchConfig, chow_liu, hill_climb, prune_edges
from .synthetic import generate_synthetic

# "mle" is exact per-CPD evaluation of the joint; computationally that is
# variable elimination, so the flag is an alias.
_METHODS = {
    "mle": InferenceMethod.VARIABLE_ELIMINATION,
    "ve": InferenceMethod.VARIABLE_ELIMINATION,
    "gibbs": InferenceMethod.GIBBS,
    "lw": InferenceMethod.LIKELIHOOD_WEIGHTING,
    "rs": InferenceMethod.REJECTION_SAMPLING,
}

_SCORES = {
    "bic": ScoreKind.BIC,
    "bdeu": ScoreKind.BDEU,
    "k2": ScoreKind.K2,
}


def _add_sampler_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--method",
        choices=sorted(_METHODS),
        default="mle",
        help="inference scheme (mle = exact evaluation, alias of ve)",
    )
    parser.add_argument("--threshold", type=float, default=0.5)
    parser.add_argument("--samples", type=int, default=10_000)
    parser.add_argument("--burn-in", type=int, default=1_000)
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entbn",
        description=(
            "Learn Bayesian networks over title/question entity classes, "
            "predict question entities from titles, and export structures."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    learn = sub.add_parser("learn", help="score-based hill-climb structure learning")
    learn.add_argument("--data", required=True)
    learn.add_argument("--score", choices=sorted(_SCORES), default="bic")
    learn.add_argument(
        "--alpha", type=float, default=5.0, help="BDeu equivalent sample size"
    )
    learn.add_argument("--max-parents", type=int, default=None)
    learn.add_argument("--prune", action="store_true")
    learn.add_argument("--significance", type=float, default=0.05)
    learn.add_argument("--out", required=True)

    tree = sub.add_parser("learn-tree", help="Chow-Liu tree structure learning")
    tree.add_argument("--data", required=True)
    tree.add_argument("--root", default=None, help="root variable name")
    tree.add_argument("--out", required=True)

    predict = sub.add_parser("predict", help="predict question entities from titles")
    predict.add_argument("--model", required=True)
    title = predict.add_mutually_exclusive_group(required=True)
    title.add_argument("--title", help="inline title bits, e.g. 0,1,0,...")
    title.add_argument("--title-file", help="CSV with the title columns")
    _add_sampler_flags(predict)
    predict.add_argument("--out", default=None)

    ev = sub.add_parser("evaluate", help="score predictions against a labeled CSV")
    ev.add_argument("--model", required=True)
    ev.add_argument("--data", required=True)
    _add_sampler_flags(ev)
    ev.add_argument(
        "--zero-division", choices=["exclude", "zero"], default="exclude"
    )
    ev.add_argument("--out", default=None)

    comp = sub.add_parser("compare", help="run the full model-comparison matrix")
    comp.add_argument("--data", required=True)
    comp.add_argument("--split", type=float, default=0.30)
    comp.add_argument("--seed", type=int, default=0)
    comp.add_argument(
        "--zero-division", choices=["exclude", "zero"], default="exclude"
    )
    comp.add_argument("--out", required=True, help="report CSV path")
    comp.add_argument("--text-out", default=None, help="aligned text report path")

    gen = sub.add_parser("generate", help="write a synthetic dataset + true network")
    gen.add_argument("--rows", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out-prefix", required=True)

    dot = sub.add_parser("export-dot", help="write the structure as a DOT file")
    dot.add_argument("--model", required=True)
    dot.add_argument("--out", required=True)
    dot.add_argument(
        "--plain", action="store_true", help="do not style title/question nodes"
    )
    return parser


def _cmd_learn(args) -> int:
    d = ingest_csv(args.data)
    metric = ScoreMetric(_SCORES[args.score], alpha=args.alpha)
    dag = hill_climb(d, SearchConfig(metric, max_parents=args.max_parents))
    if args.prune:
        dag = prune_edges(dag, d, args.significance)
    bn = fit_mle(dag, d)
    save_model(bn, args.out)
    print(f"learned {len(dag.edges)} edges ({args.score}) -> {args.out}")
    return 0


def _cmd_learn_tree(args) -> int:
    d = ingest_csv(args.data)
    root = 0
    if args.root is not None:
        if args.root not in d.name_to_id:
            raise InputError(f"unknown root variable {args.root!r}")
        root = d.name_to_id[args.root]
    dag = chow_liu(d, root=root)
    bn = fit_mle(dag, d)
    save_model(bn, args.out)
    print(f"learned {len(dag.edges)} tree edges -> {args.out}")
    return 0


def _parse_inline_title(text: str, n_titles: int) -> np.ndarray:
    tokens = [tok for tok in re.split(r"[,\s]+", text.strip()) if tok]
    if len(tokens) != n_titles or any(tok not in ("0", "1") for tok in tokens):
        raise InputError(
            f"--title needs exactly {n_titles} values of 0 or 1, "
            f"got {text!r}"
        )
    return np.array([[int(tok) for tok in tokens]], dtype=np.uint8)


def _read_title_file(path, title_names: list[str]) -> np.ndarray:
    """Title matrix from a CSV holding at least the title columns."""
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            try:
                header = [c.strip() for c in next(reader)]
            except StopIteration:
                raise IngestionError(f"{path}: empty file") from None
            missing = [name for name in title_names if name not in header]
            if missing:
                raise IngestionError(f"{path}: missing column {missing[0]!r}")
            positions = [header.index(name) for name in title_names]
            rows = []
            for line, record in enumerate(reader, start=2):
                if len(record) != len(header):
                    raise IngestionError(
                        f"{path}: line {line} has {len(record)} cells, "
                        f"expected {len(header)}"
                    )
                bits = []
                for pos in positions:
                    cell = record[pos].strip()
                    if cell not in ("0", "1"):
                        raise IngestionError(
                            f"{path}: line {line}, column {header[pos]}: "
                            f"cell value {record[pos]!r} is not 0 or 1"
                        )
                    bits.append(int(cell))
                rows.append(bits)
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    return np.array(rows, dtype=np.uint8)


def _prediction_csv(question_names: list[str], predictions: np.ndarray) -> str:
    lines = [",".join(question_names)]
    for row in predictions:
        lines.append(",".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def _cmd_predict(args) -> int:
    bn = load_model(args.model)
    title_names = [v.name for v in bn.variables if v.role is Role.TITLE]
    question_names = [v.name for v in bn.variables if v.role is Role.QUESTION]
    if args.title is not None:
        matrix = _parse_inline_title(args.title, len(title_names))
    else:
        matrix = _read_title_file(args.title_file, title_names)
    predictions = predict_dataset(
        bn,
        matrix,
        _METHODS[args.method],
        args.threshold,
        seed=args.seed,
        n_samples=args.samples,
        burn_in=args.burn_in,
    )
    text = _prediction_csv(question_names, predictions)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {predictions.shape[0]} predictions -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_evaluate(args) -> int:
    bn = load_model(args.model)
    d = ingest_csv(args.data)
    if [v.name for v in d.variables] != [v.name for v in bn.variables]:
        raise InputError("dataset columns do not match the model's variables")
    title_ids = [v.id for v in d.variables if v.role is Role.TITLE]
    question_ids = [v.id for v in d.variables if v.role is Role.QUESTION]
    predictions = predict_dataset(
        bn,
        d.records[:, title_ids],
        _METHODS[args.method],
        args.threshold,
        seed=args.seed,
        n_samples=args.samples,
        burn_in=args.burn_in,
    )
    report = evaluate(
        predictions,
        d.records[:, question_ids],
        [d.variables[q].entity_class for q in question_ids],
        ZeroDivision(args.zero_division),
    )
    text = evaluation_text(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote evaluation report -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_compare(args) -> int:
    d = ingest_csv(args.data)
    rows = compare_models(
        d,
        SplitSpec(args.split, args.seed),
        zero_division=ZeroDivision(args.zero_division),
    )
    Path(args.out).write_text(compare_report_csv(rows), encoding="utf-8")
    text = compare_report_text(rows)
    if args.text_out:
        Path(args.text_out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    print(f"wrote {len(rows)}-row report -> {args.out}")
    return 0


def _cmd_generate(args) -> int:
    data, bn = generate_synthetic(args.rows, args.seed)
    csv_path = f"{args.out_prefix}.csv"
    model_path = f"{args.out_prefix}.model.json"
    write_csv(data, csv_path)
    save_model(bn, model_path)
    print(f"wrote {data.n_rows} rows -> {csv_path}")
    print(f"wrote generating network -> {model_path}")
    return 0


def _cmd_export_dot(args) -> int:
    bn = load_model(args.model)
    export_dot(bn, args.out, highlight_roles=not args.plain)
    print(f"wrote {len(bn.dag.edges)} edges -> {args.out}")
    return 0


_COMMANDS = {
    "learn": _cmd_learn,
    "learn-tree": _cmd_learn_tree,
    "predict": _cmd_predict,
    "evaluate": _cmd_evaluate,
    "compare": _cmd_compare,
    "generate": _cmd_generate,
    "export-dot": _cmd_export_dot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except EntbnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
