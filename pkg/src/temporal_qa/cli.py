"""``temporal-qa``: generate, check and score temporal-logic QA benchmarks.

Exit codes: 0 success, 1 data error (error class name on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .annotations import SegmentSchema, parse_scene_graph_annotations, parse_segment_annotations
from .builder import (
    VARIANT_TARGETS,
    Benchmark,
    GenerationConfig,
    benchmark_metadata,
    benchmark_stats,
    build_benchmark,
    read_benchmark,
    validate_benchmark,
    write_benchmark,
)
from .errors import TemporalQAError, UnknownId
from .logic import DEFAULT_TAU_ADJ
from .oracle import oracle_check
from .scoring import POLICIES, read_predictions, score, write_report
from .timeline import DEFAULT_THETA, build_instance_states

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def meta_path(benchmark_path: str | os.PathLike) -> Path:
    return Path(f"{benchmark_path}.meta.json")


def stats_path(benchmark_path: str | os.PathLike) -> Path:
    return Path(f"{benchmark_path}.stats.json")


def _unit_float(text: str) -> float:
    value = float(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"expected a value in [0, 1], got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _add_input_flags(p: argparse.ArgumentParser, required: bool):
    p.add_argument("--input", required=required, help="annotation file")
    p.add_argument("--format", choices=("segments", "scenegraph"), default="segments")
    g = p.add_argument_group("segment files")
    g.add_argument("--delimiter", default="\\t", help="field separator; 'whitespace' splits on runs of blanks (default: tab)")
    g.add_argument("--columns", default="video_id,start,end,action", help="comma-separated column names in file order")
    g.add_argument("--time-unit", choices=("step", "second"), default="step")
    g.add_argument("--resolution", type=_positive_int, default=10, help="steps per second when --time-unit second")
    g.add_argument("--header", action="store_true", help="skip the first line")
    g.add_argument("--ignore-label", action="append", default=[], help="label to drop, e.g. SIL (repeatable)")
    g = p.add_argument_group("scene-graph files")
    g.add_argument("--annotated-only", action="store_true", help="drop unannotated frames and re-index the rest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="temporal-qa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    p = sub.add_parser("generate", help="build a balanced benchmark from annotations")
    _add_input_flags(p, required=True)
    p.add_argument("--variant", choices=sorted(VARIANT_TARGETS), default="S")
    p.add_argument("--target", type=_positive_int, help="override the per-category target of the variant")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theta", type=_unit_float, default=DEFAULT_THETA, help="sanitization threshold")
    p.add_argument("--tau-adj", type=_positive_int, default=DEFAULT_TAU_ADJ, help="adjacency tolerance for ImmediateNext")
    p.add_argument("--dataset", help="dataset tag used in ids (default: input file stem)")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--out", required=True, help="benchmark JSONL; sidecars go to OUT.meta.json and OUT.stats.json")

    for verb, text in (("stats", "summarize a benchmark file"), ("validate", "check benchmark invariants")):
        p = sub.add_parser(verb, help=text)
        p.add_argument("--benchmark", required=True)

    p = sub.add_parser("score", help="score a predictions file")
    p.add_argument("--benchmark", required=True)
    p.add_argument("--predictions", required=True, help="JSONL of {id, raw_response}")
    p.add_argument("--strict", action="store_true", help="fail on the first unparseable response")
    p.add_argument("--policy", choices=POLICIES, default="wrong", help="treat unparseable responses as wrong or drop them")
    p.add_argument("--qtype", choices=("boolean", "mcq"), help="score only one question type")
    p.add_argument("--report", required=True, help="machine-readable JSON report")

    p = sub.add_parser("oracle-check", help="compare the fast evaluator with brute force")
    p.add_argument("--cases", type=_positive_int, default=1000)
    p.add_argument("--max-steps", type=_positive_int, default=50)
    p.add_argument("--max-actions", type=_positive_int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theta", type=_unit_float, default=DEFAULT_THETA)
    p.add_argument("--tau-adj", type=_positive_int, default=DEFAULT_TAU_ADJ)

    p = sub.add_parser("inspect", help="print one item with its source timeline")
    p.add_argument("--benchmark", required=True)
    p.add_argument("--id", required=True)
    _add_input_flags(p, required=False)
    p.add_argument("--width", type=_positive_int, default=80, help="timeline bar width")
    return parser


def _schema(args) -> SegmentSchema:
    delim = {"\\t": "\t", "tab": "\t", "whitespace": None}.get(args.delimiter, args.delimiter)
    try:
        return SegmentSchema(
            delimiter=delim,
            columns=tuple(c.strip() for c in args.columns.split(",")),
            time_unit=args.time_unit,
            resolution=args.resolution,
            has_header=args.header,
            ignore_labels=frozenset(args.ignore_label),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_corpus(args, dataset: str):
    with open(args.input, encoding="utf-8") as fh:
        if args.format == "segments":
            return parse_segment_annotations(fh, _schema(args), source_dataset=dataset)
        return parse_scene_graph_annotations(fh, source_dataset=dataset, retain_annotated_only=args.annotated_only)


def load_benchmark(path: str) -> Benchmark:
    meta = None
    if meta_path(path).exists():
        meta = json.loads(meta_path(path).read_text(encoding="utf-8"))
    with open(path, "rb") as fh:
        return read_benchmark(fh, meta)


def _generate(args, out) -> int:
    dataset = args.dataset or Path(args.input).stem
    corpus = _load_corpus(args, dataset)
    config = GenerationConfig(
        variant=args.variant,
        per_category_target=args.target,
        theta=args.theta,
        tau_adj=args.tau_adj,
        global_seed=args.seed,
        dataset_tag=dataset,
    )
    bench = build_benchmark(corpus, config, workers=args.workers)
    with open(args.out, "wb") as fh:
        count = write_benchmark(bench, fh)
    meta_path(args.out).write_text(json.dumps(benchmark_metadata(bench), indent=2) + "\n", encoding="utf-8")
    report = benchmark_stats(bench)
    stats_path(args.out).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    print(report.render(), file=out)
    print(f"wrote {count} items from {len(corpus)} videos to {args.out}", file=out)
    return EXIT_OK


def _stats(args, out) -> int:
    print(benchmark_stats(load_benchmark(args.benchmark)).render(), file=out)
    return EXIT_OK


def _validate(args, out) -> int:
    problems = validate_benchmark(load_benchmark(args.benchmark))
    for p in problems:
        print(p, file=sys.stderr)
    print(f"{len(problems)} violations", file=out)
    return EXIT_DATA if problems else EXIT_OK


def _score(args, out) -> int:
    bench = load_benchmark(args.benchmark)
    with open(args.predictions, encoding="utf-8") as fh:
        preds = read_predictions(fh)
    table = score(bench, preds, policy=args.policy, strict=args.strict, qtype=args.qtype)
    with open(args.report, "w", encoding="utf-8") as fh:
        write_report(table, fh)
    print(table.render(), file=out)
    return EXIT_OK


def _oracle(args, out) -> int:
    report = oracle_check(args.cases, args.max_steps, args.max_actions, args.seed, args.theta, args.tau_adj)
    print(report.summary(), file=out)
    for case, cat, tup in report.mismatches[:20]:
        print(f"mismatch: case {case} {cat} {tup}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_DATA


def _inspect(args, out) -> int:
    bench = load_benchmark(args.benchmark)
    item = next((it for it in bench.items if it.id == args.id), None)
    if item is None:
        raise UnknownId(args.id)
    print(json.dumps(item.to_json(), indent=2, ensure_ascii=False), file=out)
    if not args.input:
        return EXIT_OK
    corpus = _load_corpus(args, item.dataset)
    ann = next((a for a in corpus if a.video_id == item.video_id), None)
    if ann is None:
        raise UnknownId(f"video {item.video_id} not found in {args.input}")
    named = ", ".join(f"{a.actor} {a.verb_phrase}" for a in item.provenance.actions)
    print(f"\nvideo {ann.video_id}, {ann.num_steps} steps; item actions: {named}", file=out)
    print(build_instance_states(ann).render(args.width), file=out)
    return EXIT_OK


_VERBS = {
    "generate": _generate,
    "stats": _stats,
    "validate": _validate,
    "score": _score,
    "oracle-check": _oracle,
    "inspect": _inspect,
}


def run(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return _VERBS[args.verb](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TemporalQAError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
