"""Command-line pipeline: ingest, train, classify, eval, graph,
centrality and filter subcommands.

Exit codes: 0 success, 1 validation/data error, 2 usage error,
3 convergence failure. Every subcommand that writes files also writes the
resolved run configuration beside its first output, and all emitted
numbers use fixed 17-significant-digit formatting so outputs are byte
stable for a given seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .config import RunConfig
from .errors import IntentCiteError, ParameterError, ValidationError
from .filtering import (
    FilterSpec,
    export_bump_data,
    filter_graph,
    format_impact_table,
    impact_report,
    rank_shift,
    write_impact_csv,
)
from .floatfmt import fmt_float
from .gan.checkpoint import load_checkpoint, save_checkpoint
from .gan.inference import classify
from .gan.metrics import evaluate
from .gan.nets import init_model
from .gan.training import TrainConfig, train, write_train_log
from .centrality import METRICS, compute_metric, write_centrality_csv
from .embeddings import read_embeddings
from .graph import (
    build_graph,
    largest_component,
    read_edge_csv,
    weakly_connected_components,
    write_edge_csv,
    write_node_csv,
)
from .records import parse_jsonl, read_csv, write_csv
from .schema import load_schema
from .splits import make_split, read_split_csv, write_split_csv

PREDICTIONS_CSV_HEADER = ["record_id", "intent", "confidence"]

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3


def _metric_name(value: str) -> str:
    name = value.replace("-", "_")
    if name not in METRICS:
        raise argparse.ArgumentTypeError(
            f"unknown metric {value!r}; choose from {', '.join(METRICS)}"
        )
    return name


def _load_field_map(raw: str) -> dict:
    text = Path(raw[1:]).read_text(encoding="utf-8") if raw.startswith("@") else raw
    try:
        field_map = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"--field-map is not valid JSON: {exc.msg}") from None
    if not isinstance(field_map, dict):
        raise ParameterError("--field-map must be a JSON object")
    return field_map


def _resolved_config(args, keys: dict) -> RunConfig:
    config = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    config.apply_overrides({k: getattr(args, attr) for k, attr in keys.items()})
    return config


def _load_graph(args, schema):
    edges = read_edge_csv(args.graph, schema)
    return build_graph(edges)


# --- subcommands -----------------------------------------------------------


def cmd_ingest(args) -> int:
    schema = load_schema(args.schema) if args.schema else None
    if args.jsonl:
        field_map = _load_field_map(args.field_map)
        with open(args.jsonl, "r", encoding="utf-8") as fh:
            result = parse_jsonl(fh, field_map, schema)
        records = result.records
        skips = result.skips
    else:
        records = read_csv(args.csv)
        skips = []

    rows = write_csv(records, args.out)
    print(f"records: {rows}")
    print(f"skipped: {len(skips)}")
    if args.skip_report:
        with open(args.skip_report, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["line_number", "reason"])
            for skip in skips:
                writer.writerow([skip.line_number, skip.reason])

    if args.make_split is not None:
        if not args.out_split:
            raise ParameterError("--make-split needs --out-split")
        split = make_split(
            records,
            args.make_split,
            args.split_seed,
            dev_fraction=args.dev_fraction,
            test_fraction=args.test_fraction,
            schema=schema,
        )
        labels = {
            r.record_id: r.gold_intent for r in records if r.gold_intent is not None
        }
        write_split_csv(split, labels, args.out_split)
        print(
            f"split: {len(split.labeled_train)} labeled, "
            f"{len(split.unlabeled_train)} unlabeled, "
            f"{len(split.dev)} dev, {len(split.test)} test"
        )
    return EXIT_OK


_TRAIN_KEYS = {
    "batch_size": "batch_size",
    "lr_discriminator": "lr_discriminator",
    "lr_generator": "lr_generator",
    "adam_epsilon": "adam_epsilon",
    "epochs": "epochs",
    "warmup_proportion": "warmup_proportion",
    "z_dim": "z_dim",
    "generator_hidden_layers": "generator_hidden_layers",
    "discriminator_hidden_layers": "discriminator_hidden_layers",
    "dropout": "dropout",
    "seed": "seed",
}


def cmd_train(args) -> int:
    config = _resolved_config(args, _TRAIN_KEYS)
    schema = load_schema(args.schema)
    embeddings = read_embeddings(args.embeddings)
    split, labels = read_split_csv(args.split)

    model = init_model(
        k=schema.k,
        embedding_dim=embeddings.dim,
        z_dim=config["z_dim"],
        generator_hidden_layers=config["generator_hidden_layers"],
        discriminator_hidden_layers=config["discriminator_hidden_layers"],
        dropout=config["dropout"],
        leaky_slope=config["leaky_slope"],
        seed=config["seed"],
    )
    train_config = TrainConfig(
        batch_size=config["batch_size"],
        lr_discriminator=config["lr_discriminator"],
        lr_generator=config["lr_generator"],
        adam_epsilon=config["adam_epsilon"],
        epochs=config["epochs"],
        warmup_proportion=config["warmup_proportion"],
        seed=config["seed"],
        max_seq_len=config["max_seq_len"],
    )
    result = train(
        model,
        split,
        embeddings,
        labels,
        train_config,
        semi_supervised=not args.supervised_only,
    )
    save_checkpoint(
        result.model,
        args.out_model,
        include_generator=args.keep_generator,
        include_optimizer=args.keep_optimizer,
    )
    log_path = args.log or f"{args.out_model}.log.csv"
    write_train_log(result.log, log_path)
    config.write_resolved(args.out_model)
    best = result.log[result.best_epoch - 1] if result.log else None
    print(f"epochs: {len(result.log)}")
    print(f"best epoch: {result.best_epoch}")
    if best is not None:
        print(f"best dev macro-F1: {fmt_float(best.dev_macro_f1)}")
    return EXIT_OK


def cmd_classify(args) -> int:
    schema = load_schema(args.schema)
    model = load_checkpoint(args.model)
    if model.discriminator.num_classes != schema.k:
        raise ValidationError(
            f"model has {model.discriminator.num_classes} classes, schema has {schema.k}"
        )
    embeddings = read_embeddings(args.embeddings)
    records = read_csv(args.records)
    missing = [r.record_id for r in records if r.record_id not in embeddings]
    if missing:
        raise ValidationError(f"records without embeddings: {missing[:5]!r}")
    predictions = classify(model, embeddings)

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["citing_id", "cited_id", "intent", "confidence"])
        for rec in records:
            intent, confidence = predictions[rec.record_id]
            writer.writerow(
                [rec.citing_id, rec.cited_id, schema.name_of(intent), fmt_float(confidence)]
            )
    if args.out_predictions:
        with open(args.out_predictions, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(PREDICTIONS_CSV_HEADER)
            for rec in records:
                intent, confidence = predictions[rec.record_id]
                writer.writerow(
                    [rec.record_id, schema.name_of(intent), fmt_float(confidence)]
                )
    RunConfig().write_resolved(args.out)
    print(f"classified: {len(records)}")
    return EXIT_OK


def _read_predictions_csv(path, schema) -> dict[str, int]:
    out: dict[str, int] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PREDICTIONS_CSV_HEADER:
            raise ValidationError(
                f"{path}: unexpected header {header!r}, want {PREDICTIONS_CSV_HEADER!r}"
            )
        for row in reader:
            record_id, intent, _ = row
            if record_id in out:
                raise ValidationError(f"{path}: duplicate prediction for {record_id!r}")
            out[record_id] = schema.index_of(intent)
    return out


def cmd_eval(args) -> int:
    schema = load_schema(args.schema)
    predictions = _read_predictions_csv(args.pred, schema)
    gold_records = read_csv(args.gold)
    gold = {
        r.record_id: r.gold_intent
        for r in gold_records
        if r.gold_intent is not None
    }
    report = evaluate(predictions, gold, schema)

    if args.format == "json":
        payload = {
            "n_examples": report.n_examples,
            "n_errors": report.n_errors,
            "macro_f1": report.macro_f1,
            "micro_f1": report.micro_f1,
            "per_class": [
                {
                    "label": m.label,
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for m in report.per_class
            ],
            "confusion": report.confusion.tolist(),
        }
        print(json.dumps(payload, indent=2))
    else:
        headline = report.macro_f1 if args.average == "macro" else report.micro_f1
        print(f"examples: {report.n_examples}")
        print(f"errors: {report.n_errors}")
        print(f"{args.average}_f1: {100 * headline:.1f}")
        print(f"{'label':<16} {'precision':>9} {'recall':>9} {'f1':>9} {'support':>8}")
        for m in report.per_class:
            print(
                f"{m.label:<16} {m.precision:>9.4f} {m.recall:>9.4f} "
                f"{m.f1:>9.4f} {m.support:>8}"
            )
        print("confusion (rows=gold, cols=predicted):")
        for row in report.confusion:
            print("  " + " ".join(f"{v:>7}" for v in row))
    return EXIT_OK


def cmd_graph(args) -> int:
    schema = load_schema(args.schema) if args.schema else None
    g = _load_graph(args, schema)
    print(f"nodes: {g.n_nodes}")
    print(f"edges: {g.n_edges}")
    print(f"raw contexts: {g.raw_edge_count}")
    print(f"self loops dropped: {g.self_loops_dropped}")
    labels, n_components = weakly_connected_components(g)
    print(f"components: {n_components}")
    if args.largest_wcc and g.n_nodes:
        g = largest_component(g)
        print(f"largest component nodes: {g.n_nodes}")
        print(f"largest component edges: {g.n_edges}")
    if args.out_edges:
        write_edge_csv(g, schema, args.out_edges)
        RunConfig().write_resolved(args.out_edges)
    if args.out_nodes:
        write_node_csv(g, args.out_nodes)
    return EXIT_OK


_CENTRALITY_KEYS = {
    "damping": "damping",
    "tolerance": "tolerance",
    "max_iter": "max_iter",
    "dangling": "dangling",
    "closeness_variant": "variant",
    "direction": "direction",
    "undirected": "undirected",
    "top_k": "top_k",
    "threads": "threads",
}


def cmd_centrality(args) -> int:
    config = _resolved_config(args, _CENTRALITY_KEYS)
    schema = load_schema(args.schema) if args.schema else None
    g = _load_graph(args, schema)
    if args.scope == "largest-wcc":
        g = largest_component(g)
    vector = compute_metric(
        g,
        args.metric,
        damping=config["damping"],
        tol=config["tolerance"],
        max_iter=config["max_iter"],
        dangling=config["dangling"],
        variant=config["closeness_variant"],
        direction=config["direction"],
        undirected=config["undirected"],
        threads=config["threads"],
    )
    rows = write_centrality_csv(vector, config["top_k"], args.out)
    config.write_resolved(args.out)
    print(f"metric: {args.metric}")
    print(f"rows: {rows}")
    if vector.params.get("converged") is False:
        print(
            f"warning: not converged after {vector.params['iterations']} iterations",
            file=sys.stderr,
        )
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


_FILTER_KEYS = {
    "remove_intents": "remove_intents",
    "min_confidence": "min_confidence",
    "drop_isolated_nodes": "drop_isolated_nodes",
    "top_k": "top_k",
    "horizon": "horizon",
    "damping": "damping",
    "tolerance": "tolerance",
    "max_iter": "max_iter",
    "dangling": "dangling",
    "closeness_variant": "closeness_variant",
    "direction": "direction",
    "undirected": "undirected",
    "threads": "threads",
}


def cmd_filter(args) -> int:
    config = _resolved_config(args, _FILTER_KEYS)
    schema = load_schema(args.schema)
    g = _load_graph(args, schema)

    names = [n.strip() for n in config["remove_intents"].split(",") if n.strip()]
    spec = FilterSpec(
        removed_intents=frozenset(schema.index_of(n) for n in names),
        min_confidence=config["min_confidence"],
        drop_isolated_nodes=config["drop_isolated_nodes"],
    )
    filtered = filter_graph(g, spec)
    report = impact_report(g, filtered)
    print(format_impact_table(report))

    first_output = None
    if args.impact_csv:
        write_impact_csv(report, args.impact_csv)
        first_output = first_output or args.impact_csv
    if args.impact_out:
        Path(args.impact_out).write_text(
            format_impact_table(report) + "\n", encoding="utf-8"
        )
        first_output = first_output or args.impact_out
    if args.out_edges:
        write_edge_csv(filtered, schema, args.out_edges)
        first_output = first_output or args.out_edges

    if args.rank_shift:
        if not args.bump_out:
            raise ParameterError("--rank-shift needs --bump-out")
        if args.rank_scope == "largest-wcc":
            base = largest_component(g)
            shifted = filter_graph(base, spec)
        else:
            base, shifted = g, filtered
        shift = rank_shift(
            base,
            shifted,
            args.rank_shift,
            config["top_k"],
            horizon=config["horizon"],
            damping=config["damping"],
            tol=config["tolerance"],
            max_iter=config["max_iter"],
            dangling=config["dangling"],
            variant=config["closeness_variant"],
            direction=config["direction"],
            undirected=config["undirected"],
            threads=config["threads"],
        )
        export_bump_data(shift, args.bump_out)
        first_output = first_output or args.bump_out

    if first_output:
        config.write_resolved(first_output)
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intentcite",
        description=(
            "Classify citation intents with a semi-supervised GAN over "
            "precomputed embeddings and analyze intent-filtered citation networks."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse JSONL/CSV into canonical records")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--jsonl", help="line-delimited JSON input")
    src.add_argument("--csv", help="records CSV input (re-validate and rewrite)")
    p.add_argument(
        "--field-map",
        default='{"context": "context", "citing_id": "citing_id", "cited_id": "cited_id"}',
        help="JSON object mapping record fields to JSONL keys, or @file",
    )
    p.add_argument("--schema", help="label schema file (resolves gold label names)")
    p.add_argument("--out", required=True, help="output records CSV")
    p.add_argument("--skip-report", help="CSV of skipped lines and reasons")
    p.add_argument("--make-split", type=float, help="labeled fraction for a new split")
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--dev-fraction", type=float, default=0.0)
    p.add_argument("--test-fraction", type=float, default=0.0)
    p.add_argument("--out-split", help="output split CSV")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train the GAN classifier on embeddings")
    p.add_argument("--embeddings", required=True, help="CEMB embedding file")
    p.add_argument("--schema", required=True)
    p.add_argument("--split", required=True, help="split CSV (record_id,subset,gold)")
    p.add_argument("--config", help="key=value run configuration file")
    p.add_argument("--out-model", required=True, help="output CGAN checkpoint")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--log", help="training log CSV (default <out-model>.log.csv)")
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr-discriminator", type=float)
    p.add_argument("--lr-generator", type=float)
    p.add_argument("--adam-epsilon", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--warmup-proportion", type=float)
    p.add_argument("--z-dim", type=int)
    p.add_argument("--generator-hidden-layers", type=int)
    p.add_argument("--discriminator-hidden-layers", type=int)
    p.add_argument("--dropout", type=float)
    p.add_argument(
        "--supervised-only",
        action="store_true",
        help="ablation: train on the supervised loss alone",
    )
    p.add_argument("--keep-generator", action="store_true")
    p.add_argument("--keep-optimizer", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="tag records with predicted intents")
    p.add_argument("--model", required=True, help="CGAN checkpoint")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--records", required=True, help="records CSV (edge endpoints)")
    p.add_argument("--schema", required=True)
    p.add_argument("--out", required=True, help="edge-list CSV with intents")
    p.add_argument("--out-predictions", help="per-record predictions CSV")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eval", help="score predictions against gold labels")
    p.add_argument("--pred", required=True, help="predictions CSV")
    p.add_argument("--gold", required=True, help="records CSV with gold labels")
    p.add_argument("--schema", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--average", choices=("macro", "micro"), default="macro")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("graph", help="build a citation graph and summarize it")
    p.add_argument("--edges", dest="graph", required=True, help="edge-list CSV")
    p.add_argument("--schema")
    p.add_argument("--largest-wcc", action="store_true")
    p.add_argument("--out-edges", help="export (possibly reduced) edge CSV")
    p.add_argument("--out-nodes", help="export node CSV with component labels")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("centrality", help="compute a centrality metric")
    p.add_argument("--graph", required=True, help="edge-list CSV")
    p.add_argument("--schema")
    p.add_argument("--metric", type=_metric_name, required=True)
    p.add_argument("--out", required=True, help="output centrality CSV")
    p.add_argument("--config", help="key=value run configuration file")
    p.add_argument(
        "--scope",
        choices=("full", "largest-wcc"),
        default="largest-wcc",
        help="compute on the full graph or its largest weak component",
    )
    p.add_argument("--top-k", type=int)
    p.add_argument("--damping", type=float)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--dangling", choices=("redistribute", "drop"))
    p.add_argument("--closeness-variant", choices=("standard", "paper_literal"))
    p.add_argument("--direction", choices=("incoming", "outgoing"))
    p.add_argument("--undirected", action=argparse.BooleanOptionalAction)
    p.add_argument("--threads", type=int, help="worker processes (0 = all cores)")
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("filter", help="remove intents and report the impact")
    p.add_argument("--graph", required=True, help="edge-list CSV")
    p.add_argument("--schema", required=True)
    p.add_argument("--config", help="key=value run configuration file")
    p.add_argument(
        "--remove-intents",
        dest="remove_intents",
        help="comma-separated intent label names to remove",
    )
    p.add_argument("--min-confidence", type=float)
    p.add_argument(
        "--drop-isolated-nodes",
        action=argparse.BooleanOptionalAction,
        help="drop nodes left without edges (default on)",
    )
    p.add_argument("--impact-out", help="write the impact table as text")
    p.add_argument("--impact-csv", help="write the impact table as CSV")
    p.add_argument("--out-edges", help="export the filtered edge CSV")
    p.add_argument("--rank-shift", type=_metric_name, help="metric for rank shifts")
    p.add_argument(
        "--rank-scope",
        choices=("full", "largest-wcc"),
        default="largest-wcc",
        help="graph scope for the rank-shift analysis",
    )
    p.add_argument("--bump-out", help="bump-chart CSV output")
    p.add_argument("--top-k", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--damping", type=float)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--dangling", choices=("redistribute", "drop"))
    p.add_argument("--closeness-variant", choices=("standard", "paper_literal"))
    p.add_argument("--direction", choices=("incoming", "outgoing"))
    p.add_argument("--undirected", action=argparse.BooleanOptionalAction)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_filter)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IntentCiteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
