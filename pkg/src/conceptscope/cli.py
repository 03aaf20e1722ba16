"""Command line pipeline driver.

The pipeline is staged with on-disk artifacts between stages so the HTTP
service (and anything else) can operate on precomputed state:

    build -> cluster -> name -> explain / score

Each subcommand is deterministic given its inputs and flags; artifacts are
byte-identical across repeated runs. Hard errors go to stderr with a nonzero
exit status; warnings are logged and never change the exit status.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from conceptscope.clustering import (
    Dendrogram,
    Linkage,
    agglomerate,
    from_json,
    to_json,
    to_newick,
)
from conceptscope.explain import (
    explain_label,
    explain_record,
    load_reference,
    render_score_table,
    score_model,
)
from conceptscope.graph import (
    ConfusionAccumulator,
    accumulate,
    finalize,
    incoming_confusion,
    read_graph_dump,
    write_graph_dump,
)
from conceptscope.ingest import (
    IngestError,
    LabelSet,
    load_label_set,
    parse_log,
    parse_record_obj,
)
from conceptscope.metric import shortest_path_metric, write_distance_dump
from conceptscope.naming import (
    load_overrides,
    load_taxonomy,
    name_dendrogram,
)
from conceptscope.nma import NmaConfig, extract_near_misses, filter_records
from conceptscope.synth import SynthConfig, generate, write_outputs

logger = logging.getLogger(__name__)

GRAPH_DUMP = "graph.tsv"
BUILD_SUMMARY = "build_summary.json"
DENDROGRAM = "dendrogram.json"
NEWICK = "dendrogram.nwk"
NAMED_DENDROGRAM = "dendrogram_named.json"
DISTANCES = "distances.tsv"
SCORE_REPORT = "score_report.json"
SCORE_TABLE = "score_table.txt"
OVERRIDES = "overrides.json"


@dataclass
class PipelineConfig:
    """Paths and knobs shared across the pipeline subcommands."""

    labels: Path | None = None
    log: Path | None = None
    taxonomy: Path | None = None
    reference: Path | None = None
    overrides: Path | None = None
    out: Path = Path(".")
    nma: NmaConfig = field(default_factory=NmaConfig)
    linkage: Linkage = Linkage.AVERAGE
    seed: int = 42

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "PipelineConfig":
        def path_or_none(value: str | None) -> Path | None:
            return Path(value) if value else None

        return cls(
            labels=path_or_none(getattr(args, "labels", None)),
            log=path_or_none(getattr(args, "log", None)),
            taxonomy=path_or_none(getattr(args, "taxonomy", None)),
            reference=path_or_none(getattr(args, "reference", None)),
            overrides=path_or_none(getattr(args, "overrides", None)),
            out=Path(getattr(args, "out", ".") or "."),
            nma=NmaConfig(
                k=getattr(args, "k", 3),
                t=getattr(args, "threshold", 1e-6),
                correct_only=not getattr(args, "include_misclassified", False),
            ),
            linkage=Linkage(getattr(args, "linkage", "average")),
            seed=getattr(args, "seed", 42),
        )


def _require(value: Path | None, flag: str) -> Path:
    if value is None:
        raise IngestError(f"{flag} is required for this subcommand")
    return value


def _require_artifact(path: Path) -> Path:
    if not path.exists():
        raise IngestError(f"missing artifact {path}; run the producing stage first")
    return path


def _dendrogram_labels(dg: Dendrogram) -> LabelSet:
    return LabelSet.from_iterable(dg.labels)


def cmd_build(cfg: PipelineConfig) -> int:
    """Ingest the log, run near-miss analysis, write the connection graph."""
    labels = load_label_set(_require(cfg.labels, "--labels"))
    records, report = parse_log(_require(cfg.log, "--log"), labels)
    used = filter_records(records, cfg.nma)
    acc = ConfusionAccumulator.empty(len(labels))
    short_records = 0
    for record in used:
        if len(record.entries) < cfg.nma.k:
            short_records += 1
        misses = extract_near_misses(record, labels, cfg.nma)
        accumulate(acc, misses.source_label, misses)
    graph = finalize(acc, cfg.nma.t)

    cfg.out.mkdir(parents=True, exist_ok=True)
    write_graph_dump(
        graph,
        labels,
        cfg.out / GRAPH_DUMP,
        t=cfg.nma.t,
        k=cfg.nma.k,
        records_total=report.total_records,
        records_used=len(used),
    )

    edges = graph.finite_edges()
    edge_count = len(edges)
    connected = set()
    for i, j, _w in edges:
        connected.add(i)
        connected.add(j)
    isolated = [labels.label_of(i) for i in range(len(labels)) if i not in connected]
    incoming = incoming_confusion(acc)
    summary = {
        "n_labels": len(labels),
        "records_total": report.total_records,
        "records_accepted": report.accepted,
        "records_rejected": report.rejected,
        "rejection_reasons": dict(sorted(report.reasons.items())),
        "records_used": len(used),
        "accept_rate": (
            report.accepted / report.total_records if report.total_records else 0.0
        ),
        "records_with_fewer_than_k_entries": short_records,
        "k": cfg.nma.k,
        "threshold": cfg.nma.t,
        "correct_only": cfg.nma.correct_only,
        "edge_count": edge_count,
        "isolated_labels": isolated,
        "incoming_confusion": {
            labels.label_of(i): float(incoming[i]) for i in range(len(labels))
        },
    }
    (cfg.out / BUILD_SUMMARY).write_text(
        json.dumps(summary, indent=2) + "\n", encoding="utf-8"
    )

    if edge_count == 0:
        logger.warning("connection graph has zero finite edges")
    if short_records:
        logger.warning(
            "%d of %d used records carry fewer than k=%d entries",
            short_records,
            len(used),
            cfg.nma.k,
        )
    print(
        f"build: {len(used)}/{report.total_records} records used, "
        f"{edge_count} edges, {len(isolated)} isolated labels"
    )
    return 0


def cmd_cluster(cfg: PipelineConfig, dump_distances: bool = False) -> int:
    """Derive the shortest-path metric and the hierarchical clustering."""
    labels = load_label_set(_require(cfg.labels, "--labels"))
    graph, _meta = read_graph_dump(_require_artifact(cfg.out / GRAPH_DUMP), labels)
    dm = shortest_path_metric(graph)
    if dump_distances:
        write_distance_dump(dm, cfg.out / DISTANCES)
    dg = agglomerate(dm, tuple(labels), cfg.linkage)
    (cfg.out / DENDROGRAM).write_text(to_json(dg), encoding="utf-8")
    (cfg.out / NEWICK).write_text(to_newick(dg), encoding="utf-8")
    root_height = dg.merges[-1][2] if dg.merges else 0.0
    print(f"cluster: {dg.n_leaves} leaves, root height {root_height:.12g}")
    return 0


def cmd_name(cfg: PipelineConfig) -> int:
    """Name every dendrogram node from the taxonomy, honoring overrides."""
    dg = from_json(
        _require_artifact(cfg.out / DENDROGRAM).read_text(encoding="utf-8")
    )
    labels = _dendrogram_labels(dg)
    tax = load_taxonomy(_require(cfg.taxonomy, "--taxonomy"), labels)
    overrides = None
    if cfg.overrides is not None:
        overrides = load_overrides(_require_artifact(cfg.overrides), dg)
    named = name_dendrogram(dg, tax, overrides)
    (cfg.out / NAMED_DENDROGRAM).write_text(to_json(named), encoding="utf-8")
    print(f"name: {named.n_nodes} nodes named")
    return 0


def cmd_explain(cfg: PipelineConfig, label: str | None, record_path: Path | None) -> int:
    """Print the explanation sentences for a label or a recorded classification."""
    if (label is None) == (record_path is None):
        raise IngestError("provide exactly one of a label argument or --record")
    dg = from_json(
        _require_artifact(cfg.out / NAMED_DENDROGRAM).read_text(encoding="utf-8")
    )
    if label is not None:
        explanation = explain_label(dg, label)
    else:
        obj = json.loads(_require_artifact(record_path).read_text(encoding="utf-8"))
        explanation = explain_record(dg, parse_record_obj(obj))
    if not explanation.sentences:
        logger.warning("no named concepts above label %r", explanation.label)
    for sentence in explanation.sentences:
        print(sentence)
    return 0


def cmd_score(cfg: PipelineConfig) -> int:
    """Score the named dendrogram against the reference annotation."""
    dg = from_json(
        _require_artifact(cfg.out / NAMED_DENDROGRAM).read_text(encoding="utf-8")
    )
    reference = load_reference(_require(cfg.reference, "--reference"))
    report = score_model(dg, reference)
    (cfg.out / SCORE_REPORT).write_text(
        json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    table = render_score_table(report)
    (cfg.out / SCORE_TABLE).write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


def cmd_synth(cfg: PipelineConfig, shape: SynthConfig) -> int:
    """Generate the planted-hierarchy log plus its taxonomy and reference."""
    data = generate(shape)
    cfg.out.mkdir(parents=True, exist_ok=True)
    paths = write_outputs(data, cfg.out)
    print(
        f"synth: {len(data.labels)} labels, {len(data.records)} records -> "
        f"{paths['log']}"
    )
    return 0


def cmd_run_all(cfg: PipelineConfig) -> int:
    """Chain build -> cluster -> name, then score when a reference is given."""
    cmd_build(cfg)
    cmd_cluster(cfg)
    cmd_name(cfg)
    if cfg.reference is not None:
        cmd_score(cfg)
    return 0


def cmd_serve(cfg: PipelineConfig, addr: str, port: int, images: Path | None) -> int:
    """Serve precomputed artifacts over HTTP."""
    import uvicorn

    from conceptscope.service import create_app, load_session

    state = load_session(
        dendrogram_path=_require_artifact(cfg.out / DENDROGRAM),
        taxonomy_path=_require(cfg.taxonomy, "--taxonomy"),
        overrides_path=cfg.overrides or cfg.out / OVERRIDES,
        reference_path=cfg.reference,
        images_path=images,
    )
    app = create_app(state)
    uvicorn.run(app, host=addr, port=port, log_level="warning")
    return 0


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--labels", help="label universe file, one label per line")
    parser.add_argument("--log", help="classification log, one JSON record per line")
    parser.add_argument("--taxonomy", help="hypernym chain file (JSON)")
    parser.add_argument("--reference", help="reference annotation file (JSON)")
    parser.add_argument("--overrides", help="name override store (JSON)")
    parser.add_argument("--out", default=".", help="artifact directory")
    parser.add_argument("--k", type=int, default=3, help="near-miss depth")
    parser.add_argument(
        "--threshold", type=float, default=1e-6, help="probability cutoff t"
    )
    parser.add_argument(
        "--linkage",
        choices=[l.value for l in Linkage],
        default="average",
        help="agglomeration linkage",
    )
    parser.add_argument(
        "--include-misclassified",
        action="store_true",
        help="use all records, not only correctly classified ones",
    )
    parser.add_argument("--seed", type=int, default=42, help="synthetic generator seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conceptscope",
        description="Reconstruct a classifier's latent concept hierarchy "
        "from its per-image probability logs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="near-miss analysis -> connection graph")
    _add_common_flags(p_build)

    p_cluster = sub.add_parser("cluster", help="graph -> metric -> dendrogram")
    _add_common_flags(p_cluster)
    p_cluster.add_argument(
        "--dump-distances",
        action="store_true",
        help="also write the capped distance matrix",
    )

    p_name = sub.add_parser("name", help="attach concept names to the dendrogram")
    _add_common_flags(p_name)

    p_explain = sub.add_parser("explain", help="print explanation sentences")
    _add_common_flags(p_explain)
    p_explain.add_argument("label", nargs="?", help="label to explain")
    p_explain.add_argument("--record", help="JSON record file to explain instead")

    p_score = sub.add_parser("score", help="score explanations against a reference")
    _add_common_flags(p_score)

    p_synth = sub.add_parser("synth", help="generate a planted-hierarchy log")
    _add_common_flags(p_synth)
    p_synth.add_argument("--groups", type=int, default=2)
    p_synth.add_argument("--subgroups", type=int, default=2)
    p_synth.add_argument("--labels-per-subgroup", type=int, default=3)
    p_synth.add_argument("--eps-subgroup", type=float, default=0.05)
    p_synth.add_argument("--eps-group", type=float, default=0.01)
    p_synth.add_argument("--images-per-label", type=int, default=20)

    p_run = sub.add_parser("run-all", help="build, cluster, name and score in one go")
    _add_common_flags(p_run)

    p_serve = sub.add_parser("serve", help="serve artifacts over HTTP")
    _add_common_flags(p_serve)
    p_serve.add_argument("--addr", default="127.0.0.1", help="listen address")
    p_serve.add_argument("--port", type=int, default=8000, help="listen port")
    p_serve.add_argument("--images", help="optional label -> image URL sidecar (JSON)")

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = PipelineConfig.from_args(args)
        if args.command == "build":
            return cmd_build(cfg)
        if args.command == "cluster":
            return cmd_cluster(cfg, dump_distances=args.dump_distances)
        if args.command == "name":
            return cmd_name(cfg)
        if args.command == "explain":
            record = Path(args.record) if args.record else None
            return cmd_explain(cfg, args.label, record)
        if args.command == "score":
            return cmd_score(cfg)
        if args.command == "synth":
            shape = SynthConfig(
                groups=args.groups,
                subgroups=args.subgroups,
                labels_per_subgroup=args.labels_per_subgroup,
                eps_subgroup=args.eps_subgroup,
                eps_group=args.eps_group,
                images_per_label=args.images_per_label,
                seed=args.seed,
            )
            return cmd_synth(cfg, shape)
        if args.command == "run-all":
            return cmd_run_all(cfg)
        if args.command == "serve":
            images = Path(args.images) if args.images else None
            return cmd_serve(cfg, args.addr, args.port, images)
        raise IngestError(f"unknown command {args.command!r}")
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
