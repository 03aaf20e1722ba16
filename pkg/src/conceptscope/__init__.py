"""conceptscope: recover a classifier's latent concept hierarchy from its
probability logs.

The pipeline runs in stages, each with an on-disk artifact so later stages
(and the HTTP service) can work from precomputed state:

    probability log -> near-miss extraction -> connection graph
                    -> shortest-path metric -> dendrogram
                    -> concept naming -> query explanations / scoring
"""

from conceptscope.clustering import Dendrogram, Linkage, agglomerate, cut, path_to_root
from conceptscope.explain import (
    Explanation,
    ReferenceAnnotation,
    explain_label,
    explain_record,
    score_label,
    score_model,
)
from conceptscope.graph import ConfusionAccumulator, ConnectionGraph, accumulate, finalize
from conceptscope.ingest import (
    ClassificationRecord,
    IngestReport,
    LabelSet,
    load_label_set,
    parse_log,
)
from conceptscope.metric import DistanceMatrix, shortest_path_metric
from conceptscope.naming import (
    NameOverrides,
    Taxonomy,
    load_taxonomy,
    lowest_common_hypernym,
    name_dendrogram,
    set_override,
)
from conceptscope.nma import NearMissSet, NmaConfig, extract_near_misses, is_correct

__version__ = "0.1.0"

__all__ = [
    "ClassificationRecord",
    "ConfusionAccumulator",
    "ConnectionGraph",
    "Dendrogram",
    "DistanceMatrix",
    "Explanation",
    "IngestReport",
    "LabelSet",
    "Linkage",
    "NameOverrides",
    "NearMissSet",
    "NmaConfig",
    "ReferenceAnnotation",
    "Taxonomy",
    "accumulate",
    "agglomerate",
    "cut",
    "explain_label",
    "explain_record",
    "extract_near_misses",
    "finalize",
    "is_correct",
    "load_label_set",
    "load_taxonomy",
    "lowest_common_hypernym",
    "name_dendrogram",
    "parse_log",
    "path_to_root",
    "score_label",
    "score_model",
    "set_override",
    "shortest_path_metric",
]
