"""Fairness evaluation engine: metrics, harm-aware selection, rank statistics."""

from .metrics import (
    ConfusionTensor,
    GroupUtilityVector,
    MetricReport,
    NoHarmResult,
    confusion,
    demographic_parity,
    equalized_odds,
    gap,
    group_accuracy,
    group_auc,
    metric_report,
    no_harm_check,
    pooled_auc,
    worst,
)
from .records import (
    EvaluationRun,
    GroupSpace,
    LabelSpace,
    PredictionRecord,
    RunManifest,
    RunSummary,
    parse_run,
    parse_summaries,
    write_run,
)
from .selection import (
    CandidatePoint,
    SelectionResult,
    UtopiaPoint,
    Zone,
    ZoneTally,
    classify_zone,
    dto_select,
    fwh_select,
    utopia,
    zone_tally_table,
)
from .stats import (
    AggregateCell,
    RankMatrix,
    aggregate,
    cliques,
    friedman,
    mean_ranks,
    nemenyi_cd,
    rank_matrix,
)
from .synth import CohortSpec, generate

__version__ = "0.1.0"

__all__ = [
    "AggregateCell",
    "CandidatePoint",
    "CohortSpec",
    "ConfusionTensor",
    "EvaluationRun",
    "GroupSpace",
    "GroupUtilityVector",
    "LabelSpace",
    "MetricReport",
    "NoHarmResult",
    "PredictionRecord",
    "RankMatrix",
    "RunManifest",
    "RunSummary",
    "SelectionResult",
    "UtopiaPoint",
    "Zone",
    "ZoneTally",
    "aggregate",
    "classify_zone",
    "cliques",
    "confusion",
    "demographic_parity",
    "dto_select",
    "equalized_odds",
    "friedman",
    "fwh_select",
    "gap",
    "generate",
    "group_accuracy",
    "group_auc",
    "mean_ranks",
    "metric_report",
    "nemenyi_cd",
    "no_harm_check",
    "parse_run",
    "parse_summaries",
    "pooled_auc",
    "rank_matrix",
    "utopia",
    "worst",
    "write_run",
    "zone_tally_table",
]
