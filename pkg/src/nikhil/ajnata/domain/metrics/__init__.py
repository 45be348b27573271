"""
Test-time OOD scoring, binary metrics and evaluation reports
"""

from .scores import ScoreMethod, baseline_scores, key_to_score, ranking_keys, score_features, stud_score
from .ood_metrics import auroc, choose_threshold, classify, fpr_at_tpr
from .evaluator import DEFAULT_BINS, Histogram, MetricsReport, ScoredObject, collect_objects, evaluate
from .report_manager import HIST_HEADER, SCORES_HEADER, UNKNOWN_HIST_HEADER, ReportManager

__all__ = [
    "ScoreMethod",
    "baseline_scores",
    "key_to_score",
    "ranking_keys",
    "score_features",
    "stud_score",
    "auroc",
    "choose_threshold",
    "classify",
    "fpr_at_tpr",
    "DEFAULT_BINS",
    "Histogram",
    "MetricsReport",
    "ScoredObject",
    "collect_objects",
    "evaluate",
    "HIST_HEADER",
    "SCORES_HEADER",
    "UNKNOWN_HIST_HEADER",
    "ReportManager",
]
