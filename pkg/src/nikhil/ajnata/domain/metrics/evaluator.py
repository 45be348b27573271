"""
Evaluation loop: score every collected object of a held-out stream

Handles:
- Object collection by objectness threshold (ground-truth boxes)
- Scoring with one method (stud, msp or energy)
- FPR95, AUROC and the operating threshold gamma (stud ranked on -E)
- Score and energy histograms split by truth class
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from nikhil.ajnata.domain.exceptions import EvaluationError
from nikhil.ajnata.domain.metrics.ood_metrics import auroc, choose_threshold, fpr_at_tpr
from nikhil.ajnata.domain.metrics.scores import ScoreMethod, key_to_score, ranking_keys, score_features
from nikhil.ajnata.domain.model import ModelParams
from nikhil.ajnata.domain.stream_sim import Video, collect_features

logger = logging.getLogger(__name__)

DEFAULT_BINS = 50


@dataclass(frozen=True)
class ScoredObject:
    score: float
    is_id: bool
    energy: float = float("nan")

    @property
    def truth(self) -> str:
        return "ID" if self.is_id else "OOD"


@dataclass(frozen=True)
class Histogram:
    """Fixed-width bins over a range shared by both groups"""
    edges: np.ndarray
    counts_a: np.ndarray
    counts_b: np.ndarray

    @classmethod
    def build(cls, a: np.ndarray, b: np.ndarray, bins: int = DEFAULT_BINS) -> "Histogram":
        values = np.concatenate([np.asarray(a, dtype=float), np.asarray(b, dtype=float)])
        if values.size == 0:
            low, high = -0.5, 0.5
        else:
            low, high = float(values.min()), float(values.max())
            if low == high:
                low, high = low - 0.5, high + 0.5
        counts_a, edges = np.histogram(a, bins=bins, range=(low, high))
        counts_b, _ = np.histogram(b, bins=bins, range=(low, high))
        return cls(edges=edges, counts_a=counts_a, counts_b=counts_b)

    @property
    def total(self) -> int:
        return int(self.counts_a.sum() + self.counts_b.sum())

    def rows(self) -> Iterator[Tuple[float, float, int, int]]:
        for i in range(self.counts_a.size):
            yield float(self.edges[i]), float(self.edges[i + 1]), int(self.counts_a[i]), int(self.counts_b[i])


@dataclass
class MetricsReport:
    method: ScoreMethod
    fpr95: float
    auroc: float
    gamma: float
    n_id: int
    n_ood: int
    tpr_target: float = 0.95
    objects: List[ScoredObject] = field(default_factory=list, repr=False)
    score_histogram: Optional[Histogram] = field(default=None, repr=False)
    energy_histogram: Optional[Histogram] = field(default=None, repr=False)

    def summary(self) -> Dict[str, Any]:
        """Key/value view written to the metrics report"""
        return {
            "method": ScoreMethod(self.method).value,
            "fpr95": self.fpr95,
            "auroc": self.auroc,
            "gamma": self.gamma,
            "tpr_target": self.tpr_target,
            "n_id": self.n_id,
            "n_ood": self.n_ood,
        }


def collect_objects(stream: Sequence[Video], objectness_threshold: float) -> Tuple[np.ndarray, np.ndarray]:
    """Features and ID flags of every proposal passing the threshold, in stream order"""
    features: List[np.ndarray] = []
    is_id: List[bool] = []
    for video in stream:
        for frame in video.frames:
            for index, feature in collect_features(frame, objectness_threshold):
                features.append(feature)
                is_id.append(frame.proposals[index].truth.is_id)
    if not features:
        return np.zeros((0, 0)), np.zeros(0, dtype=bool)
    return np.stack(features), np.asarray(is_id, dtype=bool)


def evaluate(params: ModelParams, eval_stream: Sequence[Video], method: Union[str, ScoreMethod] = ScoreMethod.STUD,
             objectness_threshold: float = 0.5, tpr_target: float = 0.95,
             bins: int = DEFAULT_BINS) -> MetricsReport:
    """
    Score the eval stream and compute the OOD metrics

    Raises:
        EvaluationError: no collected ID object or no collected OOD object
    """
    method = ScoreMethod(method)
    features, is_id = collect_objects(eval_stream, objectness_threshold)
    n_id = int(np.count_nonzero(is_id))
    n_ood = int(is_id.size - n_id)
    for name, count in (("ID", n_id), ("OOD", n_ood)):
        if count == 0:
            raise EvaluationError(
                f"evaluation stream has no {name} objects with objectness >= {objectness_threshold}"
            )

    scores, energies = score_features(params, features, method)
    id_scores, ood_scores = scores[is_id], scores[~is_id]
    keys = ranking_keys(method, scores, energies)
    id_keys, ood_keys = keys[is_id], keys[~is_id]
    report = MetricsReport(
        method=method,
        fpr95=fpr_at_tpr(id_keys, ood_keys, tpr_target),
        auroc=auroc(id_keys, ood_keys),
        gamma=key_to_score(method, choose_threshold(id_keys, tpr_target), params.theta_u),
        n_id=n_id,
        n_ood=n_ood,
        tpr_target=tpr_target,
        objects=[ScoredObject(float(s), bool(t), float(e)) for s, t, e in zip(scores, is_id, energies)],
        score_histogram=Histogram.build(id_scores, ood_scores, bins),
        energy_histogram=Histogram.build(energies[is_id], energies[~is_id], bins),
    )
    logger.info("%s: auroc=%.4f fpr95=%.4f (n_id=%d, n_ood=%d)",
                method.value, report.auroc, report.fpr95, n_id, n_ood)
    return report
