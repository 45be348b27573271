"""
Binary ID/OOD metrics

ID is the positive class. The operating threshold gamma is an order
statistic of the ID scores and a score >= gamma is classified ID. AUROC is
the Mann-Whitney statistic with half credit for ties.
"""

import math
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from nikhil.ajnata.domain.exceptions import EvaluationError


def _scores(values: Sequence[float], name: str) -> np.ndarray:
    array = np.asarray(values, dtype=float).reshape(-1)
    if array.size == 0:
        raise EvaluationError(f"{name} scores are empty")
    if not np.all(np.isfinite(array)):
        raise EvaluationError(f"{name} scores contain non-finite values")
    return array


def _check_target(tpr_target: float) -> None:
    if not 0.0 < tpr_target <= 1.0:
        raise EvaluationError(f"tpr_target must lie in (0, 1], got {tpr_target}")


def choose_threshold(id_scores: Sequence[float], tpr_target: float = 0.95) -> float:
    """
    The ceil(tpr_target * n)-th largest ID score

    Raises:
        EvaluationError: empty input or tpr_target outside (0, 1]
    """
    scores = _scores(id_scores, "ID")
    _check_target(tpr_target)
    # exact ceil: 0.95 * 20 must give 19, not 20
    k = max(1, math.ceil(Fraction(str(tpr_target)) * scores.size))
    return float(np.sort(scores)[::-1][k - 1])


def classify(score: float, gamma: float) -> int:
    """1 (ID) when score >= gamma, else 0 (OOD)"""
    return int(score >= gamma)


def fpr_at_tpr(id_scores: Sequence[float], ood_scores: Sequence[float], tpr_target: float = 0.95) -> float:
    """Fraction of OOD scores classified ID at gamma = choose_threshold(id_scores, tpr_target)"""
    ood = _scores(ood_scores, "OOD")
    gamma = choose_threshold(id_scores, tpr_target)
    return float(np.count_nonzero(ood >= gamma) / ood.size)


def auroc(id_scores: Sequence[float], ood_scores: Sequence[float]) -> float:
    """(#pairs with id > ood + 0.5 * #ties) / (n_id * n_ood), via average ranks"""
    positives = _scores(id_scores, "ID")
    negatives = _scores(ood_scores, "OOD")
    n_id, n_ood = positives.size, negatives.size
    ranks = rankdata(np.concatenate([positives, negatives]), method="average")
    u_statistic = ranks[:n_id].sum() - n_id * (n_id + 1) / 2.0
    return float(min(max(u_statistic / (n_id * n_ood), 0.0), 1.0))
