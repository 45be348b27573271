"""
Test-time scores, higher meaning more ID

- stud: the uncertainty branch's ID probability sigmoid(-theta_u * E)
- msp: maximum softmax probability
- energy: negative energy, i.e. logsumexp of the class logits

The stud sigmoid saturates to exactly 0 or 1 for large |theta_u * E|, so rank
metrics order stud objects by -E (same order for any theta_u > 0) and map
thresholds back through the sigmoid.
"""

from enum import Enum
from typing import Dict, Tuple, Union

import numpy as np

from nikhil.ajnata.domain.model import ModelParams, class_logits, energy, msp, ood_probability


class ScoreMethod(str, Enum):
    STUD = "stud"
    MSP = "msp"
    ENERGY = "energy"


def stud_score(params: ModelParams, h: np.ndarray) -> Union[float, np.ndarray]:
    score = ood_probability(energy(class_logits(params, h)), params.theta_u)
    return float(score) if np.ndim(score) == 0 else score


def baseline_scores(params: ModelParams, h: np.ndarray) -> Dict[str, Union[float, np.ndarray]]:
    logits = class_logits(params, h)
    scores = {"msp": msp(logits), "energy_score": -energy(logits)}
    if np.ndim(logits) == 1:
        return {name: float(value) for name, value in scores.items()}
    return scores


def score_features(params: ModelParams, features: np.ndarray, method: Union[str, ScoreMethod]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Scores and energies for a batch of features

    Returns:
        (scores, energies), both shape (n,)
    """
    features = np.atleast_2d(features)
    method = ScoreMethod(method)
    if method is ScoreMethod.STUD:
        scores = stud_score(params, features)
    else:
        scores = baseline_scores(params, features)["msp" if method is ScoreMethod.MSP else "energy_score"]
    return np.asarray(scores, dtype=float), energy(class_logits(params, features))


def ranking_keys(method: Union[str, ScoreMethod], scores: np.ndarray, energies: np.ndarray) -> np.ndarray:
    """Values the rank metrics sort on: -E for stud, the scores themselves otherwise"""
    if ScoreMethod(method) is ScoreMethod.STUD:
        return -np.asarray(energies, dtype=float)
    return np.asarray(scores, dtype=float)


def key_to_score(method: Union[str, ScoreMethod], key: float, theta_u: float) -> float:
    """Inverse of ranking_keys for a single threshold"""
    if ScoreMethod(method) is ScoreMethod.STUD:
        return float(ood_probability(-key, theta_u))
    return float(key)
