"""
Training losses with analytic gradients

- detection_loss: mean cross-entropy of the class logits against ID labels
  (stands in for a detector's loss)
- uncertainty_loss: logistic loss on theta_u * E that pushes distilled
  unknowns to high energy and ID objects to low energy, each term averaged
  over its own set
"""

from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np
from scipy.special import expit, log_expit, logsumexp, softmax

from nikhil.ajnata.domain.model import (
    Gradients,
    ModelParams,
    backward_class_logits,
    backward_energy,
    class_logits,
    class_logits_input_grad,
    energy,
)


def detection_loss(params: ModelParams, features: np.ndarray, labels: np.ndarray) -> Tuple[float, Gradients]:
    """
    Mean cross-entropy over the labeled ID objects

    Raises:
        ValueError: empty batch
    """
    features = np.atleast_2d(np.asarray(features, dtype=float))
    labels = np.asarray(labels, dtype=int).reshape(-1)
    n = labels.shape[0]
    if n == 0:
        raise ValueError("detection loss needs at least one labeled ID object")

    logits = class_logits(params, features)
    rows = np.arange(n)
    loss = float(np.mean(logsumexp(logits, axis=1) - logits[rows, labels]))

    d_logits = softmax(logits, axis=1)
    d_logits[rows, labels] -= 1.0
    d_logits /= n
    return loss, backward_class_logits(params, features, d_logits)


@dataclass(frozen=True)
class UncertaintyTerms:
    loss: float
    grads: Gradients
    unknown_input_grad: np.ndarray
    id_energies: np.ndarray
    unknown_energies: np.ndarray


def uncertainty_terms(params: ModelParams, id_features: np.ndarray, unknown_features: np.ndarray) -> UncertaintyTerms:
    """
    Loss value, parameter gradients, dL/d(unknown features) and both energy sets

    Raises:
        ValueError: either set is empty
    """
    id_features = np.atleast_2d(np.asarray(id_features, dtype=float))
    unknown_features = np.atleast_2d(np.asarray(unknown_features, dtype=float))
    n_id, n_unknown = id_features.shape[0], unknown_features.shape[0]
    if n_id == 0 or n_unknown == 0:
        raise ValueError("uncertainty loss needs at least one ID object and one unknown")

    theta = params.theta_u
    id_logits = class_logits(params, id_features)
    unknown_logits = class_logits(params, unknown_features)
    e_id = energy(id_logits)
    e_unknown = energy(unknown_logits)

    # -log sigmoid(theta E) for unknowns, -log sigmoid(-theta E) for ID objects
    loss = float(np.mean(-log_expit(theta * e_unknown)) + np.mean(-log_expit(-theta * e_id)))

    d_e_unknown = -theta * expit(-theta * e_unknown) / n_unknown
    d_e_id = theta * expit(theta * e_id) / n_id
    d_theta = float(np.sum(-e_unknown * expit(-theta * e_unknown)) / n_unknown
                    + np.sum(e_id * expit(theta * e_id)) / n_id)

    d_unknown_logits = backward_energy(unknown_logits, d_e_unknown)
    d_id_logits = backward_energy(id_logits, d_e_id)
    grads = (backward_class_logits(params, unknown_features, d_unknown_logits)
             + backward_class_logits(params, id_features, d_id_logits))
    return UncertaintyTerms(
        loss=loss,
        grads=replace(grads, theta_u=d_theta),
        unknown_input_grad=class_logits_input_grad(params, d_unknown_logits),
        id_energies=e_id,
        unknown_energies=e_unknown,
    )


def uncertainty_loss(params: ModelParams, id_features: np.ndarray, unknown_features: np.ndarray) -> Tuple[float, Gradients]:
    terms = uncertainty_terms(params, id_features, unknown_features)
    return terms.loss, terms.grads
