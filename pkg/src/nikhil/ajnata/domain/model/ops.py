"""
Forward and backward passes of the model's closed set of ops

All forward ops accept a single vector (shape (m,)) or a batch (shape (n, m))
and are pure. Backward ops return exact analytic gradients; parameter
gradients are summed over the batch.
"""

from typing import Tuple

import numpy as np
from scipy.special import expit, logsumexp, softmax

from nikhil.ajnata.domain.model.params import Gradients, ModelParams


def _sigma(z: np.ndarray, nonlinearity: str) -> np.ndarray:
    return np.tanh(z) if nonlinearity == "tanh" else z


def _sigma_prime(z: np.ndarray, nonlinearity: str) -> np.ndarray:
    if nonlinearity == "tanh":
        return 1.0 - np.tanh(z) ** 2
    return np.ones_like(z)


def _outer_sum(upstream: np.ndarray, inputs: np.ndarray) -> np.ndarray:
    """sum_n upstream[n]^T inputs[n] for batched or single rows"""
    return np.atleast_2d(upstream).T @ np.atleast_2d(inputs)


def _row_sum(upstream: np.ndarray) -> np.ndarray:
    return np.atleast_2d(upstream).sum(axis=0)


def encode(params: ModelParams, h: np.ndarray) -> np.ndarray:
    """h_hat = W2 sigma(W1 h + b1) + b2"""
    z1 = np.asarray(h, dtype=float) @ params.enc_w1.T + params.enc_b1
    return _sigma(z1, params.nonlinearity) @ params.enc_w2.T + params.enc_b2


def class_logits(params: ModelParams, h: np.ndarray) -> np.ndarray:
    """f = w_pred h + b_pred"""
    return np.asarray(h, dtype=float) @ params.w_pred.T + params.b_pred


def energy(logits: np.ndarray) -> np.ndarray:
    """E = -logsumexp(f) over the last axis"""
    return -logsumexp(np.asarray(logits, dtype=float), axis=-1)


def ood_probability(E: np.ndarray, theta_u: float) -> np.ndarray:
    """sigmoid(-theta_u * E): the uncertainty branch's probability of being ID"""
    return expit(-theta_u * np.asarray(E, dtype=float))


def msp(logits: np.ndarray) -> np.ndarray:
    """Maximum softmax probability"""
    return softmax(np.asarray(logits, dtype=float), axis=-1).max(axis=-1)


def backward_encode(params: ModelParams, h: np.ndarray, upstream: np.ndarray) -> Gradients:
    """Encoder parameter gradients for dL/dh_hat = upstream"""
    h = np.asarray(h, dtype=float)
    upstream = np.asarray(upstream, dtype=float)
    z1 = h @ params.enc_w1.T + params.enc_b1
    a1 = _sigma(z1, params.nonlinearity)
    d_a1 = upstream @ params.enc_w2
    d_z1 = d_a1 * _sigma_prime(z1, params.nonlinearity)
    grads = Gradients.zeros_like(params)
    return Gradients(
        enc_w1=_outer_sum(d_z1, h),
        enc_b1=_row_sum(d_z1),
        enc_w2=_outer_sum(upstream, a1),
        enc_b2=_row_sum(upstream),
        w_pred=grads.w_pred,
        b_pred=grads.b_pred,
    )


def encode_input_grad(params: ModelParams, h: np.ndarray, upstream: np.ndarray) -> np.ndarray:
    """dL/dh for dL/dh_hat = upstream"""
    z1 = np.asarray(h, dtype=float) @ params.enc_w1.T + params.enc_b1
    d_z1 = (np.asarray(upstream, dtype=float) @ params.enc_w2) * _sigma_prime(z1, params.nonlinearity)
    return d_z1 @ params.enc_w1


def backward_class_logits(params: ModelParams, h: np.ndarray, upstream: np.ndarray) -> Gradients:
    """Prediction-head gradients for dL/df = upstream"""
    grads = Gradients.zeros_like(params)
    return Gradients(
        enc_w1=grads.enc_w1,
        enc_b1=grads.enc_b1,
        enc_w2=grads.enc_w2,
        enc_b2=grads.enc_b2,
        w_pred=_outer_sum(upstream, h),
        b_pred=_row_sum(upstream),
    )


def class_logits_input_grad(params: ModelParams, upstream: np.ndarray) -> np.ndarray:
    """dL/dh for dL/df = upstream"""
    return np.asarray(upstream, dtype=float) @ params.w_pred


def backward_energy(logits: np.ndarray, upstream: np.ndarray) -> np.ndarray:
    """dL/df = upstream * dE/df, with dE/df_k = -softmax(f)_k"""
    return -np.expand_dims(np.asarray(upstream, dtype=float), -1) * softmax(np.asarray(logits, dtype=float), axis=-1)


def backward_ood_probability(E: np.ndarray, theta_u: float, upstream: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Gradients of p = sigmoid(-theta_u * E)

    Returns:
        (dL/dE elementwise, dL/dtheta_u summed)
    """
    E = np.asarray(E, dtype=float)
    upstream = np.asarray(upstream, dtype=float)
    p = ood_probability(E, theta_u)
    slope = p * (1.0 - p)
    return -theta_u * slope * upstream, float(np.sum(-E * slope * upstream))
