"""
Trainable parts: dissimilarity encoder, K-way prediction head and the
uncertainty slope theta_u, with analytic forward and backward passes.
"""

from .params import THETA_U_MIN, Gradients, ModelConfig, ModelParams
from .ops import (
    backward_class_logits,
    backward_encode,
    backward_energy,
    backward_ood_probability,
    class_logits,
    class_logits_input_grad,
    encode,
    encode_input_grad,
    energy,
    msp,
    ood_probability,
)
from .param_io import load_params, save_params

__all__ = [
    "THETA_U_MIN",
    "Gradients",
    "ModelConfig",
    "ModelParams",
    "backward_class_logits",
    "backward_encode",
    "backward_energy",
    "backward_ood_probability",
    "class_logits",
    "class_logits_input_grad",
    "encode",
    "encode_input_grad",
    "energy",
    "msp",
    "ood_probability",
    "load_params",
    "save_params",
]
