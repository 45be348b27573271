"""
Model parameters and their gradients

ModelParams holds the dissimilarity encoder (two affine layers), the K-way
prediction head and the uncertainty slope theta_u. Instances are immutable:
an SGD step returns a new ModelParams.
"""

from dataclasses import dataclass, fields, replace
from typing import Dict, Iterator, Literal, Tuple

import numpy as np
from pydantic import Field

from nikhil.ajnata.domain.settings import AjnataSettings

THETA_U_MIN = 1e-6

TENSOR_NAMES = ("enc_w1", "enc_b1", "enc_w2", "enc_b2", "w_pred", "b_pred", "theta_u")

# spawn_key for the initialization stream under SeedSequence(seed)
_INIT_STREAM = 1


class ModelConfig(AjnataSettings):
    """Architecture and initialization of the trainable parts"""
    d_enc: int = Field(default=8, ge=1)
    nonlinearity: Literal["tanh", "identity"] = "tanh"
    init: Literal["uniform", "zeros"] = "uniform"
    theta_u_init: float = Field(default=1.0, gt=0.0)


@dataclass(frozen=True)
class ModelParams:
    enc_w1: np.ndarray
    enc_b1: np.ndarray
    enc_w2: np.ndarray
    enc_b2: np.ndarray
    w_pred: np.ndarray
    b_pred: np.ndarray
    theta_u: float
    nonlinearity: str = "tanh"

    def __post_init__(self):
        for name in TENSOR_NAMES[:-1]:
            array = np.array(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(array)):
                raise ValueError(f"parameter {name} has non-finite entries")
            array.setflags(write=False)
            object.__setattr__(self, name, array)
        object.__setattr__(self, "theta_u", float(self.theta_u))
        if not np.isfinite(self.theta_u) or self.theta_u <= 0.0:
            raise ValueError("theta_u must be a positive finite number")
        if self.nonlinearity not in ("tanh", "identity"):
            raise ValueError(f"unknown nonlinearity {self.nonlinearity!r}")

    @property
    def num_classes(self) -> int:
        return self.w_pred.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.w_pred.shape[1]

    @property
    def d_enc(self) -> int:
        return self.enc_w1.shape[0]

    @classmethod
    def initialize(cls, num_classes: int, feature_dim: int, config: ModelConfig, seed: int) -> "ModelParams":
        """
        Uniform in [-a, a] with a = 1/sqrt(fan_in) for every weight and bias,
        or all zeros when config.init == "zeros". theta_u starts at config.theta_u_init.
        """
        d = config.d_enc
        shapes = {
            "enc_w1": ((d, feature_dim), feature_dim),
            "enc_b1": ((d,), feature_dim),
            "enc_w2": ((d, d), d),
            "enc_b2": ((d,), d),
            "w_pred": ((num_classes, feature_dim), feature_dim),
            "b_pred": ((num_classes,), feature_dim),
        }
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_INIT_STREAM,)))
        tensors = {}
        for name, (shape, fan_in) in shapes.items():
            if config.init == "zeros":
                tensors[name] = np.zeros(shape)
            else:
                bound = 1.0 / np.sqrt(fan_in)
                tensors[name] = rng.uniform(-bound, bound, size=shape)
        return cls(theta_u=config.theta_u_init, nonlinearity=config.nonlinearity, **tensors)

    def tensors(self) -> Dict[str, np.ndarray]:
        """Name -> array view, theta_u as a 0-d array"""
        out = {name: getattr(self, name) for name in TENSOR_NAMES[:-1]}
        out["theta_u"] = np.asarray(self.theta_u)
        return out

    def with_tensor(self, name: str, value) -> "ModelParams":
        if name == "theta_u":
            return replace(self, theta_u=float(value))
        return replace(self, **{name: value})

    def sgd_step(self, grads: "Gradients", learning_rate: float, learn_theta_u: bool = True) -> "ModelParams":
        """Plain SGD; theta_u is clamped to at least THETA_U_MIN afterwards"""
        updated = {name: getattr(self, name) - learning_rate * getattr(grads, name)
                   for name in TENSOR_NAMES[:-1]}
        theta_u = self.theta_u
        if learn_theta_u:
            theta_u = max(theta_u - learning_rate * grads.theta_u, THETA_U_MIN)
        return replace(self, theta_u=theta_u, **updated)

    def allclose(self, other: "ModelParams", **kwargs) -> bool:
        return all(np.allclose(a, b, **kwargs) for (_, a), (_, b) in zip(self.tensors().items(),
                                                                           other.tensors().items()))

    def array_equal(self, other: "ModelParams") -> bool:
        return all(np.array_equal(a, b) for (_, a), (_, b) in zip(self.tensors().items(),
                                                                   other.tensors().items()))


@dataclass(frozen=True)
class Gradients:
    """Same tensors as ModelParams; theta_u is a scalar"""
    enc_w1: np.ndarray
    enc_b1: np.ndarray
    enc_w2: np.ndarray
    enc_b2: np.ndarray
    w_pred: np.ndarray
    b_pred: np.ndarray
    theta_u: float = 0.0

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "Gradients":
        return cls(theta_u=0.0, **{name: np.zeros_like(getattr(params, name)) for name in TENSOR_NAMES[:-1]})

    def __add__(self, other: "Gradients") -> "Gradients":
        return Gradients(**{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)})

    def scaled(self, factor: float) -> "Gradients":
        return Gradients(**{f.name: getattr(self, f.name) * factor for f in fields(self)})

    def items(self) -> Iterator[Tuple[str, np.ndarray]]:
        for name in TENSOR_NAMES:
            yield name, np.asarray(getattr(self, name))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(value)) for _, value in self.items())
