"""
Training hyperparameters

Defaults reproduce the acceptance benchmark: beta 0.05, T 3, R 9,
energy filtering band 40%-60%, SGD with learning rate 0.01 for 5 epochs.
"""

import math
from typing import Any, Literal, Union

from pydantic import Field, field_serializer, field_validator, model_validator

from nikhil.ajnata.domain.distiller import UnknownMode
from nikhil.ajnata.domain.settings import AjnataSettings

_INFINITY_WORDS = {"inf", "infinity", "∞"}


class TrainConfig(AjnataSettings):
    beta: float = Field(default=0.05, ge=0.0)
    T: int = Field(default=3, ge=1)
    R: Union[int, float] = 9
    p: float = Field(default=40.0, ge=0.0, le=100.0)
    q: float = Field(default=60.0, ge=0.0, le=100.0)
    learning_rate: float = Field(default=0.01, ge=0.0)
    epochs: int = Field(default=5, ge=1)
    batch_key_frames: int = Field(default=1, ge=1)
    objectness_threshold: float = Field(default=0.5, ge=0.0, le=1.0)
    encoder_grad: Literal["none", "through_weights"] = "none"
    unknown_mode: UnknownMode = UnknownMode.DISTILL
    learn_theta_u: bool = True
    seed: int = Field(default=7, ge=0, lt=2 ** 64)

    @field_validator("R", mode="before")
    @classmethod
    def _parse_range(cls, value: Any) -> Any:
        if isinstance(value, str) and value.strip().lower() in _INFINITY_WORDS:
            return math.inf
        return value

    @field_validator("R")
    @classmethod
    def _check_range(cls, value: Union[int, float]) -> Union[int, float]:
        if isinstance(value, float):
            if math.isinf(value) and value > 0:
                return math.inf
            if not value.is_integer():
                raise ValueError("R must be a whole number of frames or inf")
            value = int(value)
        if value < 1:
            raise ValueError("R must be at least 1")
        return value

    @field_serializer("R")
    def _dump_range(self, value: Union[int, float]) -> Union[int, str]:
        return "inf" if math.isinf(value) else int(value)

    @model_validator(mode="after")
    def _check_percentiles(self) -> "TrainConfig":
        if not self.p < self.q:
            raise ValueError(f"percentiles must satisfy 0 <= p < q <= 100, got p={self.p}, q={self.q}")
        return self
