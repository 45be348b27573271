"""
Shared fixtures: small simulation specs, random small parameters and a
central finite-difference helper.
"""

from typing import Callable, Optional

import numpy as np
import pytest

from nikhil.ajnata.domain.model import ModelConfig, ModelParams
from nikhil.ajnata.domain.stream_sim import SimSpec, default_sim_spec


def random_params(rng: np.random.Generator, num_classes: int = 3, feature_dim: int = 5, d_enc: int = 4,
                  theta_u: Optional[float] = None, nonlinearity: str = "tanh", scale: float = 0.5) -> ModelParams:
    return ModelParams(
        enc_w1=rng.normal(0.0, scale, size=(d_enc, feature_dim)),
        enc_b1=rng.normal(0.0, scale, size=d_enc),
        enc_w2=rng.normal(0.0, scale, size=(d_enc, d_enc)),
        enc_b2=rng.normal(0.0, scale, size=d_enc),
        w_pred=rng.normal(0.0, scale, size=(num_classes, feature_dim)),
        b_pred=rng.normal(0.0, scale, size=num_classes),
        theta_u=float(rng.uniform(0.3, 2.0)) if theta_u is None else theta_u,
        nonlinearity=nonlinearity,
    )


def central_difference(func: Callable[[np.ndarray], float], x: np.ndarray, delta: float = 1e-5) -> np.ndarray:
    """d func / dx by central differences, one coordinate at a time"""
    x = np.array(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        original = x.flat[i]
        x.flat[i] = original + delta
        f_plus = func(x.copy())
        x.flat[i] = original - delta
        f_minus = func(x.copy())
        x.flat[i] = original
        grad.flat[i] = (f_plus - f_minus) / (2.0 * delta)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-7) -> float:
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    scale = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), floor)
    return float(np.linalg.norm(analytic - numeric) / scale)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240517)


@pytest.fixture
def make_params() -> Callable[..., ModelParams]:
    return random_params


@pytest.fixture
def numeric_grad() -> Callable[..., np.ndarray]:
    return central_difference


@pytest.fixture
def rel_error() -> Callable[..., float]:
    return relative_error


@pytest.fixture
def small_spec() -> SimSpec:
    """Three classes, six dimensions, three short videos"""
    return default_sim_spec(
        num_classes=3,
        feature_dim=6,
        frames_per_video=6,
        proposals_per_frame=10,
        num_videos=3,
        seed=11,
    )


@pytest.fixture
def small_params(small_spec: SimSpec) -> ModelParams:
    return ModelParams.initialize(small_spec.num_classes, small_spec.feature_dim, ModelConfig(d_enc=4), seed=3)
