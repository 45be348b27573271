"""
Central-difference checks of every analytic backward pass

Each check runs on 200 random instances with feature_dim <= 8 and at most
four classes; step 1e-5, relative error at most 1e-4.
"""

import numpy as np
import pytest

from nikhil.ajnata.domain.distiller import backward_distill, distill_weights, pairwise_dissimilarity
from nikhil.ajnata.domain.model import (
    Gradients,
    ModelParams,
    backward_encode,
    backward_energy,
    backward_ood_probability,
    class_logits,
    class_logits_input_grad,
    encode,
    encode_input_grad,
    energy,
    ood_probability,
)
from nikhil.ajnata.domain.trainer import detection_loss, uncertainty_loss, uncertainty_terms

from conftest import central_difference, random_params, relative_error

INSTANCES = 200
TOLERANCE = 1e-4
# below this gradient norm the step-1e-5 differences are rounding noise, so the
# bound becomes an absolute 1e-7 on the difference
NORM_FLOOR = 1e-3
ENCODER = ("enc_w1", "enc_b1", "enc_w2", "enc_b2")
HEAD = ("w_pred", "b_pred")


def _instance(rng: np.random.Generator) -> ModelParams:
    return random_params(
        rng,
        num_classes=int(rng.integers(2, 5)),
        feature_dim=int(rng.integers(2, 9)),
        d_enc=int(rng.integers(2, 7)),
        nonlinearity=str(rng.choice(["tanh", "identity"])),
    )


def _features(rng: np.random.Generator, params: ModelParams, low: int = 1, high: int = 5) -> np.ndarray:
    return rng.normal(size=(int(rng.integers(low, high)), params.feature_dim))


def _check(analytic, numeric, what: str) -> None:
    error = relative_error(analytic, numeric, floor=NORM_FLOOR)
    assert error <= TOLERANCE, f"{what}: relative error {error:.3e}"


def _check_params(params: ModelParams, loss, analytic: Gradients, names) -> None:
    for name in names:
        numeric = central_difference(lambda x: loss(params.with_tensor(name, x)), params.tensors()[name])
        _check(getattr(analytic, name), numeric, name)


@pytest.fixture
def instances():
    rng = np.random.default_rng(5150)
    return [(rng, _instance(rng)) for _ in range(INSTANCES)]


def test_detection_loss(instances):
    for rng, params in instances:
        features = _features(rng, params)
        labels = rng.integers(0, params.num_classes, size=features.shape[0])
        _, grads = detection_loss(params, features, labels)
        _check_params(params, lambda p: detection_loss(p, features, labels)[0], grads, HEAD)
        assert not any(np.any(getattr(grads, name)) for name in ENCODER)


def test_uncertainty_loss_parameters(instances):
    for rng, params in instances:
        id_features = _features(rng, params)
        unknown_features = _features(rng, params)
        _, grads = uncertainty_loss(params, id_features, unknown_features)
        _check_params(params, lambda p: uncertainty_loss(p, id_features, unknown_features)[0],
                      grads, HEAD + ("theta_u",))


def test_uncertainty_loss_unknown_features(instances):
    for rng, params in instances:
        id_features = _features(rng, params)
        unknown_features = _features(rng, params)
        terms = uncertainty_terms(params, id_features, unknown_features)
        numeric = central_difference(lambda u: uncertainty_loss(params, id_features, u)[0], unknown_features)
        _check(terms.unknown_input_grad, numeric, "unknown features")


def test_encoder(instances):
    for rng, params in instances:
        h = _features(rng, params)
        upstream = rng.normal(size=(h.shape[0], params.d_enc))
        grads = backward_encode(params, h, upstream)
        _check_params(params, lambda p: float(np.sum(upstream * encode(p, h))), grads, ENCODER)
        numeric = central_difference(lambda x: float(np.sum(upstream * encode(params, x))), h)
        _check(encode_input_grad(params, h, upstream), numeric, "encoder input")


def test_class_logits_input(instances):
    for rng, params in instances:
        h = _features(rng, params)
        upstream = rng.normal(size=(h.shape[0], params.num_classes))
        numeric = central_difference(lambda x: float(np.sum(upstream * class_logits(params, x))), h)
        _check(class_logits_input_grad(params, upstream), numeric, "logits input")


def test_energy(instances):
    for rng, params in instances:
        logits = rng.normal(0.0, 3.0, size=(3, params.num_classes))
        upstream = rng.normal(size=3)
        numeric = central_difference(lambda f: float(np.sum(upstream * energy(f))), logits)
        _check(backward_energy(logits, upstream), numeric, "energy")


def test_ood_probability(instances):
    for rng, params in instances:
        energies = rng.normal(0.0, 2.0, size=4)
        upstream = rng.normal(size=4)
        d_energy, d_theta = backward_ood_probability(energies, params.theta_u, upstream)
        numeric_e = central_difference(
            lambda e: float(np.sum(upstream * ood_probability(e, params.theta_u))), energies)
        numeric_theta = central_difference(
            lambda t: float(np.sum(upstream * ood_probability(energies, float(t)))), np.asarray(params.theta_u))
        _check(d_energy, numeric_e, "energy input")
        _check(d_theta, numeric_theta, "theta_u")


def _distilled(params: ModelParams, key_features: np.ndarray, pool: np.ndarray) -> np.ndarray:
    weights = distill_weights(pairwise_dissimilarity(encode(params, key_features), encode(params, pool)))
    return weights @ pool


def test_distillation_through_weights(instances):
    for rng, params in instances:
        key_features = _features(rng, params)
        pool = _features(rng, params, low=1, high=7)
        upstream = rng.normal(size=key_features.shape)
        grads = backward_distill(params, key_features, pool, upstream)
        _check_params(params, lambda p: float(np.sum(upstream * _distilled(p, key_features, pool))),
                      grads, ENCODER)
        assert not any(np.any(getattr(grads, name)) for name in HEAD)


def test_joint_uncertainty_gradient_through_distillation(instances):
    """The update the trainer applies with encoder_grad = through_weights"""
    for rng, params in instances[:50]:
        id_features = _features(rng, params)
        pool = _features(rng, params, low=2, high=7)

        def loss(p: ModelParams) -> float:
            return uncertainty_loss(p, id_features, _distilled(p, id_features, pool))[0]

        terms = uncertainty_terms(params, id_features, _distilled(params, id_features, pool))
        grads = terms.grads + backward_distill(params, id_features, pool, terms.unknown_input_grad)
        _check_params(params, loss, grads, ENCODER + HEAD + ("theta_u",))


def test_norm_floor_only_absorbs_rounding_noise():
    # vanishing gradients: a 2e-9 disagreement is rounding, not a wrong formula
    assert relative_error(np.array([1e-9, 0.0]), np.array([3e-9, 0.0]), floor=NORM_FLOOR) <= TOLERANCE
    # well-scaled gradients still need the full relative bound
    assert relative_error(np.array([1.0, 2.0]), np.array([1.001, 2.0]), floor=NORM_FLOOR) > TOLERANCE
    assert relative_error(np.array([1e-3, 0.0]), np.array([1.1e-3, 0.0]), floor=NORM_FLOOR) > TOLERANCE
