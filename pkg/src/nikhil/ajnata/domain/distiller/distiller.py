"""
Spatial-temporal unknown distillation

For every labeled ID object of a key frame, the unknown counterpart is a
convex combination of the pooled reference-frame candidates, weighted by the
softmax of the squared encoder-space distances to the key object. Mixing
uses the raw features; the encoder is only used for the distances.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Protocol, Sequence, Tuple

import numpy as np
from scipy.special import softmax

from nikhil.ajnata.domain.distiller.candidates import CandidateSet, select_candidates
from nikhil.ajnata.domain.exceptions import DistillationUnavailable
from nikhil.ajnata.domain.model import Gradients, ModelParams, backward_encode, encode
from nikhil.ajnata.domain.stream_sim import FrameProposals
from nikhil.ajnata.utils.json_utils import JsonUtils

logger = logging.getLogger(__name__)


class UnknownMode(str, Enum):
    """How an unknown is built from the pooled candidates"""
    DISTILL = "distill"
    MAX_DISSIMILARITY = "max_dissimilarity"
    MILD_ENERGY = "mild_energy"
    RANDOM_PROPOSAL = "random_proposal"


class DistillSettings(Protocol):
    objectness_threshold: float
    p: float
    q: float
    unknown_mode: UnknownMode


@dataclass(frozen=True)
class DistilledUnknown:
    feature: np.ndarray
    weights: np.ndarray
    provenance: Tuple[Tuple[int, int], ...]
    key_frame_index: int
    key_index: int

    def to_record(self, **extra: Any) -> Dict[str, Any]:
        return {
            **extra,
            "key_frame_index": self.key_frame_index,
            "key_index": self.key_index,
            "provenance": [list(item) for item in self.provenance],
            "weights": self.weights.tolist(),
            "feature": self.feature.tolist(),
        }


@dataclass(frozen=True)
class KeyObjects:
    """Collected, labeled ID objects of a key frame"""
    frame_index: int
    indices: Tuple[int, ...]
    features: np.ndarray
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)


def collect_key_objects(frame: FrameProposals, objectness_threshold: float) -> KeyObjects:
    """ID proposals above the objectness threshold; OOD objects carry no label and are skipped"""
    indices, features, labels = [], [], []
    for index, proposal in enumerate(frame.proposals):
        if proposal.objectness >= objectness_threshold and proposal.truth.is_id:
            indices.append(index)
            features.append(proposal.feature)
            labels.append(proposal.truth.label)
    dim = frame.proposals[0].feature.shape[0] if frame.proposals else 0
    return KeyObjects(
        frame_index=frame.frame_index,
        indices=tuple(indices),
        features=np.stack(features) if features else np.zeros((0, dim)),
        labels=np.asarray(labels, dtype=int),
    )


def dissimilarity(h_key: np.ndarray, h_ref: np.ndarray) -> float:
    """Squared L2 distance"""
    diff = np.asarray(h_key, dtype=float) - np.asarray(h_ref, dtype=float)
    return float(np.dot(diff, diff))


def pairwise_dissimilarity(h_keys: np.ndarray, h_refs: np.ndarray) -> np.ndarray:
    """(n, N) matrix of squared L2 distances"""
    diff = h_keys[:, None, :] - h_refs[None, :, :]
    return np.sum(diff * diff, axis=-1)


def distill_weights(s: Sequence[float]) -> np.ndarray:
    """Normalized exponential of the dissimilarity scores (max-subtracted)"""
    return softmax(np.asarray(s, dtype=float), axis=-1)


def _one_hot(n: int, hot: int) -> np.ndarray:
    weights = np.zeros(n)
    weights[hot] = 1.0
    return weights


def distill_from_candidates(params: ModelParams, key: KeyObjects, candidates: CandidateSet,
                            mode: UnknownMode = UnknownMode.DISTILL,
                            rng: Optional[np.random.Generator] = None) -> List[DistilledUnknown]:
    """
    One unknown per key object from an already filtered candidate set

    Raises:
        DistillationUnavailable: no key objects or no pooled candidates
    """
    if len(key) == 0:
        raise DistillationUnavailable(f"key frame {key.frame_index} has no labeled ID objects")
    if len(candidates) == 0:
        raise DistillationUnavailable(f"no reference candidates survived filtering for key frame {key.frame_index}")

    pool = candidates.features
    provenance = candidates.provenance
    n_pool = pool.shape[0]
    mode = UnknownMode(mode)

    if mode in (UnknownMode.DISTILL, UnknownMode.MAX_DISSIMILARITY):
        scores = pairwise_dissimilarity(encode(params, key.features), encode(params, pool))
        if mode is UnknownMode.DISTILL:
            weights = distill_weights(scores)
        else:
            weights = np.stack([_one_hot(n_pool, int(np.argmax(row))) for row in scores])
    else:
        if rng is None:
            raise ValueError(f"unknown mode {mode.value!r} needs a random generator")
        picks = rng.integers(0, n_pool, size=len(key))
        weights = np.stack([_one_hot(n_pool, int(j)) for j in picks])

    features = weights @ pool
    return [
        DistilledUnknown(
            feature=features[i],
            weights=weights[i],
            provenance=provenance,
            key_frame_index=key.frame_index,
            key_index=key.indices[i],
        )
        for i in range(len(key))
    ]


def distill_unknowns(params: ModelParams, key_frame: FrameProposals,
                     reference_frames: Sequence[FrameProposals], config: DistillSettings,
                     rng: Optional[np.random.Generator] = None) -> List[DistilledUnknown]:
    """
    Distill one unknown for every collected ID object of the key frame

    Candidates are filtered per reference frame by energy rank and pooled
    across frames; the weights are normalized jointly over the pool. In
    random_proposal mode the energy filter is skipped.

    Args:
        params: current model parameters (energies and encoder)
        key_frame: frame whose ID objects anchor the distillation
        reference_frames: frames supplying the candidates
        config: objectness_threshold, p, q and unknown_mode
        rng: generator for the random modes

    Raises:
        DistillationUnavailable: nothing to distill for this key frame
    """
    mode = UnknownMode(config.unknown_mode)
    p, q = (0, 100) if mode is UnknownMode.RANDOM_PROPOSAL else (config.p, config.q)
    key = collect_key_objects(key_frame, config.objectness_threshold)
    candidates = select_candidates(params, reference_frames, config.objectness_threshold, p, q)
    return distill_from_candidates(params, key, candidates, mode, rng)


def backward_distill(params: ModelParams, key_features: np.ndarray, pool: np.ndarray,
                     d_unknowns: np.ndarray) -> Gradients:
    """
    Encoder gradients flowing through the mixing weights

    For o_i = sum_j alpha_ij h_j with alpha_i = softmax(s_i) and
    s_ij = |enc(k_i) - enc(h_j)|^2, given dL/do_i = d_unknowns[i].
    Features themselves are treated as constants.
    """
    h_key = encode(params, key_features)
    h_pool = encode(params, pool)
    weights = distill_weights(pairwise_dissimilarity(h_key, h_pool))

    d_alpha = d_unknowns @ pool.T
    d_s = weights * (d_alpha - np.sum(weights * d_alpha, axis=1, keepdims=True))
    diff = h_key[:, None, :] - h_pool[None, :, :]
    d_h_key = 2.0 * np.einsum("ij,ijd->id", d_s, diff)
    d_h_pool = -2.0 * np.einsum("ij,ijd->jd", d_s, diff)
    return backward_encode(params, key_features, d_h_key) + backward_encode(params, pool, d_h_pool)


def dump_distilled(records: Iterable[Dict[str, Any]], file_path: Path) -> Path:
    """Line-delimited provenance/weights records for dissimilarity inspection"""
    path = JsonUtils.save_jsonl(records, Path(file_path))
    logger.info("Wrote distilled-unknown dump to %s", path)
    return path
