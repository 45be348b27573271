"""
Synthetic proposal-stream generator

Stands in for a detector's proposal generator. Each video owns persistent ID
objects (class mean + per-object latent offset + fresh per-frame noise) and
fresh per-frame OOD objects drawn from the Gaussian modes or the uniform box.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from nikhil.ajnata.domain.exceptions import ConfigurationError, DistillationUnavailable
from nikhil.ajnata.domain.stream_sim.sim_spec import VIDEO_STREAM, SimSpec

logger = logging.getLogger(__name__)

# Smallest box side, in normalized image units
_MIN_BOX_SIDE = 0.02


@dataclass(frozen=True)
class Truth:
    """Simulation ground truth; label is the 0-based class index for ID objects"""
    is_id: bool
    label: Optional[int] = None

    @classmethod
    def id(cls, label: int) -> "Truth":
        return cls(True, int(label))

    @classmethod
    def ood(cls) -> "Truth":
        return cls(False, None)

    def __str__(self) -> str:
        return f"ID({self.label})" if self.is_id else "OOD"


@dataclass(frozen=True)
class ObjectProposal:
    feature: np.ndarray
    box: Tuple[float, float, float, float]
    objectness: float
    truth: Truth
    track_id: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "feature", np.asarray(self.feature, dtype=float))
        object.__setattr__(self, "box", tuple(float(v) for v in self.box))
        x1, y1, x2, y2 = self.box
        if not (x1 < x2 and y1 < y2):
            raise ValueError(f"box must satisfy x1 < x2 and y1 < y2, got {self.box}")
        if not 0.0 <= self.objectness <= 1.0:
            raise ValueError(f"objectness must lie in [0, 1], got {self.objectness}")
        if not np.all(np.isfinite(self.feature)):
            raise ValueError("proposal feature must be finite")
        self.feature.setflags(write=False)


@dataclass(frozen=True)
class FrameProposals:
    frame_index: int
    proposals: Tuple[ObjectProposal, ...]

    def __len__(self) -> int:
        return len(self.proposals)

    @property
    def features(self) -> np.ndarray:
        if not self.proposals:
            return np.zeros((0, 0))
        return np.stack([p.feature for p in self.proposals])


@dataclass(frozen=True)
class Video:
    video_id: int
    frames: Tuple[FrameProposals, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.frames)


def _boxes(rng: np.random.Generator, count: int) -> np.ndarray:
    """Boxes as (cx, cy, w, h) rows inside the unit square"""
    sizes = rng.uniform(0.05, 0.3, size=(count, 2))
    centers = rng.uniform(0.0, 1.0, size=(count, 2)) * (1.0 - sizes) + sizes / 2.0
    return np.hstack([centers, sizes])


def _to_corners(box: np.ndarray) -> Tuple[float, float, float, float]:
    cx, cy, w, h = box
    w = max(float(w), _MIN_BOX_SIDE)
    h = max(float(h), _MIN_BOX_SIDE)
    return (float(cx - w / 2.0), float(cy - h / 2.0), float(cx + w / 2.0), float(cy + h / 2.0))


def _objectness(rng: np.random.Generator, mean: float, scale: float, count: int) -> np.ndarray:
    return np.clip(rng.normal(mean, scale, size=count), 0.0, 1.0)


def generate_video(spec: SimSpec, video_index: int = 0) -> List[FrameProposals]:
    """
    Generate one video's frames

    The result is a pure function of (spec, video_index): the generator is
    seeded from SeedSequence(spec.seed, spawn_key=(VIDEO_STREAM, video_index)).

    Args:
        spec: validated simulation spec
        video_index: position of the video in the stream

    Returns:
        spec.frames_per_video frames with strictly increasing frame_index
    """
    if not isinstance(spec, SimSpec):
        spec = SimSpec.parse(dict(spec), prefix="sim")
    if video_index < 0:
        raise ConfigurationError("video_index must be non-negative", key="video_index")

    rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(VIDEO_STREAM, video_index)))
    m = spec.feature_dim
    n_ood = spec.ood_count
    n_id = spec.proposals_per_frame - n_ood
    means = spec.cluster_means
    objectness = spec.objectness_model

    # Persistent state of the ID objects
    labels = rng.integers(0, spec.num_classes, size=n_id)
    offsets = rng.normal(0.0, spec.id_cluster_scale, size=(n_id, m))
    id_boxes = _boxes(rng, n_id)
    base = means[labels] + offsets

    mode_means = [np.asarray(mode.mean, dtype=float) for mode in spec.ood_modes]
    mode_scales = [mode.scale for mode in spec.ood_modes]
    n_modes = len(mode_means) + 1

    frames: List[FrameProposals] = []
    for t in range(spec.frames_per_video):
        id_features = base + rng.normal(0.0, spec.temporal_noise_scale, size=(n_id, m))
        drift = rng.normal(0.0, 0.005, size=(n_id, 2))
        id_scores = _objectness(rng, objectness.id_mean, objectness.noise_scale, n_id)

        modes = rng.integers(0, n_modes, size=n_ood)
        ood_features = np.empty((n_ood, m))
        for j, mode in enumerate(modes):
            if mode < len(mode_means):
                ood_features[j] = mode_means[mode] + mode_scales[mode] * rng.standard_normal(m)
            else:
                ood_features[j] = rng.uniform(spec.ood_box.low, spec.ood_box.high, size=m)
        ood_boxes = _boxes(rng, n_ood)
        ood_scores = _objectness(rng, objectness.ood_mean, objectness.noise_scale, n_ood)

        proposals: List[ObjectProposal] = []
        for i in range(n_id):
            box = id_boxes[i].copy()
            box[:2] = np.clip(box[:2] + drift[i] * (t + 1), box[2:] / 2.0, 1.0 - box[2:] / 2.0)
            proposals.append(ObjectProposal(
                feature=id_features[i].copy(),
                box=_to_corners(box),
                objectness=float(id_scores[i]),
                truth=Truth.id(labels[i]),
                track_id=i,
            ))
        for j in range(n_ood):
            proposals.append(ObjectProposal(
                feature=ood_features[j].copy(),
                box=_to_corners(ood_boxes[j]),
                objectness=float(ood_scores[j]),
                truth=Truth.ood(),
            ))

        order = rng.permutation(len(proposals))
        frames.append(FrameProposals(frame_index=t, proposals=tuple(proposals[k] for k in order)))

    logger.debug("Generated video %d: %d frames, %d ID + %d OOD proposals per frame",
                 video_index, len(frames), n_id, n_ood)
    return frames


def generate_stream(spec: SimSpec, start: int = 0, count: Optional[int] = None) -> List[Video]:
    """
    Generate videos start .. start+count-1 (count defaults to spec.num_videos)

    Videos are independent, so any slice of the index range is reproducible
    on its own; held-out evaluation streams use indices after the training ones.
    """
    count = spec.num_videos if count is None else count
    return [Video(video_id=index, frames=tuple(generate_video(spec, index)))
            for index in range(start, start + count)]


def collect_features(frame: FrameProposals, objectness_threshold: float) -> List[Tuple[int, np.ndarray]]:
    """Proposals with objectness >= threshold, as (index, feature) in frame order"""
    if not 0.0 <= objectness_threshold <= 1.0:
        raise ConfigurationError("objectness threshold must lie in [0, 1]", key="objectness_threshold")
    return [(index, proposal.feature) for index, proposal in enumerate(frame.proposals)
            if proposal.objectness >= objectness_threshold]


def sample_reference_frames(video_len: int, key_index: int, T: int, R: float,
                            rng: np.random.Generator) -> List[int]:
    """
    Draw up to T reference frames from [key-R, key+R] within the video, key excluded

    R may be math.inf (whole video eligible). When fewer than T frames are
    eligible the whole eligible set is returned.

    Raises:
        DistillationUnavailable: no frame other than the key frame exists
    """
    if T < 1:
        raise ConfigurationError("T must be at least 1", key="T")
    if not R >= 1:
        raise ConfigurationError("R must be at least 1", key="R")
    if not 0 <= key_index < video_len:
        raise IndexError(f"key_index {key_index} outside video of length {video_len}")

    if math.isinf(R):
        low, high = 0, video_len - 1
    else:
        low, high = max(0, key_index - int(R)), min(video_len - 1, key_index + int(R))
    eligible = [t for t in range(low, high + 1) if t != key_index]
    if not eligible:
        raise DistillationUnavailable(f"no reference frame available for key frame {key_index}")
    if len(eligible) <= T:
        return eligible
    chosen = rng.choice(len(eligible), size=T, replace=False)
    return sorted(eligible[i] for i in chosen)


def stream_frame_count(videos: Sequence[Video]) -> int:
    return sum(len(video) for video in videos)
