"""
Energy-based candidate selection in reference frames

Each reference frame's collected proposals are ranked by energy under the
current params and only those inside the [p%, q%] rank band are kept. The
selection runs per frame; pooling across frames happens afterwards.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from nikhil.ajnata.domain.exceptions import ConfigurationError
from nikhil.ajnata.domain.model import ModelParams, class_logits, energy
from nikhil.ajnata.domain.stream_sim import FrameProposals, collect_features


def _exact(value: float) -> Fraction:
    return Fraction(str(value))


def check_percentiles(p: float, q: float) -> None:
    if not 0 <= p < q <= 100:
        raise ConfigurationError(f"percentiles must satisfy 0 <= p < q <= 100, got p={p}, q={q}", key="p, q")


def filter_candidates(energies: Sequence[float], p: float, q: float) -> List[int]:
    """
    Indices whose 1-based energy rank r satisfies p*N/100 <= r <= q*N/100

    Ranks come from a stable ascending sort, so ties keep their original
    order. Bounds are inclusive and compared exactly on rationals. The
    result is in ascending index order.
    """
    check_percentiles(p, q)
    n = len(energies)
    if n == 0:
        return []
    order = np.argsort(np.asarray(energies, dtype=float), kind="stable")
    low, high = _exact(p) * n, _exact(q) * n
    return sorted(int(order[r - 1]) for r in range(1, n + 1) if low <= 100 * r <= high)


@dataclass(frozen=True)
class Candidate:
    frame_index: int
    proposal_index: int
    feature: np.ndarray
    energy: float


@dataclass(frozen=True)
class CandidateSet:
    """Filtered candidates per reference frame, in reference-frame order"""
    frames: Tuple[Tuple[Candidate, ...], ...]

    @property
    def pooled(self) -> Tuple[Candidate, ...]:
        return tuple(candidate for frame in self.frames for candidate in frame)

    def __len__(self) -> int:
        return sum(len(frame) for frame in self.frames)

    @property
    def features(self) -> np.ndarray:
        return np.stack([candidate.feature for candidate in self.pooled])

    @property
    def provenance(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((c.frame_index, c.proposal_index) for c in self.pooled)


def select_candidates(params: ModelParams, reference_frames: Sequence[FrameProposals],
                      objectness_threshold: float, p: float, q: float) -> CandidateSet:
    """Collect, score and filter each reference frame independently"""
    check_percentiles(p, q)
    per_frame = []
    for frame in reference_frames:
        collected = collect_features(frame, objectness_threshold)
        if not collected:
            per_frame.append(())
            continue
        features = np.stack([feature for _, feature in collected])
        energies = energy(class_logits(params, features))
        keep = filter_candidates(energies, p, q)
        per_frame.append(tuple(
            Candidate(frame.frame_index, collected[k][0], collected[k][1], float(energies[k])) for k in keep
        ))
    return CandidateSet(frames=tuple(per_frame))
