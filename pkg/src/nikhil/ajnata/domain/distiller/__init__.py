"""
Unknown distillation from reference frames

Energy-based candidate selection, dissimilarity scoring, weight
normalization and spatial-temporal unknown synthesis.
"""

from .candidates import Candidate, CandidateSet, check_percentiles, filter_candidates, select_candidates
from .distiller import (
    DistilledUnknown,
    KeyObjects,
    UnknownMode,
    backward_distill,
    collect_key_objects,
    dissimilarity,
    distill_from_candidates,
    distill_unknowns,
    distill_weights,
    dump_distilled,
    pairwise_dissimilarity,
)

__all__ = [
    "Candidate",
    "CandidateSet",
    "check_percentiles",
    "filter_candidates",
    "select_candidates",
    "DistilledUnknown",
    "KeyObjects",
    "UnknownMode",
    "backward_distill",
    "collect_key_objects",
    "dissimilarity",
    "distill_from_candidates",
    "distill_unknowns",
    "distill_weights",
    "dump_distilled",
    "pairwise_dissimilarity",
]
