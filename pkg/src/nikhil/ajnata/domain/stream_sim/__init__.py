"""
Synthetic video proposal streams

Seeded stand-in for a detector's proposal generator: persistent ID objects,
per-frame OOD objects, objectness filtering and reference-frame sampling.
"""

from .sim_spec import GaussianMode, ObjectnessModel, SimSpec, UniformBox, default_sim_spec
from .generator import (
    FrameProposals,
    ObjectProposal,
    Truth,
    Video,
    collect_features,
    generate_stream,
    generate_video,
    sample_reference_frames,
)
from .stream_io import dump_stream, load_stream

__all__ = [
    "GaussianMode",
    "ObjectnessModel",
    "SimSpec",
    "UniformBox",
    "default_sim_spec",
    "FrameProposals",
    "ObjectProposal",
    "Truth",
    "Video",
    "collect_features",
    "generate_stream",
    "generate_video",
    "sample_reference_frames",
    "dump_stream",
    "load_stream",
]
