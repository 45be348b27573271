"""
Experiment configuration, run manifest and command line
"""

from .config import (
    EvalConfig,
    ExperimentConfig,
    LoggingConfig,
    OutputConfig,
    SweepConfig,
    ValidationReport,
    find_config_file,
    validate_config,
)
from .manifest import RunManifest, load_manifest, sha256_file, verify_manifest

__all__ = [
    "EvalConfig",
    "ExperimentConfig",
    "LoggingConfig",
    "OutputConfig",
    "SweepConfig",
    "ValidationReport",
    "find_config_file",
    "validate_config",
    "RunManifest",
    "load_manifest",
    "sha256_file",
    "verify_manifest",
]
