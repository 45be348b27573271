"""
Ajnata - unknown distillation for object-level OOD detection

Distills synthetic unknown objects from video proposal streams, trains a
classifier with an energy-based uncertainty branch against them and
evaluates ID/OOD separability.
"""

from nikhil.ajnata.ajnata_runner import AjnataRunner, ExperimentResult, RunResult
from nikhil.ajnata.domain.experiment.config import ExperimentConfig

__version__ = "0.1.0"

__all__ = [
    "AjnataRunner",
    "ExperimentConfig",
    "ExperimentResult",
    "RunResult",
]
