"""
Exception hierarchy for Ajnata

Every expected failure raised by the library derives from AjnataError so the
CLI can report it without a traceback.
"""

from typing import Optional


class AjnataError(Exception):
    """Base class for all Ajnata errors"""


class ConfigurationError(AjnataError):
    """A configuration value violates one of the documented rules"""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class DistillationUnavailable(AjnataError):
    """No reference frames or no candidates: the key frame contributes no unknowns"""


class EvaluationError(AjnataError):
    """The evaluation stream cannot produce ID/OOD metrics"""


class StreamFormatError(AjnataError):
    """A record file could not be parsed"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class TrainingDiverged(AjnataError):
    """An optimizer step produced non-finite gradients or parameters"""
