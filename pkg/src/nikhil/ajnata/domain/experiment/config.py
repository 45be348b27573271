"""
Experiment configuration for Ajnata

Handles ajnata_config.yaml which contains:
- sim: synthetic stream (SimSpec)
- model: encoder/head architecture (ModelConfig)
- train: training hyperparameters (TrainConfig)
- eval: held-out evaluation settings
- output: run directory and optional dumps
- sweep: optional single-axis ablation
- logging: level and format
"""

import copy
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import Field, field_validator, model_validator

from nikhil.ajnata.domain.exceptions import ConfigurationError
from nikhil.ajnata.domain.metrics import ScoreMethod
from nikhil.ajnata.domain.model import ModelConfig
from nikhil.ajnata.domain.settings import AjnataSettings
from nikhil.ajnata.domain.stream_sim import SimSpec
from nikhil.ajnata.domain.trainer import TrainConfig
from nikhil.ajnata.utils.yaml_utils import YamlUtils

logger = logging.getLogger(__name__)

CONFIG_FILENAME = "ajnata_config.yaml"

SweepAxis = Literal["T", "R", "beta", "percentile"]


class EvalConfig(AjnataSettings):
    """Held-out evaluation stream and metrics"""
    eval_videos: int = Field(default=10, ge=1)
    methods: List[ScoreMethod] = Field(
        default_factory=lambda: [ScoreMethod.STUD, ScoreMethod.MSP, ScoreMethod.ENERGY], min_length=1
    )
    tpr_target: float = Field(default=0.95, gt=0.0, le=1.0)
    histogram_bins: int = Field(default=50, ge=1)
    baselines_from_vanilla: bool = True

    @field_validator("methods")
    @classmethod
    def _unique_methods(cls, value: List[ScoreMethod]) -> List[ScoreMethod]:
        if len(set(value)) != len(value):
            raise ValueError("methods must not repeat")
        return value


class OutputConfig(AjnataSettings):
    """Run directory and optional record dumps"""
    dir: Path = Path("runs/ajnata")
    dump_streams: bool = False
    distill_dump_steps: int = Field(default=0, ge=0)


class LoggingConfig(AjnataSettings):
    level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _format_value(value: Any) -> str:
    """Text form of a sweep value, as used in directory names and summary rows"""
    if isinstance(value, (list, tuple)):
        return "-".join(_format_value(v) for v in value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        if value.is_integer():
            return str(int(value))
    return str(value)


class SweepConfig(AjnataSettings):
    """
    One ablation axis and its values

    percentile values are [p, q] pairs or "p-q" strings; R accepts inf.
    """
    axis: SweepAxis
    values: List[Any] = Field(min_length=1)

    @field_validator("values", mode="before")
    @classmethod
    def _parse_percentiles(cls, value: Any) -> Any:
        if not isinstance(value, list):
            return value
        parsed = []
        for item in value:
            if isinstance(item, str) and "-" in item.strip()[1:]:
                low, high = item.strip().split("-", 1)
                try:
                    item = [float(low), float(high)]
                except ValueError:
                    pass
            parsed.append(item)
        return parsed

    @model_validator(mode="after")
    def _check_values(self) -> "SweepConfig":
        labels = [self.label(v) for v in self.values]
        if len(set(labels)) != len(labels):
            raise ValueError(f"sweep values must be distinct, got {labels}")
        if self.axis == "percentile":
            for value in self.values:
                if not (isinstance(value, (list, tuple)) and len(value) == 2):
                    raise ValueError(f"percentile sweep values must be [p, q] pairs, got {value!r}")
        return self

    def updates(self, value: Any) -> Dict[str, Any]:
        """TrainConfig fields set by one sweep value"""
        if self.axis == "percentile":
            p, q = value
            return {"p": p, "q": q}
        return {self.axis: value}

    def apply(self, train: TrainConfig, value: Any) -> TrainConfig:
        data = {**train.model_dump(), **self.updates(value)}
        return TrainConfig.parse(data, prefix=f"sweep[{self.axis}={self.label(value)}]")

    def label(self, value: Any) -> str:
        return _format_value(value)

    def run_name(self, value: Any) -> str:
        return f"{self.axis}_{self.label(value)}"


class ExperimentConfig(AjnataSettings):
    """Complete, validated description of one experiment (or one sweep)"""
    sim: SimSpec = Field(default_factory=SimSpec)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    sweep: Optional[SweepConfig] = None
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @model_validator(mode="after")
    def _check_sweep(self) -> "ExperimentConfig":
        # ConfigurationError is not a ValueError, so it leaves pydantic untouched
        if self.sweep is not None:
            for value in self.sweep.values:
                self.sweep.apply(self.train, value)
        return self

    @classmethod
    def from_mapping(cls, data: Dict[str, Any], output_dir: Optional[Union[str, Path]] = None,
                     seed: Optional[int] = None) -> "ExperimentConfig":
        """
        Validate a raw mapping after applying the command-line overrides

        Overrides are applied before validation so seed-derived means follow
        the overriding seed.
        """
        data = copy.deepcopy(data) if data else {}
        for section in ("sim", "model", "train", "eval", "output", "logging"):
            if data.get(section) is None:
                data.pop(section, None)
            elif not isinstance(data[section], dict):
                raise ConfigurationError("section must be a mapping", key=section)
        if output_dir is not None:
            data.setdefault("output", {})["dir"] = str(output_dir)
        if seed is not None:
            data.setdefault("sim", {})["seed"] = seed
            data.setdefault("train", {})["seed"] = seed
        return cls.parse(data)

    @classmethod
    def from_yaml(cls, config_path: Path, output_dir: Optional[Union[str, Path]] = None,
                  seed: Optional[int] = None) -> "ExperimentConfig":
        """Load and validate ajnata_config.yaml"""
        return cls.from_mapping(YamlUtils.yaml_safe_load(Path(config_path)), output_dir=output_dir, seed=seed)

    def runs(self) -> List[Tuple[Optional[str], "ExperimentConfig"]]:
        """(sweep run name or None, config of that run) in sweep order"""
        if self.sweep is None:
            return [(None, self)]
        out = []
        for value in self.sweep.values:
            name = self.sweep.run_name(value)
            out.append((name, self.model_copy(update={
                "train": self.sweep.apply(self.train, value),
                "output": self.output.model_copy(update={"dir": self.output.dir / name}),
                "sweep": None,
            })))
        return out

    def warnings(self) -> List[str]:
        """Non-fatal findings: settings that are legal but almost certainly unintended"""
        found = []
        trains = [self.train] if self.sweep is None else [cfg.train for _, cfg in self.runs()]
        for train in trains:
            if train.learning_rate == 0:
                found.append("train.learning_rate is 0: parameters never change")
            if train.beta == 0:
                found.append("train.beta is 0: the uncertainty branch is disabled")
            if train.T > 2 * train.R:
                found.append(f"train.T={train.T} exceeds the 2R={2 * train.R} frames the window can supply")
        objectness = self.sim.objectness_model
        if self.train.objectness_threshold > max(objectness.id_mean, objectness.ood_mean):
            found.append(
                f"train.objectness_threshold={self.train.objectness_threshold} is above both objectness means; "
                "few proposals will be collected"
            )
        if self.sim.frames_per_video < 2:
            found.append("sim.frames_per_video < 2: no reference frames, nothing can be distilled")
        # sweep values repeat the same finding per run
        return list(dict.fromkeys(found))

    def to_record(self) -> Dict[str, Any]:
        """Fully resolved configuration, as written to the manifest"""
        return self.model_dump(mode="json")


@dataclass
class ValidationReport:
    config_path: Path
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    config: Optional[ExperimentConfig] = None

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_config(config_path: Path) -> ValidationReport:
    """Check every configuration rule without running anything"""
    report = ValidationReport(config_path=Path(config_path))
    try:
        report.config = ExperimentConfig.from_yaml(config_path)
    except ConfigurationError as e:
        report.errors.extend(line for line in str(e).splitlines() if line.strip())
        return report
    report.warnings.extend(report.config.warnings())
    logger.debug("Validated %s: %d warnings", config_path, len(report.warnings))
    return report


def find_config_file(filename: str = CONFIG_FILENAME, start_dir: Optional[Path] = None) -> Optional[Path]:
    """
    Search for configuration file in priority order:
    1. Current directory
    2. config/ subdirectory
    3. Parent directories (up to 3 levels)
    """
    start_dir = start_dir or Path.cwd()
    candidates = [start_dir / filename, start_dir / "config" / filename]
    current = start_dir
    for _ in range(3):
        current = current.parent
        candidates.extend([current / filename, current / "config" / filename])
    for candidate in candidates:
        if candidate.exists():
            return candidate
    return None
