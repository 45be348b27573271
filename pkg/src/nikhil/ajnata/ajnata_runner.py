"""
Ajnata Experiment Runner - Main Orchestrator

Wires the whole pipeline for one experiment or one sweep:
1. Generate the training stream and the held-out evaluation stream
2. Train with per-step unknown distillation (and a beta = 0 baseline model)
3. Evaluate every configured scoring method
4. Write logs, parameters, reports and the manifest

Usage:
    from nikhil.ajnata import AjnataRunner

    runner = AjnataRunner("config/ajnata_config.example.yaml")
    result = runner.run()
    print(result.runs[0].reports["stud"].auroc)
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from nikhil.ajnata.domain.distiller import dump_distilled
from nikhil.ajnata.domain.exceptions import ConfigurationError
from nikhil.ajnata.domain.experiment.config import ExperimentConfig, find_config_file
from nikhil.ajnata.domain.experiment.manifest import RunManifest
from nikhil.ajnata.domain.metrics import MetricsReport, ReportManager, ScoreMethod, evaluate
from nikhil.ajnata.domain.model import ModelParams, save_params
from nikhil.ajnata.domain.stream_sim import dump_stream, generate_stream
from nikhil.ajnata.domain.stream_sim.generator import stream_frame_count
from nikhil.ajnata.domain.trainer import TrainLog, train
from nikhil.ajnata.utils.csv_utils import CsvUtils

logger = logging.getLogger(__name__)

SUMMARY_HEADER = ("axis_value", "fpr95", "auroc")


@dataclass
class RunResult:
    """Outcome of one training + evaluation run"""
    output_dir: Path
    params: ModelParams
    log: TrainLog
    reports: Dict[str, MetricsReport] = field(default_factory=dict)
    initial_reports: Dict[str, MetricsReport] = field(default_factory=dict)
    created_files: Dict[str, Path] = field(default_factory=dict)
    name: Optional[str] = None
    vanilla_params: Optional[ModelParams] = None

    def headline(self) -> MetricsReport:
        """The stud report when evaluated, otherwise the first method's"""
        return self.reports.get(ScoreMethod.STUD.value) or next(iter(self.reports.values()))


@dataclass
class ExperimentResult:
    output_dir: Path
    runs: List[RunResult] = field(default_factory=list)
    summary_path: Optional[Path] = None
    manifest_path: Optional[Path] = None


class AjnataRunner:
    """
    Main orchestrator for Ajnata experiments

    Example:
        # Auto-discover ajnata_config.yaml
        runner = AjnataRunner()

        # Explicit config with overrides
        runner = AjnataRunner("my_config.yaml", output_dir="runs/seed8", seed=8)
        result = runner.run()
    """

    @classmethod
    def from_cli_args(cls, args) -> "AjnataRunner":
        """Maps the run subcommand's arguments onto the constructor"""
        return cls(
            config_path=getattr(args, 'config', None),
            output_dir=getattr(args, 'output_dir', None),
            seed=getattr(args, 'seed', None),
        )

    def __init__(self, config_path: Optional[Union[str, Path]] = None,
                 output_dir: Optional[Union[str, Path]] = None, seed: Optional[int] = None,
                 config: Optional[ExperimentConfig] = None):
        """
        Initialize the runner

        Args:
            config_path: path to ajnata_config.yaml; auto-discovered when None,
                         defaults are used when nothing is found
            output_dir: replaces output.dir
            seed: replaces sim.seed and train.seed
            config: an already validated configuration, used instead of any file
        """
        self.overrides: Dict[str, Any] = {}
        if output_dir is not None:
            self.overrides["output_dir"] = str(output_dir)
        if seed is not None:
            self.overrides["seed"] = seed

        if config is not None:
            self.config_path: Optional[Path] = None
            if self.overrides:
                config = ExperimentConfig.from_mapping(config.to_record(), output_dir=output_dir, seed=seed)
            self.config = config
            return

        if config_path is not None:
            self.config_path = Path(config_path)
            if not self.config_path.exists():
                raise ConfigurationError(f"Config file not found: {config_path}")
        else:
            self.config_path = find_config_file()
            if self.config_path is None:
                logger.info("No ajnata_config.yaml found, using defaults")

        if self.config_path is not None:
            self.config = ExperimentConfig.from_yaml(self.config_path, output_dir=output_dir, seed=seed)
        else:
            self.config = ExperimentConfig.from_mapping({}, output_dir=output_dir, seed=seed)

    def run(self) -> ExperimentResult:
        """Run the experiment, or every value of the sweep followed by summary.csv"""
        config = self.config
        if config.sweep is None:
            run = self.run_single(config)
            return ExperimentResult(output_dir=run.output_dir, runs=[run],
                                    manifest_path=run.created_files.get("manifest"))

        output_dir = Path(config.output.dir)
        manifest = RunManifest(output_dir, config.to_record(), self._seeds(config), dict(self.overrides))
        manifest.start()
        result = ExperimentResult(output_dir=output_dir)
        rows = []
        for value, (name, run_config) in zip(config.sweep.values, config.runs()):
            logger.info("Sweep run %s", name)
            run = self.run_single(run_config, name=name)
            result.runs.append(run)
            headline = run.headline()
            rows.append((config.sweep.label(value), headline.fpr95, headline.auroc))
            manifest.add([run.created_files["manifest"]])

        result.summary_path = CsvUtils.write_rows(output_dir / "summary.csv", SUMMARY_HEADER, rows)
        manifest.add([result.summary_path])
        result.manifest_path = manifest.complete()
        return result

    def _seeds(self, config: ExperimentConfig) -> Dict[str, int]:
        return {"sim": config.sim.seed, "train": config.train.seed, "init": config.train.seed}

    def run_single(self, config: ExperimentConfig, name: Optional[str] = None) -> RunResult:
        """
        One training + evaluation run into config.output.dir

        The manifest is written first with status "incomplete" and completed
        only after every output exists.
        """
        output_dir = Path(config.output.dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        manifest = RunManifest(output_dir, config.to_record(), self._seeds(config), dict(self.overrides))
        manifest.start()
        created_files: Dict[str, Path] = {}

        sim = config.sim
        train_stream = generate_stream(sim, 0, sim.num_videos)
        eval_stream = generate_stream(sim, sim.num_videos, config.eval.eval_videos)
        logger.info("Streams: %d training frames, %d evaluation frames",
                    stream_frame_count(train_stream), stream_frame_count(eval_stream))
        if config.output.dump_streams:
            created_files["train_stream"] = dump_stream(train_stream, output_dir / "train_stream.jsonl")
            created_files["eval_stream"] = dump_stream(eval_stream, output_dir / "eval_stream.jsonl")

        initial = ModelParams.initialize(sim.num_classes, sim.feature_dim, config.model, seed=config.train.seed)
        params, log = train(train_stream, initial, config.train, dump_steps=config.output.distill_dump_steps)
        created_files["train_log"] = log.to_csv(output_dir / "train_log.csv")
        created_files["params"] = save_params(params, output_dir / "params.jsonl")
        if log.distilled_records:
            created_files["distilled_unknowns"] = dump_distilled(log.distilled_records,
                                                                 output_dir / "distilled_unknowns.jsonl")

        methods = [ScoreMethod(m) for m in config.eval.methods]
        vanilla = None
        if config.eval.baselines_from_vanilla and any(m is not ScoreMethod.STUD for m in methods):
            if config.train.beta == 0:
                vanilla = params
            else:
                logger.info("Training beta = 0 baseline model")
                vanilla_train = config.train.model_copy(update={"beta": 0.0})
                vanilla, _ = train(train_stream, initial, vanilla_train)
            created_files["vanilla_params"] = save_params(vanilla, output_dir / "vanilla_params.jsonl")

        report_manager = ReportManager(output_dir)
        result = RunResult(output_dir=output_dir, params=params, log=log, name=name, vanilla_params=vanilla)
        eval_kwargs = dict(
            objectness_threshold=config.train.objectness_threshold,
            tpr_target=config.eval.tpr_target,
            bins=config.eval.histogram_bins,
        )
        for method in methods:
            on_vanilla = vanilla is not None and method is not ScoreMethod.STUD
            report = evaluate(vanilla if on_vanilla else params, eval_stream, method, **eval_kwargs)
            initial_report = evaluate(initial, eval_stream, method, **eval_kwargs)
            result.reports[method.value] = report
            result.initial_reports[method.value] = initial_report
            created_files.update(report_manager.save_report(
                report,
                model="vanilla" if on_vanilla else "trained",
                auroc_at_init=initial_report.auroc,
                fpr95_at_init=initial_report.fpr95,
            ))

        created_files["unknown_energy_hist"] = report_manager.save_unknown_energy_histogram(
            log.final_id_energies, log.final_unknown_energies, config.eval.histogram_bins
        )

        manifest.add(created_files.values())
        created_files["manifest"] = manifest.complete()
        result.created_files = created_files
        return result
