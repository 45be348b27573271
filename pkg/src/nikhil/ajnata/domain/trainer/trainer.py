"""
Training loop with per-step unknown distillation

Handles:
- Seeded key-frame order per epoch
- Reference-frame sampling, energy filtering and distillation under the
  current params at every step
- Joint loss L_det + beta * L_uncertainty and one plain SGD step
- Step log (CSV) and final-epoch energy samples
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from nikhil.ajnata.domain.distiller import (
    DistilledUnknown,
    UnknownMode,
    backward_distill,
    collect_key_objects,
    distill_from_candidates,
    select_candidates,
)
from nikhil.ajnata.domain.exceptions import ConfigurationError, DistillationUnavailable, TrainingDiverged
from nikhil.ajnata.domain.model import ModelParams, class_logits, energy
from nikhil.ajnata.domain.stream_sim import Video, sample_reference_frames
from nikhil.ajnata.domain.trainer.losses import detection_loss, uncertainty_terms
from nikhil.ajnata.domain.trainer.train_config import TrainConfig
from nikhil.ajnata.utils.csv_utils import CsvUtils

logger = logging.getLogger(__name__)

# spawn_keys under SeedSequence(config.seed): key-frame order and distillation draws
_ORDER_STREAM = (2, 0)
_DISTILL_STREAM = (2, 1)

TRAIN_LOG_HEADER = ("step", "loss_det", "loss_unc", "mean_E_id", "mean_E_unknown", "theta_u")


@dataclass(frozen=True)
class StepRecord:
    step: int
    loss_det: float
    loss_unc: float
    mean_E_id: float
    mean_E_unknown: float
    theta_u: float
    epoch: int = 0
    n_id: int = 0
    n_unknown: int = 0

    def row(self) -> Tuple[Any, ...]:
        return tuple(getattr(self, name) for name in TRAIN_LOG_HEADER)


@dataclass
class TrainLog:
    records: List[StepRecord] = field(default_factory=list)
    final_id_energies: np.ndarray = field(default_factory=lambda: np.zeros(0))
    final_unknown_energies: np.ndarray = field(default_factory=lambda: np.zeros(0))
    distilled_records: List[Dict[str, Any]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def to_csv(self, file_path: Path) -> Path:
        return CsvUtils.write_rows(Path(file_path), TRAIN_LOG_HEADER, (r.row() for r in self.records))

    def epoch_mean(self, name: str, epoch: int) -> float:
        """Mean of a logged column over one epoch, ignoring nan entries"""
        values = np.asarray([getattr(r, name) for r in self.records if r.epoch == epoch], dtype=float)
        values = values[~np.isnan(values)]
        return float(values.mean()) if values.size else math.nan

    def energy_gap(self, epoch: int) -> float:
        """Mean unknown energy minus mean ID energy over the steps of an epoch"""
        steps = [r for r in self.records if r.epoch == epoch and r.n_unknown > 0]
        if not steps:
            return math.nan
        return float(np.mean([r.mean_E_unknown - r.mean_E_id for r in steps]))

    @property
    def epochs(self) -> List[int]:
        return sorted({r.epoch for r in self.records})


@dataclass
class _StepBatch:
    """Inputs gathered from the key frames of one optimizer step"""
    id_features: List[np.ndarray] = field(default_factory=list)
    labels: List[np.ndarray] = field(default_factory=list)
    unknowns: List[DistilledUnknown] = field(default_factory=list)
    # (key features, pool features, number of unknowns) per distilled key frame
    groups: List[Tuple[np.ndarray, np.ndarray, int]] = field(default_factory=list)


class Trainer:
    """
    Runs the training loop over a stream of videos

    Example:
        trainer = Trainer(TrainConfig(beta=0.05))
        params, log = trainer.train(videos, ModelParams.initialize(4, 16, ModelConfig(), seed=7))
        log.to_csv(Path("train_log.csv"))
    """

    def __init__(self, config: TrainConfig, dump_steps: int = 0):
        if not isinstance(config, TrainConfig):
            config = TrainConfig.parse(dict(config), prefix="train")
        self.config = config
        self.dump_steps = dump_steps

    def _gather(self, params: ModelParams, video: Video, key_index: int,
                rng: np.random.Generator, batch: _StepBatch) -> None:
        config = self.config
        key = collect_key_objects(video.frames[key_index], config.objectness_threshold)
        if len(key) == 0:
            logger.debug("Video %d frame %d: no labeled ID objects", video.video_id, key_index)
            return
        batch.id_features.append(key.features)
        batch.labels.append(key.labels)

        mode = UnknownMode(config.unknown_mode)
        p, q = (0, 100) if mode is UnknownMode.RANDOM_PROPOSAL else (config.p, config.q)
        try:
            references = sample_reference_frames(len(video), key_index, config.T, config.R, rng)
            candidates = select_candidates(params, [video.frames[t] for t in references],
                                           config.objectness_threshold, p, q)
            unknowns = distill_from_candidates(params, key, candidates, mode, rng)
        except DistillationUnavailable as e:
            logger.debug("Video %d frame %d: %s", video.video_id, key_index, e)
            return
        batch.unknowns.extend(unknowns)
        batch.groups.append((key.features, candidates.features, len(unknowns)))

    def _step(self, params: ModelParams, batch: _StepBatch, step: int, epoch: int) -> Tuple[ModelParams, StepRecord, Dict[str, np.ndarray]]:
        config = self.config
        id_features = np.concatenate(batch.id_features)
        labels = np.concatenate(batch.labels)

        loss_det, grads = detection_loss(params, id_features, labels)
        energies = {"id": energy(class_logits(params, id_features)), "unknown": np.zeros(0)}
        loss_unc = 0.0

        if batch.unknowns:
            unknown_features = np.stack([u.feature for u in batch.unknowns])
            terms = uncertainty_terms(params, id_features, unknown_features)
            loss_unc = terms.loss
            energies = {"id": terms.id_energies, "unknown": terms.unknown_energies}
            if config.beta > 0:
                unc_grads = terms.grads
                if config.encoder_grad == "through_weights" and config.unknown_mode == UnknownMode.DISTILL:
                    offset = 0
                    for key_features, pool, count in batch.groups:
                        d_unknowns = terms.unknown_input_grad[offset:offset + count]
                        unc_grads = unc_grads + backward_distill(params, key_features, pool, d_unknowns)
                        offset += count
                grads = grads + unc_grads.scaled(config.beta)
        else:
            logger.debug("Step %d: no distilled unknowns, uncertainty term skipped", step)

        if not grads.is_finite():
            raise TrainingDiverged(f"non-finite gradients at step {step}")
        try:
            updated = params.sgd_step(grads, config.learning_rate, learn_theta_u=config.learn_theta_u)
        except ValueError as e:
            raise TrainingDiverged(f"step {step}: {e}") from e

        record = StepRecord(
            step=step,
            loss_det=loss_det,
            loss_unc=loss_unc,
            mean_E_id=float(np.mean(energies["id"])),
            mean_E_unknown=float(np.mean(energies["unknown"])) if energies["unknown"].size else math.nan,
            theta_u=updated.theta_u,
            epoch=epoch,
            n_id=int(labels.shape[0]),
            n_unknown=len(batch.unknowns),
        )
        return updated, record, energies

    def train(self, stream: Sequence[Video], params: ModelParams) -> Tuple[ModelParams, TrainLog]:
        """
        Train on every frame of every video as key frame, once per epoch

        Args:
            stream: training videos
            params: initial parameters (not modified)

        Returns:
            (final params, full step log)

        Raises:
            ConfigurationError: fewer than two frames in the stream
            TrainingDiverged: an update produced non-finite values
        """
        config = self.config
        key_frames = [(v, t) for v, video in enumerate(stream) for t in range(len(video))]
        if len(key_frames) < 2:
            raise ConfigurationError("training stream needs at least 2 frames", key="stream")

        order_rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=_ORDER_STREAM))
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=_DISTILL_STREAM))
        log = TrainLog()
        step = 0
        for epoch in range(1, config.epochs + 1):
            order = order_rng.permutation(len(key_frames))
            id_energies: List[np.ndarray] = []
            unknown_energies: List[np.ndarray] = []
            for start in range(0, len(order), config.batch_key_frames):
                batch = _StepBatch()
                for position in order[start:start + config.batch_key_frames]:
                    v, t = key_frames[position]
                    self._gather(params, stream[v], t, rng, batch)
                if not batch.labels:
                    logger.debug("Epoch %d: batch at %d has no labeled objects, step skipped", epoch, start)
                    continue

                if step < self.dump_steps:
                    log.distilled_records.extend(u.to_record(step=step) for u in batch.unknowns)
                params, record, energies = self._step(params, batch, step, epoch)
                log.records.append(record)
                if epoch == config.epochs:
                    id_energies.append(energies["id"])
                    unknown_energies.append(energies["unknown"])
                step += 1

            if epoch == config.epochs:
                log.final_id_energies = np.concatenate(id_energies) if id_energies else np.zeros(0)
                log.final_unknown_energies = np.concatenate(unknown_energies) if unknown_energies else np.zeros(0)
            logger.info(
                "Epoch %d/%d: loss_det=%.4f loss_unc=%.4f energy_gap=%.4f theta_u=%.4f",
                epoch, config.epochs, log.epoch_mean("loss_det", epoch), log.epoch_mean("loss_unc", epoch),
                log.energy_gap(epoch), params.theta_u,
            )
        return params, log


def train(stream: Sequence[Video], params: ModelParams, config: TrainConfig,
          dump_steps: int = 0) -> Tuple[ModelParams, TrainLog]:
    """Functional form of Trainer(config).train(stream, params)"""
    return Trainer(config, dump_steps=dump_steps).train(stream, params)
