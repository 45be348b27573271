"""
Report management for evaluation results

Handles:
- Key/value metrics report (YAML)
- Raw scored objects (CSV: score, truth, energy)
- Score and energy histograms split by truth class (CSV)
- Negative-energy histogram of ID objects vs. distilled unknowns
"""

import logging
from pathlib import Path
from typing import Dict, Sequence

import numpy as np

from nikhil.ajnata.domain.metrics.evaluator import DEFAULT_BINS, Histogram, MetricsReport
from nikhil.ajnata.domain.metrics.scores import ScoreMethod
from nikhil.ajnata.utils.csv_utils import CsvUtils
from nikhil.ajnata.utils.yaml_utils import YamlUtils

logger = logging.getLogger(__name__)

SCORES_HEADER = ("score", "truth", "energy")
HIST_HEADER = ("bin_left", "bin_right", "count_id", "count_ood")
UNKNOWN_HIST_HEADER = ("bin_left", "bin_right", "count_id", "count_unknown")


class ReportManager:
    """Writes evaluation reports into one run directory"""

    def __init__(self, output_dir: Path):
        """
        Initialize report manager

        Args:
            output_dir: run directory (created if missing)
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def save_report(self, report: MetricsReport, **extra) -> Dict[str, Path]:
        """
        Save one method's evaluation

        Creates:
        1. metrics_<method>.yaml - key/value summary (extra keys appended)
        2. scores_<method>.csv - one row per scored object
        3. hist_<method>.csv - score histogram
        4. energy_hist_<method>.csv - energy histogram

        Returns:
            Dict of file paths created
        """
        method = ScoreMethod(report.method).value
        created_files = {}

        created_files[f"metrics_{method}"] = YamlUtils.yaml_safe_dump(
            {**report.summary(), **extra}, self.output_dir / f"metrics_{method}.yaml"
        )
        created_files[f"scores_{method}"] = CsvUtils.write_rows(
            self.output_dir / f"scores_{method}.csv",
            SCORES_HEADER,
            ((o.score, o.truth, o.energy) for o in report.objects),
        )
        if report.score_histogram is not None:
            created_files[f"hist_{method}"] = CsvUtils.write_rows(
                self.output_dir / f"hist_{method}.csv", HIST_HEADER, report.score_histogram.rows()
            )
        if report.energy_histogram is not None:
            created_files[f"energy_hist_{method}"] = CsvUtils.write_rows(
                self.output_dir / f"energy_hist_{method}.csv", HIST_HEADER, report.energy_histogram.rows()
            )
        logger.debug("Saved %s report: %s", method, ", ".join(p.name for p in created_files.values()))
        return created_files

    def save_unknown_energy_histogram(self, id_energies: Sequence[float], unknown_energies: Sequence[float],
                                      bins: int = DEFAULT_BINS) -> Path:
        """Histogram of -E for ID objects and distilled unknowns"""
        histogram = Histogram.build(-np.asarray(id_energies, dtype=float),
                                    -np.asarray(unknown_energies, dtype=float), bins)
        return CsvUtils.write_rows(self.output_dir / "unknown_energy_hist.csv", UNKNOWN_HIST_HEADER, histogram.rows())
