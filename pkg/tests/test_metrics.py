import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import expit, logsumexp
from sklearn.metrics import roc_auc_score

from nikhil.ajnata.domain.exceptions import EvaluationError
from nikhil.ajnata.domain.metrics import (
    HIST_HEADER,
    SCORES_HEADER,
    UNKNOWN_HIST_HEADER,
    Histogram,
    ReportManager,
    ScoreMethod,
    auroc,
    baseline_scores,
    choose_threshold,
    classify,
    evaluate,
    fpr_at_tpr,
    score_features,
    stud_score,
)
from nikhil.ajnata.domain.model import ModelConfig, ModelParams
from nikhil.ajnata.domain.stream_sim import default_sim_spec, generate_stream
from nikhil.ajnata.utils.csv_utils import CsvUtils
from nikhil.ajnata.utils.yaml_utils import YamlUtils

GRID = [round(0.1 * i, 1) for i in range(1, 11)]

score_lists = st.lists(st.integers(-40, 40), min_size=1, max_size=30)


def _zero_params(num_classes: int, feature_dim: int, theta_u: float = 1.0) -> ModelParams:
    return ModelParams.initialize(num_classes, feature_dim,
                                  ModelConfig(d_enc=2, init="zeros", theta_u_init=theta_u), seed=0)


def _pairwise_auroc(id_scores, ood_scores) -> float:
    credit = sum(1.0 if a > b else 0.5 if a == b else 0.0 for a in id_scores for b in ood_scores)
    return credit / (len(id_scores) * len(ood_scores))


def _sweep_fpr(id_scores, ood_scores) -> float:
    """Largest ID score keeping at least 95% of ID objects, then the OOD pass rate"""
    n = len(id_scores)
    for gamma in sorted(set(id_scores), reverse=True):
        if 100 * sum(s >= gamma for s in id_scores) >= 95 * n:
            return sum(s >= gamma for s in ood_scores) / len(ood_scores)
    raise AssertionError("unreachable")


def _random_scores(rng: np.random.Generator):
    # a coarse grid so ties are common
    n_id, n_ood = int(rng.integers(1, 51)), int(rng.integers(1, 51))
    return (rng.integers(0, 12, size=n_id) / 10.0).tolist(), (rng.integers(0, 12, size=n_ood) / 10.0).tolist()


class TestScores:

    def test_stud_score_closed_form(self):
        assert stud_score(_zero_params(2, 3), np.zeros(3)) == pytest.approx(2.0 / 3.0)

    def test_stud_score_flat_slope(self, rng):
        assert stud_score(_zero_params(2, 3, theta_u=1e-9), rng.normal(size=3)) == pytest.approx(0.5)

    def test_baselines_uniform_head(self):
        scores = baseline_scores(_zero_params(4, 3), np.zeros(3))
        assert scores["msp"] == pytest.approx(0.25)
        assert scores["energy_score"] == pytest.approx(math.log(4.0))

    def test_energy_score_is_logsumexp(self, rng, make_params):
        params = make_params(rng)
        h = rng.normal(size=(6, 5))
        logits = h @ params.w_pred.T + params.b_pred
        assert np.allclose(baseline_scores(params, h)["energy_score"], logsumexp(logits, axis=1))

    def test_stud_orders_like_negative_energy(self, rng, make_params):
        params = make_params(rng)
        h = rng.normal(size=(40, 5))
        stud, energies = score_features(params, h, ScoreMethod.STUD)
        assert np.array_equal(np.argsort(stud, kind="stable"), np.argsort(-energies, kind="stable"))

    def test_batched_matches_single(self, rng, make_params):
        params = make_params(rng)
        h = rng.normal(size=(3, 5))
        batched, _ = score_features(params, h, "msp")
        assert batched[1] == pytest.approx(baseline_scores(params, h[1])["msp"])


class TestThreshold:

    def test_grid(self):
        assert choose_threshold(GRID) == 0.1

    def test_twenty_scores(self):
        assert choose_threshold(np.arange(1.0, 21.0)) == 2.0

    def test_full_recall(self):
        assert choose_threshold([3.0, 1.0, 2.0], tpr_target=1.0) == 1.0

    def test_equal_scores(self):
        assert choose_threshold([0.4] * 7) == 0.4

    def test_empty(self):
        with pytest.raises(EvaluationError, match="empty"):
            choose_threshold([])

    @pytest.mark.parametrize("target", [0.0, -0.5, 1.5])
    def test_invalid_target(self, target):
        with pytest.raises(EvaluationError, match="tpr_target"):
            choose_threshold(GRID, target)

    def test_classify_ties_go_to_id(self):
        assert classify(0.5, 0.5) == 1
        assert classify(0.49, 0.5) == 0


class TestFpr:

    def test_separated(self):
        assert fpr_at_tpr(GRID, [-1.0, -2.0]) == 0.0

    def test_identical_grids(self):
        assert fpr_at_tpr(GRID, GRID) == 1.0

    def test_non_finite(self):
        with pytest.raises(EvaluationError, match="non-finite"):
            fpr_at_tpr(GRID, [0.1, math.nan])

    def test_matches_threshold_sweep(self):
        rng = np.random.default_rng(404)
        for _ in range(500):
            id_scores, ood_scores = _random_scores(rng)
            assert fpr_at_tpr(id_scores, ood_scores) == _sweep_fpr(id_scores, ood_scores)


class TestAuroc:

    def test_separated(self):
        assert auroc([2.0, 3.0], [0.0, 1.0]) == 1.0
        assert auroc([0.0, 1.0], [2.0, 3.0]) == 0.0

    def test_all_tied(self):
        assert auroc([0.3] * 4, [0.3] * 9) == 0.5

    def test_empty(self):
        with pytest.raises(EvaluationError, match="OOD"):
            auroc([0.1], [])

    def test_matches_pairwise_count(self):
        rng = np.random.default_rng(405)
        for _ in range(500):
            id_scores, ood_scores = _random_scores(rng)
            assert auroc(id_scores, ood_scores) == _pairwise_auroc(id_scores, ood_scores)

    def test_matches_sklearn(self, rng):
        for _ in range(50):
            id_scores, ood_scores = _random_scores(rng)
            labels = [1] * len(id_scores) + [0] * len(ood_scores)
            expected = roc_auc_score(labels, id_scores + ood_scores)
            assert auroc(id_scores, ood_scores) == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(id_scores=score_lists, ood_scores=score_lists)
    def test_swapping_classes(self, id_scores, ood_scores):
        assert auroc(ood_scores, id_scores) == pytest.approx(1.0 - auroc(id_scores, ood_scores), abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(id_scores=score_lists, ood_scores=score_lists)
    def test_invariant_under_increasing_maps(self, id_scores, ood_scores):
        transform = lambda values: np.exp(np.asarray(values) / 10.0)  # noqa: E731
        assert auroc(transform(id_scores), transform(ood_scores)) == auroc(id_scores, ood_scores)
        assert (fpr_at_tpr(transform(id_scores), transform(ood_scores))
                == fpr_at_tpr(id_scores, ood_scores))


@pytest.fixture
def eval_stream(small_spec):
    return generate_stream(small_spec, start=small_spec.num_videos, count=2)


class TestEvaluate:

    def test_uninformative_params(self, eval_stream, small_spec):
        params = _zero_params(small_spec.num_classes, small_spec.feature_dim)
        for method in ScoreMethod:
            report = evaluate(params, eval_stream, method)
            assert report.auroc == 0.5
            assert report.fpr95 == 1.0

    def test_stud_and_energy_rank_identically(self, eval_stream, small_params):
        stud = evaluate(small_params, eval_stream, "stud")
        energy = evaluate(small_params, eval_stream, "energy")
        assert stud.auroc == energy.auroc
        assert stud.fpr95 == energy.fpr95

    def test_saturated_stud_scores_keep_energy_ranking(self, eval_stream, small_params):
        params = small_params.with_tensor("w_pred", small_params.w_pred * 60.0).with_tensor("theta_u", 3.0)
        stud = evaluate(params, eval_stream, "stud")
        energy = evaluate(params, eval_stream, "energy")
        assert any(o.score == 1.0 for o in stud.objects) or any(o.score == 0.0 for o in stud.objects)
        assert stud.auroc == energy.auroc
        assert stud.fpr95 == energy.fpr95
        assert stud.gamma == pytest.approx(expit(3.0 * energy.gamma))

    def test_report_contents(self, eval_stream, small_params):
        report = evaluate(small_params, eval_stream, ScoreMethod.MSP, bins=20)
        assert report.n_id > 0 and report.n_ood > 0
        assert len(report.objects) == report.n_id + report.n_ood
        assert sum(o.is_id for o in report.objects) == report.n_id
        assert report.score_histogram.total == report.n_id + report.n_ood
        assert report.energy_histogram.total == report.n_id + report.n_ood
        assert len(list(report.score_histogram.rows())) == 20
        assert 0.0 <= report.auroc <= 1.0 and 0.0 <= report.fpr95 <= 1.0
        assert report.summary()["method"] == "msp"

    def test_objectness_threshold_filters(self, eval_stream, small_params):
        loose = evaluate(small_params, eval_stream, objectness_threshold=0.0)
        strict = evaluate(small_params, eval_stream, objectness_threshold=0.5)
        assert loose.n_id + loose.n_ood == sum(len(f) for v in eval_stream for f in v.frames)
        assert strict.n_id + strict.n_ood <= loose.n_id + loose.n_ood

    def test_no_ood_objects(self, small_params):
        spec = default_sim_spec(num_classes=3, feature_dim=6, frames_per_video=3, num_videos=1,
                                ood_fraction_per_frame=0.0, seed=11)
        with pytest.raises(EvaluationError, match="no OOD objects"):
            evaluate(small_params, generate_stream(spec))


class TestHistogram:

    def test_shared_range(self):
        histogram = Histogram.build([0.0, 1.0], [2.0], bins=4)
        assert histogram.edges[0] == 0.0 and histogram.edges[-1] == 2.0
        assert histogram.counts_a.tolist() == [1, 0, 1, 0]
        assert histogram.counts_b.tolist() == [0, 0, 0, 1]

    def test_single_value(self):
        histogram = Histogram.build([1.0, 1.0], [1.0], bins=2)
        assert histogram.edges.tolist() == [0.5, 1.0, 1.5]
        assert histogram.total == 3

    def test_empty(self):
        assert Histogram.build([], [], bins=3).total == 0


class TestReportManager:

    def test_files_and_headers(self, tmp_path, eval_stream, small_params):
        report = evaluate(small_params, eval_stream, "stud", bins=10)
        created = ReportManager(tmp_path / "run").save_report(report, model="trained", auroc_at_init=0.5)
        assert set(created) == {"metrics_stud", "scores_stud", "hist_stud", "energy_hist_stud"}

        metrics = YamlUtils.yaml_safe_load(created["metrics_stud"])
        assert metrics["method"] == "stud"
        assert metrics["auroc"] == report.auroc
        assert metrics["model"] == "trained" and metrics["auroc_at_init"] == 0.5

        scores = CsvUtils.read_rows(created["scores_stud"])
        assert tuple(scores[0]) == SCORES_HEADER
        assert len(scores) == report.n_id + report.n_ood
        assert {row["truth"] for row in scores} == {"ID", "OOD"}
        assert float(scores[0]["score"]) == report.objects[0].score

        hist = CsvUtils.read_rows(created["hist_stud"])
        assert tuple(hist[0]) == HIST_HEADER and len(hist) == 10
        assert sum(int(row["count_id"]) for row in hist) == report.n_id

    def test_unknown_energy_histogram(self, tmp_path):
        path = ReportManager(tmp_path).save_unknown_energy_histogram([-3.0, -2.5], [1.0, 0.5, 0.2], bins=5)
        rows = CsvUtils.read_rows(path)
        assert path.name == "unknown_energy_hist.csv"
        assert tuple(rows[0]) == UNKNOWN_HIST_HEADER
        assert sum(int(r["count_id"]) for r in rows) == 2
        assert sum(int(r["count_unknown"]) for r in rows) == 3
        assert float(rows[-1]["bin_right"]) == 3.0
