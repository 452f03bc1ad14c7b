import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

from vpcme._ttable import CRITICAL_001, NORMAL_QUANTILE_0995, critical_value
from vpcme.dataset import MultiLabelDataset, synthetic_dataset
from vpcme.errors import ConfigError, ValidationError
from vpcme.harness import (
    EvaluationReport,
    ExperimentConfig,
    SweepSpec,
    compare_methods,
    cross_validate,
    paired_t_test,
    run_sweep,
)


def sign_dataset(n=300, features=3, seed=0, margin=0.2):
    """Labels are the feature signs; the margin keeps classes separable."""
    rng = np.random.Generator(np.random.PCG64(seed))
    signs = rng.choice([-1.0, 1.0], size=(n, features))
    x = signs * (margin + np.abs(rng.normal(size=(n, features))))
    return MultiLabelDataset(x, x > 0.0)


class TestPairedTTest:
    def test_identical_series(self):
        result = paired_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert result.t == 0.0
        assert not result.significant

    def test_hand_computed_statistic(self):
        # differences (1, 2, 3): mean 2, sd 1, t = 2 / (1/sqrt(3))
        result = paired_t_test([2.0, 4.0, 6.0], [1.0, 2.0, 3.0])
        assert result.t == pytest.approx(2.0 * math.sqrt(3.0), abs=1e-12)
        assert result.df == 2
        assert not result.significant  # critical value at df=2 is 9.9248

    def test_zero_variance_nonzero_mean_is_significant(self):
        result = paired_t_test([1.5, 2.5, 3.5], [1.0, 2.0, 3.0])
        assert result.significant
        assert math.isinf(result.t)

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            paired_t_test([1.0, 2.0], [1.0])

    def test_too_short(self):
        with pytest.raises(ValidationError):
            paired_t_test([1.0], [2.0])

    def test_agrees_with_scipy_on_random_series(self):
        rng = np.random.Generator(np.random.PCG64(4))
        for _ in range(50):
            n = int(rng.integers(3, 40))
            a = rng.normal(size=n)
            b = rng.normal(size=n)
            ours = paired_t_test(a, b)
            ref = scipy_stats.ttest_rel(a, b)
            assert ours.t == pytest.approx(ref.statistic, rel=1e-9)
            assert ours.significant == (ref.pvalue < 0.01)


class TestCriticalTable:
    def test_matches_scipy_quantiles(self):
        for df in range(1, 201):
            want = scipy_stats.t.ppf(0.995, df)
            assert critical_value(df) == pytest.approx(want, abs=5e-5)

    def test_beyond_table_uses_normal(self):
        assert critical_value(201) == NORMAL_QUANTILE_0995
        assert critical_value(10_000) == NORMAL_QUANTILE_0995

    def test_table_is_decreasing(self):
        assert list(CRITICAL_001) == sorted(CRITICAL_001, reverse=True)


class TestCrossValidate:
    def test_single_mlknn_learns_sign_labels(self):
        ds = sign_dataset(n=300, features=3, seed=1)
        cfg = ExperimentConfig(method="mlknn_single", folds=5, repeats=1, seed=3)
        report = cross_validate(cfg, dataset=ds)
        assert report.metrics["hamming_loss"].mean < 0.05

    def test_deterministic_reports(self):
        ds = synthetic_dataset(60, 3, 3, seed=5, label_noise=0.1)
        cfg = ExperimentConfig(method="vpcme", ensemble_size=2, k_neighbors=5,
                               folds=3, repeats=2, seed=11)
        a = cross_validate(cfg, dataset=ds)
        b = cross_validate(cfg, dataset=ds)
        assert a.to_dict() == b.to_dict()

    def test_unit_count_is_folds_times_repeats(self):
        ds = synthetic_dataset(50, 3, 3, seed=6)
        cfg = ExperimentConfig(method="mlknn_single", k_neighbors=5,
                               folds=4, repeats=3, seed=0)
        report = cross_validate(cfg, dataset=ds)
        assert len(report.units) == 12
        assert all(len(v) == 12 for v in report.unit_values.values())
        assert report.protocol["reshuffle_per_repeat"] is True

    def test_fold_too_small_rejected_before_training(self):
        ds = synthetic_dataset(12, 3, 3, seed=7)
        cfg = ExperimentConfig(method="mlknn_single", k_neighbors=10,
                               folds=6, repeats=1, seed=0)
        with pytest.raises(ConfigError):
            cross_validate(cfg, dataset=ds)

    def test_zscore_changes_results_on_skewed_scales(self):
        rng = np.random.Generator(np.random.PCG64(8))
        x = rng.normal(size=(80, 3))
        x[:, 0] *= 1000.0
        y = np.stack([x[:, 0] > 0, x[:, 1] > 0], axis=1)
        ds = MultiLabelDataset(x, y)
        base = ExperimentConfig(method="mlknn_single", k_neighbors=5, folds=4,
                                repeats=1, seed=2)
        plain = cross_validate(base, dataset=ds)
        scaled_cfg = ExperimentConfig(method="mlknn_single", k_neighbors=5, folds=4,
                                      repeats=1, seed=2, zscore=True)
        scaled = cross_validate(scaled_cfg, dataset=ds)
        # feature 1 only matters after rescaling; hamming must improve
        assert scaled.metrics["hamming_loss"].mean < plain.metrics["hamming_loss"].mean

    def test_needs_data_source(self):
        cfg = ExperimentConfig(method="mlknn_single")
        with pytest.raises(ConfigError):
            cross_validate(cfg)

    def test_empty_label_sets_flow_through(self):
        # a sprinkle of unlabeled instances must only show up as skip counts
        rng = np.random.Generator(np.random.PCG64(42))
        ds_full = synthetic_dataset(80, 3, 3, seed=42)
        labels = ds_full.labels.copy()
        labels[rng.choice(80, size=12, replace=False)] = False
        ds = MultiLabelDataset(ds_full.features, labels)
        cfg = ExperimentConfig(method="vpcme", ensemble_size=2, k_neighbors=5,
                               folds=4, repeats=1, seed=1)
        report = cross_validate(cfg, dataset=ds)
        assert report.metrics["one_error"].skipped > 0
        assert report.metrics["hamming_loss"].skipped == 0
        for name in ("hamming_loss", "ranking_loss", "one_error"):
            assert 0.0 <= report.metrics[name].mean <= 1.0

    def test_zscore_constant_feature_guard(self):
        rng = np.random.Generator(np.random.PCG64(3))
        x = rng.normal(size=(60, 3))
        x[:, 2] = 4.25  # zero variance in every training fold
        y = np.stack([x[:, 0] > 0, x[:, 1] > 0], axis=1)
        ds = MultiLabelDataset(x, y)
        cfg = ExperimentConfig(method="mlknn_single", k_neighbors=5, folds=3,
                               repeats=1, seed=0, zscore=True)
        report = cross_validate(cfg, dataset=ds)
        assert np.isfinite(report.metrics["hamming_loss"].mean)


class TestRunSweep:
    def test_degenerate_thetas_complete(self):
        ds = synthetic_dataset(40, 3, 3, seed=9)
        cfg = ExperimentConfig(method="vpcme", ensemble_size=2, k_neighbors=5,
                               folds=2, repeats=1, seed=0)
        results = run_sweep(cfg, SweepSpec("theta", (0.0, 1.0)), dataset=ds)
        assert [v for v, _ in results] == [0.0, 1.0]
        for _, report in results:
            assert isinstance(report, EvaluationReport)

    def test_size_sweep_tags_values(self):
        ds = synthetic_dataset(40, 3, 3, seed=10)
        cfg = ExperimentConfig(method="vpcme", k_neighbors=5, folds=2, repeats=1, seed=0)
        results = run_sweep(cfg, SweepSpec("ensemble_size", (1, 10)), dataset=ds)
        assert [v for v, _ in results] == [1, 10]

    def test_default_value_lists(self):
        assert SweepSpec("theta").values == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
        assert SweepSpec("ensemble_size").values == (1, 10, 20, 30, 40, 50)

    def test_invalid_sweep_values(self):
        with pytest.raises(ConfigError):
            SweepSpec("theta", (1.5,))
        with pytest.raises(ConfigError):
            SweepSpec("ensemble_size", (0,))
        with pytest.raises(ConfigError):
            SweepSpec("learning_rate", (0.1,))


class TestCompareMethods:
    def make_cfg(self, method, **overrides):
        base = dict(method=method, ensemble_size=2, k_neighbors=5,
                    folds=3, repeats=2, seed=21)
        base.update(overrides)
        return ExperimentConfig(**base)

    def test_three_methods_aligned(self):
        ds = synthetic_dataset(60, 3, 3, seed=12, label_noise=0.1)
        comparison = compare_methods(
            [self.make_cfg(m) for m in ("vpcme", "bagging_vpcp", "mlknn_single")],
            dataset=ds,
        )
        assert comparison["methods"] == ["vpcme", "bagging_vpcp", "mlknn_single"]
        assert comparison["reference"] == "vpcme"
        for metric, row in comparison["tests"].items():
            assert set(row) == {"bagging_vpcp", "mlknn_single"}
            for cell in row.values():
                assert cell["marker"] in ("win", "loss", "tie")

    def test_method_against_itself_all_ties(self):
        ds = synthetic_dataset(50, 3, 3, seed=13)
        a = self.make_cfg("vpcme")
        b = self.make_cfg("bagging_vpcp")
        # same method twice is rejected; bagging with boosting disabled uses
        # identical member streams only when weights match, so compare a
        # method against itself through two distinct names is not possible;
        # instead check that identical unit series never flag significance
        comparison = compare_methods([a, b], dataset=ds)
        report = comparison["reports"]["vpcme"]
        for name, values in report.unit_values.items():
            result = paired_t_test(values, values)
            assert not result.significant

    def test_duplicate_methods_rejected(self):
        ds = synthetic_dataset(50, 3, 3, seed=13)
        with pytest.raises(ConfigError):
            compare_methods([self.make_cfg("vpcme"), self.make_cfg("vpcme")], dataset=ds)

    def test_mismatched_seeds_rejected(self):
        with pytest.raises(ConfigError):
            compare_methods(
                [self.make_cfg("vpcme"), self.make_cfg("mlknn_single", seed=99)],
                dataset=synthetic_dataset(50, 3, 3, seed=13),
            )

    def test_vpcme_ranking_loss_not_worse_than_single(self):
        ds = synthetic_dataset(120, 4, 3, seed=14, label_noise=0.1, label_correlation=0.6)
        cfgs = [
            self.make_cfg("vpcme", ensemble_size=10, repeats=3, seed=5),
            self.make_cfg("mlknn_single", ensemble_size=10, repeats=3, seed=5),
        ]
        comparison = compare_methods(cfgs, dataset=ds)
        vpcme_rl = comparison["reports"]["vpcme"].metrics["ranking_loss"].mean
        single_rl = comparison["reports"]["mlknn_single"].metrics["ranking_loss"].mean
        assert vpcme_rl <= single_rl + 0.01
