import numpy as np
import pytest

from levsel import (
    AnnealParams,
    ExperimentConfig,
    SelectionSpec,
    compute_scores,
    generate,
    run_combo_grid,
    run_density_study,
    run_pipeline_study,
    run_success_study,
    select,
)
from levsel.experiments import GRID_PERCENTS, variable_classes
from levsel.simulate import replicate_seed


def small_config(**kw):
    base = dict(scenario=1, n=30, p=40, replicates=20, k=12, seed=42)
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    def test_k_beyond_p_rejected(self):
        with pytest.raises(ValueError, match="exceeds"):
            ExperimentConfig(n=60, p=100, replicates=5)  # auto k = 246 > 100

    def test_bad_criterion_rejected(self):
        with pytest.raises(ValueError):
            ExperimentConfig(p=1000, criteria=("cls", "entropy"))

    def test_auto_k(self):
        cfg = ExperimentConfig(n=60, p=1000, replicates=5)
        assert cfg.resolved_k == 246


class TestVariableClasses:
    def test_scenario3_classes(self):
        spec = small_config(scenario=3).scenario_spec()
        classes, labels = variable_classes(spec)
        assert classes == ["4-way", "3-way", "2-way", "main", "irrelevant"]
        assert list(labels[:10]) == ["4-way"] * 4 + ["3-way"] * 3 + ["2-way"] * 2 + ["main"]
        assert set(labels[10:]) == {"irrelevant"}


class TestSuccessStudy:
    def test_mass_conservation_and_mean(self):
        cfg = small_config()
        out = run_success_study(cfg)
        for crit, hist in out.items():
            assert hist.counts.sum() == cfg.replicates
            expected_mean = np.average(np.arange(hist.counts.size), weights=hist.counts)
            assert hist.mean_captured == pytest.approx(expected_mean)

    def test_k_equal_p_is_a_point_mass_at_ten(self):
        cfg = small_config(k=40, replicates=5)
        out = run_success_study(cfg)
        for hist in out.values():
            assert hist.counts[10] == cfg.replicates
            assert hist.at_least(10) == 1.0

    def test_parallel_schedule_invariance(self):
        cfg = small_config(replicates=12)
        a = run_success_study(cfg, jobs=1)
        b = run_success_study(cfg, jobs=3)
        for crit in a:
            np.testing.assert_array_equal(a[crit].counts, b[crit].counts)


class TestDensityStudy:
    def test_class_partition_counts(self):
        cfg = small_config(scenario=3, replicates=10)
        res = run_density_study(cfg)
        for score_type in ("ls", "cls"):
            total = sum(res.samples[(score_type, c)].size for c in res.classes)
            assert total == cfg.p * cfg.replicates
        assert res.samples[("ls", "irrelevant")].size == 30 * cfg.replicates

    def test_curves_are_nonnegative_and_cover_classes(self):
        cfg = small_config(scenario=2, replicates=8)
        res = run_density_study(cfg)
        assert res.classes == ["3-way", "2-way", "main", "irrelevant"]
        for key, (grid, dens) in res.curves.items():
            assert grid.shape == dens.shape
            assert np.all(dens >= 0)


class TestComboGrid:
    def test_zero_cell_is_exactly_zero(self):
        cfg = small_config(scenario=3, replicates=10)
        grid = run_combo_grid(cfg)
        assert grid.cell(pct_cls=0, pct_ls=0) == 0.0

    def test_entries_in_unit_interval_and_coverage_grows(self):
        cfg = small_config(scenario=3, replicates=15)
        grid = run_combo_grid(cfg)
        assert grid.proportions.shape == (10, 10)
        assert np.all(grid.proportions >= 0.0)
        assert np.all(grid.proportions <= 1.0)
        assert grid.cell(90, 90) >= grid.cell(10, 10)

    def test_full_percent_rows_capture_everything_when_k_covers_p(self):
        # 90% of p=40 columns is 36 >= all 10 relevant ones get a chance;
        # the (90, 90) union holds 72 (deduplicated) picks out of 40
        cfg = small_config(scenario=1, replicates=5)
        grid = run_combo_grid(cfg)
        assert grid.cell(90, 90) == 1.0

    def test_deterministic_across_jobs(self):
        cfg = small_config(scenario=3, replicates=9)
        a = run_combo_grid(cfg, jobs=1)
        b = run_combo_grid(cfg, jobs=2)
        np.testing.assert_array_equal(a.proportions, b.proportions)


class TestPipelineStudy:
    def test_reports_cover_methods_and_targets(self):
        cfg = small_config(scenario=1, replicates=2, k=12)
        params = AnnealParams(iterations=2000, seed=cfg.seed)
        out = run_pipeline_study(cfg, anneal=params, b_boot=3, methods=("none", "ls"))
        assert set(out) == {"none", "ls"}
        spec = cfg.scenario_spec()
        for rep in out.values():
            assert len(rep.term_recovery) == len(spec.dnf)
            assert all(0.0 <= f <= 1.0 for f in rep.term_recovery.values())
            assert all(0.0 <= f <= 1.0 for f in rep.variable_recovery.values())
            assert rep.wall_time > 0.0
        assert out["none"].kept_truth == 1.0

    def test_dropped_truth_variables_cannot_be_recovered(self):
        cfg = small_config(scenario=1, replicates=1, k=5)
        params = AnnealParams(iterations=2000, seed=cfg.seed)
        out = run_pipeline_study(cfg, anneal=params, b_boot=3, methods=("cor",))
        # reconstruct the deterministic reduction of the single replicate
        spec = cfg.scenario_spec()
        ds = generate(spec, seed=replicate_seed(cfg.seed, 0))
        kept = set(
            select(ds, SelectionSpec(criterion="cor", k=5)).indices.tolist()
        )
        report = out["cor"]
        for v, freq in report.variable_recovery.items():
            if v not in kept:
                assert freq == 0.0
        for term, freq in report.term_recovery.items():
            if any(v not in kept for v, _ in term):
                assert freq == 0.0

    def test_deterministic(self):
        cfg = small_config(scenario=1, replicates=1, k=8)
        params = AnnealParams(iterations=1500, seed=3)
        a = run_pipeline_study(cfg, anneal=params, b_boot=2, methods=("ls",))
        b = run_pipeline_study(cfg, anneal=params, b_boot=2, methods=("ls",))
        assert a["ls"].term_recovery == b["ls"].term_recovery
        assert a["ls"].variable_recovery == b["ls"].variable_recovery

    def test_preserving_reduction_recovers_all_main_effects(self):
        # wide data with enough observations that the in-sample-minimal
        # perfect trees coincide with the planted rule; the chain walks the
        # zero-error plateau to shed redundant leaves (slow test, ~30 s)
        cfg = ExperimentConfig(scenario=1, n=300, p=400, replicates=3, k=40, seed=31)
        params = AnnealParams(iterations=60_000, seed=31, stop_when_perfect=False)
        out = run_pipeline_study(cfg, anneal=params, b_boot=4, methods=("ls",))
        rep = out["ls"]
        assert rep.kept_truth == 1.0
        found_all_per_run = [f for f in rep.term_found.values()]
        assert np.mean([f > 0 for f in found_all_per_run]) >= 0.8
        # every single main effect surfaced in every run here
        assert all(f > 0 for f in rep.term_found.values())

    def test_reduced_fits_take_less_wall_time(self):
        # equal iteration budgets: the reduced search space lets chains
        # reach zero error and stop early while full-p chains run on
        cfg = ExperimentConfig(scenario=1, n=600, p=1000, replicates=1, k=246, seed=17)
        params = AnnealParams(iterations=60_000, seed=17)
        out = run_pipeline_study(cfg, anneal=params, b_boot=2, methods=("none", "ls"))
        assert out["ls"].wall_time < out["none"].wall_time


class TestWriters:
    def test_files_written_with_headers_and_reproducible(self, tmp_path):
        cfg = small_config(replicates=6, output_dir=str(tmp_path / "out"))
        run_success_study(cfg)
        path = tmp_path / "out" / "success_histograms.tsv"
        text = path.read_text()
        assert text.startswith("# levsel")
        assert "# seed = 42" in text
        assert "criterion\tcaptured\tcount" in text
        run_success_study(cfg)
        assert path.read_text() == text

    def test_all_studies_write_their_tables(self, tmp_path):
        cfg = small_config(scenario=3, replicates=4, output_dir=str(tmp_path / "s"))
        run_density_study(cfg)
        run_combo_grid(cfg)
        run_pipeline_study(
            cfg, anneal=AnnealParams(iterations=500, seed=1), b_boot=2, methods=("ls",)
        )
        for name in (
            "density_samples.tsv",
            "density_curves.tsv",
            "combo_grid.tsv",
            "pipeline_recovery.tsv",
        ):
            assert (tmp_path / "s" / name).exists(), name
