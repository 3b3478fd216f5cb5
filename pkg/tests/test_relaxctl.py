"""Sweep harness: configs, scheduling, engine reductions, emitters, CLI.

Uses down-scaled configs (small L, few time samples) so every path through
the engine runs in seconds; the full-scale trend checks live in
test_acceptance.py.
"""

import dataclasses
import json
import subprocess
import sys

import numpy as np
import pytest

from relaxometer.errors import ConfigError, DomainError
from relaxometer.relaxctl import (
    ExperimentConfig,
    Scenario,
    emit,
    list_scenarios,
    run_scenario,
    schedule,
)
from relaxometer.relaxctl import cli
from relaxometer.relaxctl.emit import CSV_HEADER, rows_to_csv


def small_config(scenario=Scenario.FIG1_RANDOM, **overrides):
    base = dict(
        sizes=(4, 6),
        subsystem_ratios=(0.25, 0.5),
        time_samples=10,
    )
    base.update(overrides)
    return dataclasses.replace(ExperimentConfig.default(scenario), **base)


class TestConfig:
    def test_round_trip_through_dict(self):
        cfg = ExperimentConfig.default(Scenario.FIG3_XXZ)
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    def test_round_trip_through_yaml(self, tmp_path):
        cfg = ExperimentConfig.default(Scenario.FIGS4_QUENCH)
        path = tmp_path / "cfg.yaml"
        cfg.save(path)
        assert ExperimentConfig.load(path) == cfg

    def test_defaults_cover_every_scenario(self):
        for scenario in Scenario:
            cfg = ExperimentConfig.default(scenario)
            cfg.validate()
            schedule(cfg)

    def test_unknown_scenario_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"scenario": "fig9_nonsense"})

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(
                {"scenario": "fig1_random", "typo_key": 3}
            )

    def test_missing_scenario_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"sizes": [8]})

    def test_empty_metrics_rejected(self):
        cfg = small_config(metrics=())
        with pytest.raises(ConfigError):
            cfg.validate()

    def test_unknown_metric_rejected(self):
        cfg = small_config(metrics=("hellinger",))
        with pytest.raises(ConfigError):
            cfg.validate()

    def test_ratio_out_of_range_rejected(self):
        with pytest.raises(ConfigError):
            small_config(subsystem_ratios=(0.25, 1.0)).validate()

    def test_xxz_needs_even_sizes(self):
        cfg = dataclasses.replace(
            ExperimentConfig.default(Scenario.FIG3_XXZ), sizes=(6, 9)
        )
        with pytest.raises(ConfigError):
            cfg.validate()

    def test_quench_rejects_large_blocks_and_trace(self):
        base = ExperimentConfig.default(Scenario.FIGS4_QUENCH)
        with pytest.raises(ConfigError):
            dataclasses.replace(base, subsystem_ratios=(0.75,)).validate()
        with pytest.raises(ConfigError):
            dataclasses.replace(base, metrics=("trace",)).validate()

    def test_window_arithmetic(self):
        cfg = ExperimentConfig.default(Scenario.FIG3_XXZ)
        assert cfg.window_for(8) == (32.0, 64.0)
        cfg1 = ExperimentConfig.default(Scenario.FIG1_RANDOM)
        assert cfg1.window_for(12) == (12.0, 24.0)
        override = dataclasses.replace(cfg1, window_factors=(2.0, 3.0))
        assert override.window_for(10) == (20.0, 30.0)

    def test_block_lengths_round_clip_dedupe(self):
        cfg = small_config(subsystem_ratios=(0.25, 0.26, 0.5, 0.95))
        assert cfg.block_lengths(8) == (2, 4, 7)
        tiny = small_config(subsystem_ratios=(0.01, 0.99))
        assert tiny.block_lengths(4) == (1, 3)

    def test_list_scenarios_names(self):
        names = [name for name, _ in list_scenarios()]
        assert names == [s.value for s in Scenario]


class TestSchedule:
    def test_dense_task_count(self):
        cfg = small_config(time_samples=10)
        plan = schedule(cfg)
        assert len(plan.units) == 2  # two sizes, one realization
        assert len(plan.tasks) == 2 * 10

    def test_xxz_task_count_includes_positions_and_realizations(self):
        cfg = dataclasses.replace(
            ExperimentConfig.default(Scenario.FIG3_XXZ),
            sizes=(4, 6), realizations=3, h_values=(0.0, 1.0), time_samples=5,
        )
        plan = schedule(cfg)
        assert len(plan.units) == 2 * 2 * 3
        assert len(plan.tasks) == 2 * 3 * 5 * (4 + 6)

    def test_schedule_is_deterministic(self):
        cfg = small_config()
        assert schedule(cfg).tasks == schedule(cfg).tasks

    def test_invalid_config_rejected(self):
        with pytest.raises(ConfigError):
            schedule(small_config(metrics=()))


class TestEngine:
    def test_fig1_rows_and_speed_bound(self):
        result = run_scenario(small_config(), workers=1)
        assert result.rows
        window_rows = [r for r in result.rows if r.t_or_window.startswith("[")]
        for r in window_rows:
            if r.metric == "v":
                assert 0.0 <= r.value_normalized <= 1.0 + 1e-8
        # aggregate rows exist for both sizes and both blocks
        vkeys = {(r.L, r.L_A) for r in window_rows if r.metric == "v"}
        assert vkeys == {(4, 1), (4, 2), (6, 2), (6, 3)}

    def test_product_scenario_emits_one_tag_per_state(self):
        cfg = small_config(Scenario.FIG2_PRODUCT, states=("y+", "z+"))
        result = run_scenario(cfg, workers=1)
        tags = {r.scenario for r in result.rows}
        assert tags == {"fig2_product[y+]", "fig2_product[z+]"}

    def test_xxz_scenario_averages_realizations(self):
        cfg = dataclasses.replace(
            ExperimentConfig.default(Scenario.FIG3_XXZ),
            sizes=(4,), subsystem_ratios=(0.25,), realizations=3,
            h_values=(1.0,), time_samples=5,
        )
        result = run_scenario(cfg, workers=1)
        agg = [r for r in result.rows if r.seed.endswith(":0-2")]
        per = [r for r in result.rows if not r.seed.endswith(":0-2")]
        assert len(agg) == 1 and len(per) == 3
        assert agg[0].value == pytest.approx(np.mean([r.value for r in per]))
        assert agg[0].stderr == pytest.approx(
            np.std([r.value for r in per], ddof=1) / np.sqrt(3)
        )

    def test_quench_scenario_runs_small(self):
        cfg = dataclasses.replace(
            ExperimentConfig.default(Scenario.FIGS4_QUENCH),
            sizes=(16,), subsystem_ratios=(0.25,), time_samples=8,
        )
        result = run_scenario(cfg, workers=1)
        metrics = {r.metric for r in result.rows}
        assert "D_ss.bures" in metrics and "u.bures" in metrics
        assert "D_star.bures" in metrics
        # normalized u rows respect the Gaussian speed bound
        for r in result.rows:
            if r.metric.startswith("u."):
                assert r.value >= 0.0

    def test_determinism_across_workers(self):
        """Byte-identical CSV for workers=1 and workers=4."""
        cfg = small_config(time_samples=6)
        a = rows_to_csv(run_scenario(cfg, workers=1).rows)
        b = rows_to_csv(run_scenario(cfg, workers=4).rows)
        assert a == b


@pytest.fixture(scope="module")
def result():
    return run_scenario(small_config(time_samples=6), workers=1)


class TestEmit:

    def test_csv_header_exact(self, result, tmp_path):
        (path,) = emit(result, "csv", tmp_path)
        first = open(path).readline().rstrip("\n")
        assert first == CSV_HEADER
        assert (
            CSV_HEADER
            == "scenario,L,L_A,x,t_or_window,metric,value,value_normalized,stderr,seed"
        )

    def test_csv_and_json_row_counts_match(self, result, tmp_path):
        (csv_path,) = emit(result, "csv", tmp_path / "c")
        (json_path,) = emit(result, "json", tmp_path / "j")
        n_csv = sum(1 for _ in open(csv_path)) - 1
        doc = json.load(open(json_path))
        assert n_csv == len(doc["rows"]) == len(result.rows)
        assert doc["config"] == result.config.to_dict()

    def test_float_cells_round_trip_exactly(self, result):
        text = rows_to_csv(result.rows)
        line = text.splitlines()[1]
        # the window cell is quoted because it contains a comma
        import csv as _csv

        cells = next(_csv.reader([line]))
        assert float(cells[6]) == result.rows[0].value

    def test_empty_result_rejected(self, result, tmp_path):
        empty = dataclasses.replace(result, rows=())
        with pytest.raises(DomainError):
            emit(empty, "csv", tmp_path)

    def test_unknown_format_rejected(self, result, tmp_path):
        with pytest.raises(DomainError):
            emit(result, "parquet", tmp_path)


class TestCLI:
    def run_cli(self, *argv):
        return cli.main(list(argv))

    def test_list_scenarios_exit_zero(self, capsys):
        assert self.run_cli("list-scenarios") == 0
        out = capsys.readouterr().out
        for s in Scenario:
            assert s.value in out

    def test_validate_good_config(self, tmp_path, capsys):
        path = tmp_path / "good.yaml"
        small_config().save(path)
        assert self.run_cli("validate", "--config", str(path)) == 0

    def test_validate_bad_config(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("scenario: fig1_random\nmetrics: []\n")
        assert self.run_cli("validate", "--config", str(path)) == 2

    def test_missing_config_file(self, tmp_path):
        assert self.run_cli("validate", "--config", str(tmp_path / "no.yaml")) == 2

    def test_run_writes_csv(self, tmp_path, capsys):
        path = tmp_path / "cfg.yaml"
        small_config(sizes=(4,), time_samples=5).save(path)
        out_dir = tmp_path / "out"
        assert self.run_cli("run", "--config", str(path), "--out", str(out_dir)) == 0
        text = (out_dir / "sweep.csv").read_text()
        assert text.splitlines()[0] == CSV_HEADER

    def test_run_seed_override_changes_output(self, tmp_path):
        path = tmp_path / "cfg.yaml"
        small_config(sizes=(4,), time_samples=5).save(path)
        a, b = tmp_path / "a", tmp_path / "b"
        self.run_cli("run", "--config", str(path), "--out", str(a), "--seed", "1")
        self.run_cli("run", "--config", str(path), "--out", str(b), "--seed", "2")
        assert (a / "sweep.csv").read_text() != (b / "sweep.csv").read_text()

    def test_resource_guard_exit_code(self, tmp_path):
        path = tmp_path / "big.yaml"
        small_config(sizes=(16,)).save(path)
        assert (
            self.run_cli("run", "--config", str(path), "--out", str(tmp_path / "o"))
            == 3
        )

    def test_workers_env_override(self, monkeypatch):
        cfg = small_config()
        monkeypatch.setenv(cli.WORKERS_ENV, "3")
        assert cli._resolve_workers(None, cfg) == 3
        assert cli._resolve_workers(2, cfg) == 2
        monkeypatch.setenv(cli.WORKERS_ENV, "zebra")
        with pytest.raises(ConfigError):
            cli._resolve_workers(None, cfg)

    def test_console_script_installed(self):
        out = subprocess.run(
            ["relaxometer", "list-scenarios"], capture_output=True, text=True
        )
        assert out.returncode == 0
