"""Serialization and command-line tests."""

import dataclasses
import json
import math

import pytest

from safesteer.cli import CLIError, main, parse_args
from safesteer.engine import compute_metrics, run
from safesteer.io import (CSV_COLUMNS, config_from_dict, config_to_dict,
                          load_config, metrics_to_dict, read_csv, save_config,
                          write_csv)
from safesteer.qp import OPTIMAL, problem_from_dict, solve
from safesteer.world import MovingObstacle, build_scenario


class TestConfigSchema:
    def test_round_trip_all_builders(self):
        from safesteer.world import SCENARIO_IDS
        for scenario_id in SCENARIO_IDS:
            config = build_scenario(scenario_id)
            clone = config_from_dict(config_to_dict(config))
            assert config_to_dict(clone) == config_to_dict(config)

    def test_unknown_key_rejected(self):
        data = config_to_dict(build_scenario("lane_change"))
        data["lookahead_m"] = 6.0
        with pytest.raises(ValueError, match="unknown config keys"):
            config_from_dict(data)

    def test_unknown_gain_rejected(self):
        data = config_to_dict(build_scenario("lane_change"))
        data["gains"]["clf_gain3"] = 1.0
        with pytest.raises(ValueError, match="unknown gains keys"):
            config_from_dict(data)

    def test_missing_key_rejected(self):
        data = config_to_dict(build_scenario("lane_change"))
        del data["duration"]
        with pytest.raises(ValueError, match="missing config keys"):
            config_from_dict(data)

    def test_file_round_trip_exact(self, tmp_path):
        config = build_scenario("fars310")
        save_config(config, tmp_path / "s.json")
        clone = load_config(tmp_path / "s.json")
        assert config_to_dict(clone) == config_to_dict(config)


class TestTrajectoryCSV:
    def test_header_and_shape(self, tmp_path):
        config = dataclasses.replace(build_scenario("lane_change"), duration=0.5)
        log = run(config)
        write_csv(log, tmp_path / "t.csv")
        lines = (tmp_path / "t.csv").read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == len(log.records) + 1

    def test_round_trip_metrics_identical(self, tmp_path):
        for scenario_id in ("static_one", "dynamic_one", "point_multi"):
            config = build_scenario(scenario_id)
            log = run(config)
            write_csv(log, tmp_path / "t.csv")
            parsed = read_csv(tmp_path / "t.csv", config)
            m_direct = metrics_to_dict(compute_metrics(log))
            m_parsed = metrics_to_dict(compute_metrics(parsed))
            for key, val in m_direct.items():
                other = m_parsed[key]
                if isinstance(val, float) and math.isnan(val):
                    assert math.isnan(other), (scenario_id, key)
                elif isinstance(val, float) and math.isfinite(val):
                    assert abs(other - val) <= 1e-12, (scenario_id, key)
                else:
                    assert other == val, (scenario_id, key)

    def test_rerun_byte_identical(self, tmp_path):
        config = build_scenario("fars220")
        write_csv(run(config), tmp_path / "a.csv")
        write_csv(run(config), tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


class TestParseArgs:
    def test_run_scenario(self):
        req = parse_args(["run", "--scenario", "fars220", "--out", "o/"])
        assert req.scenario == "fars220"
        assert req.out_dir == "o/"
        assert req.csv and req.svg and req.metrics
        assert not req.dump_qp and not req.emit_config

    def test_run_requires_source(self):
        with pytest.raises(CLIError):
            parse_args(["run"])

    def test_unknown_flag(self):
        with pytest.raises(CLIError):
            parse_args(["run", "--scenario", "fars220", "--frobnicate"])

    def test_config_with_dt_override(self):
        req = parse_args(["run", "--config", "s.json", "--dt", "0.005"])
        assert req.config_path == "s.json"
        assert req.dt == 0.005

    def test_list_command(self):
        assert parse_args(["list"]) is None

    def test_main_maps_usage_errors_to_exit_1(self, capsys):
        assert main(["run"]) == 1
        assert "error" in capsys.readouterr().err


class TestExecute:
    def test_lane_change_writes_artifacts_exit_0(self, tmp_path):
        out = tmp_path / "o"
        code = main(["run", "--scenario", "lane_change", "--out", str(out),
                     "--duration", "2.0"])
        assert code == 0
        assert (out / "trajectory.csv").exists()
        assert (out / "metrics.json").exists()
        assert (out / "scenario.svg").exists()
        metrics = json.loads((out / "metrics.json").read_text())
        assert set(metrics) == {"min_clearance", "min_h", "collision",
                                "max_lateral_error", "infeasible_steps",
                                "goal_reached", "return_time"}
        assert metrics["collision"] is False

    def test_unknown_scenario_exit_1(self, tmp_path):
        assert main(["run", "--scenario", "nope", "--out", str(tmp_path)]) == 1

    def test_bad_config_exit_1(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"mode": "PATH_TRACKING"}))
        assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 1

    def test_trapped_start_exits_nonzero(self, tmp_path):
        # vehicle spawned inside the effective radius, dead ahead of the center
        config = dataclasses.replace(
            build_scenario("lane_change"), name="trapped", duration=1.5,
            obstacles=(MovingObstacle(radius=6.0, trajectory=((0.0, 5.0, 0.0),)),))
        save_config(config, tmp_path / "trapped.json")
        code = main(["run", "--config", str(tmp_path / "trapped.json"),
                     "--out", str(tmp_path / "o"), "--no-svg"])
        assert code in (2, 3)

    def test_emit_config_matches_builder_output(self, tmp_path):
        out = tmp_path / "o"
        assert main(["run", "--scenario", "fars310", "--out", str(out),
                     "--emit-config", "--no-svg", "--no-csv",
                     "--no-metrics"]) == 0
        emitted = json.loads((out / "scenario.json").read_text())
        assert emitted == config_to_dict(build_scenario("fars310"))

    def test_emit_config_round_trip_bit_identical(self, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert main(["run", "--scenario", "fars310", "--out", str(out_a),
                     "--emit-config"]) == 0
        assert main(["run", "--config", str(out_a / "scenario.json"),
                     "--out", str(out_b)]) == 0
        assert ((out_a / "trajectory.csv").read_bytes()
                == (out_b / "trajectory.csv").read_bytes())

    def test_metrics_json_matches_recomputation_from_csv(self, tmp_path):
        out = tmp_path / "o"
        assert main(["run", "--scenario", "dynamic_one", "--out", str(out),
                     "--emit-config"]) == 0
        config = load_config(out / "scenario.json")
        parsed = read_csv(out / "trajectory.csv", config)
        recomputed = metrics_to_dict(compute_metrics(parsed))
        on_disk = json.loads((out / "metrics.json").read_text())
        for key, val in on_disk.items():
            if isinstance(val, float):
                assert abs(recomputed[key] - val) <= 1e-12
            else:
                assert recomputed[key] == val

    def test_dump_qp_replays(self, tmp_path):
        out = tmp_path / "o"
        assert main(["run", "--scenario", "lane_change", "--out", str(out),
                     "--duration", "1.0", "--dump-qp", "--no-svg"]) == 0
        config = build_scenario("lane_change")
        config = dataclasses.replace(config, duration=1.0)
        log = run(config)
        lines = (out / "qp_dump.jsonl").read_text().splitlines()
        assert len(lines) == len(log.records)
        for line, rec in zip(lines, log.records):
            problem = problem_from_dict(json.loads(line))
            sol = solve(problem)
            assert sol.status == OPTIMAL == rec.qp_status
            assert sol.u_star == rec.delta_f

    def test_dt_override_lands_in_emitted_config(self, tmp_path):
        out = tmp_path / "o"
        assert main(["run", "--scenario", "lane_change", "--out", str(out),
                     "--dt", "0.02", "--duration", "1.0", "--emit-config",
                     "--no-svg", "--no-csv", "--no-metrics"]) == 0
        assert not (out / "trajectory.csv").exists()
        assert not (out / "metrics.json").exists()
        config = load_config(out / "scenario.json")
        assert config.dt == 0.02 and config.duration == 1.0
