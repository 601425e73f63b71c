"""CLI: eval values, experiment runs, exit codes, config round-trips."""

import json
import math

import pytest

from rbl.cli import (
    ExperimentConfig,
    format_complex,
    main,
    parse_complex,
    parse_domain,
    parse_weight,
    thread_budget,
)
from rbl.errors import ConfigError

PI = math.pi


class TestParsers:
    def test_parse_complex(self):
        assert parse_complex("0.5") == 0.5
        assert parse_complex("0.5,-0.25") == complex(0.5, -0.25)
        with pytest.raises(ConfigError):
            parse_complex("1,2,3")

    def test_parse_domain(self):
        d = parse_domain("disc")
        assert d.radius == 1.0 and not d.holes
        d2 = parse_domain("0,0,2", ["0.5,0,0.3"])
        assert d2.radius == 2.0 and len(d2.holes) == 1

    def test_parse_weight(self):
        assert parse_weight(None) is None
        assert parse_weight("const:2.5").constant_value == 2.5
        w = parse_weight("rpow:0,0,2")
        assert w.power_exponent == 2.0
        assert parse_weight("cont:two-plus-re").continuity_value == 3.0
        with pytest.raises(ConfigError):
            parse_weight("cont:unknown-name")
        with pytest.raises(ConfigError):
            parse_weight("gauss:1")

    def test_format_complex(self):
        assert format_complex(2 / PI + 0j).startswith("0.636619772368")
        assert format_complex(1 + 2j) == "1+2i"
        assert format_complex(1 - 0.5j) == "1-0.5i"

    def test_thread_budget(self, monkeypatch):
        monkeypatch.delenv("RBL_THREADS", raising=False)
        assert thread_budget() == 1
        monkeypatch.setenv("RBL_THREADS", "4")
        assert thread_budget() == 4
        monkeypatch.setenv("RBL_THREADS", "zebra")
        with pytest.raises(ConfigError):
            thread_budget()


class TestEval:
    def test_disc_diagonal_n2(self, capsys):
        code = main(["eval", "--domain", "disc", "--n", "2", "--z", "0",
                     "--zeta", "0", "--deriv", "n-1"])
        out = capsys.readouterr().out.strip()
        assert code == 0
        assert out == f"{2 / PI:.12g}"

    def test_gram_route_annulus(self, capsys):
        code = main(["eval", "--domain", "0,0,1", "--holes", "0,0,0.5",
                     "--n", "1", "--z", "0.7", "--zeta", "0.7"])
        assert code == 0
        val = float(capsys.readouterr().out.strip())
        from oracles import annulus_kernel_series

        assert val == pytest.approx(annulus_kernel_series(0.7, 0.7, 0.5, 18).real, rel=1e-6)

    def test_bad_flags_exit_2(self):
        assert main(["eval", "--domain", "triangle"]) == 2


class TestExperimentCommand:
    def test_boundary_disc_passes(self, tmp_path, capsys):
        cfg = {"experiment": "boundary", "domain": "disc", "n": 1, "anchor": [1.0, 0.0]}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        out_base = tmp_path / "report"
        code = main(["experiment", "boundary", "--config", str(path),
                     "--out", str(out_base)])
        assert code == 0
        assert (tmp_path / "report.csv").exists()
        assert (tmp_path / "report.json").exists()

    def test_under_resolved_run_exits_1(self, tmp_path):
        cfg = {
            "experiment": "boundary",
            "domain": "disc",
            "holes": [[0.0, 0.0, 0.3]],
            "n": 1,
            "anchor": [0.3, 0.0],
            "basis_cap": 8,
        }
        path = tmp_path / "ill.json"
        path.write_text(json.dumps(cfg))
        assert main(["experiment", "boundary", "--config", str(path)]) == 1

    def test_config_errors_exit_2(self, tmp_path):
        assert main(["experiment", "boundary", "--config", "/does/not/exist.json"]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["experiment", "boundary", "--config", str(bad)]) == 2
        wrong_kind = tmp_path / "kind.json"
        wrong_kind.write_text(json.dumps({"experiment": "scaling"}))
        assert main(["experiment", "boundary", "--config", str(wrong_kind)]) == 2
        unknown_key = tmp_path / "extra.json"
        unknown_key.write_text(json.dumps({"experiment": "scaling", "wibble": 1}))
        assert main(["experiment", "scaling", "--config", str(unknown_key)]) == 2

    def test_numerical_error_exits_3(self, tmp_path):
        # holes closer than the decomposition gap
        cfg = {
            "experiment": "boundary",
            "domain": "disc",
            "holes": [[0.0, 0.0, 0.3], [0.6 + 1e-8, 0.0, 0.3]],
            "n": 1,
            "anchor": [0.3, 0.0],
        }
        path = tmp_path / "gap.json"
        path.write_text(json.dumps(cfg))
        assert main(["experiment", "boundary", "--config", str(path)]) == 3

    def test_deterministic_csv(self, tmp_path):
        cfg = {"experiment": "scaling", "n": 1, "out": None}
        path = tmp_path / "s.json"
        path.write_text(json.dumps(cfg))
        outs = []
        for name in ("r1", "r2"):
            code = main(["experiment", "scaling", "--config", str(path),
                         "--out", str(tmp_path / name)])
            assert code == 0
            outs.append((tmp_path / f"{name}.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_svg_output(self, tmp_path):
        cfg = {"experiment": "ramadanov-inc", "n": 1}
        path = tmp_path / "r.json"
        path.write_text(json.dumps(cfg))
        code = main(["experiment", "ramadanov-inc", "--config", str(path),
                     "--out", str(tmp_path / "ri"), "--format", "svg"])
        assert code == 0
        svg = (tmp_path / "ri.svg").read_text()
        assert svg.count("<polyline") == 1


class TestConfigRoundTrip:
    def test_serialize_parse_idempotent(self):
        cfg = ExperimentConfig(
            experiment="boundary",
            domain="disc",
            holes=[[0.0, 0.0, 0.3]],
            weight="cont:two-plus-re",
            n=2,
            anchor=[1.0, 0.0],
        )
        text = cfg.to_json()
        back = ExperimentConfig.from_json(text)
        assert back == cfg
        assert ExperimentConfig.from_json(back.to_json()) == back

    def test_validation(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(experiment="nope")
        with pytest.raises(ConfigError):
            ExperimentConfig(experiment="boundary", n=0)
        with pytest.raises(ConfigError):
            ExperimentConfig(experiment="boundary", basis_cap=4)

    def test_version_command(self, capsys):
        assert main(["version"]) == 0
        assert capsys.readouterr().out.strip()

    def test_check_command(self, capsys):
        assert main(["check"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out
