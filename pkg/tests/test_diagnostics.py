"""Tests for provenance headers, tables and summaries."""

from __future__ import annotations

import json
import math

from omega_combing import __version__
from omega_combing.diagnostics import build_summary, provenance_header, read_csv, write_csv, write_json


class TestProvenance:
    """The comment line opening every table."""

    def test_header(self, run_config):
        header = provenance_header(run_config)
        assert header == (
            f"# omega-combing {__version__} config={run_config.config_hash()} seed={run_config.seed} p=2 B=2"
        )


class TestTables:
    """CSV tables under the provenance header."""

    def test_dict_rows(self, run_config, tmp_path):
        path = write_csv(tmp_path / "t.csv", ("n", "value", "passed"), [{"n": 1, "value": 0.1, "passed": True}], run_config)
        header, rows = read_csv(path)
        assert header == provenance_header(run_config)
        assert rows == [{"n": "1", "value": "0.1", "passed": "true"}]

    def test_tuple_rows(self, run_config, tmp_path):
        path = write_csv(tmp_path / "sub" / "t.csv", ("a", "b"), [(1, "x"), (2, "y")], run_config)
        _, rows = read_csv(path)
        assert [row["b"] for row in rows] == ["x", "y"]

    def test_float_round_trip(self, run_config, tmp_path):
        value = 1.0 / 3.0
        path = write_csv(tmp_path / "t.csv", ("v",), [(value,)], run_config)
        _, rows = read_csv(path)
        assert float(rows[0]["v"]) == value

    def test_rewrite_is_identical(self, run_config, tmp_path):
        rows = [{"n": 0, "value": math.pi, "passed": False}]
        first = write_csv(tmp_path / "a.csv", ("n", "value", "passed"), rows, run_config).read_bytes()
        second = write_csv(tmp_path / "b.csv", ("n", "value", "passed"), rows, run_config).read_bytes()
        assert first == second


class TestSummary:
    """The JSON written next to each table."""

    def test_maxima(self, run_config):
        rows = [{"a": 1, "b": 2.5, "passed": True, "case": "x"}, {"a": 3, "b": 0.5, "passed": True, "case": "y"}]
        summary = build_summary(run_config, "width", rows)
        assert summary["maxima"] == {"a": 3.0, "b": 2.5}
        assert summary["passed"] is True
        assert summary["rows"] == 2
        assert summary["config_hash"] == run_config.config_hash()

    def test_failed_row(self, run_config):
        assert build_summary(run_config, "width", [{"passed": True}, {"passed": False}])["passed"] is False

    def test_extra(self, run_config):
        assert build_summary(run_config, "lengths", [], {"C": 1.5})["C"] == 1.5

    def test_json_replaces_infinity(self, tmp_path):
        path = write_json(tmp_path / "s.json", {"x": math.inf, "y": [1.0, math.nan]})
        assert json.loads(path.read_text()) == {"x": None, "y": [1.0, None]}
