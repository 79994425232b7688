"""Tests for the omega command line."""

from __future__ import annotations

import argparse
import json

import pytest

from omega_combing.cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, main, parse_target
from omega_combing.diagnostics import read_csv
from omega_combing.padic_tree import base_vertex


def _summary(path):
    return json.loads((path / "summary.json").read_text())


class TestParseTarget:
    """Targets given as x,y,a,b."""

    def test_base_vertex(self):
        q = parse_target("0.5, 1.0, 0, 0", 2)
        assert (q.plane.x, q.plane.y) == (0.5, 1.0)
        assert q.tree.u == base_vertex(2)

    def test_fraction(self):
        assert parse_target("0,1,2,3/4", 2).tree.u.height == 2

    @pytest.mark.parametrize("text", ["1,2", "a,1,0,0", "0,1,0.5,0"])
    def test_malformed(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_target(text, 2)


class TestCommands:
    """Subcommands write their tables and return exit codes."""

    def test_scene_radius_zero(self, tmp_path, capsys):
        assert main(["scene", "--radius", "0", "--out", str(tmp_path)]) == EXIT_OK
        data = json.loads((tmp_path / "scene.json").read_text())
        assert len(data["horospheres"]) == 1
        assert capsys.readouterr().out.startswith("1 horospheres")

    def test_wordproblem(self, capsys):
        assert main(["wordproblem"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "trivial"
        assert main(["wordproblem", "T", "--p", "3"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "nontrivial"

    def test_bad_prime(self):
        assert main(["wordproblem", "--p", "4"]) == EXIT_USAGE

    def test_unknown_letter(self):
        assert main(["wordproblem", "X"]) == EXIT_USAGE

    def test_dehn_lower(self, tmp_path):
        assert main(["dehn-lower", "--kmax", "2", "--out", str(tmp_path)]) == EXIT_OK
        header, rows = read_csv(tmp_path / "table.csv")
        assert header.startswith("# omega-combing ")
        assert [row["area"] for row in rows] == ["2", "10"]
        assert [row["rewriting_cost"] for row in rows] == ["4", "16"]
        assert [row["area_source"] for row in rows] == ["search", "search"]
        assert _summary(tmp_path)["passed"] is True

    def test_comb(self, tmp_path):
        assert main(["comb", "--radius", "1", "--target", "0.5,1.0,0,0", "--out", str(tmp_path)]) == EXIT_OK
        _, rows = read_csv(tmp_path / "path.csv")
        assert rows[-1]["x"] == "0.5"
        assert _summary(tmp_path)["violations"] == 0

    def test_comb_to_file(self, tmp_path):
        table = tmp_path / "p.csv"
        assert main(["comb", "--radius", "1", "--target", "0.5,1.0,0,0", "--out", str(table)]) == EXIT_OK
        _, rows = read_csv(table)
        assert rows[-1]["x"] == "0.5"
        summary = json.loads((tmp_path / "p.summary.json").read_text())
        assert summary["violations"] == 0
        assert not (tmp_path / "summary.json").exists()

    def test_scene_to_file(self, tmp_path):
        assert main(["scene", "--radius", "0", "--out", str(tmp_path / "s.json")]) == EXIT_OK
        assert len(json.loads((tmp_path / "s.json").read_text())["horospheres"]) == 1

    def test_comb_inside_horoball(self, tmp_path):
        assert main(["comb", "--radius", "1", "--target", "0,5,0,0", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_comb_bad_target(self, tmp_path):
        assert main(["comb", "--target", "1,2", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_comb_with_scene_file(self, tmp_path):
        assert main(["scene", "--radius", "1", "--out", str(tmp_path)]) == EXIT_OK
        scene = str(tmp_path / "scene.json")
        out = tmp_path / "comb"
        assert main(["comb", "--scene", scene, "--target", "0.5,3.0,2,1", "--out", str(out)]) == EXIT_OK

    def test_missing_scene_file(self, tmp_path):
        argv = ["comb", "--scene", str(tmp_path / "nope.json"), "--target", "0.5,1.0,0,0", "--out", str(tmp_path)]
        assert main(argv) == EXIT_USAGE

    def test_width_from_pairs(self, tmp_path):
        pairs = tmp_path / "pairs.json"
        pairs.write_text(json.dumps([[[0.3, 1.0, 0, 0], [0.3, 1.5, 0, 0]]]))
        out = tmp_path / "out"
        assert main(["width", "--radius", "1", "--pairs", str(pairs), "--out", str(out)]) == EXIT_OK
        _, rows = read_csv(out / "widths.csv")
        assert len(rows) == 1
        assert rows[0]["case"] == "zero-sided"
        truncation = _summary(out)["truncation"]
        assert (truncation["radius"], truncation["wider_radius"], truncation["targets"]) == (1, 2, 2)
        assert truncation["changed"] == 0

    def test_width_rerun_identical(self, tmp_path):
        common = ["width", "--radius", "1", "--n-pairs", "3", "--max-distance", "3", "--seed", "5"]
        main(common + ["--workers", "1", "--out", str(tmp_path / "a")])
        main(common + ["--workers", "3", "--out", str(tmp_path / "b")])
        assert (tmp_path / "a" / "widths.csv").read_bytes() == (tmp_path / "b" / "widths.csv").read_bytes()

    def test_lengths(self, tmp_path):
        argv = ["lengths", "--radius", "1", "--n-max", "2", "--samples", "5", "--out", str(tmp_path)]
        code = main(argv)
        _, rows = read_csv(tmp_path / "lengths.csv")
        assert [row["n"] for row in rows] == ["0", "1", "2"]
        summary = _summary(tmp_path)
        assert "deep_family" in summary
        truncation = summary["truncation"]
        assert truncation["targets"] == 1 + 5 + 5 + 2
        assert truncation["changed"] == len(truncation["changed_targets"])
        assert code == (EXIT_OK if summary["passed"] else EXIT_CHECK_FAILED)
        if truncation["changed"]:
            assert code == EXIT_CHECK_FAILED
