import json
import re

import pytest

from btembed.cli import main
from btembed.tree import Ball, enumerate_region


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def parse_dot(text):
    labels = dict(re.findall(r'(v\d+) \[label="([^"]+)"', text))
    edges = {(labels[a], labels[b]) for a, b in re.findall(r"(v\d+) -> (v\d+);", text)}
    endpoints = {labels[v] for v in re.findall(r"(v\d+) \[[^\n]*endpoint=true", text)}
    boxes = {labels[v] for v in re.findall(r"(v\d+) \[[^\n]*shape=box", text)}
    return set(labels.values()), edges, endpoints, boxes


class TestNumbers:
    def test_formula_json(self, capsys):
        code, out = run(capsys, "numbers", "--p", "2", "--order", "nilpotent", "--level", "3", "--method", "formula")
        assert code == 0
        row = json.loads(out)
        assert row["e"] == [4, 2, 4, 2]
        assert row == {
            "p": 2,
            "order": {"kind": "nilpotent", "t": 0},
            "level": 3,
            "e": [4, 2, 4, 2],
            "method": "formula",
            "flags": [False, False, False, False],
            "stabilized": None,
        }

    def test_rational_strings(self, capsys):
        code, out = run(capsys, "numbers", "--p", "2", "--order", "split", "--t", "1", "--level", "1", "--u0", "one")
        row = json.loads(out)
        assert row["e"] == [2, 1, "3/2", "3/4"] and row["flags"] == [False, False, True, True]

    def test_all_methods(self, capsys):
        code, out = run(capsys, "numbers", "--p", "3", "--order", "split", "--t", "1", "--level", "2", "--method", "all")
        rows = json.loads(out)
        assert [r["method"] for r in rows] == ["formula", "keys", "oracle"]
        assert all(r["e"] == [5, 3, 3, 2] for r in rows)
        assert rows[2]["stabilized"] is True

    def test_table(self, capsys):
        code, out = run(capsys, "numbers", "--p", "2", "--order", "triangular", "--t", "1", "--level", "1", "--format", "table")
        lines = out.splitlines()
        assert lines[0].split("\t")[0] == "method"
        assert lines[1].split("\t")[1:5] == ["0", "0", "0", "0"]

    def test_unsupported_kind_is_computation_error(self, capsys):
        code, out = run(capsys, "numbers", "--p", "2", "--order", "eichler", "--level", "1")
        assert code == 3
        assert json.loads(out)["error"] == "UnsupportedKind"


class TestUsageErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["numbers", "--p", "4", "--order", "split", "--level", "1"],
            ["numbers", "--p", "2", "--order", "split", "--level", "-1"],
            ["chi", "--p", "2", "--r", "1"],
            ["act", "--p", "2", "--matrix", "1", "0", "0", "1", "--ball", "x", "0"],
            ["branch", "--p", "2", "--order", "nilpotent", "--format", "svg"],
        ],
    )
    def test_exit_2(self, argv, capsys):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2


def test_chi(capsys):
    assert run(capsys, "chi", "--p", "2", "--r", "4", "--u", "2", "--t", "3") == (0, "2\n")


def test_chi_domain_error(capsys):
    code, out = run(capsys, "chi", "--p", "3", "--r", "4", "--u", "1", "--t", "1")
    assert code == 3 and json.loads(out)["error"] == "DomainViolation"


class TestBranch:
    def test_nilpotent_dot(self, capsys):
        code, out = run(capsys, "branch", "--p", "2", "--order", "nilpotent", "--radius", "3", "--format", "dot")
        assert code == 0 and out.startswith("digraph")
        vertices, edges, endpoints, boxes = parse_dot(out)
        region = enumerate_region(Ball(2, 0, 0), 3)
        assert endpoints == {B.label for B in region if B.n == 0}
        assert vertices == {B.label for B in region if B.n <= 0}
        assert boxes == set()

    def test_dot_json_roundtrip(self, capsys):
        args = ["branch", "--p", "3", "--order", "eichler", "--t", "1", "--r", "2", "--radius", "3"]
        _, dot = run(capsys, *args, "--format", "dot")
        _, js = run(capsys, *args, "--format", "json")
        desc = json.loads(js)
        vertices, edges, endpoints, boxes = parse_dot(dot)
        assert vertices == {v["label"] for v in desc["vertices"]}
        assert edges == {tuple(e) for e in desc["edges"]}
        assert boxes == {v["label"] for v in desc["vertices"] if v["stem"]}
        assert boxes == {"B_0^[0]", "B_0^[-1]", "B_0^[-2]"}

    def test_table_and_figure(self, capsys, tmp_path):
        fig = tmp_path / "branch.png"
        code, out = run(capsys, "branch", "--p", "2", "--order", "split", "--t", "1", "--radius", "2", "--format", "table", "--figure", str(fig))
        assert code == 0 and fig.stat().st_size > 0
        assert out.splitlines()[0] == "label\tcenter\tn\tstem\tendpoint"

    def test_deterministic(self, capsys):
        args = ["branch", "--p", "3", "--order", "triangular", "--t", "1", "--radius", "3"]
        assert run(capsys, *args) == run(capsys, *args)


class TestAct:
    def test_ball(self, capsys):
        assert run(capsys, "act", "--p", "2", "--matrix", "1", "1", "0", "1", "--ball", "0", "1") == (0, "B_1^[1]\n")

    def test_partition_method(self, capsys):
        out = run(capsys, "act", "--p", "3", "--matrix", "0", "1", "1", "0", "--ball", "0", "1", "--method", "partition")
        assert out == (0, "B_0^[-1]\n")

    def test_end(self, capsys):
        assert run(capsys, "act", "--p", "2", "--matrix", "0", "1", "1", "0", "--end", "inf") == (0, "0\n")
        assert run(capsys, "act", "--p", "3", "--matrix", "0", "1", "1", "0", "--end", "0") == (0, "inf\n")

    def test_singular(self, capsys):
        code, out = run(capsys, "act", "--p", "2", "--matrix", "1", "2", "2", "4", "--end", "0")
        assert code == 3 and "error" in json.loads(out)


class TestCrossRatio:
    def test_value(self, capsys):
        code, out = run(capsys, "crossratio", "--p", "3", "inf", "0", "1", "4", "--precision", "5")
        data = json.loads(out)
        assert code == 0 and data["value"] == "4" and data["valuation"] == 0

    def test_repeated(self, capsys):
        code, out = run(capsys, "crossratio", "--p", "3", "0", "0", "1", "4")
        assert code == 3 and json.loads(out)["error"] == "IndistinguishableEnds"

    def test_env_precision(self, capsys, monkeypatch):
        monkeypatch.setenv("BTE_PRECISION", "7")
        _, out = run(capsys, "crossratio", "--p", "3", "inf", "0", "1", "4")
        assert json.loads(out)["precision"] == 7


class TestCrosscheck:
    def test_small_grid(self, capsys, tmp_path):
        fig = tmp_path / "grid.png"
        code, out = run(capsys, "crosscheck", "--p", "2", "--kinds", "nilpotent", "split", "--r-max", "2", "--figure", str(fig))
        assert code == 0 and fig.stat().st_size > 0
        rows = [line.split("\t") for line in out.splitlines()[1:]]
        verdicts = {(r[1], r[2], r[3]): r[9] for r in rows}
        assert verdicts[("nilpotent", "0", "2")] == "MATCH"
        assert verdicts[("split", "1", "1")] == "MATCH"
        assert verdicts[("split", "0", "1")] == "KNOWN-GAP"
        assert "MISMATCH" not in verdicts.values()

    def test_json(self, capsys):
        code, out = run(capsys, "crosscheck", "--p", "3", "--kinds", "triangular", "--r-max", "2", "--format", "json")
        cells = json.loads(out)
        assert code == 0 and len(cells) == 6
        assert all(c["verdict"] == "MATCH" for c in cells)
        assert cells[0]["oracle"]["stabilized"] is True
