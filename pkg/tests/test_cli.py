import json

import pytest

from fraisse_forcing import GenericStructure, Language, Structure, classes
from fraisse_forcing.classes import FraisseClass
from fraisse_forcing.cli import main


class Ternary(FraisseClass):
    name = "ternary-test"
    language = Language((("R", 3),))
    enumeration_bound = 2
    max_extension_size = 1

    def member(self, s):
        return True


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("builds")
    out = {}
    for key, args in {
        "g": ["--class", "graph", "--steps", "2000", "--seed", "0"],
        "g1": ["--class", "graph", "--steps", "2000", "--seed", "1"],
        "g2": ["--class", "graph", "--steps", "2000", "--seed", "2"],
        "tf": ["--class", "triangle-free", "--steps", "2000"],
        "lo": ["--class", "linear-order", "--steps", "500", "--ground-set", "0mod2"],
    }.items():
        path = d / f"{key}.json"
        assert main(["build", *args, "--out", str(path)]) == 0
        out[key] = path
    return out


def test_classes_listing(capsys):
    assert main(["classes"]) == 0
    text = capsys.readouterr().out
    for name in ("pure-set", "linear-order", "graph", "triangle-free", "tournament"):
        assert name in text


def test_classes_json(capsys):
    assert main(["classes", "--json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert {r["name"] for r in rows} >= {"graph", "tournament"}
    assert rows[1]["language"] == [{"name": "<", "arity": 2}]


def test_classes_empty_registry(capsys):
    assert main(["classes", "--json"], registry={}) == 0
    assert json.loads(capsys.readouterr().out) == []


@pytest.mark.parametrize("name", ["linear-order", "graph"])
def test_axioms_pass(name, capsys):
    assert main(["axioms", "--class", name, "--n", "4"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_usage_errors(capsys):
    assert main(["axioms", "--class", "no-such"]) == 2
    assert main(["build", "--class", "graph", "--bogus"]) == 2
    assert main(["build", "--class", "graph", "--ground-set", "3mod0"]) == 2
    assert main([]) == 2
    assert "unknown class" in capsys.readouterr().err


def test_build_is_byte_identical(files, tmp_path):
    again = tmp_path / "again.json"
    assert main(["build", "--class", "graph", "--steps", "2000", "--seed", "0", "--out", str(again)]) == 0
    assert again.read_bytes() == files["g"].read_bytes()
    assert files["g1"].read_bytes() != files["g2"].read_bytes()


def test_build_echo_is_replayable(tmp_path, capsys):
    out = tmp_path / "x.json"
    main(["build", "--class", "tournament", "--steps", "50", "--seed", "4", "--out", str(out)])
    echoed = json.loads(capsys.readouterr().err.split(" ", 2)[2])
    argv = ["build", "--class", echoed["class"], "--steps", str(echoed["steps"]), "--seed", str(echoed["seed"])]
    argv += [arg for g in echoed["ground_sets"] for arg in ("--ground-set", f"{g['a']}mod{g['m']}")]
    main(argv + ["--out", str(tmp_path / "y.json")])
    assert (tmp_path / "y.json").read_bytes() == out.read_bytes()


def test_build_ground_witnesses(files):
    doc = json.loads(files["lo"].read_text())
    ground = [e for e in doc["ledger"] if e["kind"] == "ground"]
    assert ground and all(e["witness"] % 2 == 0 for e in ground)


def test_build_zero_steps(capsys):
    assert main(["build", "--class", "graph", "--steps", "0"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["structure"]["universe"] == [] and doc["ledger"] == []


def test_verify_extension(files, capsys):
    assert main(["verify", str(files["g"]), "--check", "extension", "--k", "3", "--m", "10"]) == 0
    assert capsys.readouterr().out.startswith("PASS extension")


def test_verify_default_suite(files, capsys):
    assert main(["verify", str(files["lo"]), "--m", "12", "--json"]) == 0
    reports = json.loads(capsys.readouterr().out)
    assert "density" in {r["check"] for r in reports}
    assert all(r["outcome"] == "pass" for r in reports)


def test_verify_back_and_forth(files):
    argv = ["--check", "back-and-forth", "--depth", "4", "--m", "12"]
    assert main(["verify", str(files["g1"]), "--against", str(files["g2"]), *argv]) == 0
    assert main(["verify", str(files["g1"]), "--against", str(files["tf"]), "--depth", "3",
                 "--check", "back-and-forth", "--m", "12"]) == 1


def test_verify_errors(files, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["verify", str(broken)]) == 2
    assert main(["verify", str(tmp_path / "missing.json")]) == 2
    assert main(["verify", str(files["g"]), "--check", "back-and-forth"]) == 2
    assert main(["verify", str(files["g"]), "--check", "density"]) == 2


def test_export_dot(files, capsys):
    assert main(["export", str(files["g"]), "--format", "dot", "--m", "10"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("graph M {") and text.rstrip().endswith("}")
    assert "--" in text and "->" not in text


def test_export_dot_directed(files, capsys):
    assert main(["export", str(files["lo"]), "--format", "dot", "--m", "4"]) == 0
    assert capsys.readouterr().out.startswith("digraph M {")


def test_export_canonical(files, tmp_path):
    out = tmp_path / "p.json"
    assert main(["export", str(files["g"]), "--format", "canonical", "--m", "10", "--out", str(out)]) == 0
    M = GenericStructure.from_json(json.loads(files["g"].read_text()))
    assert out.read_text() == M.prefix(10).dumps() + "\n"
    assert Structure.from_json(json.loads(out.read_text())) == M.prefix(10)


def test_export_edge_list(files, capsys):
    assert main(["export", str(files["g"]), "--format", "edge-list", "--m", "5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "# universe 0 1 2 3 4"
    assert all(line.startswith("E ") for line in lines[1:])


def test_export_dot_rejects_ternary(monkeypatch, tmp_path):
    monkeypatch.setitem(classes._REGISTRY, Ternary.name, Ternary())
    path = tmp_path / "t.json"
    assert main(["build", "--class", Ternary.name, "--steps", "6", "--out", str(path)]) == 0
    assert main(["export", str(path), "--format", "dot"]) == 2
    assert main(["export", str(path), "--format", "edge-list"]) == 0
