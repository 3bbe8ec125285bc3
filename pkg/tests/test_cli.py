import json

import pytest

from psifw.cli import main

WORKED_CONFIG = {
    "n": 6,
    "B": 10,
    "classes": [
        {"S": [1, 2, 3, 4, 5, 6], "i": 2, "j": 4},
        {"S": [1, 3, 4, 6], "i": 3, "j": 1},
        {"S": [1, 2, 4, 5, 6], "i": 5, "j": 4},
    ],
}

TREE_DOC = {
    "n": 6,
    "edges": [
        {"split": [2, 3], "length": "180"},
        {"split": [2, 3, 6], "length": "19"},
        {"split": [2, 3, 5, 6], "length": "1"},
    ],
}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(args):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return main(args)


def test_firework_command(tmp_path):
    cfg = write(tmp_path, "fw.json", WORKED_CONFIG)
    out = str(tmp_path / "report.json")
    assert run(["firework", "--config", cfg, "--out", out]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert [(lvl["r"], len(lvl["points"])) for lvl in report["levels"]] == [
        (0, 1),
        (1, 7),
        (2, 8),
        (3, 4),
    ]
    assert report["checks"]["injectivity"] and report["checks"]["membership"]
    assert all(s["coeff"] == 1 for s in report["cycle"])
    point = report["levels"][1]["points"][0]
    assert point["tree"]["edges"][0]["length"] == "200"
    assert point["minProfiles"][0]["argmins"] == [1, 3]


def test_firework_oracle_and_max_level(tmp_path):
    cfg = write(tmp_path, "fw.json", WORKED_CONFIG)
    out = str(tmp_path / "report.json")
    assert run(
        ["firework", "--config", cfg, "--out", out, "--oracle", "--max-level", "2"]
    ) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert len(report["levels"]) == 3
    assert all(o["agrees"] for o in report["checks"]["oracle"])


def test_firework_dot_export(tmp_path):
    cfg = write(tmp_path, "fw.json", WORKED_CONFIG)
    out = str(tmp_path / "report.json")
    dot_dir = tmp_path / "dot"
    assert run(["firework", "--config", cfg, "--out", out, "--dot", str(dot_dir)]) == 0
    files = sorted(p.name for p in dot_dir.iterdir())
    assert len(files) == 1 + 7 + 8 + 4
    body = (dot_dir / files[-1]).read_text()
    assert "graph" in body and "label=" in body


def test_firework_deterministic_output(tmp_path, monkeypatch):
    cfg = write(tmp_path, "fw.json", WORKED_CONFIG)
    out1, out2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    monkeypatch.setenv("PSIFW_THREADS", "1")
    assert run(["firework", "--config", cfg, "--out", out1]) == 0
    monkeypatch.setenv("PSIFW_THREADS", "4")
    assert run(["firework", "--config", cfg, "--out", out2]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_base_flag_overrides(tmp_path):
    cfg_doc = dict(WORKED_CONFIG)
    cfg_doc.pop("B")
    cfg = write(tmp_path, "fw.json", cfg_doc)
    out = str(tmp_path / "report.json")
    assert run(["firework", "--config", cfg, "--out", out, "--base", "10"]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["levels"][1]["points"][0]["tree"]["edges"][0]["length"] == "200"


def test_kapranov_command(tmp_path):
    cfg = write(
        tmp_path,
        "kap.json",
        {"tree": TREE_DOC, "spec": {"S": [1, 3, 4, 6], "i": 3, "j": 1, "q": 2, "B": 10}},
    )
    out = str(tmp_path / "out.json")
    assert run(["kapranov", "--config", cfg, "--out", out]) == 0
    doc = json.loads((tmp_path / "out.json").read_text())
    assert doc["coordinates"] == {"4": "20", "6": "0"}
    assert doc["minProfile"]["argmins"] == [4, 6]
    assert doc["inHypersurface"] is True


def test_membership_command(tmp_path):
    cfg = write(
        tmp_path,
        "mem.json",
        {"tree": TREE_DOC, "B": 10, "classes": WORKED_CONFIG["classes"]},
    )
    out = str(tmp_path / "out.json")
    assert run(["membership", "--config", cfg, "--out", out]) == 0
    doc = json.loads((tmp_path / "out.json").read_text())
    assert doc["allMember"] is True
    assert [c["exactlyTwice"] for c in doc["classes"]] == [True, True, True]


def test_mult_command(tmp_path):
    cfg = write(
        tmp_path,
        "mult.json",
        {
            "starSigma": {
                "dim": 3,
                "cones": [
                    {"gens": [[1, 0, 0], [0, 1, 0]], "weight": 1},
                    {"gens": [[1, 0, 0], [0, 0, 1]], "weight": 1},
                    {"gens": [[0, 1, 0], [0, 0, 1]], "weight": 1},
                    {"gens": [[1, 0, 0], [-1, -1, -1]], "weight": 1},
                    {"gens": [[0, 1, 0], [-1, -1, -1]], "weight": 1},
                    {"gens": [[0, 0, 1], [-1, -1, -1]], "weight": 1},
                ],
            },
            "sigma": [[1, 0, 0]],
            "starTropX": {
                "dim": 3,
                "cones": [
                    {"gens": [[-1, 2, 0]], "weight": 1},
                    {"gens": [[-1, 0, 2]], "weight": 1},
                    {"gens": [[1, -1, -1]], "weight": 2},
                ],
            },
        },
    )
    out = str(tmp_path / "out.json")
    assert run(["mult", "--config", cfg, "--out", out]) == 0
    assert json.loads((tmp_path / "out.json").read_text()) == {"multiplicity": 2}


def test_tropcurve_command(tmp_path):
    cfg = write(
        tmp_path,
        "curve.json",
        {
            "terms": [
                {"u": [3, 0], "val": 0},
                {"u": [1, 1], "val": -2},
                {"u": [1, 0], "val": 1},
                {"u": [0, 1], "val": 1},
                {"u": [0, 0], "val": 2},
            ],
            "rays": [[1, 0], [0, 1], [-1, -1]],
        },
    )
    out = str(tmp_path / "out.json")
    assert run(["tropcurve", "--config", cfg, "--out", out]) == 0
    doc = json.loads((tmp_path / "out.json").read_text())
    assert doc["crossings"] == [1, 1, 1]
    assert doc["balanced"] is True


def test_checks_command(capsys):
    assert run(["checks"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["all_pass"] is True


def test_parse_error_missing_config():
    assert run(["firework"]) == 2


def test_parse_error_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(["firework", "--config", str(path)]) == 2


def test_parse_error_bad_schema(tmp_path):
    cfg = write(tmp_path, "fw.json", {"n": 6, "classes": [{"S": [1, 2], "i": 1, "j": 2}]})
    assert run(["firework", "--config", cfg]) == 2


def test_assertion_failure_exit_code(tmp_path, capsys):
    # Facet disagreement on corrupted weights surfaces as exit 3 with a record.
    cfg = write(
        tmp_path,
        "mult.json",
        {
            "starSigma": {
                "dim": 3,
                "cones": [
                    {"gens": [[1, 0, 0], [0, 1, 0]], "weight": 1},
                    {"gens": [[1, 0, 0], [0, 0, 1]], "weight": 1},
                    {"gens": [[1, 0, 0], [-1, -1, -1]], "weight": 1},
                ],
            },
            "sigma": [[1, 0, 0]],
            "starTropX": {
                "dim": 3,
                "cones": [
                    {"gens": [[-1, 2, 0]], "weight": 1},
                    {"gens": [[-1, 0, 2]], "weight": 1},
                    {"gens": [[1, -1, -1]], "weight": 1},
                ],
            },
        },
    )
    assert run(["mult", "--config", cfg]) == 3
    record = json.loads(capsys.readouterr().out)
    assert record["failure"]["type"] == "InconsistencyError"


def test_unknown_command_exits_two():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2
