import json

import pytest

from selfsim import __version__
from selfsim.cli import main

INTRANSITIVE = "degree: 2\ngen a = perm () | e, e\n"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out) if out else None, err


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0
    assert "grigorchuk" in out and "gupta-sidki" in out


def test_catalog_json_envelope(capsys):
    code, doc, _ = run_json(capsys, "catalog", "list")
    assert code == 0
    assert doc["tool_version"] == __version__
    assert doc["group"] is None and doc["level"] is None
    assert "seed" in doc
    assert {g["key"] for g in doc["groups"]} == {
        "grigorchuk", "grigorchuk-tilde", "gamma", "gamma-bar", "gupta-sidki"}


def test_act(capsys):
    code, out, _ = run(capsys, "act", "--group", "grigorchuk",
                       "--word", "a", "--vertex", "12")
    assert code == 0
    assert out.strip() == "22"


def test_act_json(capsys):
    code, doc, _ = run_json(capsys, "act", "--group", "grigorchuk",
                            "--word", "a", "--vertex", "12")
    assert code == 0
    assert doc["image"] == "22"
    assert doc["group"] == "grigorchuk"


def test_section(capsys):
    code, out, _ = run(capsys, "section", "--group", "grigorchuk",
                       "--word", "b", "--vertex", "2")
    assert code == 0
    assert out.strip() == "c"


def test_order(capsys):
    code, out, _ = run(capsys, "order", "--group", "grigorchuk",
                       "--word", "a", "--level", "3")
    assert code == 0
    assert out.strip() == "2"


def test_order_cap_exceeded(capsys):
    code, _, err = run(capsys, "order", "--group", "grigorchuk",
                       "--word", "a b", "--level", "25")
    assert code == 2
    assert "cap" in err


def test_portrait_dot(capsys):
    code, out, _ = run(capsys, "portrait", "--group", "grigorchuk",
                       "--word", "d", "--depth", "1", "--dot")
    assert code == 0
    assert out.startswith("digraph")
    assert "v2" in out and "v1 " not in out


def test_portrait_json(capsys):
    code, doc, _ = run_json(capsys, "portrait", "--group", "grigorchuk",
                            "--word", "d", "--depth", "1")
    assert code == 0
    tree = doc["portrait"]
    assert tree["perm"] == "()"
    assert [c.get("word") for c in tree["children"]] == ["e", "b"]


def test_orbits_json(capsys):
    code, doc, _ = run_json(capsys, "orbits", "--group", "grigorchuk",
                            "--level", "2")
    assert code == 0
    assert doc["level"] == 2
    assert doc["base"] == "22"
    assert doc["blocks"] == [["22"], ["21"], ["11", "12"]]


def test_orbits_human(capsys):
    code, out, _ = run(capsys, "orbits", "--group", "grigorchuk", "--level", "2")
    assert code == 0
    assert "3 suborbits" in out


def test_orbits_custom_ray(capsys):
    code, doc, _ = run_json(capsys, "orbits", "--group", "grigorchuk",
                            "--level", "2", "--ray", "1")
    assert code == 0
    assert doc["base"] == "11"


def test_scheme_json(capsys):
    code, doc, _ = run_json(capsys, "scheme", "--group", "grigorchuk",
                            "--level", "2")
    assert code == 0
    assert doc["rank"] == 3
    assert doc["valencies"] == [1, 1, 2]
    assert doc["commutative"] is True
    assert doc["pairing"] == [0, 1, 2]


def test_scheme_byte_stable(capsys):
    _, first, _ = run(capsys, "scheme", "--group", "gamma", "--level", "2", "--json")
    _, second, _ = run(capsys, "scheme", "--group", "gamma", "--level", "2", "--json")
    assert first == second


def test_scheme_dot(capsys):
    code, out, _ = run(capsys, "scheme", "--group", "grigorchuk",
                       "--level", "1", "--dot")
    assert code == 0
    assert out.startswith("digraph")


def test_decompose(capsys):
    code, doc, _ = run_json(capsys, "decompose", "--group", "gupta-sidki",
                            "--level", "3")
    assert code == 0
    assert doc["degrees"] == [1, 1, 1, 3, 3, 9, 9]
    assert doc["rank"] == 7
    assert doc["gelfand"] is True
    assert doc["nested_in_next"] is None


def test_decompose_nesting_and_oracle(capsys):
    code, doc, _ = run_json(capsys, "decompose", "--group", "gamma",
                            "--level", "2", "--nesting", "--oracle")
    assert code == 0
    assert doc["nested_in_next"] is True
    assert doc["oracle_degrees"] == doc["degrees"] == [1, 1, 1, 3, 3]


def test_verify_cli(capsys):
    code, out, _ = run(capsys, "verify", "--group", "grigorchuk",
                       "--level", "2", "--cases", "20")
    assert code == 0
    assert out.count("PASS") == 6
    assert "FAIL" not in out


def test_verify_json(capsys):
    code, doc, _ = run_json(capsys, "verify", "--group", "gamma",
                            "--level", "1", "--cases", "10")
    assert code == 0
    assert doc["ok"] is True
    assert len(doc["suites"]) == 6


def test_unknown_group_exits_one(capsys):
    code, _, err = run(capsys, "act", "--group", "mystery",
                       "--word", "a", "--vertex", "1")
    assert code == 1
    assert "unknown group" in err


def test_json_error_is_single_json_line(capsys):
    code, out, err = run(capsys, "act", "--group", "mystery",
                         "--word", "a", "--vertex", "1", "--json")
    assert code == 1
    assert out == ""
    lines = err.strip().splitlines()
    assert len(lines) == 1
    doc = json.loads(lines[0])
    assert doc["error"] == "UnknownGroupError"


def test_both_sources_rejected(capsys, tmp_path):
    path = tmp_path / "p.txt"
    path.write_text(INTRANSITIVE)
    code, _, err = run(capsys, "act", "--group", "grigorchuk", "--file",
                       str(path), "--word", "a", "--vertex", "1")
    assert code == 1
    assert "not both" in err


def test_missing_source_rejected(capsys):
    code, _, err = run(capsys, "act", "--word", "a", "--vertex", "1")
    assert code == 1


def test_missing_required_flag_usage_error(capsys):
    code, _, err = run(capsys, "orbits", "--group", "grigorchuk")
    assert code == 1
    assert "--level" in err


def test_bad_vertex_exits_one(capsys):
    code, _, err = run(capsys, "act", "--group", "grigorchuk",
                       "--word", "a", "--vertex", "13")
    assert code == 1


def test_file_presentation(capsys, tmp_path):
    path = tmp_path / "swap.txt"
    path.write_text("degree: 2\ngen a = perm (1 2) | e, e\n")
    code, doc, _ = run_json(capsys, "orbits", "--file", str(path), "--level", "1")
    assert code == 0
    assert doc["group"] == str(path)
    assert doc["blocks"] == [["2"], ["1"]]


def test_intransitive_exits_two(capsys, tmp_path):
    path = tmp_path / "p.txt"
    path.write_text(INTRANSITIVE)
    code, _, err = run(capsys, "orbits", "--file", str(path), "--level", "1")
    assert code == 2
    assert "not transitive" in err


def test_parse_error_exits_one(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("degree: 2\ngen a = perm (1 2) | e\n")
    code, _, err = run(capsys, "act", "--file", str(path),
                       "--word", "a", "--vertex", "1")
    assert code == 1
    assert "line 2" in err


def test_cache_round_trip(capsys, tmp_path):
    cache_dir = str(tmp_path / "cache")
    args = ("scheme", "--group", "grigorchuk", "--level", "3", "--json",
            "--cache-dir", cache_dir)
    code, first, _ = run(capsys, *args)
    assert code == 0
    files = list((tmp_path / "cache").glob("*.json"))
    assert len(files) == 1
    code, second, _ = run(capsys, *args)
    assert code == 0
    assert first == second


def test_cache_rejects_corrupt_payload(capsys, tmp_path):
    cache_dir = tmp_path / "cache"
    args = ("scheme", "--group", "grigorchuk", "--level", "2", "--json",
            "--cache-dir", str(cache_dir))
    _, first, _ = run(capsys, *args)
    path = next(cache_dir.glob("*.json"))
    doc = json.loads(path.read_text())
    doc["p"][1][2][1] += 1
    path.write_text(json.dumps(doc))
    code, second, _ = run(capsys, *args)
    assert code == 0
    assert second == first  # invalid entry ignored, recomputed and rewritten
    assert json.loads(path.read_text())["p"][1][2][1] == json.loads(first)["p"][1][2][1]


def test_cache_env_var(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SELFSIM_CACHE_DIR", str(tmp_path / "envcache"))
    code, _, _ = run_json(capsys, "decompose", "--group", "grigorchuk",
                          "--level", "2")
    assert code == 0
    assert list((tmp_path / "envcache").glob("*.json"))


def test_workers_flag_accepted(capsys):
    code, a, _ = run(capsys, "orbits", "--group", "gamma", "--level", "2",
                     "--json", "--workers", "4")
    code2, b, _ = run(capsys, "orbits", "--group", "gamma", "--level", "2",
                      "--json", "--workers", "1")
    assert code == code2 == 0
    assert a == b
