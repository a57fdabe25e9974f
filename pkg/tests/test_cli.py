"""End-to-end command-line behavior and exit codes."""

import json

import pytest

from hpda import build_grouping, format_hpda, load_hpda, mn_pda, parse_pda, save_pda
from hpda.cli import main


def test_construct_pda_golden(capsys):
    assert main(["construct-pda", "mn", "--k", "3", "--t", "1"]) == 0
    out = capsys.readouterr().out
    assert parse_pda(out) == mn_pda(3, 1)
    assert out.splitlines()[0] == "PDA 3 3 1 3"


def test_construct_pda_eq19_outer(tmp_path):
    path = tmp_path / "a.pda"
    assert main(["construct-pda", "mn", "--k", "2", "--t", "1", "--out", str(path)]) == 0
    assert parse_pda(path.read_text()) == mn_pda(2, 1)


def test_construct_pda_rejects_t_above_k(capsys):
    assert main(["construct-pda", "mn", "--k", "3", "--t", "4"]) == 2
    assert "error" in capsys.readouterr().err


def test_construct_hpda_grouping_golden(tmp_path, capsys):
    path = tmp_path / "g.hpda"
    rc = main(
        ["construct-hpda", "grouping", "--k1", "3", "--k2", "2", "--t", "4", "--out", str(path)]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "F=15 Z1=6 Z2=4 R1=2/5 R2=6/5" in out
    loaded = load_hpda(path)
    assert format_hpda(loaded) == format_hpda(build_grouping(3, 2, 4))


def test_construct_hpda_grouping_rejects_small_t(capsys):
    rc = main(["construct-hpda", "grouping", "--k1", "3", "--k2", "2", "--t", "2"])
    assert rc == 2


def test_construct_hpda_hybrid_golden(tmp_path, capsys):
    a, b = tmp_path / "a.pda", tmp_path / "b.pda"
    save_pda(mn_pda(2, 1), a)
    save_pda(mn_pda(3, 1), b)
    out = tmp_path / "h.hpda"
    rc = main(["construct-hpda", "hybrid", "--a", str(a), "--b", str(b), "--out", str(out)])
    assert rc == 0
    assert "F=6 Z1=3 Z2=2 R1=1/2 R2=1" in capsys.readouterr().out
    loaded = load_hpda(out)
    assert loaded.blocks[0].grid[0] == ("*", 4, 5)


def test_construct_hpda_hybrid_rejects_invalid_input(tmp_path, capsys):
    a = tmp_path / "a.pda"
    a.write_text("PDA 2 2 1 1\n* 1\n* 1\n")  # C1/C3 violations
    b = tmp_path / "b.pda"
    save_pda(mn_pda(3, 1), b)
    rc = main(["construct-hpda", "hybrid", "--a", str(a), "--b", str(b)])
    assert rc == 3
    assert "fails verification" in capsys.readouterr().err


def test_construct_hpda_hybrid_missing_file(tmp_path):
    b = tmp_path / "b.pda"
    save_pda(mn_pda(3, 1), b)
    assert main(["construct-hpda", "hybrid", "--a", str(tmp_path / "nope"), "--b", str(b)]) == 2


def test_verify_valid_hpda(tmp_path, capsys):
    path = tmp_path / "g.hpda"
    path.write_text(format_hpda(build_grouping(3, 2, 4)))
    assert main(["verify", str(path)]) == 0
    assert capsys.readouterr().out.startswith("valid HPDA")


def test_verify_valid_pda(tmp_path, capsys):
    path = tmp_path / "a.pda"
    save_pda(mn_pda(4, 2), path)
    assert main(["verify", str(path)]) == 0
    assert capsys.readouterr().out.startswith("valid PDA")


def test_verify_corrupted_mirror_star(tmp_path, capsys):
    text = format_hpda(build_grouping(3, 2, 4))
    lines = text.splitlines()
    # first mirror token of row 1 becomes null: B1 and B3 both break
    tokens = lines[1].split()
    tokens[0] = "-"
    lines[1] = " ".join(tokens)
    path = tmp_path / "bad.hpda"
    path.write_text("\n".join(lines) + "\n")
    assert main(["verify", str(path)]) == 1
    out = capsys.readouterr().out
    assert out.startswith("invalid")
    assert "B1" in out or "B3" in out


def test_verify_invalid_pda_lists_conditions(tmp_path, capsys):
    path = tmp_path / "bad.pda"
    path.write_text("PDA 3 3 1 3\n* 3 2\n1 * 3\n2 3 *\n")
    assert main(["verify", str(path)]) == 1
    out = capsys.readouterr().out
    assert "C2" in out or "C3" in out


def test_construct_hpda_hybrid_rejects_shifted_alphabet(tmp_path, capsys):
    from hpda import pda_shift

    a = tmp_path / "a.pda"
    save_pda(pda_shift(mn_pda(3, 1), 5), a)  # valid array, ids 6..8
    b = tmp_path / "b.pda"
    save_pda(mn_pda(2, 1), b)
    assert main(["construct-hpda", "hybrid", "--a", str(a), "--b", str(b)]) == 3
    assert "alphabet" in capsys.readouterr().err


def test_verify_parse_failure(tmp_path):
    path = tmp_path / "empty.hpda"
    path.write_text("")
    assert main(["verify", str(path)]) == 2
    path.write_text("PDA 3 3 1 3\n* 1 2\n")
    assert main(["verify", str(path)]) == 2


def test_simulate_golden(tmp_path, capsys):
    path = tmp_path / "g.hpda"
    path.write_text(format_hpda(build_grouping(3, 2, 4)))
    rc = main(["simulate", str(path), "--files", "6", "--packet-bytes", "16", "--seed", "1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "success R1=6/15 R2=18/15" in out
    assert "mirror 1: 18 packets" in out


def test_simulate_hybrid_golden(tmp_path, capsys):
    a, b = tmp_path / "a.pda", tmp_path / "b.pda"
    save_pda(mn_pda(2, 1), a)
    save_pda(mn_pda(3, 1), b)
    h = tmp_path / "h.hpda"
    assert main(["construct-hpda", "hybrid", "--a", str(a), "--b", str(b), "--out", str(h)]) == 0
    capsys.readouterr()
    assert main(["simulate", str(h), "--files", "6"]) == 0
    assert "success R1=3/6 R2=6/6" in capsys.readouterr().out


def test_simulate_explicit_demand_and_transcript(tmp_path, capsys):
    path = tmp_path / "g.hpda"
    path.write_text(format_hpda(build_grouping(3, 2, 4)))
    dump = tmp_path / "transcript.txt"
    rc = main(
        [
            "simulate", str(path), "--files", "6", "--packet-bytes", "4",
            "--demand", "6,5,4,3,2,1", "--transcript", str(dump),
        ]
    )
    assert rc == 0
    lines = dump.read_text().splitlines()
    assert len(lines) == 6 + 3 * 18
    assert lines[0].startswith("S 1 ")


def test_simulate_too_few_files(tmp_path, capsys):
    path = tmp_path / "g.hpda"
    path.write_text(format_hpda(build_grouping(3, 2, 4)))
    assert main(["simulate", str(path), "--files", "5"]) == 2


def test_compare_golden_point(capsys):
    rc = main(["compare", "--k1", "3", "--k2", "2", "--n", "6", "--t", "4", "--grid-step", "1/4"])
    assert rc == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0].split("\t") == ["scheme", "t", "m1_ratio", "m2_ratio", "r1", "r2", "f"]
    table = {line.split("\t")[0]: line.split("\t") for line in lines[1:]}
    assert table["grouping"][4] == "0.4000"
    assert table["grouping"][6] == "15"
    assert table["bound"][4] == "0.4000"
    assert table["hybrid-mn"][4] == "-"  # infeasible at these ratios
    assert "knmd-search" in table and "wwcy-search" in table


def test_compare_json_format(capsys):
    rc = main(
        ["compare", "--k1", "2", "--k2", "3", "--n", "6", "--t", "5",
         "--grid-step", "1/2", "--format", "json"]
    )
    assert rc == 0
    rows = json.loads(capsys.readouterr().out)
    hybrid = [r for r in rows if r["scheme"] == "hybrid-mn"][0]
    assert hybrid["feasible"] is True
    assert hybrid["r1"] == "1/2"
    assert hybrid["f"] == 6
    grouping = [r for r in rows if r["scheme"] == "grouping"][0]
    assert grouping["r1_value"] == pytest.approx(1 / 6)


def test_compare_env_var_sets_default_format(capsys, monkeypatch):
    monkeypatch.setenv("HPDA_FORMAT", "json")
    rc = main(["compare", "--k1", "3", "--k2", "2", "--n", "6", "--t", "", "--grid-step", "1"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out) == []


def test_compare_empty_t_list_table(capsys):
    rc = main(["compare", "--k1", "3", "--k2", "2", "--n", "6"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.splitlines() == ["scheme\tt\tm1_ratio\tm2_ratio\tr1\tr2\tf"]


def test_compare_rejects_out_of_range_t(capsys):
    assert main(["compare", "--k1", "3", "--k2", "2", "--n", "6", "--t", "2"]) == 2


def test_usage_errors_exit_2():
    assert main(["construct-pda", "mn", "--k", "3"]) == 2
    assert main(["bogus"]) == 2


def test_pipeline_construct_verify_simulate(tmp_path, capsys):
    """Full pipeline over every feasible parameter point with at most 10 users."""
    checked = 0
    for k1 in range(2, 11):
        for k2 in range(1, 11):
            k = k1 * k2
            if k > 10:
                continue
            for t in range(k2 + 1, k):
                path = tmp_path / f"{k1}-{k2}-{t}.hpda"
                rc = main(
                    ["construct-hpda", "grouping", "--k1", str(k1), "--k2", str(k2),
                     "--t", str(t), "--out", str(path)]
                )
                assert rc == 0
                assert main(["verify", str(path)]) == 0
                rc = main(["simulate", str(path), "--files", str(k), "--packet-bytes", "4"])
                assert rc == 0
                checked += 1
    capsys.readouterr()
    assert checked > 30
