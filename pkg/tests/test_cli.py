import json

import pytest

from regulus.cli import main
from regulus.graph import complete, cycle, g6_decode, g6_encode, lex_product, path
from regulus.regcheck import in_req


def _rows(text):
    return [int(line.split("\t")[1]) for line in text.splitlines()]


def test_generate_tables(capsys):
    assert main(["generate", "4", "--mode", "exact", "--nmax", "8"]) == 0
    assert _rows(capsys.readouterr().out) == [1, 2, 4, 7, 12, 12, 2, 0]
    assert main(["generate", "4", "--mode", "atleast", "--nmax", "7"]) == 0
    out = capsys.readouterr().out
    assert _rows(out) == [1, 2, 4, 7, 11, 10, 0]
    assert out.splitlines()[0] == "1\t1"


def test_generate_options_agree(capsys):
    main(["generate", "5", "--nmax", "7"])
    want = capsys.readouterr().out
    main(["generate", "5", "--nmax", "7", "--no-maxdeg", "--no-complement", "--split-level", "3"])
    assert capsys.readouterr().out == want


def test_generate_emit(tmp_path, capsys):
    f = tmp_path / "r46.g6"
    assert main(["generate", "4", "--nmax", "6", "--emit", str(f), "--edges", str(tmp_path / "e.tsv")]) == 0
    lines = f.read_text().split()
    assert len(lines) == 12 and all(in_req(g6_decode(x), 4) for x in lines)
    meta = json.loads((tmp_path / "r46.g6.json").read_text())
    assert meta == {"k": 4, "mode": "exact", "order": 6, "count": 12, "complete": True}
    hist = (tmp_path / "e.tsv").read_text().splitlines()
    assert sum(int(r.split("\t")[2]) for r in hist if r.startswith("6\t")) == 12


def test_generate_bad_input(capsys):
    assert main(["generate", "2", "--nmax", "5"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["generate", "4", "--mode", "sideways", "--nmax", "5"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["generate", "4"])
    assert info.value.code == 1
    assert main(["generate", "4", "--nmax", "70"]) == 1


def test_generate_budget_exit(capsys):
    code = main(["generate", "5", "--nmax", "10", "--budget", "500", "--split-level", "6"])
    assert code == 2
    assert "incomplete" in capsys.readouterr().out


def test_check(tmp_path, capsys):
    f = tmp_path / "in.g6"
    f.write_text(g6_encode(lex_product(path(4), path(4))) + "\n")
    assert main(["check", str(f), "5", "--mode", "atleast"]) == 0
    assert capsys.readouterr().out.startswith("IN\t")

    f.write_text(g6_encode(complete(5)) + "\n" + g6_encode(cycle(5)) + "\n")
    assert main(["check", str(f), "5"]) == 1
    out = capsys.readouterr().out.splitlines()
    assert out[0] == f"OUT\t{g6_encode(complete(5))}\t1 2 3 4 5"
    assert out[1].startswith("OUT")  # C5 is itself 2-regular

    f.write_text("")
    assert main(["check", str(f), "5"]) == 0
    assert capsys.readouterr().out == ""


def test_check_malformed(tmp_path, capsys):
    f = tmp_path / "bad.g6"
    f.write_text(g6_encode(cycle(5)) + "\nD??\x01\n")
    assert main(["check", str(f), "4"]) == 1
    err = capsys.readouterr().err
    assert f"{f}:2" in err
    assert main(["check", str(tmp_path / "missing.g6"), "4"]) == 1


def test_construct(tmp_path, capsys):
    assert main(["construct", "gp", "5", "--verify-budget", "1e7"]) == 0
    head, g6, *_ = capsys.readouterr().out.splitlines()
    assert "order=18" in head and head.endswith("verified: true")
    assert g6_decode(g6).order == 18

    assert main(["construct", "qp", "2", "3", "--out", str(tmp_path / "q.g6")]) == 0
    head, g6 = (tmp_path / "q.g6").read_text().splitlines()
    assert "order=12" in head and "bound=13" in head and g6_decode(g6).order == 12

    assert main(["construct", "gp", "4"]) == 1
    assert main(["construct", "qp", "2"]) == 1
    assert main(["construct", "qp", "3", "5", "--verify-budget", "1000"]) == 2
    assert "verified: infeasible" in capsys.readouterr().out


def test_bound(capsys):
    assert main(["bound", "--alpha", "0.191", "--eps", "0.0001"]) == 0
    line = capsys.readouterr().out.splitlines()[0]
    assert abs(float(line.split("\t")[1]) - 0.99986) < 2e-4
    assert main(["bound", "--uv-steps", "200", "--cube-k", "4", "--trials", "1e4"]) == 0
    out = dict(x.split("\t") for x in capsys.readouterr().out.splitlines())
    assert float(out["uv_max"]) <= 0 and out["cube_holds"] == "True"
    assert main(["bound", "--eps", "0.5"]) == 1


def test_sample(tmp_path, capsys):
    args = ["sample", "--n", "20", "--k", "5", "--alpha", "0.191", "--samples", "100", "--seed", "7"]
    assert main(args + ["--csv", str(tmp_path / "s.csv")]) == 0
    first = capsys.readouterr().out
    frac = float(first.split("\t")[1])
    assert 0 <= frac <= 1
    assert len((tmp_path / "s.csv").read_text().splitlines()) == 101
    main(args)
    assert capsys.readouterr().out == first
    assert main(["sample", "--n", "20", "--k", "5", "--alpha", "0.7"]) == 1


def test_search(tmp_path, capsys):
    out = tmp_path / "pool.g6"
    assert main(["search", "5", "--mode", "atleast", "--budget", "1e5", "--seed", "1",
                 "--out", str(out)]) == 0
    meta = json.loads(capsys.readouterr().out)
    assert meta["mode"] == "at_least" and meta["order"] >= 8
    assert meta["count"] == len(out.read_text().split())
    assert main(["search", "2"]) == 1
