import json

import pytest

from unitalkit.cli import build_corpus, main
from unitalkit.fileio import read_unital, write_unital
from unitalkit.unitals import hermitian_curve, is_unital


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def strip_timings(report):
    report = dict(report)
    report.pop("timings")
    return report


def test_hermitian_command(tmp_path, capsys, F3):
    out = tmp_path / "h.txt"
    code, rep = run(["hermitian", "--p", "3", "--r", "1", "--out", str(out)], capsys)
    assert code == 0 and rep["ok"]
    assert rep["results"]["points"] == 28
    assert rep["tower"] == {"p": 3, "r": 1, "modulus": [2, 1, 1]}
    U = read_unital(out, F3)
    assert U == hermitian_curve(F3)
    assert "# certificate: is_unital=true size=28 spectrum=1:28,4:63" in out.read_text()


def test_usage_errors(capsys, tmp_path):
    assert main(["hermitian", "--p", "3", "--r", "1", "--b", "0"]) == 2
    assert main(["hermitian", "--p", "4", "--r", "1"]) == 2
    assert main(["hermitian", "--p", "3"]) == 2
    assert main(["bogus"]) == 2
    assert main(["stabilizer", "--p", "3", "--r", "1", "--unital", str(tmp_path / "missing.txt")]) == 2
    assert main(["multiplicity", "--p", "3", "--r", "1", "--case", "lemma2", "--b", "9"]) == 2


def test_bm_command(tmp_path, capsys):
    code, rep = run(["bm", "--p", "3", "--r", "1", "--alpha", "3", "--beta", "0"], capsys)
    assert code == 0 and rep["ok"]
    code, _ = run(["bm", "--p", "3", "--r", "1", "--alpha", "0", "--beta", "0"], capsys)
    assert code == 1


def test_tower_mismatch(tmp_path, capsys, F3):
    path = tmp_path / "h.txt"
    write_unital(path, hermitian_curve(F3))
    code = main(["stabilizer", "--p", "5", "--r", "1", "--unital", str(path), "--P", "0:0:1", "--Q", "0:1:0"])
    assert code == 2
    text = path.read_text().replace("modulus=2,1,1", "modulus=1,1,1")
    path.write_text(text)
    assert main(["stabilizer", "--p", "3", "--r", "1", "--unital", str(path), "--all-pairs"]) == 2


def test_stabilizer_command(tmp_path, capsys, F3):
    path = tmp_path / "h.txt"
    write_unital(path, hermitian_curve(F3))
    code, rep = run(["stabilizer", "--p", "3", "--r", "1", "--unital", str(path), "--P", "0:0:1", "--Q", "0:1:0"], capsys)
    assert code == 0
    assert rep["results"]["order"] == 8
    assert "elapsed" not in rep["results"] and "stabilizer" in rep["timings"]
    code, rep = run(["stabilizer", "--p", "3", "--r", "1", "--unital", str(path), "--all-pairs", "--max-pairs", "30"], capsys)
    assert code == 0
    assert rep["results"]["histogram"] == {"8": 30}
    assert main(["stabilizer", "--p", "3", "--r", "1", "--unital", str(path), "--P", "0:0:1", "--Q", "0:0:1"]) == 2


def test_quotient_plane_command(tmp_path, capsys):
    out = tmp_path / "pi.json"
    code, rep = run(["quotient-plane", "--p", "3", "--r", "1", "--out", str(out)], capsys)
    assert code == 0 and rep["ok"]
    assert rep["results"]["points"] == 13
    data = json.loads(out.read_text())
    assert len(data["incidence"]) == 13
    assert main(["quotient-plane", "--p", "3", "--r", "1", "--lambda", "1"]) == 2


@pytest.mark.parametrize("case,key,value", [
    ("lemma2", "multiplicity", 4),
    ("lemma3", "at_O", 4),
    ("bezout", "budget", 16),
])
def test_multiplicity_command(capsys, case, key, value):
    code, rep = run(["multiplicity", "--p", "3", "--r", "1", "--case", case], capsys)
    assert code == 0
    assert rep["results"][key] == value


def test_corpus_and_theorem(tmp_path, capsys):
    d = tmp_path / "corpus"
    code, rep = run(["corpus", "--p", "3", "--r", "1", "--out-dir", str(d), "--images", "1"], capsys)
    assert code == 0 and len(rep["results"]["files"]) == 4
    argv = ["theorem", "--p", "3", "--r", "1", "--corpus", str(d), "--max-pairs", "60"]
    code, rep = run(argv, capsys)
    assert code == 0 and rep["ok"]
    kinds = {e["kind"]: (e["full_order_pair"], e["classical"]) for e in rep["results"]["unitals"]}
    assert kinds["hermitian b=1"] == (True, True)
    assert any(k.startswith("bm") and v == (False, False) for k, v in kinds.items())
    # same inputs, same report apart from timings
    code2, rep2 = run(argv, capsys)
    assert strip_timings(rep) == strip_timings(rep2)


def test_theorem_rejects_corrupted_file(tmp_path, capsys):
    d = tmp_path / "corpus"
    main(["corpus", "--p", "3", "--r", "1", "--out-dir", str(d), "--images", "0"])
    capsys.readouterr()
    path = sorted(d.glob("*.txt"))[0]
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n")  # drop one point
    code, rep = run(["theorem", "--p", "3", "--r", "1", "--corpus", str(d), "--max-pairs", "10"], capsys)
    assert code == 1
    bad = [c for c in rep["checks"] if not c["ok"]]
    assert bad and bad[0]["name"].endswith(":is_unital")


def test_theorem_empty_corpus(tmp_path):
    assert main(["theorem", "--p", "3", "--r", "1", "--corpus", str(tmp_path)]) == 2


def test_report_file(tmp_path, capsys):
    rep = tmp_path / "r.json"
    assert main(["hermitian", "--p", "2", "--r", "2", "--report", str(rep)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(rep.read_text())["results"]["points"] == 65


def test_build_corpus(F3):
    corpus = build_corpus(F3, images=1)
    assert all(is_unital(U) for U in corpus)
    assert len(corpus) == 4
