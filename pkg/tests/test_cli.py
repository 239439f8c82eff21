import json

import pytest

from welldist.cli import main
from welldist.construction import ConstructionParams, build, state_to_json
from welldist.report import BUNDLE_FILES
from welldist.run_finder import SearchBudget


@pytest.fixture()
def faithful_file(tmp_path):
    path = tmp_path / "state.json"
    assert main(["build", "--mode", "faithful", "--stages", "0", "--out", str(path)]) == 0
    return path


def test_build_and_verify(faithful_file, capsys):
    assert main(["verify", "--state", str(faithful_file), "--lemma", "2.2", "--h", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["summary"]["all_pass"] and out["checks"][0]["status"] == "pass"
    for lemma in ("pointwise", "sandwich", "liouville"):
        assert main(["verify", "--state", str(faithful_file), "--lemma", lemma]) == 0


def test_weyl(faithful_file, capsys):
    assert main(["weyl", "--state", str(faithful_file), "--N", "3", "--h", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["magnitude"] == pytest.approx(1 / 3, abs=out["total_error_bound"])


def test_find_run_lines(capsys):
    assert main(["find-run", "-k", "2", "-q", "4", "--max-prime", "100", "--all"]) == 0
    lines = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert [x["m"] for x in lines] == [5, 11, 23]
    assert set(lines[0]) == {"m", "k", "q", "a", "first_prime", "last_prime"}


def test_find_run_not_found(capsys):
    assert main(["find-run", "-k", "12", "-q", "4096", "--max-prime", "100000"]) == 0
    assert json.loads(capsys.readouterr().out)["not_found"] is True


def test_config_file_and_precedence(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# defaults\nk = 2\nq = 4\nmax-prime = 100\n")
    assert main(["--config", str(conf), "find-run"]) == 0
    assert json.loads(capsys.readouterr().out)["m"] == 5
    assert main(["--config", str(conf), "find-run", "-k", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["m"] == 2


def test_sieve_outputs(tmp_path, capsys):
    out = tmp_path / "p.bin"
    assert main(["sieve", "--limit", "100", "--out", str(out)]) == 0
    assert out.stat().st_size > 0
    assert main(["sieve", "--limit", "10", "--format", "csv"]) == 0
    assert capsys.readouterr().out.splitlines() == ["n,p", "1,2", "2,3", "3,5", "4,7"]
    assert main(["sieve", "--limit", "100"]) == 1


def test_operational_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["verify", "--state", str(bad), "--lemma", "2.2"]) == 1
    assert main(["verify", "--state", str(tmp_path / "none.json"), "--lemma", "2.2"]) == 1
    assert main(["sieve", "--limit", "1", "--format", "csv"]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert all("error" in json.loads(line) for line in err)


def test_failed_verification_exit_code(tmp_path, capsys):
    # digits at 2**-2 and 2**-3: strings mod 4 cannot cancel the second one
    params = ConstructionParams(
        mode="generalized", stages=1, exponents=(2, 3), modulus_exponent=2, run_length=2,
        growth=None, budget=SearchBudget(100),
    )
    state = tmp_path / "adv.json"
    state.write_text(json.dumps(state_to_json(build(params))))
    assert main(["verify", "--state", str(state), "--lemma", "2.2"]) == 2
    assert json.loads(capsys.readouterr().out)["summary"]["fail"] >= 1


def test_discrepancy(faithful_file, tmp_path, capsys):
    w = tmp_path / "w.json"
    w.write_text(json.dumps({"windows": [{"m": 0, "N": 100}, {"m": 1, "N": 1}]}))
    assert main(["discrepancy", "--state", str(faithful_file), "--windows", str(w)]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "m,N,d_star,argmax" and len(rows) == 3


def test_report_partial(faithful_file, tmp_path, capsys):
    out = tmp_path / "r"
    assert main(["report", "--state", str(faithful_file), "--out-dir", str(out), "--h-max", "4"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["banner"] == "complete" and summary["all_pass"]
    assert sorted(p.name for p in out.iterdir()) == sorted(BUNDLE_FILES)
    for name in BUNDLE_FILES:
        assert (out / name).read_text().strip()


def test_report_relaxed_is_deterministic(relaxed_state, tmp_path, capsys):
    path = tmp_path / "state.json"
    path.write_text(json.dumps(state_to_json(relaxed_state)))
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["report", "--state", str(path), "--out-dir", str(a), "--seed", "3"]) == 0
    assert main(["report", "--state", str(path), "--out-dir", str(b), "--seed", "3"]) == 0
    for name in BUNDLE_FILES:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    summary = json.loads((a / "summary.json").read_text())
    assert summary["all_pass"] and summary["verification"]["fail"] == 0
