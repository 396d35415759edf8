import json
import time

import pytest

from mfshift import __version__
from mfshift.cli import main
from mfshift.selfcheck import run_selfcheck


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("n,expect", [
    (3, "dim 8, rank 2, b 5, u 3, degrees (2, 3)"),
    (2, "dim 3, rank 1, b 2, u 1"),
    (4, "dim 15, rank 3, b 9, u 6"),
])
def test_info(capsys, n, expect):
    code, out, _ = _run(capsys, "info", "--n", str(n))
    assert code == 0 and expect in out


def test_info_prints_sl3_permutation(capsys):
    _, out, _ = _run(capsys, "info", "--n", "3")
    assert "[0, 2, 1, 4, 3]" in out


def test_info_invalid_n(capsys):
    code, _, err = _run(capsys, "info", "--n", "1")
    assert code == 2 and "invalid input" in err


def test_verify_nilpotent_sl3(capsys):
    code, out, _ = _run(capsys, "verify", "--n", "3", "--shift", "nilpotent", "--samples", "20", "--seed", "7")
    assert code == 0
    assert "verdict: codim 1" in out


def test_verify_nilpotent_sl2(capsys):
    code, out, _ = _run(capsys, "verify", "--n", "2", "--shift", "nilpotent")
    assert code == 0 and "verdict: codim 2" in out


@pytest.mark.parametrize("argv", [
    ["verify", "--n", "5", "--shift", "generic"],
    ["codim", "--n", "1"],
    ["verify", "--samples", "0"],
    ["verify", "--tol", "0"],
    ["verify", "--seed", "-1"],
    ["codim", "--n", "3", "--shift", "diag"],
    ["codim", "--n", "3", "--diag", "1,2"],
    ["codim", "--n", "3", "--shift", "nilpotent", "--diag", "1,0,-1"],
    ["codim", "--n", "3", "--diag", "a,b,c"],
    ["codim", "--threads", "0"],
])
def test_invalid_configs(capsys, argv):
    code, _, _ = _run(capsys, *argv)
    assert code == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--shift", "bogus"])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv,verdict", [
    (["--n", "3", "--diag", "2,-1,-1"], "CodimOneCertified"),
    (["--n", "3", "--shift", "nilpotent"], "CodimOneCertified"),
    (["--n", "2", "--shift", "nilpotent"], "CodimTwoConsistent"),
])
def test_codim_trio(capsys, tmp_path, argv, verdict):
    path = tmp_path / "c.json"
    code, out, _ = _run(capsys, "codim", *argv, "--json", str(path))
    assert code == 0 and verdict in out
    rep = json.loads(path.read_text())
    assert rep["certificate"]["verdict"] == verdict


def test_codim_inconclusive_exit_1(capsys):
    code, out, _ = _run(capsys, "codim", "--n", "3", "--tol", "0.9", "--samples", "4")
    assert code == 1 and "Inconclusive" in out


def test_json_schema(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, _, _ = _run(capsys, "verify", "--n", "3", "--samples", "6", "--json", str(path))
    assert code == 0
    rep = json.loads(path.read_text(encoding="utf-8"))
    assert {"config", "algebra", "shift", "assertions", "certificate", "timing_ms", "version"} <= set(rep)
    assert rep["version"] == __version__
    assert rep["config"]["n"] == 3 and rep["config"]["seed"] == 0
    assert set(rep["algebra"]) == {"n", "dim", "rank", "b", "u", "degrees"}
    assert set(rep["shift"]) == {"kind", "matrix"}
    # complex entries as [re, im]
    assert all(len(v) == 2 for row in rep["shift"]["matrix"] for v in row)
    for a in rep["assertions"]:
        assert set(a) == {"name", "paper_anchor", "expected", "measured", "pass"}
    cert = rep["certificate"]
    assert {"verdict", "max_rank", "witness"} <= set(cert)
    assert {"alpha", "h_diag", "conjugator_seed", "t"} <= set(cert["witness"])
    assert isinstance(rep["timing_ms"], float)


def test_json_byte_identical(capsys, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        _run(capsys, "verify", "--n", "4", "--samples", "6", "--seed", "11", "--no-timing", "--json", str(p))
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert json.loads(paths[0].read_text())["timing_ms"] is None


def test_certificate_unchanged_by_threads(capsys, tmp_path):
    reps = []
    for t in ("1", "3"):
        p = tmp_path / f"t{t}.json"
        _run(capsys, "codim", "--n", "4", "--samples", "9", "--seed", "2", "--threads", t, "--json", str(p))
        reps.append(json.loads(p.read_text())["certificate"])
    assert reps[0] == reps[1]


def test_json_to_stdout(capsys):
    code, out, err = _run(capsys, "codim", "--n", "2", "--shift", "nilpotent", "--json", "-")
    assert code == 0
    assert json.loads(out)["certificate"]["verdict"] == "CodimTwoConsistent"
    assert "verdict" in err


def test_selfcheck_default(capsys):
    t0 = time.perf_counter()
    code, out, _ = _run(capsys, "selfcheck")
    assert code == 0 and time.perf_counter() - t0 < 30
    assert out.count("[PASS]") == 5


def test_selfcheck_tolerance_floor(capsys):
    code, out, _ = _run(capsys, "selfcheck", "--tol", "1e-16")
    assert code == 1
    assert "roundoff floor" in out


def test_selfcheck_stable_across_seeds():
    verdicts = {tuple(c.passed for c in run_selfcheck(seed)) for seed in range(5)}
    assert verdicts == {(True,) * 5}
