import json
import subprocess
import sys

import pytest

from mldegree import __version__
from mldegree.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, RunConfig, main, parse_run_config
from mldegree.family import FamilyParams, build_Vm_param
from mldegree.likelihood import model_to_dict


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def line_file(tmp_path):
    p = tmp_path / "line.json"
    p.write_text(json.dumps({"n": 2, "form": "implicit", "equations": ["p1 + p2 - 1"]}))
    return str(p)


def test_run_config_invariants():
    with pytest.raises(ValueError):
        RunConfig("family")
    with pytest.raises(ValueError):
        RunConfig("mldeg")
    with pytest.raises(ValueError):
        RunConfig("selftest", draws=0)
    cfg = parse_run_config(["selftest", "--corrector-tol", "1e-9", "--seed", "7"])
    tc = cfg.tracker_config()
    assert tc.corrector_tol == 1e-9 and tc.seed == 7 and tc.cluster_radius == 1e-6


def test_selftest_passes(capsys):
    code, out, _ = run(capsys, "selftest")
    d = json.loads(out)
    assert code == EXIT_OK and d["passed"] and d["failed"] == []
    assert d["version"] == __version__ and d["config"]["seed"] == 42


def test_selftest_with_corrupted_tolerance_fails(capsys):
    code, out, _ = run(capsys, "selftest", "--corrector-tol", "10")
    d = json.loads(out)
    assert code == EXIT_FAIL and not d["passed"]
    assert "newton_sqrt2" in d["failed"]


def test_selftest_is_byte_identical(capsys):
    _, a, _ = run(capsys, "selftest", "--seed", "9")
    _, b, _ = run(capsys, "selftest", "--seed", "9")
    assert a == b


def test_mldeg_line(capsys, line_file):
    code, out, err = run(capsys, "mldeg", "--model", line_file)
    d = json.loads(out)
    assert code == EXIT_OK and d["count"] == 1 and d["certified"] is True
    assert d["per_draw_counts"] == [1] * 5 and len(d["data_seeds"]) == 5
    assert d["config"]["tracker"]["endpoint_tol"] == 1e-12
    assert "mldeg" in err


def test_mldeg_h5(capsys, tmp_path):
    p = tmp_path / "h5.json"
    p.write_text(json.dumps({"n": 5, "form": "implicit", "equations": ["p1+p2+p3+p4+p5-1"]}))
    code, out, _ = run(capsys, "mldeg", "--model", str(p), "--draws", "2")
    assert code == EXIT_OK and json.loads(out)["count"] == 1


def test_euler_line(capsys, line_file):
    code, out, _ = run(capsys, "euler", "--model", line_file, "--draws", "2")
    d = json.loads(out)
    assert code == EXIT_OK and d["euler_characteristic"] == -1 and d["assumes_smooth"]


def test_usage_errors(capsys, tmp_path, line_file):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "mldeg", "--model", str(bad))[0] == EXIT_USAGE
    assert run(capsys, "mldeg", "--model", str(tmp_path / "missing.json"))[0] == EXIT_USAGE
    assert run(capsys, "mldeg")[0] == EXIT_USAGE
    assert run(capsys, "family")[0] == EXIT_USAGE
    assert run(capsys, "family", "--m", "4")[0] == EXIT_USAGE
    assert run(capsys, "bogus")[0] == EXIT_USAGE
    assert run(capsys, "selftest", "--output", "yaml")[0] == EXIT_USAGE
    assert run(capsys, "selftest", "--step-min", "0.5")[0] == EXIT_USAGE
    unparsable = tmp_path / "unparsable.json"
    unparsable.write_text(json.dumps({"n": 2, "form": "implicit", "equations": ["p1 + + "]}))
    code, _, err = run(capsys, "mldeg", "--model", str(unparsable))
    assert code == EXIT_USAGE and "error" in err


def test_uncertified_exit_code(capsys, tmp_path):
    p = tmp_path / "v3.json"
    p.write_text(json.dumps(model_to_dict(build_Vm_param(FamilyParams(3)))))
    code, out, _ = run(capsys, "mldeg", "--model", str(p), "--draws", "1", "--step-min", "0.09",
                       "--corrector-max-iters", "1", "--corrector-tol", "1e-15")
    assert code == EXIT_FAIL and json.loads(out)["certified"] is False


def test_family_m1(capsys):
    code, out, _ = run(capsys, "family", "--m", "1", "--draws", "3")
    d = json.loads(out)
    assert code == EXIT_OK and d["gap"] == 0 and d["huh_equality_V1"] is True
    assert d["config"]["m"] == 1 and d["mldeg_report"]["data_seeds"]


def test_family_m3(capsys):
    code, out, _ = run(capsys, "family", "--m", "3", "--draws", "3")
    d = json.loads(out)
    assert code == EXIT_OK and d["gap"] == 1 and d["bound_holds"] and d["ic_equality"]


def test_text_output_and_timing(capsys, line_file):
    code, out, _ = run(capsys, "mldeg", "--model", line_file, "--draws", "1", "--output", "text")
    assert code == EXIT_OK and "MLdeg = 1" in out
    code, out, _ = run(capsys, "selftest", "--timing")
    assert "wall_clock_seconds" in json.loads(out)
    code, out, _ = run(capsys, "selftest", "--output", "text")
    assert "[ok] newton_sqrt2" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mldegree", "selftest"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["passed"]
