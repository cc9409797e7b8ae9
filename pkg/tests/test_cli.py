import json
import math

import pytest

from susyx.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    lines = [json.loads(x) for x in out.out.splitlines() if x.strip()]
    return code, lines, out.err


def test_verify_theorem1(capsys):
    code, lines, _ = run(["verify", "theorem1", "--n", "2..6", "--samples", "10", "--seed", "42"], capsys)
    assert code == 0
    assert lines[-1]["summary"] and lines[-1]["total"] == 4 * 5 * 10
    assert set(lines[0]) == {"check_name", "params", "residual", "tolerance", "pass"}


def test_verify_susy(capsys):
    code, lines, _ = run(["verify", "susy", "--n", "2..8"], capsys)
    assert code == 0 and lines[-1]["failed"] == 0


def test_theorem1_needs_two_sites(capsys):
    code, _, err = run(["verify", "theorem1", "--n", "1"], capsys)
    assert code == 2 and "n >= 2" in err


@pytest.mark.parametrize("argv", [
    ["verify", "nonsense"],
    ["verify", "susy", "--n", "5..2"],
    ["verify", "susy", "--n", "x"],
    ["verify", "susy", "--tol", "novalue"],
    ["bethe", "check"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_verify_all_small(capsys):
    code, lines, _ = run(["verify", "all", "--n", "1..4", "--samples", "2", "--seed", "5"], capsys)
    assert code == 0, [l for l in lines if not l.get("pass", True)]


def test_tolerance_override_forces_failure(capsys):
    code, lines, _ = run(["verify", "deltas", "--n", "3", "--samples", "1",
                          "--tol", "deltas.pseudovacuum=0"], capsys)
    assert code == 1 and lines[0]["tolerance"] == 0


def test_out_file_and_determinism(tmp_path, capsys, monkeypatch):
    a, b = tmp_path / "a.ndjson", tmp_path / "b.ndjson"
    argv = ["verify", "all", "--n", "2..4", "--samples", "2", "--seed", "9"]
    monkeypatch.setenv("SUSYX_THREADS", "1")
    assert main(argv + ["--out", str(a)]) == 0
    monkeypatch.setenv("SUSYX_THREADS", "4")
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_overridden_by_flags(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_range": [2, 3], "samples": 2, "seed": 1}))
    code, lines, _ = run(["verify", "theorem1", "--config", str(cfg)], capsys)
    assert code == 0 and lines[-1]["total"] == 4 * 2 * 2
    code, lines, _ = run(["verify", "theorem1", "--config", str(cfg), "--n", "2"], capsys)
    assert lines[-1]["total"] == 4 * 2
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["verify", "susy", "--config", str(cfg)]) == 2


def test_bethe_solve_check_pair(tmp_path, capsys):
    roots = tmp_path / "roots_n2_m1.json"
    code, lines, _ = run(["bethe", "solve", "--n", "2", "--m", "1", "--starts", "200",
                          "--seed", "7", "--roots", str(roots)], capsys)
    assert code == 0
    data = json.loads(roots.read_text())
    found = [tuple(e["roots"][0]) for e in data]
    assert any(abs(re) < 1e-10 and abs(im - math.pi / 6) < 1e-10 for re, im in found)

    code, lines, _ = run(["bethe", "pair", "--roots", str(roots)], capsys)
    assert code == 0 and lines[-1]["failed"] == 0

    # the pi/6 root solves the equations but its state is not an eigenvector
    code, lines, _ = run(["bethe", "check", "--roots", str(roots)], capsys)
    assert code == 1
    failed = [l for l in lines[:-1] if not l["pass"]]
    assert len(failed) == 1 and failed[0]["params"]["roots"] == [[0.0, pytest.approx(math.pi / 6)]]


def test_bethe_check_garbage(tmp_path, capsys):
    bad = tmp_path / "garbage.json"
    bad.write_text('{"n": 2, "m": 1, "roots": [[0, "x"]]}')
    code, _, err = run(["bethe", "check", "--roots", str(bad)], capsys)
    assert code == 2 and "roots[0]" in err
    code, _, err = run(["bethe", "check", "--roots", str(tmp_path / "missing.json")], capsys)
    assert code == 2


def test_bethe_pair_kernel_file(tmp_path, capsys):
    f = tmp_path / "eta.json"
    f.write_text(json.dumps({"n": 3, "m": 1, "roots": [[0, 2 * math.pi / 3]], "contains_eta": True}))
    code, lines, _ = run(["bethe", "pair", "--roots", str(f)], capsys)
    assert code == 0 and lines[0]["check_name"] == "pairing.kernel"


def test_vacuum_and_spectrum(capsys):
    code, lines, _ = run(["vacuum", "--n", "2..8"], capsys)
    assert code == 0 and lines[-1]["total"] == 7
    assert all(abs(l["params"]["energy"]) < 1e-10 for l in lines[:-1])
    code, lines, _ = run(["spectrum", "--n", "5"], capsys)
    assert code == 0 and lines[0]["params"]["counts"] == [1, 21, 10]
    code, lines, _ = run(["spectrum", "--n", "2"], capsys)
    assert lines[0]["params"]["counts"] == [1, 2, 1]


def test_large_n_warning(capsys):
    # a full n = 13 run is too slow for the unit suite, so call the helper directly
    from susyx.cli import RunConfig, _warn_large
    _warn_large(RunConfig(n_range=(2, 13)))
    assert "above 12" in capsys.readouterr().err
