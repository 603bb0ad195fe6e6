import json
import math

import pytest

from wpc import cli
from wpc.fuchsian import config_to_dict, load_config, octagon_config_path

OCTAGON = str(octagon_config_path())
TRIVIAL = str(octagon_config_path().with_name("trivial.json"))


def _run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_surface_check(capsys):
    code, out, _ = _run(capsys, ["surface-check", "--config", OCTAGON, "--L", "4", "--samples", "200000"])
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert rep["shell_counts"] == [1, 8, 56, 392, 2736]
    assert rep["relator_residual"] < 1e-9
    assert math.isclose(rep["systole_estimate"], 2 * math.acosh(1 + math.sqrt(2)), rel_tol=1e-10)
    for key in ("version", "backend", "config_hash", "seed", "word_length"):
        assert key in rep


def test_surface_check_L0_warns(capsys):
    code, out, err = _run(capsys, ["surface-check", "--config", OCTAGON, "--L", "0"])
    assert code == 0 and "warning" in err
    assert json.loads(out)["elements"] == 1


def test_net_deterministic(capsys, tmp_path):
    argv = ["net", "--config", OCTAGON, "--L", "5", "--eps", "1.0", "--samples", "800", "--seed", "3",
            "--inj-samples", "20"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert 4 <= rep["net"]["count"] <= 15 and rep["bracket"]["status"] == "PASS"


def test_net_csv(capsys):
    code, out, _ = _run(capsys, ["net", "--config", OCTAGON, "--L", "4", "--eps", "2.0", "--samples", "200",
                                 "--inj-samples", "5", "--format", "csv"])
    assert code == 0 and out.splitlines()[0].startswith("key")


def test_certify_trivial(capsys, tmp_path):
    code, out, _ = _run(capsys, ["certify", "--config", TRIVIAL, "--eps0", "4.0", "--samples", "200000",
                                 "--ball-samples", "256", "--point-samples", "500", "--mean-value-samples",
                                 "2000", "--tables", str(tmp_path), "--grid", "11"])
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert all(v["status"] == "PASS" for v in rep["closed_forms"].values())
    assert (tmp_path / "radial_slices.csv").exists() and (tmp_path / "mu_grid.csv").exists()


def test_certify_octagon_small(capsys):
    code, out, _ = _run(capsys, ["certify", "--config", OCTAGON, "--L", "4", "--mc-L", "3", "--eps0", "4.0",
                                 "--bases", "1", "--samples", "50000", "--ball-samples", "256",
                                 "--point-samples", "500", "--mean-value-samples", "2000"])
    rep = json.loads(out)
    assert code == 0 and rep["curvature_bracket"]["status"] == "PASS"


def test_missing_config(capsys, tmp_path):
    code, _, err = _run(capsys, ["surface-check", "--config", str(tmp_path / "nope.json")])
    assert code == 2 and "error" in err


def test_corrupt_config(capsys, tmp_path):
    d = config_to_dict(load_config(OCTAGON))
    d["relator"] = [1, 2, 3, 4, 1, 2, 3, 4]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(d))
    code, _, err = _run(capsys, ["surface-check", "--config", str(p)])
    assert code == 2 and "relator" in err


def test_resource_exit(capsys, tmp_path):
    d = config_to_dict(load_config(OCTAGON))
    d["max_elements"] = 50
    p = tmp_path / "cap.json"
    p.write_text(json.dumps(d))
    code, _, _ = _run(capsys, ["surface-check", "--config", str(p), "--L", "3"])
    assert code == 3


def test_nets_on_trivial_group_rejected(capsys):
    code, _, _ = _run(capsys, ["net", "--config", TRIVIAL, "--eps", "1.0"])
    assert code == 2


def test_bad_arguments():
    with pytest.raises(SystemExit) as exc:
        cli.main(["net", "--config", OCTAGON, "--eps", "-1"])
    assert exc.value.code == 2
