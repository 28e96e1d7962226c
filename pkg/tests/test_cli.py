import io
import json

import pytest

from latticegaps import cli


def run(tmp_path, command, cfg, *flags):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = io.StringIO()
    code = cli.run([command, "--config", str(path), *flags], stdout=out)
    return code, out.getvalue()


SCAN = {"alpha": {"sqrt": [2, 3]}, "body": "unit_square", "dilation": [2, 3, 4, 5]}


def test_steinhaus_scan_csv(tmp_path):
    code, text = run(tmp_path, "steinhaus-scan", SCAN)
    lines = text.splitlines()
    assert code == 0
    assert lines[0].split(",")[:3] == ["R", "n_points", "G"]
    assert len(lines) == 6 and lines[-1] == "# status: ok"


def test_output_is_byte_identical(tmp_path):
    cfg = {"alpha": {"random": {"d": 2}}, "body": "unit_square", "dilation": [3, 4], "seed": 5}
    a = run(tmp_path, "steinhaus-scan", cfg)
    b = run(tmp_path, "steinhaus-scan", cfg)
    c = run(tmp_path, "steinhaus-scan", cfg, "--jobs", "2")
    assert a == b == c and a[0] == 0


def test_json_format(tmp_path):
    code, text = run(tmp_path, "steinhaus-scan", SCAN, "--format", "json")
    doc = json.loads(text)
    assert code == 0 and doc["status"] == "ok" and len(doc["rows"]) == 4


@pytest.mark.parametrize("cfg", [
    {"alpha": [1.4142, 1.732], "body": "unit_square", "dilation": [2]},
    {"alpha": {"random": {"d": 2}}, "body": "unit_square", "dilation": [2]},
    {"alpha": {"sqrt": [2, 3]}, "body": {"shape": "blob"}, "dilation": [2]},
    {"alpha": {"sqrt": [2, 3]}, "body": "unit_square", "dilation": {"geometric": {"count": 5, "h": 2}}},
])
def test_config_errors(tmp_path, cfg):
    assert run(tmp_path, "steinhaus-scan", cfg)[0] == 2


def test_numeric_alpha_allowed_when_acknowledged(tmp_path):
    cfg = {"alpha": [1.4142135623730951, 1.7320508075688772], "body": "unit_square", "dilation": [3],
           "numeric_only": True}
    code, text = run(tmp_path, "steinhaus-scan", cfg)
    assert code == 0 and ",numeric" in text


def test_budget_exit(tmp_path):
    code, text = run(tmp_path, "steinhaus-scan", dict(SCAN, dilation=[3, 200]), "--budget", "1000")
    assert code == 3 and text.rstrip().endswith("# status: partial")


def test_fixtures_first_write_then_compare(tmp_path):
    fx = tmp_path / "fixtures"
    assert run(tmp_path, "steinhaus-scan", SCAN, "--fixtures", str(fx))[0] == 0
    stored = list(fx.iterdir())
    assert len(stored) == 1
    assert run(tmp_path, "steinhaus-scan", SCAN, "--fixtures", str(fx))[0] == 0
    stored[0].write_text("tampered\n")
    assert run(tmp_path, "steinhaus-scan", SCAN, "--fixtures", str(fx))[0] == 4


def test_construct_meps(tmp_path):
    code, text = run(tmp_path, "construct-meps", {"params": {"eps": "1/10", "m_max": 5}})
    assert code == 0
    assert all(line.split(",")[4] == "True" for line in text.splitlines()[1:-1])


def test_slater_scan(tmp_path):
    cfg = {"alpha": {"sqrt": [2]}, "body": {"shape": "box", "lo": ["-1/2"], "hi": ["1/2"]},
           "params": {"shrink": ["1/10", "1/37"], "grid_n": 40}}
    code, text = run(tmp_path, "slater-scan", cfg)
    assert code == 0
    assert [int(r.split(",")[1]) for r in text.splitlines()[1:-1]] == [2, 3]


def test_small_randomized_commands(tmp_path):
    assert run(tmp_path, "identity-check", {"seed": 1, "params": {"trials": 4}})[0] == 0
    assert run(tmp_path, "chevallier-fuzz", {"seed": 1, "params": {"trials": 10}})[0] == 0
    assert run(tmp_path, "sumset-verify", {"seed": 1, "params": {"trials": 10}})[0] == 0
    assert run(tmp_path, "identity-check", {"params": {"trials": 4}})[0] == 2


def test_littlewood_and_orbit(tmp_path):
    code, text = run(tmp_path, "littlewood", {"alpha": {"cubic7": True}, "params": {"N": [100]}})
    assert code == 0 and text.splitlines()[1].startswith("100,")
    code, text = run(tmp_path, "orbit-track", {"alpha": {"cubic7": True}, "params": {"s": [0, 1, 2]}})
    assert code == 0 and len(text.splitlines()) == 5


def test_sumset_single_spec(tmp_path):
    code, text = run(tmp_path, "sumset-verify", {"params": {"q": [4, 6], "C": [0, 0], "D": [6, 6]}})
    assert code == 0 and ",6,24,True,True" in text
