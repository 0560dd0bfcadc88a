import json
import math

import pytest

from wpvol import cli
from wpvol.charvar import QuadratureError


@pytest.fixture
def run(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("WPVOL_CACHE_DIR", str(tmp_path / "cache"))

    def _run(*argv):
        code = cli.main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err
    return _run


def payload(out):
    data = json.loads(out)
    assert data["schema"] == 1
    return data


def test_poly_text(run):
    code, out, _ = run("poly", "1", "1")
    assert code == 0
    assert out.strip() == "(1/12)·π^2 + (1/48)·L1^2"
    code, out, _ = run("poly", "0", "4")
    assert out.strip() == "2·π^2 + (1/2)·(L1^2+L2^2+L3^2+L4^2)"


def test_poly_json_and_errors(run):
    code, out, _ = run("poly", "0", "5", "--format", "json")
    data = payload(out)
    assert code == 0 and data["g"] == 0 and data["n"] == 5
    assert {"exps": [0, 0, 0, 0, 0], "pi_pow": 4, "coeff": "10/1"} in data["polynomial"]["terms"]
    assert run("poly", "0", "2")[0] == 2
    code, _, err = run("--max-dim", "2", "poly", "0", "7")
    assert code == 2 and "dimension" in err


def test_eval_unknown_region(run):
    code, out, _ = run("eval", "--g", "0", "--n", "4", "--labels", "cusp,cusp,2i,6.183i")
    data = payload(out)
    assert code == 0
    assert data["value"] == pytest.approx(-1.3755, abs=1e-3) and data["value"] < 0
    assert data["chamber"]["validity"] == "Unknown" and data["warnings"]


def test_eval_exact_cone_pi(run):
    code, out, _ = run("eval", "--g", "1", "--n", "1", "--labels", "1/1pi i")
    data = payload(out)
    assert data["exact"] == "(1/16)·π^2"
    assert data["value"] == pytest.approx(math.pi ** 2 / 16, rel=1e-14)
    assert data["warnings"] == []


def test_eval_all_cusps(run):
    data = payload(run("eval", "--g", "1", "--n", "2", "--labels", "cusp,cusp")[1])
    assert data["value"] == pytest.approx(math.pi ** 4 / 4, rel=1e-14)


def test_eval_bad_labels(run):
    assert run("eval", "--g", "0", "--n", "4", "--labels", "cusp,2j,1,1")[0] == 2
    assert run("eval", "--g", "0", "--n", "4", "--labels", "cusp,1")[0] == 2


def test_chamber(run):
    data = payload(run("chamber", "--g", "1", "--labels", "cusp,cusp,1.9pi i")[1])
    assert data["report"]["validity"] == "ValidMainChamber"


def test_verify_suites(run):
    assert run("--max-dim", "4", "verify", "limit")[0] == 0
    assert run("verify", "v05")[0] == 0
    code, out, _ = run("--max-dim", "4", "verify", "corollary")
    assert code == 0 and payload(out)["failures"] == []
    code, out, _ = run("verify", "cv", "--theta", "3.14159", "--tol", "1e-5")
    assert code == 0 and payload(out)["pass"]


def test_verify_failure_exit_code(run):
    # no quadrature reaches 1e-20 relative accuracy
    code, out, _ = run("verify", "cv", "--theta", "1", "--tol", "1e-20")
    data = payload(out)
    assert code == 1 and not data["pass"] and data["failures"]


def test_geom(run):
    data = payload(run("geom", "hexagon", "2", "2", "--c", "2")[1])
    assert data["value"] == pytest.approx(1.70491, abs=1e-5)
    assert data["value"] >= data["bound"]
    code, out, _ = run("geom", "--format", "text", "separation", "1", "4i")
    assert code == 0 and out.strip() == "None"
    assert run("geom", "crown", "0.5", "0.5")[0] == 2


def test_cv_commands(run):
    data = payload(run("cv-volume", "--theta", "pi")[1])
    assert data["final"] == pytest.approx(math.pi ** 2 / 16, rel=1e-8)
    assert run("cv-volume", "--theta", "7")[0] == 2
    data = payload(run("cv-reduce", "--point", "6,3,15")[1])
    assert data["reduced"] == [3.0, 3.0, 3.0] and data["word"] == [2, 1]
    assert run("cv-reduce", "--point", "1,2")[0] == 2


def test_numerical_failure_exit_code(run, monkeypatch):
    def boom(*a, **k):
        raise QuadratureError("did not converge")
    monkeypatch.setattr(cli.charvar, "volume_integral", boom)
    code, _, err = run("cv-volume", "--theta", "1")
    assert code == 3 and "converge" in err


def test_scan_deterministic(run, tmp_path):
    a = run("scan", "--g", "0", "--n", "4", "--samples", "300", "--seed", "9")
    b = run("scan", "--g", "0", "--n", "4", "--samples", "300", "--seed", "9")
    assert a == b and a[0] == 0
    data = payload(a[1])
    assert data["violations"] == 0 and data["min_value"] > 0
    csv = tmp_path / "s.csv"
    run("scan", "--g", "0", "--n", "4", "--samples", "50", "--csv", str(csv))
    assert len(csv.read_text().splitlines()) == 51


def test_output_is_deterministic(run):
    first = run("poly", "1", "3", "--format", "json")
    assert run("poly", "1", "3", "--format", "json") == first
    assert run("--no-cache", "poly", "1", "3", "--format", "json") == first


def test_cache_coherence(run, tmp_path):
    cache = tmp_path / "mine"
    assert run("--cache-dir", str(cache), "--max-dim", "4", "cache", "build")[0] == 0
    snapshot = {p.name: p.read_text() for p in cache.glob("*.json")}
    assert "vol_g2_n1.json" in snapshot
    assert run("--cache-dir", str(cache), "cache", "clear")[0] == 0
    assert not list(cache.glob("*.json"))
    run("--cache-dir", str(cache), "--max-dim", "4", "cache", "build")
    assert {p.name: p.read_text() for p in cache.glob("*.json")} == snapshot
    code, out, _ = run("--cache-dir", str(cache), "cache", "path")
    assert out.strip() == str(cache)


def test_cache_env(run, tmp_path):
    assert run("cache", "path")[1].strip() == str(tmp_path / "cache")
