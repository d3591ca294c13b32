import json
import subprocess
import sys

import pytest

from thetapoly.cache import Cache, compute_bytes, decode, key_name
from thetapoly.cli import main
from thetapoly.kernel import KIndex, general_T, tau
from thetapoly.scalars import ZETA as z


def test_cache_round_trip_is_byte_identical(tmp_path):
    c = Cache(tmp_path)
    first, hit = c.get_bytes("T", 1, (1, 1, 0, 0), 0)
    assert not hit
    again, hit = c.get_bytes("T", 1, (1, 1, 0, 0), 0)
    assert hit and again == first == compute_bytes("T", 1, (1, 1, 0, 0), 0)
    assert all(c.verify().values())


def test_cache_decodes(tmp_path):
    c = Cache(tmp_path)
    assert c.load("T", 1, (0, 0, 1, 0), 1) == general_T(KIndex((0, 0, 1, 0), 1))
    assert c.load("tau", -1, (0, -1, -1, 0), 0) == tau((0, -1, -1, 0))
    assert c.load("block", 1, (0, 0, 0, 0), 1).is_polynomial()


def test_cache_key_validation(tmp_path):
    with pytest.raises(ValueError):
        key_name("bogus", 1, (0, 0, 0, 0), 0)
    with pytest.raises(ValueError):
        compute_bytes("T", 3, (0, 0, 0, 0), 2)


def test_cache_detects_tampering(tmp_path):
    c = Cache(tmp_path)
    c.get_bytes("U", 1, (1, 0, 0, 0), 1)
    p = c.path("U", 1, (1, 0, 0, 0), 1)
    p.write_bytes(p.read_bytes().replace(b'"1"', b'"2"', 1))
    assert not all(c.verify().values())


def test_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("THETAPOLY_CACHE", str(tmp_path / "cc"))
    assert Cache().root == tmp_path / "cc"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_tau(capsys):
    code, out, _ = run(["tau", "--k", "0,-1,-1,0"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "-2*z^2*(z - 1)*(2*z + 1)*(z + 1)^2/(z + 2)^2"


def test_cli_gen(tmp_path, capsys):
    code, out, _ = run(["--cache-dir", str(tmp_path), "gen", "--k", "0,0,0,0", "--n", "1"], capsys)
    assert code == 0 and "in 2 variables: (1)" in out
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--cache-dir", str(tmp_path), "gen", "--k", "2,1,0,0", "--m", "1", "-o", str(a)]) == 0
    assert main(["--cache-dir", str(tmp_path), "gen", "--k", "2,1,0,0", "--m", "1", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert decode(json.loads(a.read_bytes())) == general_T(KIndex((2, 1, 0, 0), 1))


@pytest.mark.parametrize("argv", [["tau", "--k", "1,0,0"], ["tau", "--k", "1,0,0,0"], ["nope"],
                                  ["gen", "--k", "a,b,c,d", "--n", "1"], ["gen", "--k", "1,0,0,0", "--m", "2"],
                                  ["verify-elliptic", "--prec", "20"],
                                  ["verify-elliptic", "--identities", "xd,bogus"],
                                  ["verify-elliptic", "--tau", "-1i", "--identities", "xd"]])
def test_cli_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and "usage error" in err


def test_cli_verify_pde(tmp_path, capsys):
    out = tmp_path / "pde.json"
    assert main(["verify-pde", "--window", "1", "--m", "2", "-o", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec and all(r["pass"] for r in rec)
    assert main(["verify-pde", "--k", "2,1,0,0", "--m", "1", "-o", str(out)]) == 0


def test_cli_verify_bilinear(tmp_path, capsys):
    out = tmp_path / "bil.json"
    assert main(["verify-bilinear", "--window", "2", "--k", "1,0,0,0", "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["pass"] and data["bst"][0]["pass"]
    ns = [r["n_norm"] for r in data["records"]]
    assert ns == sorted(ns)


def test_cli_verify_elliptic(tmp_path, capsys):
    out = tmp_path / "ell.json"
    code = main(["verify-elliptic", "--tau", "1.2i", "--prec", "30", "--grid", "3",
                 "--identities", "pqp,xd,zdl", "-o", str(out)])
    assert code == 0
    rec = json.loads(out.read_text())
    assert [r["identity"] for r in rec] == ["pqp", "xd", "zdl"]
    assert set(rec[0]) >= {"identity", "tau", "grid_size", "max_residual", "tolerance", "pass"}


def test_cli_invariant_breach_exit_code(monkeypatch, capsys):
    from thetapoly import cli
    from thetapoly.errors import InexactDivision

    def boom(k):
        raise InexactDivision("forced")

    monkeypatch.setattr("thetapoly.kernel.tau", boom)
    code, _, err = run(["tau", "--k", "0,0,0,0"], capsys)
    assert code == 3 and "InexactDivision" in err


def test_cli_cache_verbs(tmp_path, capsys):
    base = ["--cache-dir", str(tmp_path)]
    assert main(base + ["cache", "warm", "--k", "1,0,0,0", "--m", "1"]) == 0
    code, out, _ = run(base + ["cache", "list"], capsys)
    assert "T-n1-k1_0_0_0-s1.json" in out
    assert main(base + ["cache", "verify"]) == 0
    code, out, _ = run(base + ["cache", "clear"], capsys)
    assert "removed 2" in out


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "thetapoly.cli", "tau", "--k", "1,-1,0,0"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.splitlines()[0] == "1"
