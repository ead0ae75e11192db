import subprocess
import sys

import pytest

from diffcoh.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cs_set(capsys):
    code, out, _ = run(capsys, "cs", "5", "1")
    assert code == 0 and "{0, 1/5, 4/5}" in out


def test_cs_homotopy(capsys):
    code, out, _ = run(capsys, "cs", "7", "1", "2")
    assert code == 0
    assert "oriented homotopy equivalent: yes (a=3)" in out


def test_cs_config_pipeline(capsys):
    code, out, _ = run(capsys, "cs", "11", "2", "3", "--config", "1", "1", "--massey", "synthetic")
    assert code == 0
    assert "(ε=-1, a=2)" in out and "verdict" in out


def test_cs_bad_input(capsys):
    code, _, err = run(capsys, "cs", "4", "2")
    assert code == 2 and err.startswith("error:")


def test_forms_rp3(capsys):
    code, out, _ = run(capsys, "forms", "rp3")
    assert code == 0 and "Phi(RP3) = 1/2" in out


@pytest.mark.parametrize("action", ["classes", "cs", "whitney", "koszul"])
def test_forms_actions_pass(capsys, action):
    code, out, _ = run(capsys, "forms", action, "--trials", "5")
    assert code == 0 and "FAIL" not in out


def test_forms_flat_classes_vanish(capsys):
    code, out, _ = run(capsys, "forms", "classes", "flat")
    assert code == 0 and "c1 = 0" in out and "c2 = 0" in out


@pytest.mark.parametrize(
    "model,k,expected",
    [("point", "1", "ℝ/ℤ"), ("circle", "1", "ℤ ⊕ ℝ/ℤ"), ("torus", "2", "ℤ ⊕ (ℝ/ℤ)^2")],
)
def test_deligne_cohomology(capsys, model, k, expected):
    code, out, _ = run(capsys, "deligne", model, k, "cohomology")
    assert code == 0 and out.strip().endswith(expected)


def test_deligne_hexagon(capsys):
    code, out, _ = run(capsys, "deligne", "circle", "1", "hexagon")
    assert code == 0 and "exactness: PASS" in out


def test_deligne_hexagon_refuses_bad_cover(capsys):
    code, _, err = run(capsys, "deligne", "sphere2", "1", "hexagon")
    assert code == 2 and "not a good cover" in err


def test_deligne_integrate(capsys):
    code, out, _ = run(capsys, "deligne", "circle", "2", "integrate", "--value", "7/5")
    assert code == 0 and "2/5" in out


def test_deligne_cup(capsys):
    code, out, _ = run(capsys, "deligne", "circle", "1", "cup", "--trials", "3")
    assert code == 0 and "FAIL" not in out


def test_vir_heisenberg(capsys):
    code, out, _ = run(capsys, "vir", "heisenberg", "--N", "8", "--range", "2")
    assert code == 0 and "central charge = 1" in out


def test_vir_sl2(capsys):
    code, out, _ = run(capsys, "vir", "sl2")
    assert code == 0 and "central charge = 1" in out


def test_vir_critical_level(capsys):
    code, _, err = run(capsys, "vir", "sl2", "--level", "-2")
    assert code == 2 and "critical" in err.lower()


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "diffcoh.cli", "cs", "5", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and "{0, 2/5, 3/5}" in r.stdout
