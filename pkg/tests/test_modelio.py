import json

import pytest

from diffcoh import cech_deligne as cd
from diffcoh import lens_cs as lc
from diffcoh import modelio
from diffcoh import sugawara as sg


def _same_model(a: cd.ChartModel, b: cd.ChartModel) -> bool:
    return modelio.chart_model_to_dict(a) == modelio.chart_model_to_dict(b)


@pytest.mark.parametrize("name", ["point", "circle", "torus", "sphere2"])
@pytest.mark.parametrize("fmt", ["text", "json"])
def test_chart_model_round_trip(name, fmt):
    m = cd.MODELS[name]()
    kind, back = modelio.loads(modelio.dumps(m, fmt))
    assert kind == "chart-model"
    assert _same_model(m, back)
    assert back.good == m.good


@pytest.mark.parametrize("name", ["point", "circle", "torus", "sphere2"])
def test_fixture_matches_builtin(name):
    assert _same_model(modelio.load(name, "chart-model"), cd.MODELS[name]())


@pytest.mark.parametrize("name", ["so3", "flat"])
@pytest.mark.parametrize("fmt", ["text", "json"])
def test_dga_round_trip(name, fmt):
    m = modelio.builtin_dga(name)
    kind, back = modelio.loads(modelio.dumps(m, fmt))
    assert kind == "dga"
    assert back == m


@pytest.mark.parametrize("name", ["heisenberg", "sl2", "so3"])
@pytest.mark.parametrize("fmt", ["text", "json"])
def test_lie_round_trip(name, fmt):
    a = sg.builtin_algebra(name)
    kind, back = modelio.loads(modelio.dumps(a, fmt))
    assert kind == "lie-algebra"
    assert modelio.lie_to_dict(back) == modelio.lie_to_dict(a)


def test_lie_fixture_is_lie():
    assert modelio.load("sl2", "lie-algebra").check() == []
    assert sg.lambda_B(modelio.load("sl2", "lie-algebra")) == 2


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_massey_round_trip(fmt):
    tables = modelio.load("synthetic", "massey-table")
    kind, back = modelio.loads(modelio.dumps(tables, fmt))
    assert kind == "massey-table"
    assert {k: t.base for k, t in back.items()} == {k: t.base for k, t in tables.items()}


def test_json_is_plain_json():
    d = json.loads(modelio.dumps(cd.circle_model(), "json"))
    assert d["kind"] == "chart-model" and d["version"] == 1


def test_missing_header():
    with pytest.raises(modelio.ParseError, match="line 1"):
        modelio.loads("name circle\n")


def test_bad_version():
    with pytest.raises(modelio.ParseError, match="line 2"):
        modelio.loads("kind chart-model\nversion 7\n")


def test_error_line_number_in_body():
    text = modelio.dumps(cd.circle_model()).splitlines()
    bad_at = next(i for i, l in enumerate(text) if l.startswith("transition"))
    text[bad_at] = "transition 0 1 : x | 0"
    with pytest.raises(modelio.ParseError) as exc:
        modelio.loads("\n".join(text))
    assert exc.value.line == bad_at + 1


def test_semantic_errors_surface():
    text = modelio.dumps(cd.circle_model()).replace("transition 0 2 : 1 | 1", "transition 0 2 : 0 | 1")
    with pytest.raises(ValueError):
        modelio.loads(text)


def test_fixture_dir_env(tmp_path, monkeypatch):
    (tmp_path / "mine.model").write_text(modelio.dumps(cd.point_model()))
    monkeypatch.setenv(modelio.FIXTURE_ENV, str(tmp_path))
    assert modelio.load("mine", "chart-model").name == "point"


def test_load_wrong_kind():
    with pytest.raises(ValueError):
        modelio.load("sl2", "chart-model")


def test_unknown_name():
    with pytest.raises((KeyError, OSError, ValueError)):
        modelio.load("no-such-thing", "chart-model")


def test_massey_fixture_entries_canonical():
    tables = modelio.load("synthetic", "massey-table")
    for (p, q), t in tables.items():
        for key in t.base:
            assert lc.canonical_triple(p, key)[0] == key
