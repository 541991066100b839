import csv
import json
import math

import jsonschema
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from seamlab import theta
from seamlab.report import Record, ReportEnvelope, dumps, export_grid, load_schema, to_jsonable


def _env(**kw):
    recs = [Record("a", {"x": 1}, {"v": 1.5 + 2j}, 1e-12, "pass", 0.25),
            Record("b", {}, [np.float64(np.nan), np.int64(3)], None, "diagnostic", 0.5)]
    return ReportEnvelope("0.1.0", "zeros", {"command": "zeros"}, recs, ["zeros.csv"], **kw)


def test_schema_validation():
    doc = json.loads(dumps(_env()))
    jsonschema.validate(doc, load_schema())
    assert doc["schema_version"] == "1.0"
    assert doc["summary"] == {"pass": 1, "fail": 0, "diagnostic": 1, "total": 2}
    assert doc["records"][0]["values"]["v"] == {"re": 1.5, "im": 2.0}
    assert doc["records"][1]["values"] == [None, 3]
    bad = dict(doc, extra=1)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, load_schema())


def test_deterministic_nulls_wall_time():
    det = json.loads(dumps(_env()))
    assert all(r["wall_time"] is None for r in det["records"])
    timed = json.loads(dumps(_env(deterministic=False)))
    assert [r["wall_time"] for r in timed["records"]] == [0.25, 0.5]
    assert _env().timings() == {"a": 0.25, "b": 0.5}


def test_envelope_ok_and_outcomes():
    env = _env()
    assert env.ok
    env.records.append(Record("c", {}, None, None, "fail", error="X: y"))
    assert not env.ok
    with pytest.raises(ValueError):
        Record("d", {}, None, None, "maybe")


def test_dumps_is_canonical():
    assert dumps(_env()) == dumps(_env())
    text = dumps(_env())
    assert text.endswith("\n") and "NaN" not in text


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert json.loads(json.dumps(to_jsonable(np.float64(x)))) == x


def test_to_jsonable_rejects_unknown():
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_one_by_one_grid(tmp_path):
    path = export_grid("one", {"x": [0.5]}, np.array([2.0]), tmp_path)
    lines = open(path).read().splitlines()
    assert lines == ["x,value", "0.5,2"]


def test_theta_grid_line_count(tmp_path):
    t = np.geomspace(0.01, 50, 64)
    path = export_grid("theta", [("t", t)], {"Theta": theta.theta_completed(t)}, tmp_path)
    rows = list(csv.reader(open(path)))
    assert len(rows) == 65 and rows[0] == ["t", "Theta"]
    # 17 significant digits round-trip
    assert [float(r[0]) for r in rows[1:]] == t.tolist()


def test_complex_split_and_order(tmp_path):
    v = np.array([[1 + 1j, 2 - 1j, 3], [4, 5j, -6]])
    path = export_grid("c", [("a", [0, 1]), ("b", [10, 20, 30])], v, tmp_path, value_names=["f"])
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["a", "b", "f_re", "f_im"]
    assert [(r[0], r[1]) for r in rows[1:]] == [("0", "10"), ("0", "20"), ("0", "30"),
                                                 ("1", "10"), ("1", "20"), ("1", "30")]
    assert rows[5][2:] == ["0", "5"]


def test_nonfinite_csv_and_shape_errors(tmp_path):
    path = export_grid("n", {"x": [1, 2, 3]}, np.array([math.nan, math.inf, -math.inf]), tmp_path)
    assert [r[1] for r in list(csv.reader(open(path)))[1:]] == ["nan", "inf", "-inf"]
    with pytest.raises(ValueError):
        export_grid("bad", {"x": [1, 2]}, np.zeros(3), tmp_path)
    with pytest.raises(ValueError):
        export_grid("bad", {}, np.zeros(3), tmp_path)
