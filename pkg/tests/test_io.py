import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from aluthge import io
from aluthge.errors import DimensionMismatch, NotCommuting, ParseError
from aluthge.generators import KINDS, GeneratorSpec, generate_commuting_tuple
from aluthge.spectra import taylor_spectrum
from aluthge.transforms import validate_commuting

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=100, deadline=None)
@given(
    re=arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(1, 4)), elements=finite),
    data=st.data(),
)
def test_matrix_round_trip_bitwise(re, data):
    im = data.draw(arrays(np.float64, re.shape, elements=finite))
    a = re + 1j * im
    text = io.dumps_tuple([a]) if a.shape[0] == a.shape[1] else None
    if text is None:
        back = io._matrix_from_dict(json.loads(json.dumps(io.matrix_to_dict(a))), 0)
    else:
        back = io.parse_operators(text)[0]
    assert back.shape == a.shape
    assert np.array_equal(back.view(np.uint64), a.view(np.uint64))


def test_save_load_byte_identical(tmp_path):
    for kind in KINDS:
        t = generate_commuting_tuple(GeneratorSpec(kind, 5, 3, seed=9, conjugate=True))
        f = tmp_path / f"{kind}.json"
        io.save_tuple(t, f)
        loaded = io.load_tuple(f)
        for x, y in zip(t, loaded):
            assert np.array_equal(x, y)
        g = tmp_path / f"{kind}-again.json"
        io.save_tuple(loaded, g)
        assert f.read_bytes() == g.read_bytes()


def test_canonical_layout():
    text = io.dumps_tuple([np.array([[1, 2j], [0.1, -0.0]])])
    assert text.endswith("\n") and text.count("\n") == 1
    doc = json.loads(text)
    assert doc["dim"] == 2 and doc["n"] == 1
    assert doc["operators"][0]["entries"] == [[1.0, 0.0], [0.0, 2.0], [0.1, 0.0], [-0.0, 0.0]]


def test_wrong_entry_count_names_the_matrix():
    doc = json.loads(io.dumps_tuple([np.eye(2), np.eye(2)]))
    doc["operators"][1]["entries"].pop()
    with pytest.raises(ParseError, match="operator 1: expected 4 entries, got 3"):
        io.parse_operators(json.dumps(doc))


def test_invalid_json_reports_position():
    with pytest.raises(ParseError) as exc:
        io.parse_operators('{"dim": 2,\n "operators": [}')
    assert exc.value.line == 2 and exc.value.offset is not None


@pytest.mark.parametrize(
    "doc, err",
    [
        ({"dim": 2}, ParseError),
        ({"operators": []}, ParseError),
        ({"operators": [{"rows": 1, "cols": 1}]}, ParseError),
        ({"operators": [{"rows": 1, "cols": 1, "entries": [[1, "x"]]}]}, ParseError),
        ({"operators": [{"rows": 1, "cols": 1, "entries": [[1]]}]}, ParseError),
        ({"operators": [{"rows": 0, "cols": 1, "entries": []}]}, ParseError),
        ({"operators": [{"rows": 1, "cols": 1, "entries": [[True, 0]]}]}, ParseError),
        ({"operators": ["x"]}, ParseError),
        ({"n": 2, "operators": [{"rows": 1, "cols": 1, "entries": [[1, 0]]}]}, DimensionMismatch),
        ({"dim": 2, "operators": [{"rows": 1, "cols": 1, "entries": [[1, 0]]}]}, DimensionMismatch),
        ({"operators": [{"rows": 1, "cols": 2, "entries": [[1, 0], [2, 0]]}]}, DimensionMismatch),
    ],
)
def test_malformed_documents(doc, err):
    with pytest.raises(err):
        io.parse_operators(json.dumps(doc))


def test_non_finite_entries_rejected():
    text = '{"operators": [{"rows": 1, "cols": 1, "entries": [[NaN, 0]]}]}'
    with pytest.raises(ParseError, match="not finite"):
        io.parse_operators(text)


def test_noncommuting_file(tmp_path):
    f = tmp_path / "bad.json"
    io.save_tuple([np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]])], f)
    with pytest.raises(NotCommuting) as exc:
        io.load_tuple(f)
    assert exc.value.defect == pytest.approx(np.sqrt(2))
    assert "1.414e+00" in str(exc.value)


def test_report_round_trip(tmp_path):
    report = {"b": [1, 2.5], "a": {"x": None, "y": True}}
    f = tmp_path / "r.json"
    io.save_report(report, f)
    assert io.load_report(f) == report
    assert f.read_text() == io.dumps_report(report)
    (tmp_path / "junk.json").write_text("{")
    with pytest.raises(ParseError):
        io.load_report(tmp_path / "junk.json")


def test_spectrum_exports():
    t = validate_commuting([np.diag([1, 2]), np.diag([3, 4j])])
    spec = taylor_spectrum(t)
    doc = io.spectrum_to_dict(spec)
    assert sorted(map(tuple, (tuple(map(tuple, p)) for p in doc["points"]))) == [((1, 0), (3, 0)), ((2, 0), (0, 4))]
    assert doc["homology"] == [[1, 2, 1], [1, 2, 1]]
    rows = io.spectrum_to_csv(spec).splitlines()
    assert rows[0] == "index,multiplicity,re_1,im_1,re_2,im_2,h_0,h_1,h_2"
    assert len(rows) == 3
