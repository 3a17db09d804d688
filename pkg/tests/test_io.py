import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from hypbc.errors import ParseError
from hypbc.hyperbolic import classify
from hypbc.io import GridField, load_spec, parse_spec, preset_to_dict, read_field, write_field, write_spec
from hypbc.models import PRESETS, get_preset


@pytest.mark.parametrize("name", list(PRESETS))
def test_preset_round_trip_classifies_identically(name, tmp_path):
    p = get_preset(name)
    path = tmp_path / "spec.json"
    write_spec(path, preset_to_dict(p))
    spec = load_spec(path)
    assert np.allclose(spec.system.Ad, p.system.Ad)
    assert classify(spec.system) == classify(p.system)


def test_matrix_spec_without_preset(tmp_path):
    d = preset_to_dict(get_preset("maxwell"))
    del d["preset"]
    spec = parse_spec(d)
    assert spec.system.N == 6 and spec.B.mu == 2


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d["B"][0].pop(), "B[0]"),
        (lambda d: d["A"].pop(), "A"),
        (lambda d: d["A"][1][0].__setitem__(0, [1.0]), "A[1][0][0]"),
        (lambda d: d["A"][0][0].__setitem__(0, ["x", 0]), "A[0][0][0][0]"),
        (lambda d: d.pop("N"), ""),
    ],
)
def test_parse_errors_name_the_field(mutate, path):
    d = preset_to_dict(get_preset("maxwell"))
    del d["preset"]
    mutate(d)
    with pytest.raises(ParseError) as exc:
        parse_spec(d)
    assert exc.value.path == path or path in str(exc.value)


def test_parse_rejects_nan(tmp_path):
    d = preset_to_dict(get_preset("symmetric_control"))
    del d["preset"]
    d["A"][0][0][0] = [float("nan"), 0.0]
    path = tmp_path / "nan.json"
    path.write_text(json.dumps(d))
    with pytest.raises(ParseError, match="NaN"):
        load_spec(path)


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{ nope")
    with pytest.raises(ParseError, match="line 1"):
        load_spec(path)


@settings(max_examples=25, deadline=None)
@given(
    arrays(np.complex128, st.tuples(st.integers(1, 3), st.integers(1, 5), st.integers(1, 4)),
           elements=st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)),
    st.floats(0, 100),
)
def test_grid_field_round_trip(tmp_path_factory, data, gamma):
    path = tmp_path_factory.mktemp("gf") / "f.bin"
    write_field(path, GridField(data, (0.5, 0.25), gamma))
    back = read_field(path)
    assert np.array_equal(back.data, data)
    assert back.spacings == (0.5, 0.25) and back.gamma == gamma


def test_grid_field_errors(tmp_path):
    path = tmp_path / "f.bin"
    with pytest.raises(ValueError):
        write_field(path, GridField(np.zeros((2, 2)), (1.0, 1.0)))
    write_field(path, GridField(np.zeros((2, 3)), (1.0,)))
    raw = path.read_bytes()
    path.write_bytes(raw[:-8])
    with pytest.raises(ParseError, match="payload"):
        read_field(path)
    path.write_bytes(b"XXXXXXXX" + raw[8:])
    with pytest.raises(ParseError, match="magic"):
        read_field(path)
    path.write_bytes(raw[:14])
    with pytest.raises(ParseError, match="truncated"):
        read_field(path)
