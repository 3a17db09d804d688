import numpy as np
import pytest

from hypbc.io import parse_spec, preset_to_dict
from hypbc.models import get_preset
from hypbc.verify import PROPERTIES, applicable, hemisphere_samples, run_suite


def spec(name):
    return parse_spec({"preset": {"name": name, "params": {}}})


def test_hemisphere_samples():
    v = hemisphere_samples(3, 100, 0)
    assert np.allclose(np.linalg.norm(v, axis=1), 1.0)
    assert np.all(v[:, -1] > 0)


def test_applicable_sets():
    assert "wave_modulus" in applicable(spec("wave_neumann"))
    assert {"re_sqrt", "oblique_re"} <= set(applicable(spec("wave_oblique")))
    m = applicable(spec("maxwell"))
    assert {"symmetric", "trace_estimate", "maxwell_bound"} <= set(m)
    assert set(m) <= set(PROPERTIES)


@pytest.mark.parametrize("name", ["symmetric_control", "wave_neumann", "wave_oblique"])
def test_suites_pass(name):
    results = run_suite(spec(name), samples=2000)
    assert all(r.passed for r in results), [r for r in results if not r.passed]


def test_maxwell_literal_inequality_reported():
    (r,) = run_suite(spec("maxwell"), ["maxwell_bound"], samples=5000)
    # chain identity holds; the constant-one inequality does not
    assert "chain error" in r.detail
    assert r.margin == pytest.approx(1 / np.sqrt(2), rel=0.05)
    assert not r.passed


def test_tampered_a0_fails_symmetric():
    d = preset_to_dict(get_preset("maxwell"))
    del d["preset"]
    d["A"][0][0][0] = [-1.0, 0.0]
    (r,) = run_suite(parse_spec(d), ["symmetric"], samples=100)
    assert not r.passed and r.margin < 0


def test_unknown_property():
    with pytest.raises(KeyError):
        run_suite(spec("maxwell"), ["nope"])
