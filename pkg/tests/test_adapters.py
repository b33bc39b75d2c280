"""
Tests for the model and output adapters.
"""

import json
import math

import pytest

from src.adapters.model_adapter import ModelAdapter
from src.adapters.output_adapter import OutputAdapter, to_jsonable
from src.models.response_models import RunManifest, SubsetEntry
from src.modules.errors import InvalidModelError, ModelParseError


@pytest.fixture
def adapter():
    return ModelAdapter()


@pytest.fixture
def manifest():
    return RunManifest(subcommand="cp", tolerance_requested=1e-8, tool_version="test")


@pytest.mark.parametrize("name, kind, T", [
    ("gauss_markov", "scalar_gauss_markov", 1),
    ("block_gauss_markov", "block_gauss_markov", 2),
    ("paired_block", "truncated_fourier", 3),
    ("iid", "scalar", 1),
    ("half_band", "scalar", 1),
])
def test_sample_models_load(adapter, sample_model, name, kind, T):
    model = adapter.load(sample_model(name))
    assert model.kind == kind
    assert model.T == T


def test_rounded_boundaries_are_renormalized(adapter, sample_model):
    spectrum = adapter.scalar_spectrum(json.loads(open(sample_model("half_band")).read()))
    assert spectrum.segments[-1][1] == math.pi
    assert spectrum.total_mass() == pytest.approx(1.0, abs=1e-14)


def test_invalid_json_reports_position(adapter, write_model):
    path = write_model('{\n  "kind": "flat",\n  oops\n}')
    with pytest.raises(ModelParseError, match="line 3") as info:
        adapter.load(path)
    assert info.value.line == 3


def test_schema_errors(adapter, write_model):
    with pytest.raises(ModelParseError, match="scalar_gauss_markov.rho"):
        adapter.load(write_model({"kind": "scalar_gauss_markov"}))
    with pytest.raises(ModelParseError, match="schema error"):
        adapter.load(write_model({"kind": "rician", "K": 3}))
    with pytest.raises(ModelParseError, match="cannot read"):
        adapter.load(write_model({"kind": "flat"}) + ".missing")


def test_shape_mismatch(adapter):
    payload = {"kind": "correlation", "T": 2, "lags": [{"i": 0, "matrix": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}]}
    with pytest.raises(ModelParseError, match="shape"):
        adapter.build(payload)


def test_invalid_correlation_is_a_model_error(adapter):
    payload = {"kind": "correlation", "T": 2, "lags": [{"i": 0, "matrix": [[2, 0], [0, 1]]}]}
    with pytest.raises(InvalidModelError):
        adapter.build(payload)


def test_complex_coefficients(adapter):
    model = adapter.build({"kind": "scalar_gauss_markov", "rho": {"re": 0.5, "im": 0.5}})
    assert model.rho == complex(0.5, 0.5)
    assert model.evaluate([0.0])[0, 0, 0].real == pytest.approx(1.0)


def test_nested_constant_within_block(adapter):
    model = adapter.build({"kind": "constant_within_block", "T": 3, "scalar": {"kind": "flat"}})
    assert model.T == 3
    with pytest.raises(ModelParseError):
        adapter.scalar_spectrum({"kind": "block_gauss_markov", "T": 2, "rho1": 0.3, "rho2": 0.8})


def test_json_rendering(manifest):
    text = OutputAdapter("json").render(manifest, SubsetEntry(mask=1, label="{1}", psi=float("inf")))
    payload = json.loads(text)
    assert payload["manifest"]["subcommand"] == "cp"
    assert payload["result"] == {"mask": 1, "label": "{1}", "psi": "Infinity"}


def test_csv_rendering(manifest, tmp_path):
    rows = [SubsetEntry(mask=1, label="{1}", psi=1.5), SubsetEntry(mask=3, label="{1,2}", psi=float("-inf"))]
    target = tmp_path / "out" / "scan.csv"
    text = OutputAdapter("csv", target).write(manifest, rows)
    lines = text.splitlines()
    assert lines[0].startswith("# manifest: {")
    assert json.loads(lines[0][len("# manifest: "):])["tool_version"] == "test"
    assert lines[1] == "mask,label,psi"
    assert lines[2] == "1,{1},1.5"
    assert lines[3] == '3,"{1,2}",-Infinity'
    assert target.read_text(encoding="utf-8") == text


def test_to_jsonable_and_format_check():
    assert to_jsonable({"a": [1.0, float("nan")], "b": 1 + 2j}) == {"a": [1.0, "NaN"], "b": {"re": 1.0, "im": 2.0}}
    with pytest.raises(ValueError):
        OutputAdapter("xml")
