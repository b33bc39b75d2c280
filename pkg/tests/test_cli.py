"""
Tests for the blockfade command line.
"""

import json
import math

import pytest

from src.config import config
from src.modules.unit_energy import cp_block_gauss_markov
from src.scripts.blockfade_cli import EXIT_INVALID, EXIT_MODEL_PARSE, EXIT_OK, dispatch, parse_snr_grid
from src.services.validation_service import ValidationService


@pytest.fixture
def run(capsys):
    """Run the CLI and return (exit code, stdout)."""

    def _run(*argv):
        code = dispatch([str(a) for a in argv])
        return code, capsys.readouterr().out

    return _run


def _result(stdout: str):
    return json.loads(stdout)["result"]


def test_cp_reports_tie_at_crossover(run, sample_model):
    code, out = run("cp", "--model", sample_model("paired_block"), "--snr", 7.5, "--format", "json")
    assert code == EXIT_OK
    (scan,) = _result(out)
    assert set(scan["argmin_labels"]) == {"{1,2}", "{1,2,3}"}


CONSTANT_IID = {"kind": "constant_within_block", "T": 4, "scalar": {"kind": "flat"}}
CONSTANT_GAUSS_MARKOV = {"kind": "constant_within_block", "T": 3, "scalar": {"kind": "scalar_gauss_markov", "rho": 0.5}}


@pytest.mark.parametrize("payload, snr, formula, expected", [
    (CONSTANT_IID, 1.0, "block-independent-constant", 1.0 - math.log(5.0) / 4.0),
    (CONSTANT_GAUSS_MARKOV, 2.0, "block-gauss-markov", cp_block_gauss_markov(3, 2.0, 0.5)),
])
def test_cp_closed_form_matches_scan(run, write_model, payload, snr, formula, expected):
    path = write_model(payload)
    code, out = run("cp", "--model", path, "--snr", snr, "--closed-form", "auto")
    assert code == EXIT_OK
    (closed,) = _result(out)
    assert closed["formula"] == formula
    assert closed["cp"] == pytest.approx(expected, rel=1e-12)

    code, out = run("cp", "--model", path, "--snr", snr, "--scan")
    assert code == EXIT_OK
    (scan,) = _result(out)
    assert scan["cp"] == pytest.approx(expected, rel=1e-6)
    assert len(scan["argmin_labels"]) == 1
    assert scan["argmin_labels"][0].count(",") == payload["T"] - 1


def test_cp_closed_form_falls_back_to_scan(run, sample_model):
    code, out = run("cp", "--model", sample_model("paired_block"), "--snr", 1.0, "--closed-form", "auto")
    assert code == EXIT_OK
    (scan,) = _result(out)
    assert scan["argmin_labels"] == ["{1,2,3}"]
    assert "formula" not in scan

    code, _ = run("cp", "--model", sample_model("paired_block"), "--snr", 1.0, "--scan", "--closed-form", "auto")
    assert code == EXIT_INVALID


@pytest.mark.parametrize("command, model, extra", [
    ("cp", "paired_block", ("--snr", 1.0)),
    ("cp", "gauss_markov", ("--snr", 1.0, "--asymptotes")),
    ("cp-crossover", "paired_block", ("--m1", "1,2", "--m2", "1,2,3")),
    ("prelog", "gauss_markov", ()),
])
def test_manifest_reports_achieved_tolerance(run, sample_model, command, model, extra):
    code, out = run(command, "--model", sample_model(model), *extra, "--format", "json")
    assert code == EXIT_OK
    achieved = json.loads(out)["manifest"]["tolerance_achieved"]
    assert achieved is not None
    assert achieved >= 0.0


def test_cp_crossover(run, sample_model):
    code, out = run("cp-crossover", "--model", sample_model("paired_block"), "--m1", "1,2", "--m2", "{1,2,3}")
    assert code == EXIT_OK
    assert _result(out)["snr"] == pytest.approx(7.5, rel=1e-6)


def test_fading_number(run, sample_model):
    code, out = run("fading-number", "--model", sample_model("iid"))
    assert code == EXIT_OK
    assert _result(out)["fading_number"] == pytest.approx(-1.5772157, abs=1e-6)

    code, _ = run("fading-number", "--model", sample_model("half_band"))
    assert code == EXIT_INVALID


def test_tau_closed_form(run):
    code, out = run("tau", "--arcs", f"0:{math.pi}")
    assert code == EXIT_OK
    result = _result(out)
    assert result["method"] == "closed-form"
    assert result["tau"] == pytest.approx(0.7071068, abs=1e-7)


def test_tau_from_model_support(run, sample_model):
    code, out = run("tau", "--model", sample_model("half_band"))
    assert code == EXIT_OK
    assert _result(out)["tau"] == pytest.approx(0.7071068, abs=1e-6)


def test_scaling_from_tau(run):
    code, out = run("scaling", "--rate", 1.0, "--pe", 0.1, "--tau", math.sin(math.pi / 4.0))
    assert code == EXIT_OK
    assert _result(out)["min_blocklength_over_log_inverse_energy"] == pytest.approx(2.5968, abs=1e-4)

    code, _ = run("scaling", "--rate", 1.0, "--pe", 0.1, "--tau", 1.0)
    assert code == EXIT_INVALID


def test_scaling_accepts_short_rate_flag(run):
    code, out = run("scaling", "--r", 1.0, "--pe", 0.1, "--tau", math.sin(math.pi / 4.0))
    assert code == EXIT_OK
    assert _result(out)["rate"] == pytest.approx(1.0)


def test_exit_codes(run, write_model):
    code, _ = run("cp", "--model", write_model("{\n  \"kind\": "), "--snr", 1.0)
    assert code == EXIT_MODEL_PARSE
    code, _ = run("cp", "--model", write_model({"kind": "flat"}))
    assert code == EXIT_INVALID
    code, _ = run("no-such-command")
    assert code == EXIT_INVALID
    code, out = run("--help")
    assert code == EXIT_OK
    assert "blockfade" in out


def test_bounds_csv_manifest(run, sample_model):
    code, out = run("bounds", "--model", sample_model("gauss_markov"), "--snr", 100, "--snr", 1e4)
    assert code == EXIT_OK
    lines = out.splitlines()
    manifest = json.loads(lines[0][len("# manifest: "):])
    assert manifest["subcommand"] == "bounds"
    assert manifest["model_path"] == sample_model("gauss_markov")
    assert lines[1].startswith("snr,lower,upper,x_min")
    assert len(lines) == 4
    assert manifest["tolerance_achieved"] is not None


def test_exponent_rate_offset(run):
    code, out = run("exponent", "awgn", "--snr", 1e8, "--rate-offset", math.log(1.5))
    assert code == EXIT_OK
    assert _result(out)["exponent"] == pytest.approx(1.5 - 1.0 - math.log(1.5), abs=1e-3)

    code, _ = run("exponent", "awgn", "--snr", 10, "--rate", 0.5, "--rate-offset", 1.0)
    assert code == EXIT_INVALID


def test_snr_in_db(run):
    code, out = run("exponent", "rayleigh", "--snr", 10, "--db", "--rate", 0.5)
    assert code == EXIT_OK
    assert _result(out)["snr"] == pytest.approx(10.0)


def test_snr_grid():
    assert parse_snr_grid("1:100:3") == pytest.approx([1.0, 10.0, 100.0])
    assert parse_snr_grid("0:20:3", db=True) == pytest.approx([1.0, 10.0, 100.0])


def test_validate_subset(run):
    code, out = run("validate", "--check", "paired-block-closed-forms", "--check", "awgn-exponent-limit")
    assert code == EXIT_OK
    report = _result(out)
    assert report["passed"]
    assert [c["name"] for c in report["checks"]] == ["paired-block-closed-forms", "awgn-exponent-limit"]

    code, _ = run("validate", "--check", "no-such-check")
    assert code == EXIT_INVALID


def test_config_restored_after_run(run, sample_model):
    history = config.history_len
    code, _ = run("sigmas", "--model", sample_model("gauss_markov"), "--snr", 10, "--history", 5)
    assert code == EXIT_OK
    assert config.history_len == history


def test_sigmas_of_markov_blocks(run, sample_model):
    code, out = run("sigmas", "--model", sample_model("block_gauss_markov"), "--snr", "inf", "--history", 1)
    assert code == EXIT_OK
    result = _result(out)
    assert result["snr"] == "Infinity"
    assert result["sigmas"] == pytest.approx([0.91, 0.36], rel=1e-12)


def test_simulate(run, sample_model):
    code, out = run(
        "simulate", "--model", sample_model("gauss_markov"), "--snr", 10, "--paths", 200, "--len", 4,
        "--history", 2, "--seed", 1,
    )
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[1] == "position,snr,analytic,empirical,stderr,z_score"
    assert len(lines) == 3


def test_spectrum_eval_json(run, sample_model):
    code, out = run("spectrum-eval", "--model", sample_model("gauss_markov"), "--omega", 0, "--format", "json")
    assert code == EXIT_OK
    (point,) = _result(out)
    assert point["real"] == [[pytest.approx(19.0)]]


def test_output_file(run, sample_model, tmp_path):
    target = tmp_path / "cp.json"
    code, out = run("cp", "--model", sample_model("paired_block"), "--snr", 1.0, "--output", target)
    assert code == EXIT_OK
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["manifest"]["output_path"] == str(target)


@pytest.mark.slow
def test_full_validation_suite():
    report = ValidationService().run()
    failed = [(c.name, c.detail, c.value, c.expected) for c in report.checks if not c.passed]
    assert report.passed, failed
