"""
Shared fixtures for the blockfade test suite.
"""

import json
import math
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from src.modules import spectra
from src.modules.highsnr import worst_case_spectrum

SAMPLE_MODELS = Path(__file__).resolve().parent.parent / "sample_models"


@pytest.fixture(scope="session")
def client():
    from app import app

    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture
def sample_model():
    """Path of a model file shipped in sample_models/."""

    def _path(name: str) -> str:
        return str(SAMPLE_MODELS / f"{name}.json")

    return _path


@pytest.fixture
def write_model(tmp_path):
    """Write a payload (dict or raw text) to a model file and return its path."""

    def _write(payload, name: str = "model.json") -> str:
        path = tmp_path / name
        text = payload if isinstance(payload, str) else json.dumps(payload)
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def gauss_markov():
    return spectra.scalar_gauss_markov(0.9)


@pytest.fixture
def block_gauss_markov():
    return spectra.block_gauss_markov_model(2, 0.3, 0.8)


@pytest.fixture
def half_zero_model():
    """Scalar spectrum vanishing on half of the circle."""
    return spectra.scalar_model(worst_case_spectrum(math.pi))


@pytest.fixture(params=[0.3, 0.8])
def paired_block(request):
    return request.param, spectra.paired_block_model(request.param)
