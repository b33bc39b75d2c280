"""
Validation service for the blockfade toolkit.

Runs the cross-module identity suite: determinant identities, closed forms
against subset scans, crossover location, worst-case variance, fading
numbers, the rank lemma and exponent limits.
"""

import logging
import math
from typing import Callable, List, Optional, Tuple

import numpy as np

from src.config import config
from src.models.response_models import ValidationCheck, ValidationReport
from src.modules import bounds, codelength, highsnr, prediction, spectra, unit_energy
from src.modules.errors import InvalidParameterError

logger = logging.getLogger(__name__)

Outcome = Tuple[float, float, float]


def _ldl_identity() -> Outcome:
    summary = prediction.innovation_variances(spectra.scalar_gauss_markov(0.9), 10.0, history_len=512)
    return summary.logdet_gap, 0.0, 1e-4


def _sandwich() -> Outcome:
    lower, middle, upper = prediction.prediction_sandwich(spectra.scalar_gauss_markov(0.9), 10.0)
    ok = lower <= middle + 1e-12 and middle <= upper + 1e-12
    return float(ok), 1.0, 0.0


def _block_sandwich() -> Outcome:
    _, middle, upper = prediction.prediction_sandwich(spectra.block_gauss_markov_model(2, 0.3, 0.8), 10.0)
    return float(middle <= upper + 1e-12), 1.0, 0.0


def _scan_vs_independent_blocks() -> Outcome:
    model = spectra.constant_within_block(2, spectra.flat_spectrum())
    return unit_energy.cp_scan(model, 1.0).cp, unit_energy.cp_block_indep_constant(2, 1.0), 1e-6


def _scan_vs_gauss_markov_blocks() -> Outcome:
    model = spectra.constant_within_block(2, spectra.scalar_gauss_markov(0.5))
    return unit_energy.cp_scan(model, 5.0).cp, unit_energy.cp_block_gauss_markov(2, 5.0, 0.5), 1e-6


def _paired_block_crossover() -> Outcome:
    model = spectra.paired_block_model(0.8)
    found = unit_energy.crossover_snr(model, [1, 2], [1, 2, 3]).snr
    return found, unit_energy.paired_block_crossover(0.8), 1e-6 * 7.5


def _paired_block_closed_forms() -> Outcome:
    scan = unit_energy.cp_scan(spectra.paired_block_model(0.8), 2.0)
    closed = unit_energy.paired_block_closed_forms(0.8, 2.0)
    worst = max(abs(entry.psi - closed[entry.label]) for entry in scan.entries)
    return worst, 0.0, 1e-9


def _worst_case_variance() -> Outcome:
    alpha, x_min = math.pi, 10.0
    direct = prediction.noisy_past_prediction_variance(highsnr.worst_case_spectrum(alpha), x_min)
    return direct, highsnr.worst_case_variance(alpha, x_min), 1e-12


def _fading_number_gauss_markov() -> Outcome:
    value = highsnr.fading_number(spectra.scalar_gauss_markov(0.9))
    return value, -1.0 - highsnr.EULER_GAMMA - math.log(0.19), 1e-6


def _fading_number_block_gauss_markov() -> Outcome:
    value = highsnr.fading_number(spectra.block_gauss_markov_model(2, 0.3, 0.8))
    return value, highsnr.block_gauss_markov_fading_number(2, 0.3, 0.8), 1e-6


def _rank_lemma() -> Outcome:
    rng = np.random.default_rng(config.seed)
    worst = 0.0
    for _ in range(10):
        family = highsnr.random_rank_family(rng, M=3, n_pieces=5)
        expected = highsnr.rank_profile_of_pieces(family)
        slope = highsnr.epsilon_logdet_slope(family, [1e-8, 1e-10, 1e-12])
        worst = max(worst, abs(slope - expected) / max(expected, 1e-12) if expected else abs(slope))
    return worst, 0.0, 0.01


def _awgn_limit() -> Outcome:
    eta, snr = 1.5, 1e8
    value = codelength.awgn_exponent(math.log(snr) - math.log(eta), snr)
    return value, eta - 1.0 - math.log(eta), 1e-3


def _decay_rate() -> Outcome:
    spectrum = spectra.piecewise_spectrum([(0.0, math.pi / 2.0, 2.0), (math.pi / 2.0, math.pi, 0.0)])
    result = codelength.prediction_decay_rate(spectrum)
    target = codelength.arc_transfinite_diameter(math.pi)
    return result.tau_estimate, target, 0.05 * target


def _bound_ordering() -> Outcome:
    models = [
        spectra.scalar_gauss_markov(0.9),
        spectra.scalar_model(highsnr.worst_case_spectrum(math.pi)),
        spectra.scalar_model(spectra.vanishing_spectrum(math.pi / 2.0, 4.0)),
    ]
    worst = min(
        bounds.capacity_upper(m, snr) - bounds.capacity_lower(m, snr)
        for m in models for snr in (1.0, 1e2, 1e4)
    )
    return float(worst >= -1e-9), 1.0, 0.0


CHECKS: List[Tuple[str, Callable[[], Outcome]]] = [
    ("ldl-identity", _ldl_identity),
    ("sandwich-scalar", _sandwich),
    ("sandwich-block-upper", _block_sandwich),
    ("scan-vs-independent-blocks", _scan_vs_independent_blocks),
    ("scan-vs-gauss-markov-blocks", _scan_vs_gauss_markov_blocks),
    ("paired-block-crossover", _paired_block_crossover),
    ("paired-block-closed-forms", _paired_block_closed_forms),
    ("worst-case-variance", _worst_case_variance),
    ("fading-number-gauss-markov", _fading_number_gauss_markov),
    ("fading-number-block-gauss-markov", _fading_number_block_gauss_markov),
    ("rank-lemma", _rank_lemma),
    ("awgn-exponent-limit", _awgn_limit),
    ("prediction-decay-rate", _decay_rate),
    ("bound-ordering", _bound_ordering),
]


class ValidationService:
    """Service running the cross-module identity suite."""

    def __init__(self):
        """Initialize ValidationService."""
        logger.info("ValidationService initialized")

    def run(self, only: Optional[List[str]] = None) -> ValidationReport:
        """
        Run every check (or the named subset).

        Returns:
            ValidationReport; passed is False if any check fails or raises
        """
        unknown = sorted(set(only or []) - {name for name, _ in CHECKS})
        if unknown:
            raise InvalidParameterError(f"unknown validation checks: {unknown}")
        results = []
        for name, check in CHECKS:
            if only and name not in only:
                continue
            try:
                value, expected, tolerance = check()
                passed = abs(value - expected) <= tolerance
                results.append(ValidationCheck(
                    name=name, passed=passed, value=value, expected=expected, tolerance=tolerance
                ))
            except Exception as e:
                logger.error(f"Validation check {name} raised: {e}", exc_info=True)
                results.append(ValidationCheck(name=name, passed=False, detail=str(e)))
                continue
            level = logging.INFO if passed else logging.WARNING
            logger.log(level, f"{name}: {'ok' if passed else 'FAILED'} (value={value!r}, expected={expected!r})")
        return ValidationReport(passed=all(r.passed for r in results), checks=results)
