"""Shared test helpers: independent oracles, model generators, and the
acceptance-criteria summary printed at the end of a run."""

from __future__ import annotations

import math

import numpy as np
import pytest

from exin import LinearPredictor, Task

# --- independent oracles (pure Python, no shared code with the library) ---


def linear_oracle(bias: float, coeffs: dict[int, float], row) -> float:
    """Direct per-row summation; index 0 and unknown indices contribute 0."""
    return bias + sum(coeffs.get(int(i), 0.0) for i in row)


def softmax_oracle(scores: list[float]) -> list[float]:
    exps = [math.exp(s - max(scores)) for s in scores]
    total = sum(exps)
    return [e / total for e in exps]


def classification_oracle(
    biases: list[float], coeff_maps: list[dict[int, float]], row
) -> list[float]:
    return softmax_oracle([linear_oracle(b, m, row) for b, m in zip(biases, coeff_maps)])


# --- random model/sentence generators ----------------------------------

DYADIC_DENOM = 1024


def dyadic(rng: np.random.Generator, low: float, high: float) -> float:
    """A random multiple of 1/1024 in [low, high].

    Sums of a few dozen such values are exact in float64, which lets
    "tolerance 0" comparisons hold by construction.
    """
    lo = int(low * DYADIC_DENOM)
    hi = int(high * DYADIC_DENOM)
    return int(rng.integers(lo, hi + 1)) / DYADIC_DENOM


def random_regressor(
    rng: np.random.Generator,
    vocab_size: int = 60,
    coeff_range: tuple[float, float] = (-1.0, 1.0),
    bias_range: tuple[float, float] = (-2.0, 2.0),
) -> tuple[LinearPredictor, float, dict[int, float]]:
    coeffs = {i: dyadic(rng, *coeff_range) for i in range(1, vocab_size + 1)}
    bias = dyadic(rng, *bias_range)
    return LinearPredictor.regression(bias, coeffs), bias, coeffs


def random_classifier(
    rng: np.random.Generator, num_classes: int = 2, vocab_size: int = 60
) -> tuple[LinearPredictor, list[float], list[dict[int, float]]]:
    biases = [dyadic(rng, -1.0, 1.0) for _ in range(num_classes)]
    maps = [
        {i: dyadic(rng, -1.0, 1.0) for i in range(1, vocab_size + 1)}
        for _ in range(num_classes)
    ]
    return LinearPredictor.classification(biases, maps), biases, maps


def random_row(rng: np.random.Generator, n: int, vocab_size: int = 60) -> np.ndarray:
    return rng.integers(1, vocab_size + 1, size=n).astype(np.int64)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0xE1)


# --- acceptance summary -------------------------------------------------

_CRITERIA: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and rep.when == "call":
        num, title = marker.args
        _CRITERIA[str(num)] = (title, rep.outcome)
    elif marker and rep.when == "setup" and rep.outcome == "skipped":
        num, title = marker.args
        _CRITERIA[str(num)] = (title, "skipped")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA, key=lambda s: (len(s), s)):
        title, outcome = _CRITERIA[num]
        word = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIPPED"}.get(outcome, outcome)
        terminalreporter.write_line(f"criterion {num} ({title}): {word}")
