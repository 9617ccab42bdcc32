"""Acceptance criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v``; the lines are repeated in the
"acceptance criteria" section of the terminal summary. Running this file
directly prints the same lines without pytest.
"""

import pytest

from qdgate.model import PhysicalParams
from qdgate.verification import (
    PresetRuns,
    check_analytic_equivalence,
    check_conservation,
    check_detailed_balance,
    check_full_space_oracle,
    check_gate_time,
    check_numerics,
    check_second_peak,
    check_spectral_values,
    check_spontaneous_limit,
    check_spontaneous_oscillations,
    check_temperature_ordering,
)

P = PhysicalParams()


@pytest.fixture(scope="module")
def presets():
    return PresetRuns(P)


def _report(report_line, label, check):
    report_line(f"[{label}] {check.line()}")
    for extra in check.info:
        report_line(f"[{label}]       {extra}")
    assert check.passed, check.detail


def test_1_noiseless_analytic_equivalence(report_line):
    _report(report_line, "1", check_analytic_equivalence(P))


def test_2_gate_time(report_line):
    _report(report_line, "2", check_gate_time(P))


def test_3_full_space_oracle(report_line):
    _report(report_line, "3", check_full_space_oracle(P))


def test_4_conservation(report_line, presets):
    _report(report_line, "4", check_conservation(presets))


def test_5a_line_low_zero_temperature(report_line, presets):
    _report(report_line, "5a", check_spontaneous_limit(presets))


def test_5b_temperature_damping(report_line, presets):
    _report(report_line, "5b", check_temperature_ordering(presets))


def test_5c_second_peak_lower(report_line, presets):
    _report(report_line, "5c", check_second_peak(presets))


def test_5d_spontaneous_oscillations(report_line, presets):
    _report(report_line, "5d", check_spontaneous_oscillations(presets))


def test_6_detailed_balance(report_line):
    _report(report_line, "6", check_detailed_balance())


def test_7_numerics(report_line, presets):
    _report(report_line, "7", check_numerics(presets))


def test_8_spectral_values(report_line):
    _report(report_line, "8", check_spectral_values(P))


if __name__ == "__main__":
    from qdgate.verification import run_all

    labels = ["1", "2", "3", "4", "5a", "5b", "5c", "5d", "6", "7", "8"]
    for label, check in zip(labels, run_all(P)):
        print(f"[{label}] {check.line()}")
