"""The full verification battery, one test per criterion.

Each test runs the corresponding acceptance criterion at its stated
tolerances and budget and prints its one-line verdict; together they are
the reproduction gate for the package.  Criteria 7 and 8 integrate real
blowup dynamics and take several minutes each.
"""
from __future__ import annotations

import pytest

from ymheat import acceptance


def _check(idx: int):
    res = acceptance.CRITERIA[idx]()
    print(res.line(), flush=True)
    assert res.index == idx
    assert res.passed, res.line()
    return res


def test_criterion_1_bound_state_certificate():
    _check(1)


def test_criterion_2_tail_positivity():
    _check(2)


def test_criterion_3_spectral_certification():
    _check(3)


def test_criterion_4_eigensolver_calibration():
    _check(4)


def test_criterion_5_closed_form_residuals():
    _check(5)


def test_criterion_6_linear_dynamics():
    _check(6)


def test_criterion_7_blowup_time_shooting():
    _check(7)


def test_criterion_8_physical_blowup():
    _check(8)


def test_criterion_9_parabolic_scaling():
    _check(9)


def test_run_all_validates_selection():
    with pytest.raises(ValueError):
        acceptance.run_all(only=[42])
