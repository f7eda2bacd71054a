"""Eigenvalue ladders of the linearized, susy-partner and free operators."""
from __future__ import annotations

import numpy as np
import pytest

from ymheat.model import eval_profile, make_dimension, make_grid
from ymheat.spectral import (
    OPERATOR_KINDS,
    discretize,
    eigen_lowest,
    eigenfunction_residual,
    make_operator,
    richardson_eigen,
    spectral_gap,
    susy_isospectrality,
)

# extrapolated first stable eigenvalues at R=20, N=4000/8000, frozen
GAPS = {5: 0.634055, 6: 0.460437, 7: 0.337761, 8: 0.234816, 9: 0.134582}


def test_free_ladder_is_integers():
    dim = make_dimension(5)
    res = richardson_eigen(dim, "free", k=3)
    assert np.allclose(res.extrapolated, [1.0, 2.0, 3.0], atol=1e-3)


def test_linearized_ground_state_is_minus_one():
    for d in (5, 7, 9):
        res = richardson_eigen(make_dimension(d), "linearized", k=1)
        assert res.extrapolated[0] == pytest.approx(-1.0, abs=5e-3)


@pytest.mark.parametrize("d", sorted(GAPS))
def test_spectral_gap_frozen(d):
    assert spectral_gap(make_dimension(d)) == pytest.approx(GAPS[d], abs=2e-5)


def test_gap_shrinks_toward_critical_dimension():
    vals = [GAPS[d] for d in sorted(GAPS)]
    assert vals == sorted(vals, reverse=True)


def test_susy_partner_isospectral_above_ground_state():
    out = susy_isospectrality(make_dimension(6), k=3)
    assert out["max_mismatch"] <= 5e-3
    assert np.all(out["susy"] > 0)
    assert out["linearized"].shape == (3,)


def test_susy_partner_has_no_negative_levels():
    for d in (5, 9):
        res = richardson_eigen(make_dimension(d), "susy", k=4)
        assert np.all(res.extrapolated > 0.04)


def test_eigenfunction_residual_is_roundoff():
    for d in (5, 6, 9):
        assert eigenfunction_residual(make_dimension(d), make_grid(20.0, 2000)) <= 1e-12


def test_discretize_structure():
    dim = make_dimension(6)
    grid = make_grid(10.0, 64)
    op = discretize(make_operator(dim, "free"), grid)
    assert op.diag.shape == (64,)
    assert op.off.shape == (63,)
    assert np.all(op.off == op.off[0])           # constant off-diagonal
    # matvec agrees with the dense matrix
    m = np.diag(op.diag) + np.diag(op.off, 1) + np.diag(op.off, -1)
    v = np.sin(grid.nodes)
    assert np.allclose(op.matvec(v), m @ v, rtol=1e-13)


def test_eigen_lowest_orders_and_validates():
    dim = make_dimension(6)
    op = discretize(make_operator(dim, "linearized"), make_grid(20.0, 500))
    res = eigen_lowest(op, k=4, want_vectors=True)
    assert np.all(np.diff(res.eigenvalues) > 0)
    assert np.all(res.residuals < 1e-8)
    assert res.vectors.shape == (500, 4)
    with pytest.raises(ValueError):
        eigen_lowest(op, k=0)
    with pytest.raises(ValueError):
        make_operator(dim, "susy2")
    assert set(OPERATOR_KINDS) == {"free", "linearized", "susy"}


def test_richardson_improves_on_raw_grid():
    # the extrapolated free ground level must beat the raw fine-grid one
    dim = make_dimension(7)
    res = richardson_eigen(dim, "free", N=1000, k=1)
    raw_err = abs(res.eigenvalues[0] - 1.0)
    ext_err = abs(res.extrapolated[0] - 1.0)
    assert ext_err < raw_err / 50


def test_linearized_potential_composition():
    dim = make_dimension(6)
    rho = np.array([0.7, 1.3, 2.9])
    spec = make_operator(dim, "linearized")
    expect = eval_profile(dim, "qFree", rho) - eval_profile(dim, "V", rho)
    assert np.allclose(spec.potential(rho), expect, rtol=1e-14)
    susy = make_operator(dim, "susy")
    n = dim.n
    expect_s = (n * n - 1) / (4 * rho**2) + eval_profile(dim, "QSusy", rho)
    assert np.allclose(susy.potential(rho), expect_s, rtol=1e-14)
