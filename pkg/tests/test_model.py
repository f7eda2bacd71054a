"""Profiles, grids, norms: closed forms against independent arithmetic."""
from __future__ import annotations

import math

import numpy as np
import pytest

from ymheat.model import (
    PROFILE_KINDS,
    GridFunction,
    eval_profile,
    gmode_sigma_norm,
    halfline_transform,
    make_dimension,
    make_grid,
    nonlinearity,
    norms,
    sample_profile,
    sigma_l2,
    stationary_residual,
    sup_norm,
    surface_area,
)

# a = sqrt(2d-4)/4 and b = 3(d-2) - (d+2) sqrt(2d-4)/2, evaluated separately
# with decimal arithmetic at 30 digits.
CONSTANTS = {
    5: (0.61237243569579452455, 0.42678590025887665631, 2, 4),
    6: (0.70710678118654752440, 0.68629150101523960959, 3, 5),
    7: (0.79056941504209483300, 0.76975052924229300600, 3, 5),
    8: (0.86602540378443864676, 0.67949192431122706473, 4, 6),
    9: (0.93541434669348534640, 0.42088437274332237929, 4, 6),
}


@pytest.mark.parametrize("d", sorted(CONSTANTS))
def test_dimension_constants(d):
    a, b, k0, k1 = CONSTANTS[d]
    dim = make_dimension(d)
    assert dim.n == d + 2
    assert dim.a == pytest.approx(a, abs=1e-14)
    assert dim.b == pytest.approx(b, abs=1e-14)
    assert (dim.kappa0, dim.kappa1) == (k0, k1)
    assert dim.b_positive


def test_dimension_boundary_cases():
    assert not make_dimension(10).b_positive          # b = 0 exactly
    assert abs(make_dimension(10).b) < 1e-30
    assert not make_dimension(11).b_positive
    with pytest.raises(ValueError):
        make_dimension(2)
    with pytest.raises(TypeError):
        make_dimension(5.0)
    with pytest.raises(TypeError):
        make_dimension(True)


def test_grid_layout():
    grid = make_grid(20.0, 1999)
    assert grid.h == pytest.approx(0.01)
    assert grid.nodes[0] == pytest.approx(grid.h)
    assert grid.nodes[-1] == pytest.approx(20.0 - grid.h)
    assert grid.nodes.size == 1999
    with pytest.raises(ValueError):
        make_grid(-1.0, 100)


def test_profile_spot_values():
    dim = make_dimension(5)
    # W(0) = 1/b
    assert eval_profile(dim, "W", 0.0) == pytest.approx(2.3430952132988166, rel=1e-14)
    # W(rho) = 1/(a rho^2 + b) at an arbitrary point
    rho = 1.7
    w = 1.0 / (dim.a * rho**2 + dim.b)
    assert eval_profile(dim, "W", rho) == pytest.approx(w, rel=1e-14)
    # V through its two published forms
    v1 = 3 * (dim.n - 4) * w * (2 - rho**2 * w)
    v2 = 6 * (dim.d - 2) * w - 3 * (dim.d - 2) * rho**2 * w**2
    assert v1 == pytest.approx(v2, rel=1e-14)
    assert eval_profile(dim, "V", rho) == pytest.approx(v1, rel=1e-13)


def test_susy_potential_sign_change():
    # the partner potential dips negative in the well and turns positive
    # in the tail; these two samples bracket its last root
    dim = make_dimension(6)
    assert eval_profile(dim, "QSusy", 2.0) == pytest.approx(-4.1737, abs=5e-4)
    assert eval_profile(dim, "QSusy", 4.7) == pytest.approx(0.08802, abs=5e-5)


def test_free_potential_formula():
    dim = make_dimension(7)
    rho = np.array([0.5, 1.0, 3.0, 10.0])
    n = dim.n
    expect = rho**2 / 16 + (n - 3) * (n - 1) / (4 * rho**2) - (n - 4) / 4
    assert np.allclose(eval_profile(dim, "qFree", rho), expect, rtol=1e-14)


@pytest.mark.parametrize("kind", PROFILE_KINDS)
def test_profiles_finite_on_grid(kind):
    dim = make_dimension(6)
    grid = make_grid(20.0, 500)
    f = sample_profile(dim, kind, grid)
    assert np.isfinite(f.values).all()
    assert f.kind == kind


def test_eval_profile_rejects_unknown_kind():
    with pytest.raises(ValueError):
        eval_profile(make_dimension(6), "w", 1.0)


def test_surface_area_closed_forms():
    # |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2); n = 8 gives pi^4 / 3
    assert surface_area(8) == pytest.approx(math.pi**4 / 3.0, rel=1e-14)
    assert surface_area(7) == pytest.approx(16.0 * math.pi**3 / 15.0, rel=1e-14)


@pytest.mark.parametrize("d", range(5, 10))
def test_stationary_residual_analytic(d):
    dim = make_dimension(d)
    grid = make_grid(20.0, 2000)
    res = stationary_residual(dim, sample_profile(dim, "W", grid))
    assert sup_norm(res) <= 1e-10


def test_stationary_residual_fd_second_order():
    dim = make_dimension(6)
    sups = []
    for n in (2000, 4000):
        grid = make_grid(20.0, n)
        res = stationary_residual(dim, sample_profile(dim, "W", grid), scheme="fd")
        sups.append(sup_norm(res))
    assert sups[0] <= 1e-2
    assert sups[0] / sups[1] == pytest.approx(4.0, rel=0.1)


def test_gmode_is_sigma_normalized():
    for d in (5, 7, 9):
        dim = make_dimension(d)
        grid = make_grid(20.0, 3000)
        g = sample_profile(dim, "gMode", grid)
        # continuum normalization; quadrature agrees to its own accuracy
        assert sigma_l2(dim, g) == pytest.approx(1.0, abs=1e-7)
        assert gmode_sigma_norm(d) > 0


def test_halfline_transform_roundtrip():
    dim = make_dimension(6)
    grid = make_grid(20.0, 1500)
    f = sample_profile(dim, "W", grid)
    back = halfline_transform(dim, halfline_transform(dim, f), direction="from")
    assert np.max(np.abs(back.values - f.values)) <= 1e-12


def test_nonlinearity_forms_agree_at_shrinker_shift():
    # absolute flow terms at W + f  minus  terms at W  minus the linear
    # piece 3(d-2)(2 - 2 rho^2 W) W f ... collapses to the perturbation form
    dim = make_dimension(6)
    grid = make_grid(10.0, 800)
    rho2 = grid.nodes**2
    w = eval_profile(dim, "W", grid.nodes)
    fv = 0.3 * np.exp(-grid.nodes)
    f = GridFunction(grid, fv)
    d = dim.d
    full = nonlinearity(dim, GridFunction(grid, w + fv), form="absolute").values
    at_w = nonlinearity(dim, GridFunction(grid, w), form="absolute").values
    linear = (6 * (d - 2) * w - 3 * (d - 2) * rho2 * w**2) * fv
    pert = nonlinearity(dim, f, form="perturbation").values
    assert np.max(np.abs(full - at_w - linear - pert)) <= 1e-12


def test_norms_dict_and_positivity():
    dim = make_dimension(6)
    grid = make_grid(20.0, 1000)
    f = GridFunction(grid, np.exp(-grid.nodes**2))
    out = norms(dim, f)
    assert set(out) == {"sup", "sigmaL2", "xProxy"}
    assert all(v > 0 for v in out.values())
    assert out["sup"] == pytest.approx(float(np.max(np.abs(f.values))))


def test_dynamics_dimensions_refused_outside_window():
    from ymheat.evolve import SolverConfig, run_similarity
    with pytest.raises(ValueError):
        run_similarity(make_dimension(10), cfg=SolverConfig(N=64, tau_max=0.01))
    with pytest.raises(ValueError):
        run_similarity(make_dimension(4), cfg=SolverConfig(N=64, tau_max=0.01))
