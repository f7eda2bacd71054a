"""Exact field arithmetic and the certificate quadrature layer."""
from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ymheat.model import eval_profile, make_dimension
from ymheat.quad import (
    QuadExt,
    QuadratureError,
    adaptive_integrate,
    exact_pf_integrate,
    expand_integrand,
    gamma,
    square_free,
)

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**4)
radicands = st.sampled_from([2, 3, 5, 6, 7, 10, 14])


def quad_elems(m):
    return st.builds(lambda x, y: QuadExt(m, x, y), rationals, rationals)


# -- square_free -------------------------------------------------------------

@given(st.integers(min_value=1, max_value=10**6))
def test_square_free_invariant(m):
    k, m0 = square_free(m)
    assert k * k * m0 == m
    for f in range(2, int(math.isqrt(m0)) + 1):
        assert m0 % (f * f) != 0


def test_square_free_examples():
    assert square_free(12) == (2, 3)
    assert square_free(49) == (7, 1)
    assert square_free(1) == (1, 1)
    with pytest.raises(ValueError):
        square_free(0)


# -- QuadExt field axioms ----------------------------------------------------

@given(radicands.flatmap(lambda m: st.tuples(quad_elems(m), quad_elems(m), quad_elems(m))))
@settings(max_examples=200)
def test_field_axioms(triple):
    u, v, w = triple
    assert u + v == v + u
    assert (u + v) + w == u + (v + w)
    assert u * v == v * u
    assert (u * v) * w == u * (v * w)
    assert u * (v + w) == u * v + u * w
    assert u + (-u) == QuadExt(u.m, 0)


@given(radicands.flatmap(lambda m: quad_elems(m)))
@settings(max_examples=200)
def test_field_inverse(u):
    if u == QuadExt(u.m, 0):
        with pytest.raises(ZeroDivisionError):
            u.inverse()
    else:
        assert u * u.inverse() == QuadExt(u.m, 1)


@given(radicands.flatmap(lambda m: st.tuples(quad_elems(m), quad_elems(m))))
def test_float_embedding_consistent(pair):
    u, v = pair
    prod = float(u * v)
    assert prod == pytest.approx(float(u) * float(v), rel=1e-12, abs=1e-12)


def test_radicand_normalization():
    # sqrt(12) = 2 sqrt(3); rational radicand folds into the x part
    assert QuadExt(12, 0, 1) == QuadExt(3, 0, 2)
    assert QuadExt(9, 1, 1) == QuadExt(1, 4)
    assert QuadExt(9, 1, 1).is_rational


def test_mixed_fields_refused():
    u = QuadExt(2, 0, 1)
    v = QuadExt(3, 0, 1)
    with pytest.raises(ValueError):
        u + v
    # rationals embed into any field
    assert QuadExt(2, 5) + QuadExt(3, 0, 1) == QuadExt(3, 5, 1)


def test_quadext_immutable_and_exact():
    u = QuadExt(6, Fraction(1, 3), Fraction(1, 7))
    with pytest.raises(AttributeError):
        u.x = Fraction(1)
    # (1/3 + sqrt(6)/7)^2 = 1/9 + 6/49 + 2 sqrt(6)/21
    sq = u * u
    assert sq.x == Fraction(1, 9) + Fraction(6, 49)
    assert sq.y == Fraction(2, 21)


# -- gamma and adaptive quadrature -------------------------------------------

def test_gamma_integer_and_half():
    assert gamma(171) == float(math.factorial(170))
    assert gamma(6) == 120.0
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    for bad in (0, -3):
        with pytest.raises(ValueError):
            gamma(bad)


def test_adaptive_integrate_gaussian_tail():
    out = adaptive_integrate(lambda x: math.exp(-x * x), 0.0, math.inf)
    assert out.value == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-12)
    assert out.errorBound < 1e-8
    with pytest.raises(ValueError):
        adaptive_integrate(lambda x: x, 1.0, 1.0)


def test_adaptive_integrate_reports_failure():
    with pytest.raises(QuadratureError) as exc:
        adaptive_integrate(lambda x: math.sin(1.0 / (x + 1e-12)), 0.0, 1.0,
                           rel_tol=1e-13, limit=2)
    assert exc.value.partial is not None
    assert math.isfinite(exc.value.partial.value)


# -- exact partial fractions vs adaptive -------------------------------------

@pytest.mark.parametrize("d,p", [(6, 4), (5, 2), (7, 6)])
def test_expanded_integrand_matches_direct(d, p):
    dim = make_dimension(d)
    F = expand_integrand(dim, p)
    assert F.poly_degree == 2 * p - 1
    assert set(F.pole_orders) <= set(range(1, 2 * p + 1))
    for s in (0.25, 1.0, 4.0, 9.0):
        rho = math.sqrt(s)
        direct = s ** (p - 1) * eval_profile(dim, "QSusy", rho) ** p
        assert F.eval_s_mp(s) == pytest.approx(float(direct), rel=1e-9)


def test_exact_pf_integral_matches_adaptive():
    dim = make_dimension(6)
    p = 4
    F = expand_integrand(dim, p)
    exact = exact_pf_integrate(F, 1, 3)
    fn = lambda r: r ** (2 * p - 1) * eval_profile(dim, "QSusy", r) ** p
    adaptive = adaptive_integrate(fn, 1.0, 3.0, rel_tol=1e-12)
    assert exact.value == pytest.approx(adaptive.value, rel=1e-9)
    assert exact.method == "exactPF"
    assert exact.exactForm is not None


def test_exact_pf_integral_validates_interval():
    F = expand_integrand(make_dimension(6), 2)
    with pytest.raises(ValueError):
        exact_pf_integrate(F, 3, 1)
    with pytest.raises(ValueError):
        exact_pf_integrate(F, -1, 1)


def test_expand_integrand_refuses_collapsed_shrinker():
    # at d = 10 the profile constant b vanishes and the pole hits the axis
    with pytest.raises(ValueError):
        expand_integrand(make_dimension(10), 2)
    with pytest.raises(ValueError):
        expand_integrand(make_dimension(6), 0)
