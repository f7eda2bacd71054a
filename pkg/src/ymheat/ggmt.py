"""Absence-of-bound-states certificate for the supersymmetric partner operator.

The partner potential Q is bounded below but dips negative near the
origin.  A Glaser-Grosse-Martin-Thirring moment bound turns smallness of
the negative part into a spectral statement: if

    B = c(n, p) * int_0^inf rho^(2p-1) |Q_-(rho)|^p drho < 1,

then the half-line operator -f'' + ((n^2-1)/(4 rho^2) + Q) f has no
eigenvalue at or below zero.  Combined with supersymmetric pairing this
pins the linearized flow's spectrum to a single simple negative mode, the
one generated by time translation.

Three pathways compute B with increasing sharpness:

* paperOverestimate - drop the clipping and integrate Q^p (p even) over
  [0, rhoBar] with rhoBar a rational cover of the positivity threshold;
  an overestimate, by adaptive quadrature.
* tightQminus      - integrate the clipped |Q_-|^p up to the threshold.
* exactCertificate - same integral as the overestimate, but in closed
  form over Q(sqrt(2d-4)), so the verdict rests on exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import mpmath as mp
import numpy as np
from scipy import optimize as _sp_optimize

from .model import Dimension, eval_profile
from .quad import (IntegralResult, adaptive_integrate, exact_pf_integrate,
                   expand_integrand)

__all__ = [
    "PATHWAYS",
    "GgmtReport",
    "GgmtVerdict",
    "q_minus",
    "positivity_threshold",
    "rho_bar",
    "ggmt_constant",
    "ggmt_constant_exact",
    "mu",
    "variational_mu_oracle",
    "compute_B",
    "theorem_verdict",
    "scan_p",
]

PATHWAYS = ("paperOverestimate", "tightQminus", "exactCertificate")


def q_minus(dim: Dimension, rho):
    """Negative part |min(Q, 0)| of the partner potential; rho must be > 0."""
    q = eval_profile(dim, "QSusy", rho)
    return np.maximum(-q, 0.0) if isinstance(q, np.ndarray) else max(-q, 0.0)


@lru_cache(maxsize=32)
def _q_roots(dim: Dimension) -> tuple[float, ...]:
    """All sign changes of Q on (0, 60), refined to machine precision."""
    if not dim.b_positive:
        raise ValueError(f"d={dim.d}: partner potential has a pole on the half line")
    rho = np.linspace(1e-3, 60.0, 120_001)
    q = eval_profile(dim, "QSusy", rho)
    flips = np.nonzero(np.sign(q[:-1]) * np.sign(q[1:]) < 0)[0]
    if flips.size == 0:
        raise RuntimeError(f"d={dim.d}: no sign change of the partner potential found; "
                           "cannot locate a positivity threshold")
    roots = []
    for i in flips:
        r = _sp_optimize.brentq(lambda x: eval_profile(dim, "QSusy", x),
                                rho[i], rho[i + 1], xtol=1e-14)
        roots.append(float(r))
    return tuple(roots)


def positivity_threshold(dim: Dimension) -> float:
    """Largest zero rho* of Q; Q > 0 on (rho*, inf) is verified by scan.

    Raises RuntimeError if the located root is not a clean zero or if Q
    fails to stay positive beyond it.
    """
    roots = _q_roots(dim)
    rho_star = roots[-1]
    if abs(eval_profile(dim, "QSusy", rho_star)) > 1e-12:
        raise RuntimeError(f"root refinement stalled at rho={rho_star}")
    tail = np.geomspace(rho_star * (1 + 1e-9), 1e4, 4096)
    if not np.all(eval_profile(dim, "QSusy", tail) > 0):
        raise RuntimeError(f"d={dim.d}: potential dips negative beyond rho*={rho_star}")
    return rho_star


def rho_bar(dim: Dimension) -> Fraction:
    """Rational cover of the threshold: ceil(10 rho*) / 10."""
    return Fraction(math.ceil(10 * positivity_threshold(dim)), 10)


def ggmt_constant_exact(n: int, p: int) -> Fraction:
    """Moment-bound constant (p-1)^(p-1) Gamma(2p) / (n^(2p-1) p^p Gamma(p)^2), exactly.

    Integer n >= 2 and p >= 1 only; p = 1 gives 1/n (the Bargmann-type
    endpoint, with 0^0 = 1).
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"need integer n >= 2, got {n}")
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise ValueError(f"need integer p >= 1, got {p}")
    n, p = int(n), int(p)
    num = (p - 1) ** (p - 1) * math.factorial(2 * p - 1) if p > 1 else 1
    den = n ** (2 * p - 1) * p ** p * math.factorial(p - 1) ** 2
    return Fraction(num, den)


def ggmt_constant(n, p) -> float:
    """Moment-bound constant for possibly non-integer n or p (30-digit evaluation)."""
    if isinstance(n, (int, np.integer)) and isinstance(p, (int, np.integer)):
        return float(ggmt_constant_exact(int(n), int(p)))
    nf, pf = float(n), float(p)
    if nf <= 1 or pf <= 1:
        raise ValueError(f"need n > 1 and p > 1, got n={n}, p={p}")
    with mp.workdps(30):
        c = mp.mpf(pf - 1) ** (pf - 1) * mp.gamma(2 * pf) / \
            (mp.mpf(nf) ** (2 * pf - 1) * mp.mpf(pf) ** pf * mp.gamma(pf) ** 2)
        return float(c)


def mu(p, alpha) -> float:
    """Sharp one-dimensional Sobolev quotient entering the moment bound.

    mu(p, alpha) = (4 alpha + 1)^((2p-1)/(2p)) * p/(p-1)
                   * ((p-1) Gamma(p)^2 / Gamma(2p))^(1/p),
    and c(n, p) * mu(p, alpha)^p = 1 when alpha = (n^2 - 1)/4.
    """
    pf, af = float(p), float(alpha)
    if pf <= 1:
        raise ValueError(f"need p > 1, got {p}")
    if 4 * af + 1 <= 0:
        raise ValueError(f"need 4*alpha + 1 > 0, got alpha={alpha}")
    with mp.workdps(30):
        v = mp.mpf(4 * af + 1) ** (mp.mpf(2 * pf - 1) / (2 * pf)) * pf / (pf - 1) * \
            ((pf - 1) * mp.gamma(pf) ** 2 / mp.gamma(2 * pf)) ** (mp.mpf(1) / pf)
        return float(v)


def variational_mu_oracle(p, trial: tuple[Callable, Callable] | None = None) -> float:
    """Rayleigh quotient behind mu(p, 0), evaluated on a trial function.

    The quotient int(f'^2 + f^2/4) dx / (int |f|^(2p/(p-1)) dx)^((p-1)/p)
    over the line is minimized by f = sech^(p-1)(x / (2(p-1))), where it
    equals mu(p, 0); any other trial gives something strictly larger.
    Pass trial=(f, fprime) to evaluate elsewhere.
    """
    pf = float(p)
    if pf <= 1:
        raise ValueError(f"need p > 1, got {p}")
    if trial is None:
        beta = 1.0 / (2 * (pf - 1))

        def sech_pow(u, q):
            au = abs(u)
            if au > 30.0:  # sech(u) ~ 2 exp(-|u|); avoid cosh overflow
                t = q * (math.log(2.0) - au)
                return math.exp(t) if t > -745.0 else 0.0
            return math.cosh(u) ** -q

        def f(x):
            return sech_pow(beta * x, pf - 1)

        def fprime(x):
            return -(pf - 1) * beta * math.tanh(beta * x) * sech_pow(beta * x, pf - 1)
    else:
        f, fprime = trial

    ex = 2 * pf / (pf - 1)
    num = adaptive_integrate(lambda x: fprime(x) ** 2 + 0.25 * f(x) ** 2,
                             -math.inf, math.inf, rel_tol=1e-12).value
    den = adaptive_integrate(lambda x: abs(f(x)) ** ex,
                             -math.inf, math.inf, rel_tol=1e-12).value
    return num / den ** ((pf - 1) / pf)


@dataclass
class GgmtReport:
    n: int
    p: int
    alpha: float
    rhoStar: float
    rhoBar: str
    integral: IntegralResult
    constant: float
    constantExact: str | None
    B: float
    passes: bool
    pathway: str

    def to_dict(self) -> dict:
        d = {
            "n": self.n, "p": self.p, "alpha": self.alpha,
            "rhoStar": self.rhoStar, "rhoBar": self.rhoBar,
            "integral": self.integral.value,
            "integralErrorBound": self.integral.errorBound,
            "integralMethod": self.integral.method,
            "constant": self.constant, "constantExact": self.constantExact,
            "B": self.B, "passes": self.passes, "pathway": self.pathway,
        }
        if self.integral.exactForm is not None:
            d["exactForm"] = self.integral.exactForm
        return d


def compute_B(dim: Dimension, p: int, pathway: str = "tightQminus",
              rel_tol: float = 1e-11) -> GgmtReport:
    """Moment bound B for the partner potential of the d-dimensional shrinker.

    Even p is required except on the tightQminus pathway, where the
    integrand is clipped before the power is taken.  passes means B < 1.
    """
    if pathway not in PATHWAYS:
        raise ValueError(f"unknown pathway {pathway!r}; choose from {PATHWAYS}")
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise ValueError(f"need integer p >= 2, got {p}")
    p = int(p)
    if p % 2 and pathway != "tightQminus":
        raise ValueError(f"pathway {pathway!r} needs even p (got {p}); "
                         "odd powers do not dominate the clipped integrand")
    n = dim.n
    roots = _q_roots(dim)
    rho_star = positivity_threshold(dim)
    rbar = rho_bar(dim)
    const_exact = ggmt_constant_exact(n, p)
    const = float(const_exact)

    if pathway == "tightQminus":
        def fn(r):
            qm = q_minus(dim, r)
            return r ** (2 * p - 1) * qm ** p
        integral = adaptive_integrate(fn, 0.0, rho_star, rel_tol=rel_tol,
                                      points=list(roots[:-1]))
        B = const * integral.value
    elif pathway == "paperOverestimate":
        def fn(r):
            q = eval_profile(dim, "QSusy", r)
            return r ** (2 * p - 1) * q ** p
        integral = adaptive_integrate(fn, 0.0, float(rbar), rel_tol=rel_tol,
                                      points=list(roots))
        B = const * integral.value
    else:  # exactCertificate
        F = expand_integrand(dim, p)
        integral = exact_pf_integrate(F, 0, rbar)
        with mp.workdps(50):
            B = float(mp.mpf(const_exact.numerator) / const_exact.denominator
                      * integral.value)

    return GgmtReport(n=n, p=p, alpha=(n * n - 1) / 4.0, rhoStar=rho_star,
                      rhoBar=str(rbar), integral=integral, constant=const,
                      constantExact=f"{const_exact.numerator}/{const_exact.denominator}",
                      B=float(B), passes=bool(B < 1.0), pathway=pathway)


@dataclass
class GgmtVerdict:
    alpha: float
    p: float
    B: float
    passes: bool
    integral: IntegralResult


def theorem_verdict(alpha: float, vminus: Callable[[float], float], p,
                    hi: float = math.inf,
                    points: Sequence[float] | None = None) -> GgmtVerdict:
    """Moment bound for a general half-line operator -f'' + (alpha/rho^2 + v) f.

    vminus must evaluate the negative part |min(v, 0)| pointwise.  The
    effective dimension is n = sqrt(4 alpha + 1); B < 1 certifies that the
    operator has no eigenvalue <= 0.
    """
    af, pf = float(alpha), float(p)
    if 4 * af + 1 <= 1:
        raise ValueError(f"need alpha > 0, got {alpha}")
    n_eff = math.sqrt(4 * af + 1)
    const = ggmt_constant(n_eff, pf)
    integral = adaptive_integrate(lambda r: r ** (2 * pf - 1) * vminus(r) ** pf,
                                  0.0, hi, rel_tol=1e-10, points=points)
    B = const * integral.value
    return GgmtVerdict(alpha=af, p=pf, B=float(B), passes=bool(B < 1.0),
                       integral=integral)


def scan_p(dim: Dimension, p_lo: int, p_hi: int) -> list[GgmtReport]:
    """tightQminus reports for each integer p in [p_lo, p_hi]."""
    if p_lo < 2 or p_hi < p_lo:
        raise ValueError(f"need 2 <= p_lo <= p_hi, got [{p_lo}, {p_hi}]")
    return [compute_B(dim, p, "tightQminus") for p in range(p_lo, p_hi + 1)]
