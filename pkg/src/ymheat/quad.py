"""Quadrature backends: exact partial-fraction integration and adaptive floating point.

The spectral certificate needs the moment integral of a power of the
supersymmetric partner potential.  That integrand is, in s = rho^2, a
rational function with coefficients in the real quadratic field
Q(sqrt(m)), m = 2d - 4, whose only pole sits at s = -b/a < 0.  Such a
function integrates in closed form: a polynomial part, inverse powers of
(a s + b), and a single logarithm.  Everything up to the final numerical
evaluation (done at 50 digits) is exact field arithmetic, so the result
carries no quadrature error at all.

The adaptive backend wraps QUADPACK for everything that does not need to
be exact (odd powers, clipped integrands, cross-checks).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath as mp
import numpy as np
from scipy import integrate as _sp_integrate

from .model import Dimension

__all__ = [
    "QuadExt",
    "RationalEvenFunction",
    "IntegralResult",
    "QuadratureError",
    "square_free",
    "adaptive_integrate",
    "gamma",
    "expand_integrand",
    "exact_pf_integrate",
]

_EVAL_DPS = 50


def square_free(m: int) -> tuple[int, int]:
    """Write sqrt(m) = k*sqrt(m0) with m0 square-free. Returns (k, m0)."""
    if m <= 0:
        raise ValueError(f"radicand must be positive, got {m}")
    k, m0 = 1, m
    f = 2
    while f * f <= m0:
        while m0 % (f * f) == 0:
            m0 //= f * f
            k *= f
        f += 1
    return k, m0


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"expected an exact rational, got {type(v).__name__}")


class QuadExt:
    """Element x + y*sqrt(m) of Q(sqrt(m)), m square-free positive.

    Immutable exact arithmetic on Fraction coordinates.  m = 1 encodes a
    plain rational (y folded into x).  Mixed-field operations are refused
    rather than coerced; rationals (m = 1 or int/Fraction scalars) combine
    with any field.
    """

    __slots__ = ("m", "x", "y")

    def __init__(self, m: int, x, y=0):
        x = _as_fraction(x)
        y = _as_fraction(y)
        k, m0 = square_free(int(m))
        if k != 1:
            y = y * k
        if m0 == 1:
            x, y = x + y, Fraction(0)
        object.__setattr__(self, "m", m0)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __setattr__(self, *a):
        raise AttributeError("QuadExt is immutable")

    # -- helpers ---------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.y == 0

    def _coerce(self, other) -> "QuadExt":
        if isinstance(other, QuadExt):
            if other.m != self.m and not (other.is_rational or self.is_rational):
                raise ValueError(f"field mismatch: sqrt({self.m}) vs sqrt({other.m})")
            return other
        return QuadExt(self.m, _as_fraction(other))

    def _same_field(self, other: "QuadExt") -> int:
        # the working radicand once rational operands are absorbed
        return self.m if not self.is_rational else other.m

    # -- ring operations -------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        return QuadExt(self._same_field(o), self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(self.m, -self.x, -self.y)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        m = self._same_field(o)
        return QuadExt(m, self.x * o.x + self.y * o.y * m, self.x * o.y + self.y * o.x)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.m, self.x, -self.y)

    def norm(self) -> Fraction:
        """Field norm x^2 - m y^2 (rational)."""
        return self.x * self.x - self.m * self.y * self.y

    def inverse(self) -> "QuadExt":
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("QuadExt division by zero")
        return QuadExt(self.m, self.x / nrm, -self.y / nrm)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)):
            raise TypeError("QuadExt powers must be integers")
        k = int(k)
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = QuadExt(base.m, 1)
        acc = base
        while k:
            if k & 1:
                out = out * acc
            acc = acc * acc
            k >>= 1
        return out

    # -- comparisons / output ---------------------------------------------
    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.x == o.x and self.y == o.y and (self.is_rational or o.is_rational or self.m == o.m)

    def __hash__(self):
        return hash((self.m if self.y else 1, self.x, self.y))

    def sign(self) -> int:
        """Exact sign of x + y*sqrt(m)."""
        if self.y == 0:
            return (self.x > 0) - (self.x < 0)
        if self.x == 0:
            return 1 if self.y > 0 else -1
        sx = 1 if self.x > 0 else -1
        sy = 1 if self.y > 0 else -1
        if sx == sy:
            return sx
        # opposite signs: compare x^2 with m y^2
        lhs, rhs = self.x * self.x, self.m * self.y * self.y
        if lhs == rhs:
            return 0
        return sx if lhs > rhs else sy

    def to_mpf(self) -> mp.mpf:
        return mp.mpf(self.x.numerator) / self.x.denominator + \
            (mp.mpf(self.y.numerator) / self.y.denominator) * mp.sqrt(self.m)

    def __float__(self):
        return float(self.x) + float(self.y) * math.sqrt(self.m)

    def __repr__(self):
        if self.y == 0:
            return f"QuadExt({self.x})"
        return f"QuadExt({self.x} + {self.y}*sqrt({self.m}))"


# ---------------------------------------------------------------------------
# exact polynomials over QuadExt (dense, low degree first)

def _poly_trim(p: list[QuadExt]) -> list[QuadExt]:
    while len(p) > 1 and p[-1].x == 0 and p[-1].y == 0:
        p.pop()
    return p


def _poly_mul(p: list[QuadExt], q: list[QuadExt]) -> list[QuadExt]:
    zero = p[0] * 0
    out = [zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return _poly_trim(out)


def _poly_pow(p: list[QuadExt], k: int) -> list[QuadExt]:
    out = [p[0] * 0 + 1]
    for _ in range(k):
        out = _poly_mul(out, p)
    return out


def _poly_divmod(num: list[QuadExt], den: list[QuadExt]) -> tuple[list[QuadExt], list[QuadExt]]:
    num = list(num)
    dn = len(den) - 1
    lead_inv = den[-1].inverse()
    quot = [num[0] * 0] * max(len(num) - dn, 1)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i] * lead_inv
        quot[i - dn] = c
        for j in range(dn + 1):
            num[i - dn + j] = num[i - dn + j] - c * den[j]
    rem = _poly_trim(num[:dn] if dn else [num[0] * 0])
    return _poly_trim(quot), rem


def _poly_eval(p: Sequence[QuadExt], s) -> QuadExt:
    out = p[-1]
    for c in reversed(p[:-1]):
        out = out * s + c
    return out


def _poly_compose_linear(p: Sequence[QuadExt], alpha: QuadExt, beta: QuadExt) -> list[QuadExt]:
    """Coefficients of p(alpha*t + beta) as a polynomial in t (Horner)."""
    out = [p[-1]]
    lin = [beta, alpha]
    for c in reversed(list(p[:-1])):
        out = _poly_mul(out, lin)
        out[0] = out[0] + c
    return _poly_trim(out)


@dataclass
class RationalEvenFunction:
    """Even rational integrand in rho, stored as a function of s = rho^2.

    F(s) = sum_k poly[k] s^k  +  sum_i poles[i-1] / (a s + b)^i,

    with a, b and every coefficient exact in Q(sqrt(m)).  The associated
    rho-integrand is rho^(2p-1) * Q(rho)^p = rho * F(rho^2); eval_rho
    evaluates that product.
    """

    m: int
    a: QuadExt
    b: QuadExt
    poly: list[QuadExt]
    poles: list[QuadExt]
    n: int | None = None
    p: int | None = None

    @property
    def poly_degree(self) -> int:
        return len(self.poly) - 1

    @property
    def pole_orders(self) -> list[int]:
        return [i + 1 for i, c in enumerate(self.poles) if not (c.x == 0 and c.y == 0)]

    def eval_s(self, s):
        s = np.asarray(s, dtype=float)
        af, bf = float(self.a), float(self.b)
        out = np.zeros_like(s)
        for c in reversed(self.poly):
            out = out * s + float(c)
        t = af * s + bf
        for i, c in enumerate(self.poles, start=1):
            out = out + float(c) / t ** i
        return out

    def eval_rho(self, rho):
        rho = np.asarray(rho, dtype=float)
        return rho * self.eval_s(rho * rho)

    def eval_s_mp(self, s, dps: int = 50) -> float:
        """Evaluate F at a single point in dps-digit arithmetic.

        The pole coefficients are large and cancel against the polynomial
        part, so the float path in eval_s carries a relative error of
        roughly 1e-5; use this when the value itself is under test.
        """
        with mp.workdps(dps):
            sv = mp.mpf(s)
            out = mp.mpf(0)
            for c in reversed(self.poly):
                out = out * sv + c.to_mpf()
            t = self.a.to_mpf() * sv + self.b.to_mpf()
            for i, c in enumerate(self.poles, start=1):
                out += c.to_mpf() / t ** i
            return float(out)


@dataclass
class IntegralResult:
    value: float
    errorBound: float
    method: str
    exactForm: dict | None = None


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge; .partial holds the best estimate."""

    def __init__(self, message: str, partial: IntegralResult | None = None):
        super().__init__(message)
        self.partial = partial


def adaptive_integrate(fn: Callable[[float], float], lo: float, hi: float,
                       rel_tol: float = 1e-10, abs_tol: float = 0.0,
                       points: Sequence[float] | None = None,
                       limit: int = 200) -> IntegralResult:
    """Adaptive Gauss-Kronrod integration of fn over [lo, hi] (hi may be inf).

    Interior kinks or other trouble spots can be passed through `points`.
    Raises QuadratureError (with the partial estimate attached) when the
    requested tolerance is not met.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    kwargs = dict(epsabs=abs_tol, epsrel=rel_tol, limit=limit, full_output=1)
    if points is not None and math.isfinite(hi):
        inner = [p for p in points if lo < p < hi]
        if inner:
            kwargs["points"] = sorted(inner)
    out = _sp_integrate.quad(fn, lo, hi, **kwargs)
    value, err = out[0], out[1]
    result = IntegralResult(value=float(value), errorBound=float(err), method="adaptive")
    if len(out) > 3:
        raise QuadratureError(f"quadrature did not converge: {out[3]}", partial=result)
    return result


def gamma(z) -> float:
    """Gamma function: exact factorial for integer z, 30-digit evaluation otherwise."""
    zf = float(z)
    if not math.isfinite(zf):
        raise ValueError(f"gamma argument must be finite, got {z}")
    if zf <= 0 and zf == round(zf):
        raise ValueError(f"gamma pole at z = {z}")
    if zf == round(zf) and zf <= 171:
        return float(math.factorial(int(round(zf)) - 1))
    with mp.workdps(30):
        return float(mp.gamma(zf))


# ---------------------------------------------------------------------------
# exact partial fractions for the certificate integrand

def shrinker_field_constants(dim: Dimension) -> tuple[int, QuadExt, QuadExt]:
    """(m, a, b) of the shrinker, exactly: a = sqrt(2d-4)/4, b = (3d-6) - (d+2)/2 sqrt(2d-4)."""
    d = dim.d
    _, m0 = square_free(2 * d - 4)
    a = QuadExt(2 * d - 4, 0, Fraction(1, 4))
    b = QuadExt(2 * d - 4, 3 * d - 6, Fraction(-(d + 2), 2))
    return m0, a, b


def susy_potential_exact(dim: Dimension) -> tuple[QuadExt, QuadExt, QuadExt, QuadExt, QuadExt]:
    """Exact pieces of Q(s) = s/16 + e + (f1 s + f0)/(a s + b)^2."""
    m0, a, b = shrinker_field_constants(dim)
    n = dim.n
    e = QuadExt(m0, Fraction(3, 2) - Fraction(n, 4))
    f1 = (a * (a * (2 * (n - 4)) + b)) * (-2)
    f0 = (b * (a * (2 * (n - 2)) + b)) * (-2)
    return a, b, e, f1, f0


def expand_integrand(dim: Dimension, p: int) -> RationalEvenFunction:
    """Exact partial fractions of rho^(2p-1) Q(rho)^p, as F(s) with s = rho^2.

    The numerator s^(p-1) * (numerator of Q)^p has degree 4p-1 and the
    denominator (a s + b)^(2p) has degree 2p, so the polynomial part has
    degree 2p-1 and the pole orders run over 1..2p.  Requires b > 0 (the
    regular shrinker range); otherwise the pole enters [0, inf).
    """
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    p = int(p)
    if not dim.b_positive:
        raise ValueError(f"d={dim.d} has b={dim.b} <= 0; the integrand pole is not "
                         "separated from the half line")
    a, b, e, f1, f0 = susy_potential_exact(dim)
    m0 = a.m
    zero = QuadExt(m0, 0)
    one = QuadExt(m0, 1)

    lin = [b, a]                                   # a s + b
    lin2 = _poly_mul(lin, lin)
    q_num = [c * QuadExt(m0, Fraction(1, 1)) for c in
             _poly_mul([e, QuadExt(m0, Fraction(1, 16))], lin2)]
    q_num[0] = q_num[0] + f0
    q_num[1] = q_num[1] + f1                       # numerator of Q, degree 3

    numer = _poly_mul([zero] * (p - 1) + [one], _poly_pow(q_num, p))
    denom = _poly_pow(lin, 2 * p)
    poly_part, rem = _poly_divmod(numer, denom)

    # remainder re-expanded around the pole: s = (t - b)/a
    a_inv = a.inverse()
    rem_t = _poly_compose_linear(rem, a_inv, -(b * a_inv))
    rem_t += [zero] * (2 * p - len(rem_t))
    poles = [rem_t[2 * p - i] for i in range(1, 2 * p + 1)]

    # paranoia: the decomposition must reproduce the remainder exactly
    s_chk = QuadExt(m0, Fraction(3, 7))
    t_chk = a * s_chk + b
    recon = _poly_eval(rem_t + [zero], t_chk) if rem_t else zero
    if recon != _poly_eval(rem, s_chk):
        raise AssertionError("partial-fraction re-expansion failed self-check")

    return RationalEvenFunction(m=m0, a=a, b=b, poly=poly_part, poles=poles,
                                n=dim.n, p=p)


def exact_pf_integrate(F: RationalEvenFunction, lo, hi) -> IntegralResult:
    """Closed-form integral of rho * F(rho^2) over [lo, hi], exact until evaluation.

    lo, hi must be exact rationals with 0 <= lo < hi.  Substituting
    s = rho^2 gives (1/2) int F(s) ds; polynomial and higher-order pole
    terms are field elements, the order-1 pole contributes a log.  The
    final evaluation is done at 50 digits; errorBound only covers that
    rounding.
    """
    lo = _as_fraction(lo)
    hi = _as_fraction(hi)
    if lo < 0 or hi <= lo:
        raise ValueError(f"need 0 <= lo < hi, got [{lo}, {hi}]")
    s_lo, s_hi = lo * lo, hi * hi
    m0 = F.m
    half = Fraction(1, 2)

    alg = QuadExt(m0, 0)
    for k, c in enumerate(F.poly):
        alg = alg + c * Fraction(half * (s_hi ** (k + 1) - s_lo ** (k + 1)), k + 1)

    t_lo = F.a * s_lo + F.b
    t_hi = F.a * s_hi + F.b
    if t_lo.sign() <= 0 or t_hi.sign() <= 0:
        raise ValueError("integration interval touches the pole of the integrand")

    log_coeff = QuadExt(m0, 0)
    for i, c in enumerate(F.poles, start=1):
        if c.x == 0 and c.y == 0:
            continue
        if i == 1:
            log_coeff = c / F.a * half
        else:
            anti = (t_hi ** (1 - i) - t_lo ** (1 - i)) / (F.a * (1 - i))
            alg = alg + c * anti * half

    with mp.workdps(_EVAL_DPS):
        val = alg.to_mpf()
        if not (log_coeff.x == 0 and log_coeff.y == 0):
            val += log_coeff.to_mpf() * (mp.log(t_hi.to_mpf()) - mp.log(t_lo.to_mpf()))
        value = float(val)
        err = abs(value) * 1e-40 + 1e-300

    exact_form = {
        "m": m0,
        "algebraic": {"x": str(alg.x), "y": str(alg.y)},
        "logCoeff": {"x": str(log_coeff.x), "y": str(log_coeff.y)},
        "logArgHi": {"x": str(t_hi.x), "y": str(t_hi.y)},
        "logArgLo": {"x": str(t_lo.x), "y": str(t_lo.y)},
        "interval": [str(lo), str(hi)],
    }
    return IntegralResult(value=value, errorBound=err, method="exactPF",
                          exactForm=exact_form)
