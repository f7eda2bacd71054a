"""Profiles, grids and norms for the equivariant Yang-Mills heat flow.

Everything is radial. The flow for the gauge-invariant scalar u(r, t) in
d space dimensions,

    u_t = u_rr + (d+1)/r u_r + 3(d-2) u^2 - (d-2) r^2 u^3,

has the explicit shrinker W(rho) = 1/(a rho^2 + b), written here in the
similarity variable rho = r / sqrt(T - t).  Linearising the similarity-
coordinate flow around W produces the potential V; conjugating the
resulting self-adjoint operator to the half line produces the free
potential q, the ground state gTilde and the supersymmetric partner
potential Q.  This module holds those closed forms plus the grid,
transform and norm plumbing every other module builds on.

All formulas live at n = d + 2: the scalar analysis happens in n
effective dimensions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

__all__ = [
    "Dimension",
    "RadialGrid",
    "GridFunction",
    "PROFILE_KINDS",
    "make_dimension",
    "make_grid",
    "surface_area",
    "eval_profile",
    "sample_profile",
    "gmode_sigma_norm",
    "stationary_residual",
    "halfline_transform",
    "nonlinearity",
    "sup_norm",
    "sigma_dot",
    "sigma_l2",
    "xproxy_norm",
    "norms",
]

# Profile kinds evaluable through eval_profile.  qFree and QSusy are only
# defined away from rho = 0 (qFree is genuinely singular there; QSusy is
# kept under the same precondition for uniformity).
PROFILE_KINDS = ("W", "V", "qFree", "QSusy", "gTilde", "gMode", "sigmaWeight")
_SINGULAR_KINDS = frozenset({"qFree", "QSusy"})

_MIN_RHO_HALFLINE = 1e-8


@dataclass(frozen=True)
class Dimension:
    """Derived constants for one space dimension d (effective n = d + 2).

    a, b are the shrinker coefficients; kappa0 < n/2 < kappa1 are the
    derivative levels used by the X-norm proxy.  b_positive flags whether
    the shrinker is globally regular (fails from d = 10 on, and below
    d = 5); such dimensions stay constructible but the dynamics modules
    refuse them.
    """

    d: int
    n: int
    a: float
    b: float
    kappa0: int
    kappa1: int
    b_positive: bool


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid rho_i = i*h, i = 1..N, h = R/(N+1).

    Both endpoints 0 and R are excluded; boundary behaviour is a property
    of the operators, not of the grid.
    """

    R: float
    N: int
    h: float
    nodes: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)


@dataclass
class GridFunction:
    """Values on a RadialGrid, optionally tagged with the profile kind."""

    grid: RadialGrid
    values: np.ndarray
    kind: str | None = None

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy(), self.kind)


def make_dimension(d: int) -> Dimension:
    """Build the constants for dimension d >= 3.

    Constants are evaluated with 40 significant digits and rounded once at
    the end.  The two published closed forms of b (the d-form and the
    n-form) are cross-checked to 1e-12 relative; they are algebraically
    identical, so a mismatch would mean a broken arithmetic backend.
    """
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise TypeError(f"d must be an integer, got {d!r}")
    d = int(d)
    if d < 3:
        raise ValueError(f"d must be >= 3, got {d}")
    n = d + 2

    with mp.workdps(40):
        a_hi = mp.sqrt(d - 2) / (2 * mp.sqrt(2))
        b_d = (6 * d - 12 - (d + 2) * mp.sqrt(2 * d - 4)) / 2
        b_n = n * (3 - mp.sqrt(2 * n - 8) / 2) - 12
        scale = max(mp.mpf(1), abs(b_d))
        if abs(b_d - b_n) / scale > mp.mpf("1e-12"):
            raise RuntimeError(
                f"b closed forms disagree at d={d}: {b_d} vs {b_n}"
            )
        a = float(a_hi)
        b = float(b_d)
        b_positive = b_d > 0

    if n % 2 == 1:
        kappa0 = (n - 3) // 2
    else:
        kappa0 = (n - 2) // 2
    kappa1 = kappa0 + 2

    return Dimension(d=d, n=n, a=a, b=b, kappa0=kappa0, kappa1=kappa1,
                     b_positive=b_positive)


def make_grid(R: float, N: int) -> RadialGrid:
    if not (R > 0 and math.isfinite(R)):
        raise ValueError(f"R must be positive and finite, got {R}")
    if not isinstance(N, (int, np.integer)) or N < 8:
        raise ValueError(f"N must be an integer >= 8, got {N}")
    N = int(N)
    h = R / (N + 1)
    nodes = h * np.arange(1, N + 1, dtype=float)
    return RadialGrid(R=float(R), N=N, h=h, nodes=nodes)


@lru_cache(maxsize=None)
def surface_area(n: int) -> float:
    """|S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)."""
    with mp.workdps(40):
        return float(2 * mp.pi ** (mp.mpf(n) / 2) / mp.gamma(mp.mpf(n) / 2))


@lru_cache(maxsize=None)
def gmode_sigma_norm(d: int) -> float:
    """sigma-weighted L2 norm of the raw unstable profile (a rho^2 + b)^-2.

    Computed once per dimension at 30 digits; used to normalise gMode.
    """
    dim = make_dimension(d)
    if not dim.b_positive:
        raise ValueError(f"gMode needs b > 0; d={d} has b={dim.b}")
    with mp.workdps(30):
        a, b, n = mp.mpf(dim.a), mp.mpf(dim.b), dim.n

        def integrand(r):
            return (a * r ** 2 + b) ** (-4) * mp.e ** (-r ** 2 / 4) * r ** (n - 1)

        val = mp.quad(integrand, [0, 2, 8, mp.inf])
        area = 2 * mp.pi ** (mp.mpf(n) / 2) / mp.gamma(mp.mpf(n) / 2)
        return float(mp.sqrt(area * val))


def _as_rho_array(rho) -> tuple[np.ndarray, bool]:
    arr = np.asarray(rho, dtype=float)
    scalar = arr.ndim == 0
    return np.atleast_1d(arr), scalar


def eval_profile(dim: Dimension, kind: str, rho):
    """Evaluate one of the closed-form radial profiles at rho (scalar or array).

    Rejects non-finite or negative rho, and rho = 0 for the kinds with a
    centrifugal precondition (qFree, QSusy).
    """
    if kind not in PROFILE_KINDS:
        raise ValueError(f"unknown profile kind {kind!r}; expected one of {PROFILE_KINDS}")
    r, scalar = _as_rho_array(rho)
    if not np.all(np.isfinite(r)):
        raise ValueError("rho must be finite")
    if np.any(r < 0):
        raise ValueError("rho must be non-negative")
    if kind in _SINGULAR_KINDS and np.any(r == 0):
        raise ValueError(f"profile {kind!r} is not defined at rho = 0")

    a, b, n = dim.a, dim.b, dim.n
    r2 = r * r
    den = a * r2 + b

    if kind == "W":
        out = 1.0 / den
    elif kind == "V":
        out = 3.0 * (n - 4) * (2.0 * b + (2.0 * a - 1.0) * r2) / den ** 2
    elif kind == "qFree":
        out = r2 / 16.0 + (n - 3) * (n - 1) / (4.0 * r2) - (n - 4) / 4.0
    elif kind == "QSusy":
        num = a * (2.0 * a * (n - 4) + b) * r2 + b * (2.0 * a * (n - 2) + b)
        out = r2 / 16.0 - n / 4.0 + 1.5 - 2.0 * num / den ** 2
    elif kind == "gTilde":
        out = r ** ((n - 1) / 2.0) * np.exp(-r2 / 8.0) / den ** 2
    elif kind == "gMode":
        out = den ** (-2.0) / gmode_sigma_norm(dim.d)
    else:  # sigmaWeight
        out = np.exp(-r2 / 4.0)

    return float(out[0]) if scalar else out


def sample_profile(dim: Dimension, kind: str, grid: RadialGrid) -> GridFunction:
    return GridFunction(grid, np.asarray(eval_profile(dim, kind, grid.nodes)), kind)


# ---------------------------------------------------------------------------
# ghost-node policies shared by the finite-difference paths

def _ghost_left_even(v: np.ndarray) -> float:
    # quadratic even fit through (rho_1, rho_2): value at rho = 0
    return (4.0 * v[0] - v[1]) / 3.0


def _ghost_right_extrap(v: np.ndarray) -> float:
    # quadratic extrapolation one node past R
    return 3.0 * v[-1] - 3.0 * v[-2] + v[-3]


def _fd_first_second(f: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    """Central first/second derivatives with even ghost at 0, extrapolated at R."""
    v = f.values
    h = f.grid.h
    left = _ghost_left_even(v)
    right = _ghost_right_extrap(v)
    vp = np.empty_like(v)
    vpp = np.empty_like(v)
    vp[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    vpp[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
    vp[0] = (v[1] - left) / (2.0 * h)
    vpp[0] = (v[1] - 2.0 * v[0] + left) / (h * h)
    vp[-1] = (right - v[-2]) / (2.0 * h)
    vpp[-1] = (right - 2.0 * v[-1] + v[-2]) / (h * h)
    return vp, vpp


def stationary_residual(dim: Dimension, f: GridFunction, scheme: str = "auto") -> GridFunction:
    """Residual of the stationary similarity equation at f:

        f'' + (d+1)/rho f' - rho/2 f' - f + 3(d-2) f^2 - (d-2) rho^2 f^3.

    scheme 'analytic' uses the closed-form derivatives (only for f tagged
    as the shrinker W); 'fd' uses second-order central differences; 'auto'
    picks analytic when available.
    """
    if scheme not in ("auto", "analytic", "fd"):
        raise ValueError(f"unknown scheme {scheme!r}")
    use_analytic = scheme == "analytic" or (scheme == "auto" and f.kind == "W")
    if scheme == "analytic" and f.kind != "W":
        raise ValueError("analytic derivatives are only available for the W profile")

    rho = f.grid.nodes
    d = dim.d
    v = f.values

    if use_analytic:
        a = dim.a
        W = v
        W2 = W * W
        W3 = W2 * W
        # W' = -2 a rho W^2;  (d+1)/rho * W' = -2a(d+1) W^2 (no 0/0 at the axis)
        fpp = -2.0 * a * W2 + 8.0 * a * a * rho ** 2 * W3
        drift_term = -2.0 * a * (d + 1) * W2 + a * rho ** 2 * W2
        res = fpp + drift_term - W + 3.0 * (d - 2) * W2 - (d - 2) * rho ** 2 * W3
    else:
        vp, vpp = _fd_first_second(f)
        res = (vpp + ((d + 1) / rho - rho / 2.0) * vp - v
               + 3.0 * (d - 2) * v * v - (d - 2) * rho ** 2 * v ** 3)

    return GridFunction(f.grid, res)


def halfline_transform(dim: Dimension, f: GridFunction, direction: str = "to") -> GridFunction:
    """Unitary map between the Gaussian-weighted radial space and L2(0, inf).

    direction 'to':   u(rho) = |S^{n-1}|^(1/2) rho^((n-1)/2) e^(-rho^2/8) f(rho)
    direction 'from': the inverse.

    The weight degenerates at the axis, so grids reaching below 1e-8 are
    rejected.
    """
    if direction not in ("to", "from"):
        raise ValueError(f"direction must be 'to' or 'from', got {direction!r}")
    rho = f.grid.nodes
    if rho[0] < _MIN_RHO_HALFLINE:
        raise ValueError(f"grid reaches rho = {rho[0]:g} < {_MIN_RHO_HALFLINE:g}; "
                         "half-line weight is degenerate there")
    n = dim.n
    w = math.sqrt(surface_area(n)) * rho ** ((n - 1) / 2.0) * np.exp(-rho ** 2 / 8.0)
    if direction == "to":
        return GridFunction(f.grid, f.values * w)
    return GridFunction(f.grid, f.values / w)


def nonlinearity(dim: Dimension, f: GridFunction, form: str = "perturbation") -> GridFunction:
    """Nonlinear similarity-flow terms evaluated nodewise at f.

    form 'absolute':      3(d-2) f^2 - (d-2) rho^2 f^3   (terms of the flow itself)
    form 'perturbation':  3(d-2) (1 - rho^2 W) f^2 - (d-2) rho^2 f^3
                          (exact quadratic-and-cubic remainder of the flow at W)
    """
    if form not in ("absolute", "perturbation"):
        raise ValueError(f"unknown form {form!r}")
    d = dim.d
    rho2 = f.grid.nodes ** 2
    v = f.values
    if form == "absolute":
        out = 3.0 * (d - 2) * v * v - (d - 2) * rho2 * v ** 3
    else:
        W = eval_profile(dim, "W", f.grid.nodes)
        out = 3.0 * (d - 2) * (1.0 - rho2 * W) * v * v - (d - 2) * rho2 * v ** 3
    return GridFunction(f.grid, out)


# ---------------------------------------------------------------------------
# quadrature weights and norms

def _composite_simpson_weights(m: int, h: float) -> np.ndarray:
    """Weights for m+1 equispaced points. Falls back to Simpson + 3/8 on odd m."""
    if m < 4:
        raise ValueError("need at least 4 intervals")
    w = np.zeros(m + 1)
    if m % 2 == 0:
        w[0] = w[m] = 1.0
        w[1:m:2] = 4.0
        w[2:m:2] = 2.0
        w *= h / 3.0
    else:
        # Simpson on the first m-3 intervals, 3/8 rule on the last 3
        k = m - 3
        w[0] = w[k] = 1.0
        w[1:k:2] = 4.0
        w[2:k:2] = 2.0
        w *= h / 3.0
        w[k:] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    return w


@lru_cache(maxsize=32)
def _radial_weights(d: int, R: float, N: int, weighted: bool) -> np.ndarray:
    """Quadrature weights for int_0^R (.) rho^{n-1} [e^{-rho^2/4}] drho on the grid.

    Built on the padded point set {0, rho_1..rho_N, R}; the integrand is
    taken to vanish at both pad points (exact at 0 for n >= 2, and
    Gaussian-negligible at R for the weighted case).
    """
    dim = make_dimension(d)
    grid = make_grid(R, N)
    w = _composite_simpson_weights(N + 1, grid.h)[1:-1]
    base = grid.nodes ** (dim.n - 1)
    if weighted:
        base = base * np.exp(-grid.nodes ** 2 / 4.0)
    return w * base


def sup_norm(f: GridFunction) -> float:
    return float(np.max(np.abs(f.values)))


def sigma_dot(dim: Dimension, f: GridFunction, g: GridFunction) -> float:
    """Discrete sigma-weighted inner product over R^n (radial)."""
    if f.grid is not g.grid and (f.grid.R != g.grid.R or f.grid.N != g.grid.N):
        raise ValueError("grid mismatch in sigma_dot")
    w = _radial_weights(dim.d, f.grid.R, f.grid.N, True)
    return surface_area(dim.n) * float(np.dot(w, f.values * g.values))


def sigma_l2(dim: Dimension, f: GridFunction) -> float:
    return math.sqrt(max(sigma_dot(dim, f, f), 0.0))


def _radial_laplacian(dim: Dimension, f: GridFunction) -> GridFunction:
    vp, vpp = _fd_first_second(f)
    return GridFunction(f.grid, vpp + (dim.n - 1) / f.grid.nodes * vp)


def _radial_gradient(f: GridFunction) -> GridFunction:
    vp, _ = _fd_first_second(f)
    return GridFunction(f.grid, vp)


def _unweighted_l2(dim: Dimension, f: GridFunction) -> float:
    w = _radial_weights(dim.d, f.grid.R, f.grid.N, False)
    return math.sqrt(surface_area(dim.n) * max(float(np.dot(w, f.values ** 2)), 0.0))


def xproxy_norm(dim: Dimension, f: GridFunction) -> float:
    """Finite-difference proxy for the stability-space norm.

    (||D^kappa0 f||^2 + ||D^kappa1 f||^2)^(1/2) in L2(R^n), where D^k is
    Delta^(k/2) for even k and the radial gradient of Delta^((k-1)/2) for
    odd k.  Diagnostic only: repeated second differences lose accuracy on
    coarse grids, so N < 1000 is flagged.
    """
    if f.grid.N < 1000:
        warnings.warn("xproxy_norm on a grid with N < 1000 is low-accuracy",
                      RuntimeWarning, stacklevel=2)

    def dk_norm(k: int) -> float:
        g = f
        for _ in range(k // 2):
            g = _radial_laplacian(dim, g)
        if k % 2 == 1:
            g = _radial_gradient(g)
        return _unweighted_l2(dim, g)

    n0 = dk_norm(dim.kappa0)
    n1 = dk_norm(dim.kappa1)
    return math.sqrt(n0 * n0 + n1 * n1)


def norms(dim: Dimension, f: GridFunction) -> dict[str, float]:
    """All three norms of f: sup, sigma-weighted L2, X-norm proxy."""
    return {
        "sup": sup_norm(f),
        "sigmaL2": sigma_l2(dim, f),
        "xProxy": xproxy_norm(dim, f),
    }
