"""End-to-end verification battery with one PASS/FAIL line per criterion.

Each criterion reruns a pipeline at its stated tolerance and wall-clock
budget: the bound-state certificates, the spectral ladders, the
closed-form identities, the linear and nonlinear evolution oracles, the
physical-time blowup demonstration, and the parabolic-scaling symmetry.
Criteria are independent; ``run_all`` executes any subset.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import evolve, ggmt, spectral
from .model import (eval_profile, make_dimension, make_grid, sample_profile,
                    stationary_residual, sup_norm)

GGMT_PAIRS = ((8, 4), (9, 4), (10, 6), (11, 6))


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    seconds: float
    detail: str

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.index} {self.name}  {self.seconds:.1f}s  {self.detail}"


def _rel(x: float, ref: float) -> float:
    return abs(x - ref) / abs(ref)


def criterion_1() -> CriterionResult:
    """Bound-state certificates B < 1 on all pathways, exact constants."""
    t0 = time.perf_counter()
    worst_b = 0.0
    worst_agree = 0.0
    ok = True
    for n, p in GGMT_PAIRS:
        dim = make_dimension(n - 2)
        reports = {pw: ggmt.compute_B(dim, p, pw) for pw in ggmt.PATHWAYS}
        for rep in reports.values():
            ok &= rep.passes and rep.B < 1.0
            worst_b = max(worst_b, rep.B)
        agree = _rel(reports["paperOverestimate"].B, reports["exactCertificate"].B)
        worst_agree = max(worst_agree, agree)
        ok &= agree <= 1e-10
    const = ggmt.compute_B(make_dimension(6), 4, "paperOverestimate").constant
    const_rel = _rel(const, 945.0 / 8.0 ** 9)
    ok &= const_rel <= 1e-12
    ok &= ggmt.ggmt_constant_exact(8, 4) == Fraction(945, 8 ** 9)
    sec = time.perf_counter() - t0
    ok &= sec < 5.0
    return CriterionResult(1, "bound-state-certificate", ok, sec,
                           f"maxB={worst_b:.6f} pathwayAgree={worst_agree:.1e} "
                           f"constRel={const_rel:.1e}")


def criterion_2() -> CriterionResult:
    """Partner-potential positivity threshold sits below 47/10."""
    t0 = time.perf_counter()
    dim = make_dimension(6)
    rho_star = ggmt.positivity_threshold(dim)
    q_at = float(eval_profile(dim, "QSusy", 4.7))
    ok = rho_star < 4.7 and q_at > 0.0
    sec = time.perf_counter() - t0
    ok &= sec < 1.0
    return CriterionResult(2, "tail-positivity", ok, sec,
                           f"rhoStar={rho_star:.6f} Q(4.7)={q_at:.5f}")


def criterion_3() -> CriterionResult:
    """Spectrum is {-1} + positive gap, with positive isospectral partner."""
    t0 = time.perf_counter()
    ok = True
    rows = []
    for d in range(5, 10):
        t_n = time.perf_counter()
        dim = make_dimension(d)
        lin = spectral.richardson_eigen(dim, "linearized", R=20.0, N=4000, k=6)
        lam0, lam1 = lin.extrapolated[0], lin.extrapolated[1]
        iso = spectral.susy_isospectrality(dim, R=20.0, N=4000, k=6)
        mism = float(iso["max_mismatch"])
        susy_pos = bool(np.all(iso["susy"] > 0.0))
        sec_n = time.perf_counter() - t_n
        ok &= (abs(lam0 + 1.0) <= 5e-3 and lam1 >= 0.05
               and susy_pos and mism <= 5e-3 and sec_n < 60.0)
        rows.append(f"d{d}:gap={lam1:.3f}")
    sec = time.perf_counter() - t0
    return CriterionResult(3, "spectral-certification", ok, sec, " ".join(rows))


def criterion_4() -> CriterionResult:
    """Free half-line operator reproduces the exact ladder {1, 2, 3}."""
    t0 = time.perf_counter()
    ok = True
    worst = 0.0
    for d in range(5, 10):
        free = spectral.richardson_eigen(make_dimension(d), "free", R=20.0, N=4000, k=3)
        err = float(np.max(np.abs(free.extrapolated - np.array([1.0, 2.0, 3.0]))))
        worst = max(worst, err)
        ok &= err <= 1e-3
    sec = time.perf_counter() - t0
    ok &= sec < 30.0
    return CriterionResult(4, "eigensolver-calibration", ok, sec,
                           f"maxLadderErr={worst:.2e}")


def criterion_5() -> CriterionResult:
    """Closed-form profile, eigenfunction, and potential identities."""
    t0 = time.perf_counter()
    ok = True
    worst = {"stationary": 0.0, "eigen": 0.0, "susyIdent": 0.0, "vIdent": 0.0}
    grid = make_grid(20.0, 4000)
    rho = np.geomspace(0.05, 20.0, 2000)
    for d in range(5, 10):
        dim = make_dimension(d)
        n = dim.n
        res = sup_norm(stationary_residual(dim, sample_profile(dim, "W", grid)))
        worst["stationary"] = max(worst["stationary"], res)
        worst["eigen"] = max(worst["eigen"], spectral.eigenfunction_residual(dim, grid))
        a, b = dim.a, dim.b
        den = a * rho * rho + b
        lng2 = -(n - 1.0) / (2.0 * rho * rho) - 0.25 - 4.0 * a * (b - a * rho * rho) / den ** 2
        lhs = eval_profile(dim, "QSusy", rho)
        rhs = (eval_profile(dim, "qFree", rho) - eval_profile(dim, "V", rho)
               - 2.0 * lng2 - (n * n - 1.0) / (4.0 * rho * rho))
        worst["susyIdent"] = max(worst["susyIdent"], float(np.max(np.abs(lhs - rhs))))
        w = eval_profile(dim, "W", rho)
        v_direct = 3.0 * (d - 2.0) * w * (2.0 - rho * rho * w)
        worst["vIdent"] = max(worst["vIdent"],
                              float(np.max(np.abs(eval_profile(dim, "V", rho) - v_direct))))
    ok &= worst["stationary"] <= 1e-10 and worst["eigen"] <= 1e-9
    ok &= worst["susyIdent"] <= 1e-9 and worst["vIdent"] <= 1e-12
    sec = time.perf_counter() - t0
    ok &= sec < 5.0
    return CriterionResult(5, "closed-form-residuals", ok, sec,
                           " ".join(f"{k}={v:.1e}" for k, v in worst.items()))


def criterion_6() -> CriterionResult:
    """Linear flow matches the drift semigroup and the unit growth rate."""
    t0 = time.perf_counter()
    dim = make_dimension(5)
    cfg = evolve.SolverConfig(R=20.0, N=2000, dt=1e-3, tau_max=1.0,
                              include_potential=False, include_nonlinearity=False)
    beta = 0.25
    trace = evolve.run_similarity(dim, phi0=lambda r: np.exp(-beta * r * r), cfg=cfg)
    oracle = evolve.ou_oracle(dim, beta, float(trace.taus[-1]), trace.grid.nodes)
    ou_rel = float(np.max(np.abs(trace.phi_final - oracle)) / np.max(np.abs(oracle)))

    cfg_g = evolve.SolverConfig(R=20.0, N=2000, dt=1e-3, tau_max=1.0,
                                include_nonlinearity=False)
    gmode = eval_profile(dim, "gMode", make_grid(20.0, 2000).nodes)
    tr = evolve.run_similarity(dim, phi0=1e-3 * gmode, cfg=cfg_g)
    span = float(tr.taus[-1] - tr.taus[0])
    growth_err = abs(float(tr.c1[-1] / tr.c1[0]) / math.exp(span) - 1.0)

    ok = ou_rel <= 1e-4 and growth_err <= 0.01
    sec = time.perf_counter() - t0
    ok &= sec < 60.0
    return CriterionResult(6, "linear-dynamics", ok, sec,
                           f"ouRel={ou_rel:.1e} growthErr={growth_err:.1e}")


def criterion_7() -> CriterionResult:
    """Blowup-time shooting converges with the spectral decay rate."""
    t0 = time.perf_counter()
    ok = True
    rows = []
    for d in (5, 6):
        t_d = time.perf_counter()
        dim = make_dimension(d)
        cfg = evolve.SolverConfig(R=15.0, N=1500, dt=2e-3, tau_max=12.0)
        v = lambda r: 1e-2 * np.exp(-np.asarray(r) ** 2)
        res = evolve.shoot_T(dim, v, cfg)
        fit = evolve.fit_decay_rate(res.trace, window=(3.0, 9.0))
        gap = spectral.spectral_gap(dim)
        half = evolve.shoot_T(dim, lambda r: 5e-3 * np.exp(-np.asarray(r) ** 2), cfg)
        ratio = abs(half.T - 1.0) / abs(res.T - 1.0)
        sec_d = time.perf_counter() - t_d
        ok &= (res.verdict == "converged" and abs(res.T - 1.0) <= 5e-2
               and fit.omega > 0.0 and abs(fit.omega - gap) <= 0.2 * gap
               and half.verdict == "converged" and abs(ratio - 0.5) <= 0.15
               and sec_d < 900.0)
        rows.append(f"d{d}:T={res.T:.5f},omega={fit.omega:.4f}/{gap:.4f},half={ratio:.3f}")
    sec = time.perf_counter() - t0
    return CriterionResult(7, "blowup-time-shooting", ok, sec, " ".join(rows))


def criterion_8() -> CriterionResult:
    """Physical-time blowup reproduces the rate and the rescaled profile."""
    t0 = time.perf_counter()
    dim = make_dimension(6)
    cfg = evolve.SolverConfig(R=20.0, N=12000, dt=5e-3, t_max=4.0,
                              sup_stop_physical=5e3, state_stride=200)

    def shrinker_data(scale):
        return lambda r: scale * eval_profile(dim, "W", r)

    exact = evolve.run_physical(dim, shrinker_data(1.0), cfg)
    fat = evolve.run_physical(dim, shrinker_data(1.2), cfg)
    ok = (exact.blowup and exact.T_fit is not None
          and abs(exact.T_fit - 1.0) <= 2e-2
          and exact.profile_distance is not None and exact.profile_distance <= 2e-2
          and exact.fit_r2 is not None and exact.fit_r2 >= 0.999)
    ok &= (fat.blowup and fat.T_fit is not None and fat.T_fit < 1.0
           and fat.profile_distance is not None and fat.profile_distance <= 5e-2
           and fat.fit_r2 is not None and fat.fit_r2 >= 0.999)
    sec = time.perf_counter() - t0
    ok &= sec < 900.0
    return CriterionResult(8, "physical-blowup", ok, sec,
                           f"T={exact.T_fit:.5f} dist={exact.profile_distance:.4f} "
                           f"r2={min(exact.fit_r2, fat.fit_r2):.5f} "
                           f"fatT={fat.T_fit:.5f} fatDist={fat.profile_distance:.4f}")


def criterion_9() -> CriterionResult:
    """Solver commutes with the parabolic rescaling."""
    t0 = time.perf_counter()
    dim = make_dimension(6)
    cfg = evolve.SolverConfig(R=20.0, N=2000, dt=1e-3)
    u0 = lambda r: 0.005 * np.exp(-np.asarray(r) ** 2)
    defects = {lam: evolve.scaling_check(dim, u0, lam, cfg) for lam in (0.5, 2.0)}
    ok = all(v <= 1e-3 for v in defects.values())
    sec = time.perf_counter() - t0
    ok &= sec < 300.0
    return CriterionResult(9, "parabolic-scaling", ok, sec,
                           " ".join(f"lam={k}:{v:.1e}" for k, v in defects.items()))


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
    9: criterion_9,
}


def run_all(only: list[int] | None = None) -> list[CriterionResult]:
    """Run the battery (or a subset), print one verdict line per criterion."""
    picked = sorted(CRITERIA) if only is None else only
    results = []
    for idx in picked:
        if idx not in CRITERIA:
            raise ValueError(f"no criterion {idx}; valid: {sorted(CRITERIA)}")
        res = CRITERIA[idx]()
        print(res.line(), flush=True)
        results.append(res)
    return results
