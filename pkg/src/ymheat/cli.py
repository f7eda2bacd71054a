"""Command-line front end.

Subcommands map one-to-one onto the library layers: profile sampling,
moment-bound certificates, operator spectra, similarity-variable runs
(with optional blowup-time shooting), physical-time blowup runs, a
per-dimension summary report, and the acceptance battery.

Output is JSON (floats printed with 17 significant digits, so every
value round-trips exactly) or CSV for traces.  Exit codes: 0 on success,
1 when a computed check fails (a bound >= 1, a shoot that does not
converge, a failed acceptance criterion), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import acceptance, evolve, ggmt, spectral
from .model import (PROFILE_KINDS, eval_profile, make_dimension, make_grid)

__all__ = ["main", "dumps"]


class _Float17(float):
    def __repr__(self):
        return format(float(self), ".17g")


def _wrap(obj):
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, float):
        return _Float17(obj)
    if isinstance(obj, (np.floating,)):
        return _Float17(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_wrap(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _wrap(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_wrap(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """JSON with floats at 17 significant digits (exact round trip)."""
    return json.dumps(_wrap(obj))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write_rows(path: str | None, header: list[str], rows) -> None:
    fh, close = _open_out(path)
    try:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    finally:
        if close:
            fh.close()


def _dim_from_args(args) -> "make_dimension":
    if getattr(args, "n", None) is not None:
        return make_dimension(args.n - 2)
    return make_dimension(args.d)


def _add_dim_args(p: argparse.ArgumentParser, required: bool = True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--d", type=int, help="spatial dimension d")
    g.add_argument("--n", type=int, help="similarity dimension n = d + 2")


# -- subcommand handlers ------------------------------------------------------

def _cmd_profile(args) -> int:
    dim = _dim_from_args(args)
    if args.rho is not None:
        rho = np.array([float(s) for s in args.rho.split(",")])
    else:
        rho = make_grid(args.R, args.N).nodes
    vals = eval_profile(dim, args.kind, rho)
    if args.format == "json":
        fh, close = _open_out(args.out)
        try:
            fh.write(dumps({"d": dim.d, "n": dim.n, "kind": args.kind,
                            "rho": rho, "values": vals}) + "\n")
        finally:
            if close:
                fh.close()
    else:
        _write_rows(args.out, ["rho", "value"], zip(rho.tolist(), vals.tolist()))
    return 0


def _cmd_ggmt(args) -> int:
    dim = _dim_from_args(args)
    if args.scan_p:
        lo, hi = (int(s) for s in args.scan_p.split(".."))
        reports = ggmt.scan_p(dim, lo, hi)
    else:
        reports = [ggmt.compute_B(dim, args.p, args.pathway)]
    fh, close = _open_out(args.out)
    try:
        for rep in reports:
            fh.write(dumps(rep.to_dict()) + "\n")
    finally:
        if close:
            fh.close()
    return 0 if all(r.passes for r in reports) else 1


def _cmd_spectrum(args) -> int:
    dim = _dim_from_args(args)
    if args.extrapolate:
        res = spectral.richardson_eigen(dim, args.kind, args.R, args.N, args.k)
    else:
        op = spectral.discretize(spectral.make_operator(dim, args.kind),
                                 make_grid(args.R, args.N))
        res = spectral.eigen_lowest(op, args.k)
    out = {"d": dim.d, "n": dim.n, "kind": res.kind, "R": res.R, "N": res.N,
           "eigenvalues": res.eigenvalues, "residuals": res.residuals}
    if res.extrapolated is not None:
        out["extrapolated"] = res.extrapolated
    fh, close = _open_out(args.out)
    try:
        fh.write(dumps(out) + "\n")
    finally:
        if close:
            fh.close()
    return 0


def _trace_rows(trace: evolve.EvolutionTrace):
    return zip(trace.taus.tolist(), trace.sup.tolist(), trace.sigma.tolist(),
               trace.xproxy.tolist(), trace.c1.tolist())


_TRACE_HEADER = ["tau", "sup", "sigma", "xproxy", "c1"]


def _evolve_cfg(args) -> evolve.SolverConfig:
    return evolve.SolverConfig(
        R=args.R, N=args.N, dt=args.dt, theta=args.theta,
        tau_max=args.tau_max, bc_outer=args.bc_outer,
        include_potential=not args.no_potential,
        include_nonlinearity=not args.no_nonlinearity,
        sample_stride=args.sample_stride)


def _cmd_evolve(args) -> int:
    dim = _dim_from_args(args)
    cfg = _evolve_cfg(args)
    v = None
    if args.eps:
        eps = args.eps
        def v(r):
            return eps * np.exp(-np.asarray(r) ** 2)

    if args.shoot:
        res = evolve.shoot_T(dim, v, cfg, delta=args.delta)
        summary = {"d": dim.d, "T": res.T, "verdict": res.verdict,
                   "iterations": res.iterations, "c1Terminal": res.c1_terminal}
        if res.trace is not None:
            try:
                fit = evolve.fit_decay_rate(res.trace, field="sigma")
                summary["omega"] = fit.omega
                summary["omegaR2"] = fit.r2
            except ValueError:
                pass
            if args.out:
                _write_rows(args.out, _TRACE_HEADER, _trace_rows(res.trace))
        print(dumps(summary))
        return 0 if res.verdict == "converged" else 1

    trace = evolve.run_similarity(dim, v, args.T, cfg)
    if args.out:
        _write_rows(args.out, _TRACE_HEADER, _trace_rows(trace))
    summary = {"d": dim.d, "T": args.T, "tauEnd": float(trace.taus[-1]),
               "supEnd": float(trace.sup[-1]), "sigmaEnd": float(trace.sigma[-1]),
               "c1End": float(trace.c1[-1]), "diverged": trace.diverged}
    if trace.diverged_at is not None:
        summary["divergedAt"] = trace.diverged_at
    print(dumps(summary))
    return 0


def _cmd_blowup(args) -> int:
    dim = _dim_from_args(args)
    cfg = evolve.SolverConfig(R=args.R, N=args.N, dt=args.dt, theta=args.theta,
                              t_max=args.t_max,
                              sup_stop_physical=args.sup_stop,
                              state_stride=args.state_stride)
    res = evolve.run_physical(dim, lambda r: args.scale * eval_profile(dim, "W", r),
                              cfg)
    if args.out:
        _write_rows(args.out, ["t", "sup"],
                    zip(res.times.tolist(), res.sup.tolist()))
    summary = {"d": dim.d, "scale": args.scale, "blowup": res.blowup,
               "stopped": res.stopped, "steps": int(res.times.size - 1),
               "tEnd": float(res.times[-1]), "supEnd": float(res.sup[-1]),
               "TFit": res.T_fit, "fitR2": res.fit_r2,
               "profileDistance": res.profile_distance,
               "resolvedT": res.resolved_t}
    print(dumps(summary))
    return 0


def _cmd_report(args) -> int:
    dim = _dim_from_args(args)
    p = args.p if args.p is not None else (4 if dim.n <= 9 else 6)
    rep = {
        "d": dim.d, "n": dim.n, "a": dim.a, "b": dim.b,
        "kappa0": dim.kappa0, "kappa1": dim.kappa1,
        "rhoStar": ggmt.positivity_threshold(dim),
        "rhoBar": str(ggmt.rho_bar(dim)),
        "ggmt": {pw: ggmt.compute_B(dim, p, pw).to_dict()
                 for pw in (ggmt.PATHWAYS if p % 2 == 0 else ("tightQminus",))},
    }
    lin = spectral.richardson_eigen(dim, "linearized", args.R, args.N, k=2)
    iso = spectral.susy_isospectrality(dim, args.R, args.N, k=2)
    rep["spectrum"] = {
        "lambda0": float(lin.extrapolated[0]),
        "lambda1": float(lin.extrapolated[1]),
        "susyMaxMismatch": iso["max_mismatch"],
    }
    fh, close = _open_out(args.out)
    try:
        fh.write(dumps(rep) + "\n")
    finally:
        if close:
            fh.close()
    ok = all(rep["ggmt"][pw]["passes"] for pw in rep["ggmt"])
    return 0 if ok else 1


def _cmd_repro(args) -> int:
    only = None
    if args.only:
        only = sorted({int(s) for s in args.only.split(",")})
    results = acceptance.run_all(only=only)
    return 0 if all(r.passed for r in results) else 1


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ymheat",
        description="Self-similar blowup for equivariant Yang-Mills heat flow: "
                    "profiles, spectral certificates, and evolution drivers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="sample a closed-form profile")
    _add_dim_args(p)
    p.add_argument("--kind", choices=PROFILE_KINDS, default="W")
    p.add_argument("--R", type=float, default=20.0)
    p.add_argument("--N", type=int, default=200)
    p.add_argument("--rho", help="comma-separated evaluation points (overrides grid)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path, '-' for stdout (default)")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("ggmt", help="moment-bound certificate B < 1")
    _add_dim_args(p)
    p.add_argument("--p", type=int, default=4, help="moment power")
    p.add_argument("--pathway", choices=ggmt.PATHWAYS, default="tightQminus")
    p.add_argument("--scan-p", metavar="LO..HI",
                   help="report every integer power in the range (tightQminus)")
    p.add_argument("--out", help="output path, '-' for stdout (default)")
    p.set_defaults(func=_cmd_ggmt)

    p = sub.add_parser("spectrum", help="lowest eigenvalues of a half-line operator")
    _add_dim_args(p)
    p.add_argument("--kind", choices=spectral.OPERATOR_KINDS, default="linearized")
    p.add_argument("--R", type=float, default=20.0)
    p.add_argument("--N", type=int, default=4000)
    p.add_argument("--k", type=int, default=4, help="number of eigenvalues")
    p.add_argument("--extrapolate", action="store_true",
                   help="solve at N and 2N, Richardson-extrapolate")
    p.add_argument("--out", help="output path, '-' for stdout (default)")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("evolve", help="similarity-variable run, optionally shooting on T")
    _add_dim_args(p)
    p.add_argument("--T", type=float, default=1.0, help="blowup-time modulation")
    p.add_argument("--eps", type=float, default=0.0,
                   help="Gaussian perturbation amplitude v = eps exp(-rho^2)")
    p.add_argument("--shoot", action="store_true", help="bisect T against the unstable mode")
    p.add_argument("--delta", type=float, default=0.1, help="initial bracket half-width")
    p.add_argument("--R", type=float, default=20.0)
    p.add_argument("--N", type=int, default=2000)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--tau-max", type=float, default=12.0)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--bc-outer", choices=evolve.BC_OUTER, default="dirichletZero")
    p.add_argument("--no-potential", action="store_true")
    p.add_argument("--no-nonlinearity", action="store_true")
    p.add_argument("--sample-stride", type=int, default=10)
    p.add_argument("--out", help="trace CSV path ('-' for stdout)")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("blowup", help="physical-time run from scaled shrinker data")
    _add_dim_args(p)
    p.add_argument("--scale", type=float, default=1.0, help="u0 = scale * W")
    p.add_argument("--R", type=float, default=20.0)
    p.add_argument("--N", type=int, default=2000)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-max", type=float, default=4.0)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--sup-stop", type=float, default=400.0)
    p.add_argument("--state-stride", type=int, default=100)
    p.add_argument("--out", help="(t, sup) CSV path ('-' for stdout)")
    p.set_defaults(func=_cmd_blowup)

    p = sub.add_parser("report", help="per-dimension certificate summary")
    _add_dim_args(p)
    p.add_argument("--p", type=int, help="moment power (default 4 for n <= 9, else 6)")
    p.add_argument("--R", type=float, default=20.0)
    p.add_argument("--N", type=int, default=4000)
    p.add_argument("--out", help="output path, '-' for stdout (default)")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("repro", help="run the acceptance battery (PASS/FAIL lines)")
    p.add_argument("--only", help="comma-separated criterion numbers, e.g. 1,3,5")
    p.set_defaults(func=_cmd_repro)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
