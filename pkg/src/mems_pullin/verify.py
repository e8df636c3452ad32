"""Release battery run by ``mems-pullin verify``.

Each check returns ``(passed, detail)``.  The closed forms are compared with
reported pull-in loads, with the shooting oracle, with quadrature and finite
differences, and with the sampled monotonicity structure of the branch.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import oracle
from .branch_core import branch_point, nonlocal_I, reconstruct_profile
from .pull_in import E_func, F_func, diagram_sweep, find_s_star, solve_for_lambda

LAMBDA_STAR_ALPHA0 = 0.10871
LAMBDA_STAR_ALPHA1 = 2.38709
LAMBDA_STAR_ATOL = 1e-4

ORACLE_S = np.geomspace(1.01, 1000.0, 50)
ORACLE_TOL = 1e-7
PROFILE_S = np.geomspace(1.05, 8.0, 10)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "seconds": round(self.seconds, 3)}


def check_pullin_alpha0():
    ls = find_s_star(0.0).lambda_star
    return abs(ls - LAMBDA_STAR_ALPHA0) <= LAMBDA_STAR_ATOL, f"lambda* = {ls:.8f}"


def check_pullin_alpha1():
    ls = find_s_star(1.0).lambda_star
    return abs(ls - LAMBDA_STAR_ALPHA1) <= LAMBDA_STAR_ATOL, f"lambda* = {ls:.8f}"


def check_trichotomy():
    counts = {}
    for alpha in (0.0, 1.0):
        ls = find_s_star(alpha).lambda_star
        counts[alpha] = [len(solve_for_lambda(f * ls, alpha).roots) for f in (0.5, 1.0, 1.5)]
    ok = all(c == [2, 1, 0] for c in counts.values())
    return ok, "root counts at (0.5, 1, 1.5) lambda*: " + ", ".join(
        f"alpha={a:g} -> {c}" for a, c in counts.items())


def oracle_errors(s_values=ORACLE_S, alphas=(0.0, 1.0), n_steps=4096):
    """Max |w(1) - b| and max Robin residual of shooting over the sample."""
    hit = robin = 0.0
    for alpha in alphas:
        for s in s_values:
            pt = branch_point(s, alpha)
            traj = oracle.shoot(pt.a, pt.sigma, n_steps)
            hit = max(hit, abs(traj.ws[-1] - pt.b))
            robin = max(robin, oracle.robin_residual(traj))
    return hit, robin


def check_oracle_equivalence():
    hit, robin = oracle_errors()
    return (hit < ORACLE_TOL and robin < ORACLE_TOL,
            f"max |w(1)-b| = {hit:.2e}, max robin = {robin:.2e} (tol {ORACLE_TOL:g})")


def check_profiles():
    worst_res, worst_sym, ratios, convex = 0.0, 0.0, [], True
    for alpha in (0.0, 1.0):
        for s in PROFILE_S[::2] if alpha else PROFILE_S[1::2]:
            pt = branch_point(s, alpha)
            p1 = reconstruct_profile(pt, 1001)
            p2 = reconstruct_profile(pt, 2001)
            r1, r2 = oracle.ode_residual(p1), oracle.ode_residual(p2)
            worst_res = max(worst_res, r1)
            ratios.append(r1 / r2)
            worst_sym = max(worst_sym, float(np.max(np.abs(p1.ws - p1.ws[::-1]))))
            convex &= bool(np.all(np.diff(p1.ws, 2) > 0.0))
    ok = worst_res < 1e-4 and all(3.5 <= r <= 4.5 for r in ratios) and worst_sym <= 1e-12 and convex
    return ok, (f"max residual {worst_res:.2e}, ratios [{min(ratios):.3f}, {max(ratios):.3f}], "
                f"symmetry {worst_sym:.1e}, convex {convex}")


def check_nonlocal():
    worst_q = worst_l = 0.0
    for s in PROFILE_S:
        pt = branch_point(s, 1.0)
        prof = reconstruct_profile(pt, 2001)
        exact = nonlocal_I(pt.a, pt.b)
        worst_q = max(worst_q, abs(oracle.quad_nonlocal(prof) - exact) / exact)
        worst_l = max(worst_l, oracle.lambda_roundtrip(pt, 2001))
    return worst_q < 1e-6 and worst_l < 1e-5, f"quadrature {worst_q:.2e}, lambda round trip {worst_l:.2e}"


def check_monotonicity():
    s = 1.0 + np.geomspace(1e-6, 1e6, 10_000)
    E = np.array([E_func(x) for x in s])
    F = np.array([F_func(x) for x in s])
    pts = [branch_point(x, 0.0) for x in s]
    a = np.array([p.a for p in pts])
    b = np.array([p.b for p in pts])
    lam = np.array([p.lam for p in pts])
    k = int(np.argmin(b))  # b falls from 1 to ~0.483 and climbs back toward 1/2
    j = int(np.argmax(lam))
    ok = (bool(np.all(np.diff(E) > 0)) and bool(np.all(np.diff(F) > 0))
          and bool(np.all(np.diff(a) < 0)) and 0 < k < len(b) - 1
          and 0 < j < len(lam) - 1 and lam[0] < 1e-4 * lam[j] and lam[-1] < 1e-4 * lam[j])
    return ok, f"b bottoms out at s={s[k]:.4g}, lambda peaks at s={s[j]:.4g} ({lam[j]:.6f})"


def check_diagram_shape():
    tab = diagram_sweep(0.0, 0.001, 0.999, 1000)
    a, b, lam = tab.column("a"), tab.column("b"), tab.column("lambda")
    j = int(np.argmax(lam))
    single_peak = bool(np.all(np.diff(lam[: j + 1]) > 0) and np.all(np.diff(lam[j:]) < 0))
    ok = (bool(np.all(np.diff(a) > 0)) and single_peak
          and abs(lam[j] - LAMBDA_STAR_ALPHA0) < 1e-3
          and not (np.all(np.diff(b) >= 0) or np.all(np.diff(b) <= 0)))
    return ok, f"max lambda on grid {lam[j]:.6f}"


def check_dynamics():
    from .dynamics import simulate

    hi = simulate(0.2, 0.0, 401, 100.0)
    lo = simulate(0.05, 0.0, 401, 100.0)
    gap = lo.steady_gap if lo.steady_gap is not None else math.inf
    ok = hi.status == "quenched" and lo.status == "converged" and gap < 1e-3
    return ok, (f"lambda=0.2: {hi.status} (t={hi.quench_time}); "
                f"lambda=0.05: {lo.status} (gap {gap:.2e})")


CHECKS = [
    ("pullin_alpha0", check_pullin_alpha0),
    ("pullin_alpha1", check_pullin_alpha1),
    ("trichotomy", check_trichotomy),
    ("oracle_equivalence", check_oracle_equivalence),
    ("profile_validity", check_profiles),
    ("nonlocal_consistency", check_nonlocal),
    ("monotonicity", check_monotonicity),
    ("diagram_shape", check_diagram_shape),
]
DYNAMICS_CHECKS = [("dynamics", check_dynamics)]


def run_checks(include_dynamics: bool = True) -> list[CheckResult]:
    results = []
    for name, fn in CHECKS + (DYNAMICS_CHECKS if include_dynamics else []):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, not a crashed battery
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results
