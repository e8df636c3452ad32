"""Release acceptance criteria, one test per criterion.

Tolerances and sample sizes are the published release targets; none is
relaxed here.  Run with ``pytest -v tests/test_acceptance.py`` for one
PASS/FAIL line per criterion.
"""
import csv
import io
import time

import numpy as np
import pytest

from mems_pullin import oracle
from mems_pullin.branch_core import branch_point, nonlocal_I, reconstruct_profile
from mems_pullin.cli import main
from mems_pullin.dynamics import CONVERGED, QUENCHED, simulate
from mems_pullin.pull_in import E_func, F_func, find_s_star, solve_for_lambda

SAMPLE_S = np.geomspace(1.05, 8.0, 10)


def test_criterion_1_pull_in_local():
    t0 = time.perf_counter()
    sol = find_s_star(alpha=0.0)
    elapsed = time.perf_counter() - t0
    assert abs(sol.lambda_star - 0.10871) <= 1e-4
    assert elapsed < 1.0


def test_criterion_2_pull_in_nonlocal():
    t0 = time.perf_counter()
    sol = find_s_star(alpha=1.0)
    elapsed = time.perf_counter() - t0
    assert abs(sol.lambda_star - 2.38709) <= 1e-4
    assert elapsed < 1.0


def test_criterion_3_trichotomy():
    t0 = time.perf_counter()
    for alpha in (0.0, 1.0):
        lstar = find_s_star(alpha).lambda_star
        counts = [len(solve_for_lambda(f * lstar, alpha, fold_tol=1e-9).roots)
                  for f in (0.5, 1.0, 1.5)]
        assert counts == [2, 1, 0], f"alpha={alpha}"
    assert time.perf_counter() - t0 < 5.0


def test_criterion_4_oracle_equivalence():
    t0 = time.perf_counter()
    worst_hit = worst_robin = 0.0
    for alpha in (0.0, 1.0):
        for s in np.geomspace(1.01, 1000.0, 50):
            pt = branch_point(s, alpha)
            traj = oracle.shoot(pt.a, pt.sigma, 4096)
            worst_hit = max(worst_hit, abs(traj.ws[-1] - pt.b))
            worst_robin = max(worst_robin, oracle.robin_residual(traj))
    elapsed = time.perf_counter() - t0
    assert worst_hit < 1e-7
    assert worst_robin < 1e-7
    assert elapsed < 30.0


def test_criterion_5_profile_validity():
    for i, s in enumerate(SAMPLE_S):
        pt = branch_point(s, float(i % 2))
        p1 = reconstruct_profile(pt, 1001)
        p2 = reconstruct_profile(pt, 2001)
        r1, r2 = oracle.ode_residual(p1), oracle.ode_residual(p2)
        assert r1 < 1e-4, f"s={s}"
        assert 3.5 <= r1 / r2 <= 4.5, f"s={s}"
        assert np.max(np.abs(p1.ws - p1.ws[::-1])) <= 1e-12
        assert np.all(p1.ws[:-2] - 2.0 * p1.ws[1:-1] + p1.ws[2:] > 0.0)


def test_criterion_6_nonlocal_consistency():
    for s in SAMPLE_S:
        pt = branch_point(s, 1.0)
        exact = nonlocal_I(pt.a, pt.b)
        quad = oracle.quad_nonlocal(reconstruct_profile(pt, 2001))
        assert abs(quad - exact) / exact < 1e-6, f"s={s}"
        assert oracle.lambda_roundtrip(pt, 2001) < 1e-5, f"s={s}"


def test_criterion_7_monotonicity_suite():
    s = 1.0 + np.geomspace(1e-6, 1e6, 10_000)
    E = np.array([E_func(x) for x in s])
    F = np.array([F_func(x) for x in s])
    pts = [branch_point(x, 0.0) for x in s]
    a = np.array([p.a for p in pts])
    b = np.array([p.b for p in pts])
    lam = np.array([p.lam for p in pts])

    assert np.all(np.diff(E) > 0.0), "E not strictly increasing"
    assert np.all(np.diff(F) > 0.0), "F not strictly increasing"
    assert np.all(np.diff(a) < 0.0), "a not strictly decreasing"
    j = int(np.argmax(lam))
    assert 0 < j < len(lam) - 1, "lambda maximum not interior"
    assert lam[j] == pytest.approx(find_s_star(0.0).lambda_star, rel=1e-6)
    assert lam[0] < 1e-4 * lam[j] and lam[-1] < 1e-4 * lam[j], "lambda does not vanish at the ends"
    k = int(np.argmax(b))
    assert 0 < k < len(b) - 1, (
        f"b has no interior maximum: its largest sampled value b={b[k]:.6f} sits at the "
        f"endpoint s={s[k]:.8g}; the only interior extremum is a minimum "
        f"b={b.min():.10f} at s={s[int(np.argmin(b))]:.6f}")


@pytest.mark.parametrize("lam,status", [(0.2, QUENCHED), (0.05, CONVERGED)])
def test_criterion_8_dynamics(lam, status):
    t0 = time.perf_counter()
    out = simulate(lam, 0.0, 401, 100.0)
    elapsed = time.perf_counter() - t0
    assert out.status == status
    if status == QUENCHED:
        assert np.max(out.final.us) >= 0.99 and out.quench_time < 100.0
    else:
        assert out.steady_gap < 1e-3
    assert elapsed < 60.0


def test_criterion_9_figure_reproduction(capsys):
    assert main(["diagram", "--alpha", "0"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["t", "s", "a", "b", "sigma", "lambda"]
    data = np.array(rows[1:], dtype=float)
    t, a, lam = data[:, 0], data[:, 2], data[:, 5]
    assert np.all(np.diff(t) > 0.0)
    assert np.all(np.diff(a) > 0.0) and a[0] < 0.01 and a[-1] > 0.99
    j = int(np.argmax(lam))
    assert 0 < j < len(lam) - 1
    assert np.all(np.diff(lam[: j + 1]) > 0.0) and np.all(np.diff(lam[j:]) < 0.0)
    assert abs(lam[j] - 0.10871) < 1e-3
