import numpy as np
import pytest

from mems_pullin import oracle
from mems_pullin.branch_core import SteadyProfile, branch_point, nonlocal_I, reconstruct_profile
from mems_pullin.errors import DomainError, IntegrationError


def _replace_ws(profile, ws):
    return SteadyProfile(s=profile.s, alpha=profile.alpha, lam=profile.lam, a=profile.a,
                         b=profile.b, sigma=profile.sigma, xs=profile.xs, ws=ws)


# --- shoot --------------------------------------------------------------------

@pytest.mark.parametrize("method", oracle.METHODS)
def test_shoot_lands_on_branch_at_two(method):
    pt = branch_point(2.0)
    traj = oracle.shoot(pt.a, pt.sigma, 4096, method=method)
    assert traj.ws[0] == pt.a and traj.wps[0] == 0.0
    assert abs(traj.ws[-1] - pt.b) < 1e-8
    assert abs(traj.wps[-1] - (1.0 - pt.b)) < 1e-8
    assert oracle.robin_residual(traj) < 1e-8


def test_shoot_trajectory_is_increasing_and_convex():
    pt = branch_point(20.0, 1.0)
    traj = oracle.shoot(pt.a, pt.sigma, 1024)
    assert np.all(np.diff(traj.ws) > 0.0)
    assert np.all(traj.wps >= 0.0)
    assert np.all(np.diff(traj.wps) > 0.0)
    assert traj.xs[0] == 0.0 and traj.xs[-1] == 1.0


def test_shoot_without_load_stays_flat():
    traj = oracle.shoot(0.5, 0.0, 64)
    assert np.all(traj.ws == 0.5) and np.all(traj.wps == 0.0)
    assert oracle.robin_residual(traj) == 0.5


def test_shoot_off_branch_misses_boundary_condition():
    assert oracle.robin_residual(oracle.shoot(0.5, 1.0, 256)) > 1.0


def test_classical_rk4_is_fourth_order():
    pt = branch_point(2.0)
    err = [abs(oracle.shoot(pt.a, pt.sigma, n, method="rk4").ws[-1] - pt.b)
           for n in (32, 64, 128)]
    for coarse, fine in zip(err, err[1:]):
        assert 14.0 < coarse / fine < 18.0


def test_extrapolated_rk4_is_fifth_order():
    pt = branch_point(2.0)
    err = [abs(oracle.shoot(pt.a, pt.sigma, n).ws[-1] - pt.b) for n in (16, 32, 64)]
    for coarse, fine in zip(err, err[1:]):
        assert 28.0 < coarse / fine < 40.0


def test_shoot_is_deterministic():
    pt = branch_point(3.7, 1.0)
    t1 = oracle.shoot(pt.a, pt.sigma, 4096)
    t2 = oracle.shoot(pt.a, pt.sigma, 4096)
    assert np.array_equal(t1.ws, t2.ws) and np.array_equal(t1.wps, t2.wps)


def test_shoot_blow_up_guard():
    with pytest.raises(IntegrationError):
        oracle.shoot(1e-3, 1e3, 64)


@pytest.mark.parametrize("kwargs", [dict(a=0.0, sigma=0.1), dict(a=1.0, sigma=0.1),
                                    dict(a=0.5, sigma=-1.0), dict(a=0.5, sigma=np.nan),
                                    dict(a=0.5, sigma=0.1, n_steps=8),
                                    dict(a=0.5, sigma=0.1, method="euler")])
def test_shoot_argument_errors(kwargs):
    with pytest.raises(DomainError):
        oracle.shoot(**kwargs)


@pytest.mark.parametrize("s", [1.5, 2.0, 50.0])
def test_reflection_matches_reconstruction(s):
    pt = branch_point(s)
    prof = reconstruct_profile(pt, 8193)  # same spacing as 4096 steps on [0, 1]
    xs, ws = oracle.reflect(oracle.shoot(pt.a, pt.sigma, 4096))
    assert np.array_equal(xs, prof.xs)
    assert np.max(np.abs(ws - prof.ws)) < 1e-7


def test_oracle_equivalence_sample():
    hit = robin = 0.0
    for alpha in (0.0, 1.0):
        for s in np.geomspace(1.01, 1000.0, 12):
            pt = branch_point(s, alpha)
            traj = oracle.shoot(pt.a, pt.sigma, 4096)
            hit = max(hit, abs(traj.ws[-1] - pt.b))
            robin = max(robin, oracle.robin_residual(traj))
    assert hit < 1e-7 and robin < 1e-7


# --- ode_residual ---------------------------------------------------------------

def test_ode_residual_small_and_second_order():
    pt = branch_point(2.0)
    r1 = oracle.ode_residual(reconstruct_profile(pt, 1001))
    r2 = oracle.ode_residual(reconstruct_profile(pt, 2001))
    assert r1 < 1e-4
    assert 3.5 <= r1 / r2 <= 4.5


def test_ode_residual_nonlocal_profile():
    assert oracle.ode_residual(reconstruct_profile(branch_point(3.0, 1.0), 1001)) < 1e-4


def test_ode_residual_sees_a_kink():
    prof = reconstruct_profile(branch_point(2.0), 1001)
    ws = np.array(prof.ws)
    ws[300] += 0.01
    h = prof.h
    r = oracle.ode_residual(_replace_ws(prof, ws))
    assert r == pytest.approx(2 * 0.01 / h ** 2, rel=0.01)


def test_ode_residual_rejects_tiny_grid():
    prof = reconstruct_profile(branch_point(2.0), 3)
    with pytest.raises(DomainError):
        oracle.ode_residual(prof)


# --- quadrature -----------------------------------------------------------------

def test_quad_nonlocal_constant_profile():
    prof = reconstruct_profile(branch_point(2.0), 101)
    flat = _replace_ws(prof, np.full(101, 0.5))
    assert oracle.quad_nonlocal(flat) == pytest.approx(4.0, rel=1e-15)


def test_quad_nonlocal_matches_closed_form():
    pt = branch_point(2.0)
    prof = reconstruct_profile(pt, 2001)
    exact = nonlocal_I(pt.a, pt.b)
    assert abs(oracle.quad_nonlocal(prof) - exact) / exact < 1e-6


def test_quad_nonlocal_second_order():
    pt = branch_point(2.0)
    exact = nonlocal_I(pt.a, pt.b)
    err = [abs(oracle.quad_nonlocal(reconstruct_profile(pt, n)) - exact) for n in (251, 501, 1001)]
    for coarse, fine in zip(err, err[1:]):
        assert 3.5 < coarse / fine < 4.5


def test_trapezoid_is_exact_for_lines():
    x = np.linspace(0.0, 3.0, 31)
    assert oracle.trapezoid(2.0 * x + 1.0, 0.1) == pytest.approx(12.0, rel=1e-14)


# --- lambda round trip -------------------------------------------------------------

def test_lambda_roundtrip_local_is_exact():
    for s in (1.2, 2.0, 30.0):
        assert oracle.lambda_roundtrip(branch_point(s, 0.0), 2001) == 0.0


@pytest.mark.parametrize("s", [2.0, 10.0])
def test_lambda_roundtrip_nonlocal(s):
    assert oracle.lambda_roundtrip(branch_point(s, 1.0), 2001) < 1e-5
