"""Independent checks of the closed-form branch.

Nothing here evaluates the implicit profile relation or the closed-form
integral.  ``shoot`` integrates ``w'' = sigma / w**2`` from ``w(0) = a``,
``w'(0) = 0`` as an initial value problem; profile checks use finite
differences and trapezoid quadrature on the profile's own grid.  Only plain
numbers (``a``, ``sigma``, a sampled profile) cross over from
:mod:`mems_pullin.branch_core`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .branch_core import BranchPoint, SteadyProfile, reconstruct_profile
from .errors import DomainError, IntegrationError

W_CEILING = 10.0
METHODS = ("rk4", "rk4-richardson")


@dataclass(frozen=True)
class ShootTrajectory:
    a: float
    sigma: float
    xs: np.ndarray
    ws: np.ndarray
    wps: np.ndarray


def _rk4_step(w, p, h, sigma):
    k1w = p
    k1p = sigma / (w * w)
    w2 = w + 0.5 * h * k1w
    k2w = p + 0.5 * h * k1p
    k2p = sigma / (w2 * w2)
    w3 = w + 0.5 * h * k2w
    k3w = p + 0.5 * h * k2p
    k3p = sigma / (w3 * w3)
    w4 = w + h * k3w
    k4w = p + h * k3p
    k4p = sigma / (w4 * w4)
    return (w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w),
            p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p))


def _richardson_step(w, p, h, sigma):
    # one RK4 step against two half steps; the combination cancels the h^5 local term
    w1, p1 = _rk4_step(w, p, h, sigma)
    wh, ph = _rk4_step(w, p, 0.5 * h, sigma)
    w2, p2 = _rk4_step(wh, ph, 0.5 * h, sigma)
    return w2 + (w2 - w1) / 15.0, p2 + (p2 - p1) / 15.0


def shoot(a: float, sigma: float, n_steps: int = 4096,
          method: str = "rk4-richardson") -> ShootTrajectory:
    """Integrate ``w'' = sigma / w^2`` on [0, 1] from ``w(0) = a, w'(0) = 0``.

    Fixed uniform steps.  ``method="rk4"`` is the classical fourth-order
    Runge-Kutta scheme; the default applies local Richardson extrapolation to
    each classical step (fifth order), which keeps the endpoint error under
    1e-7 out to s = 1000 at 4096 steps.
    """
    a, sigma = float(a), float(sigma)
    if not 0.0 < a < 1.0:
        raise DomainError(f"a must lie in (0, 1), got {a!r}")
    if not sigma >= 0.0 or not math.isfinite(sigma):
        raise DomainError(f"sigma must be finite and >= 0, got {sigma!r}")
    if int(n_steps) != n_steps or n_steps < 16:
        raise DomainError(f"n_steps must be an integer >= 16, got {n_steps!r}")
    if method == "rk4":
        step = _rk4_step
    elif method == "rk4-richardson":
        step = _richardson_step
    else:
        raise DomainError(f"unknown method {method!r}; choose from {METHODS}")

    n = int(n_steps)
    h = 1.0 / n
    ws = [a]
    wps = [0.0]
    w, p = a, 0.0
    for i in range(n):
        w, p = step(w, p, h, sigma)
        if not 0.0 < w < W_CEILING:
            raise IntegrationError(f"w left (0, {W_CEILING}) at x = {(i + 1) * h!r}: w = {w!r}")
        ws.append(w)
        wps.append(p)
    xs = np.arange(n + 1) * h
    return ShootTrajectory(a=a, sigma=sigma, xs=xs, ws=np.array(ws), wps=np.array(wps))


def robin_residual(traj: ShootTrajectory) -> float:
    """|w'(1) - (1 - w(1))| at the end of a trajectory."""
    return abs(traj.wps[-1] - (1.0 - traj.ws[-1]))


def reflect(traj: ShootTrajectory) -> tuple[np.ndarray, np.ndarray]:
    """Even extension of a trajectory to [-1, 1]."""
    xs = np.concatenate([-traj.xs[:0:-1], traj.xs])
    ws = np.concatenate([traj.ws[:0:-1], traj.ws])
    return xs, ws


def trapezoid(f: np.ndarray, h: float) -> float:
    """Composite trapezoid rule on a uniform grid, summed left to right."""
    f = np.asarray(f, dtype=float)
    return h * (float(np.sum(f[1:-1])) + 0.5 * (f[0] + f[-1]))


def _uniform_step(xs):
    xs = np.asarray(xs, dtype=float)
    h = (xs[-1] - xs[0]) / (len(xs) - 1)
    if not np.allclose(np.diff(xs), h, rtol=1e-9, atol=0.0):
        raise DomainError("profile grid is not uniform")
    return h


def quad_nonlocal(profile: SteadyProfile) -> float:
    """Trapezoid approximation of Int_{-1}^{1} dy / w."""
    return trapezoid(1.0 / np.asarray(profile.ws), _uniform_step(profile.xs))


def ode_residual(profile: SteadyProfile) -> float:
    """Max over interior nodes of |D2 w - lam / (w^2 (1 + alpha Q)^2)|.

    ``D2`` is the centred second difference and ``Q`` the trapezoid value of
    the nonlocal integral on the same grid.
    """
    w = np.asarray(profile.ws, dtype=float)
    if len(w) < 5:
        raise DomainError("ode_residual needs at least 5 nodes")
    h = _uniform_step(profile.xs)
    q = trapezoid(1.0 / w, h)
    d2 = (w[:-2] - 2.0 * w[1:-1] + w[2:]) / (h * h)
    rhs = profile.lam / (w[1:-1] ** 2 * (1.0 + profile.alpha * q) ** 2)
    return float(np.max(np.abs(d2 - rhs)))


def lambda_roundtrip(pt: BranchPoint, n: int = 2001) -> float:
    """Relative error of ``sigma (1 + alpha Q)^2`` against ``pt.lam``, Q by quadrature."""
    prof = reconstruct_profile(pt, n)
    lam = pt.sigma * (1.0 + pt.alpha * quad_nonlocal(prof)) ** 2
    return abs(lam - pt.lam) / pt.lam
