"""Explicit method-of-lines solver for the nonlocal parabolic MEMS model.

    u_t = u_xx + lam / ((1 - u)^2 (1 + alpha Int_{-1}^{1} dx / (1 - u))^2),
    +-u_x(+-1) + u(+-1) = 0.

Second-order centred differences with Robin ghost nodes, trapezoid
quadrature for the nonlocal integral, classical RK4 in time with
``dt = 0.4 h^2``.  Runs stop on touchdown (``max u >= 1 - delta``), on a
steady state (sup-norm of ``u_t`` below ``steady_tol``), or at ``t_end``.
The stepping loop is compiled with numba; loop order is fixed, so results
are deterministic.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .branch_core import branch_point, reconstruct_profile, symmetric_grid
from .errors import DomainError, InstabilityError, SingularityError
from .pull_in import solve_for_lambda

log = logging.getLogger(__name__)

DT_FACTOR = 0.4
QUENCH_DELTA = 1e-2
GUARD_DELTA = 1e-6
STEADY_TOL = 1e-8
GROWTH_LIMIT = 10.0
MAX_HALVINGS = 40

CONVERGED = "converged"
QUENCHED = "quenched"
TIMED_OUT = "timed_out"

# kernel status codes
_RUNNING, _STEADY, _TOUCHDOWN, _GUARD, _UNSTABLE = 0, 1, 2, 3, 4


@numba.njit(cache=True)
def _rhs_kernel(u, lam, alpha, h, guard, out, inv):
    n = u.shape[0]
    for i in range(n):
        d = 1.0 - u[i]
        if d <= guard:
            return False
        inv[i] = 1.0 / d
    q = 0.0
    for i in range(1, n - 1):
        q += inv[i]
    q = h * (q + 0.5 * (inv[0] + inv[n - 1]))
    c = lam / ((1.0 + alpha * q) * (1.0 + alpha * q))
    ih2 = 1.0 / (h * h)
    # ghosts: u[-1] = u[1] - 2h u[0], u[n] = u[n-2] - 2h u[n-1]
    out[0] = (2.0 * u[1] - 2.0 * h * u[0] - 2.0 * u[0]) * ih2 + c * inv[0] * inv[0]
    for i in range(1, n - 1):
        out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * ih2 + c * inv[i] * inv[i]
    out[n - 1] = (2.0 * u[n - 2] - 2.0 * h * u[n - 1] - 2.0 * u[n - 1]) * ih2 \
        + c * inv[n - 1] * inv[n - 1]
    return True


@numba.njit(cache=True)
def _advance(u, lam, alpha, h, dt, n_steps, guard, steady_tol, quench_level, growth):
    """Take up to ``n_steps`` RK4 steps in place.  Returns (steps, status, sup|u_t|)."""
    n = u.shape[0]
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    inv = np.empty(n)
    rate = 0.0
    for it in range(n_steps):
        if not _rhs_kernel(u, lam, alpha, h, guard, k1, inv):
            return it, _GUARD, rate
        rate = 0.0
        sup_u = 0.0
        for i in range(n):
            rate = max(rate, abs(k1[i]))
            sup_u = max(sup_u, abs(u[i]))
        if rate < steady_tol:
            return it, _STEADY, rate
        for i in range(n):
            tmp[i] = u[i] + 0.5 * dt * k1[i]
        if not _rhs_kernel(tmp, lam, alpha, h, guard, k2, inv):
            return it, _GUARD, rate
        for i in range(n):
            tmp[i] = u[i] + 0.5 * dt * k2[i]
        if not _rhs_kernel(tmp, lam, alpha, h, guard, k3, inv):
            return it, _GUARD, rate
        for i in range(n):
            tmp[i] = u[i] + dt * k3[i]
        if not _rhs_kernel(tmp, lam, alpha, h, guard, k4, inv):
            return it, _GUARD, rate
        sup_new = 0.0
        top = -1.0
        for i in range(n):
            tmp[i] = u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            sup_new = max(sup_new, abs(tmp[i]))
            top = max(top, tmp[i])
        if not math.isfinite(sup_new) or sup_new > growth * max(sup_u, abs(lam) * dt):
            return it, _UNSTABLE, rate
        if 1.0 - top <= guard:
            return it, _GUARD, rate
        for i in range(n):
            u[i] = tmp[i]
        if top >= quench_level:
            return it + 1, _TOUCHDOWN, rate
    return n_steps, _RUNNING, rate


def stable_dt(nx: int) -> float:
    h = 2.0 / (nx - 1)
    return DT_FACTOR * h * h


def nonlocal_integral(us: np.ndarray, h: float) -> float:
    inv = 1.0 / (1.0 - np.asarray(us, dtype=float))
    return h * (float(np.sum(inv[1:-1])) + 0.5 * (inv[0] + inv[-1]))


@dataclass(frozen=True)
class SimState:
    time: float
    xs: np.ndarray
    us: np.ndarray
    lam: float
    alpha: float

    def __post_init__(self):
        xs = np.array(self.xs, dtype=float)
        us = np.array(self.us, dtype=float)
        if xs.shape != us.shape or xs.ndim != 1 or len(xs) < 3:
            raise DomainError("xs and us must be 1-D arrays of equal length >= 3")
        xs.setflags(write=False)
        us.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "us", us)

    @property
    def h(self) -> float:
        return float(self.xs[1] - self.xs[0])

    @classmethod
    def initial(cls, lam: float, alpha: float = 0.0, nx: int = 401, u0=None) -> "SimState":
        xs = symmetric_grid(nx)
        if u0 is None:
            us = np.zeros_like(xs)
        elif callable(u0):
            us = np.asarray(u0(xs), dtype=float)
        else:
            us = np.asarray(u0, dtype=float)
        if us.shape != xs.shape:
            raise DomainError(f"initial profile has shape {us.shape}, grid has {xs.shape}")
        if np.any(us < 0.0) or np.any(us >= 1.0):
            raise DomainError("initial profile must satisfy 0 <= u < 1")
        return cls(time=0.0, xs=xs, us=us, lam=float(lam), alpha=float(alpha))


def rhs(state: SimState) -> np.ndarray:
    """Semi-discrete ``u_t`` at every node, boundary nodes included."""
    u = np.array(state.us, dtype=float)
    out = np.empty_like(u)
    inv = np.empty_like(u)
    if not _rhs_kernel(u, float(state.lam), float(state.alpha), state.h, GUARD_DELTA, out, inv):
        raise SingularityError(f"1 - u <= {GUARD_DELTA} at t = {state.time!r}")
    return out


def step(state: SimState, dt: float) -> SimState:
    """One RK4 step of size ``dt <= 0.4 h^2``."""
    h = state.h
    if not 0.0 < dt <= DT_FACTOR * h * h * (1.0 + 1e-12):
        raise DomainError(f"dt = {dt!r} outside (0, {DT_FACTOR} h^2 = {DT_FACTOR * h * h!r}]")
    u = np.array(state.us, dtype=float)
    # steady_tol < 0 and quench_level > 1 disable those exits for a bare step
    taken, status, _ = _advance(u, float(state.lam), float(state.alpha), h, float(dt), 1,
                                GUARD_DELTA, -1.0, 2.0, GROWTH_LIMIT)
    if status == _GUARD:
        raise SingularityError(f"1 - u <= {GUARD_DELTA} during step from t = {state.time!r}")
    if status == _UNSTABLE:
        raise InstabilityError(f"sup-norm grew more than {GROWTH_LIMIT}x in one step")
    return SimState(time=state.time + dt, xs=state.xs, us=u, lam=state.lam, alpha=state.alpha)


@dataclass(frozen=True)
class SimOutcome:
    """Result of :func:`simulate`.

    ``history`` has columns ``t, max_u, u_mid, nonlocal_integral``.
    """

    status: str
    final: SimState
    steps: int
    quench_time: float | None = None
    steady_gap: float | None = None
    history: np.ndarray = field(default_factory=lambda: np.empty((0, 4)))

    def summary(self) -> dict:
        out = {"status": self.status, "time": self.final.time, "steps": self.steps,
               "lambda": self.final.lam, "alpha": self.final.alpha,
               "nx": len(self.final.xs), "max_u": float(np.max(self.final.us))}
        if self.quench_time is not None:
            out["quench_time"] = self.quench_time
        if self.steady_gap is not None:
            out["steady_gap"] = self.steady_gap
        return out


def _snapshot(t, u, h):
    return (t, float(np.max(u)), float(u[len(u) // 2]), nonlocal_integral(u, h))


def lower_branch_gap(state: SimState) -> float:
    """Sup-norm distance from ``state.us`` to the small-deflection steady state, or nan."""
    res = solve_for_lambda(state.lam, state.alpha)
    if not res.roots:
        return math.nan
    prof = reconstruct_profile(branch_point(res.roots[0], state.alpha), len(state.xs))
    return float(np.max(np.abs(state.us - prof.us)))


def simulate(lam: float, alpha: float = 0.0, nx: int = 401, t_end: float = 100.0,
             u0=None, record_dt: float | None = None, steady_tol: float = STEADY_TOL,
             quench_delta: float = QUENCH_DELTA) -> SimOutcome:
    """Run from ``u0`` (default zero) until touchdown, steady state, or ``t_end``.

    A step that would bring ``1 - u`` under the guard distance is retried with
    half the time step.  ``record_dt`` sets the spacing of history rows
    (default ``t_end / 1000``).
    """
    lam, alpha, t_end = float(lam), float(alpha), float(t_end)
    if not (math.isfinite(lam) and lam > 0.0):
        raise DomainError(f"lambda must be finite and > 0, got {lam!r}")
    if not (math.isfinite(alpha) and alpha >= 0.0):
        raise DomainError(f"alpha must be finite and >= 0, got {alpha!r}")
    if int(nx) != nx or nx < 51 or nx % 2 == 0:
        raise DomainError(f"nx must be an odd integer >= 51, got {nx!r}")
    if not (math.isfinite(t_end) and t_end > 0.0):
        raise DomainError(f"t_end must be finite and > 0, got {t_end!r}")
    if record_dt is None:
        record_dt = t_end / 1000.0

    state = SimState.initial(lam, alpha, int(nx), u0)
    h = state.h
    dt = stable_dt(int(nx))
    u = np.array(state.us)
    t = 0.0
    steps = 0
    halvings = 0
    history = [_snapshot(t, u, h)]
    quench_level = 1.0 - quench_delta

    def finish(status, **kw):
        if history[-1][0] != t:
            history.append(_snapshot(t, u, h))
        final = SimState(time=t, xs=state.xs, us=u, lam=lam, alpha=alpha)
        if status == CONVERGED:
            kw["steady_gap"] = lower_branch_gap(final)
        log.info("simulate lam=%g alpha=%g: %s at t=%g after %d steps",
                 lam, alpha, status, t, steps)
        return SimOutcome(status=status, final=final, steps=steps,
                          history=np.array(history), **kw)

    while True:
        remaining = t_end - t
        if remaining <= 1e-12 * t_end:
            return finish(TIMED_OUT)
        full = int(remaining / dt)
        if full == 0:
            # a single short step lands exactly on t_end
            step_dt, chunk = remaining, 1
        else:
            step_dt, chunk = dt, max(1, min(int(math.ceil(record_dt / dt)), full))
        taken, status, _ = _advance(u, lam, alpha, h, step_dt, chunk, GUARD_DELTA,
                                    steady_tol, quench_level, GROWTH_LIMIT)
        steps += taken
        t = t_end if step_dt == remaining and taken == 1 else t + taken * step_dt
        if status == _STEADY:
            return finish(CONVERGED)
        if status == _TOUCHDOWN:
            return finish(QUENCHED, quench_time=t)
        if status == _GUARD:
            halvings += 1
            if halvings > MAX_HALVINGS:
                # touchdown cannot be resolved further; report the last good time
                return finish(QUENCHED, quench_time=t)
            dt *= 0.5
        elif status == _UNSTABLE:
            raise InstabilityError(f"explicit step blew up at t = {t!r}")
        else:
            history.append(_snapshot(t, u, h))
