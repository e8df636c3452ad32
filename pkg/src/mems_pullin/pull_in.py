"""Fold of the steady branch, pull-in load, and fixed-load solves.

The load along the branch is ``lam(s) = C(s)^2 / (2 D(s)^3)``; its only
critical point is the zero of ``P_alpha(s) = E(s) + alpha F(s)``, where both
``E`` and ``F`` increase strictly on s > 1.  The fold ``s*`` is found by
bisection on ``P_alpha`` and ``lam* = lam(s*)``.  Because ``lam`` vanishes
at both ends of the branch, ``lam(s) = target`` has one root on each side of
``s*`` whenever ``0 < target < lam*``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .branch_core import S_MAX, S_MIN, BranchPoint, big_A, branch_point
from .errors import BracketError, DomainError
from .rootfind import bisect

FOLD_TOL = 1e-9
DEFAULT_TOL = 1e-12
S_HI_CAP = 2.0 ** 60
_S_LO_START = 1e-6
_SM1_FLOOR = 1e-14

NO_SOLUTION = "no_solution"
FOLD = "fold"
TWO_SOLUTIONS = "two_solutions"


def _check_alpha(alpha):
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < 0.0:
        raise DomainError(f"alpha must be finite and >= 0, got {alpha!r}")
    return alpha


def _check_s_open(s):
    s = float(s)
    if math.isnan(s) or math.isinf(s) or s < 1.0:
        raise DomainError(f"s must be finite and > 1, got {s!r}")
    return s


def E_func(s: float) -> float:
    """E(s); returns -inf at s = 1 exactly."""
    s = _check_s_open(s)
    if s == 1.0:
        return -math.inf
    sm1 = s - 1.0
    A = big_A(s, sm1)
    r = math.sqrt(s * sm1)
    return (3.0 / (2.0 * s * r) * A * A
            + (4.0 + 3.0 / s) * A
            + (4.0 * s * s - 5.0 * s - 3.0) / (2.0 * r))


def F_func(s: float) -> float:
    """F(s); returns -inf at s = 1 exactly."""
    s = _check_s_open(s)
    if s == 1.0:
        return -math.inf
    sm1 = s - 1.0
    A = big_A(s, sm1)
    r = math.sqrt(s * sm1)
    t = 2.0 * s - 1.0
    return (2.0 / (s * s) * A ** 3
            + 2.0 * (4.0 * s - 3.0) / r * A * A
            + 2.0 * t * (4.0 * s - 3.0) / s * A
            - 4.0 * t * t / r)


def P_alpha(s: float, alpha: float = 0.0) -> float:
    """E(s) + alpha F(s); zero exactly where d lam / ds vanishes."""
    alpha = _check_alpha(alpha)
    e = E_func(s)
    return e if alpha == 0.0 else e + alpha * F_func(s)


@dataclass(frozen=True)
class PullInSolution:
    alpha: float
    s_star: float
    lambda_star: float
    p_residual: float
    iterations: int
    bracket: tuple[float, float]

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "s_star": self.s_star,
                "lambda_star": self.lambda_star, "p_residual": self.p_residual,
                "iterations": self.iterations}


def find_s_star(alpha: float = 0.0, tol: float = DEFAULT_TOL) -> PullInSolution:
    """Locate the fold ``s*`` of the branch and the pull-in load ``lam(s*)``.

    ``tol`` is the final bracket width relative to ``s``.
    """
    alpha = _check_alpha(alpha)
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")

    def P(s):
        return P_alpha(s, alpha)

    sm1 = _S_LO_START
    s_lo = 1.0 + sm1
    p_lo = P(s_lo)
    while p_lo >= 0.0:
        sm1 /= 10.0
        if sm1 < _SM1_FLOOR:
            raise BracketError(f"P_alpha >= 0 down to s = 1 + {_SM1_FLOOR} (alpha={alpha!r})")
        s_lo = 1.0 + sm1
        p_lo = P(s_lo)

    s_hi = 2.0
    p_hi = P(s_hi)
    while p_hi <= 0.0:
        s_hi *= 2.0
        if s_hi > S_HI_CAP:
            raise BracketError(f"P_alpha <= 0 up to s = 2**60 (alpha={alpha!r})")
        p_hi = P(s_hi)

    br = bisect(P, s_lo, s_hi, rtol=tol, f_lo=p_lo, f_hi=p_hi)
    s_star = br.root
    return PullInSolution(alpha=alpha, s_star=s_star,
                          lambda_star=branch_point(s_star, alpha).lam,
                          p_residual=abs(P(s_star)), iterations=br.iterations,
                          bracket=(br.lo, br.hi))


@dataclass(frozen=True)
class SolveResult:
    lam: float
    alpha: float
    roots: tuple[float, ...]
    classification: str
    pull_in: PullInSolution

    @property
    def points(self) -> list[BranchPoint]:
        return [branch_point(s, self.alpha) for s in self.roots]


def solve_for_lambda(lam: float, alpha: float = 0.0, tol: float = DEFAULT_TOL,
                     fold_tol: float = FOLD_TOL) -> SolveResult:
    """All branch points carrying load ``lam``: two below the fold, one at it, none above."""
    lam = float(lam)
    if not math.isfinite(lam) or lam <= 0.0:
        raise DomainError(f"lambda must be finite and > 0, got {lam!r}")
    alpha = _check_alpha(alpha)
    pin = find_s_star(alpha, tol)
    lstar = pin.lambda_star

    if lam > lstar * (1.0 + fold_tol):
        return SolveResult(lam, alpha, (), NO_SOLUTION, pin)
    if abs(lam - lstar) <= fold_tol * lstar:
        return SolveResult(lam, alpha, (pin.s_star,), FOLD, pin)

    def g(s):
        return branch_point(s, alpha).lam - lam

    g_star = lstar - lam
    g_min = g(S_MIN)
    if g_min >= 0.0:
        raise BracketError(f"lambda = {lam!r} is too small to resolve on the lower branch")
    s1 = bisect(g, S_MIN, pin.s_star, rtol=tol, f_lo=g_min, f_hi=g_star).root

    s_hi = 2.0 * pin.s_star
    g_hi = g(s_hi)
    while g_hi >= 0.0:
        if s_hi >= S_MAX:
            raise BracketError(f"lambda = {lam!r} is too small to resolve on the upper branch")
        s_hi = min(2.0 * s_hi, S_MAX)
        g_hi = g(s_hi)
    s2 = bisect(g, pin.s_star, s_hi, rtol=tol, f_lo=g_star, f_hi=g_hi).root
    return SolveResult(lam, alpha, (s1, s2), TWO_SOLUTIONS, pin)


@dataclass(frozen=True)
class DiagramTable:
    alpha: float
    t: np.ndarray
    points: tuple[BranchPoint, ...]

    COLUMNS = ("t", "s", "a", "b", "sigma", "lambda")

    def rows(self):
        for t, p in zip(self.t, self.points):
            yield (float(t), p.s, p.a, p.b, p.sigma, p.lam)

    def column(self, name: str) -> np.ndarray:
        i = self.COLUMNS.index(name)
        return np.array([r[i] for r in self.rows()])


def diagram_sweep(alpha: float = 0.0, t_min: float = 0.001, t_max: float = 0.999,
                  n: int = 1000) -> DiagramTable:
    """Branch sampled at ``n`` evenly spaced ``t = 1/s`` in ``[t_min, t_max]``."""
    alpha = _check_alpha(alpha)
    t_min, t_max = float(t_min), float(t_max)
    if not 0.0 < t_min < t_max < 1.0:
        raise DomainError(f"need 0 < t_min < t_max < 1, got ({t_min!r}, {t_max!r})")
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    t = np.linspace(t_min, t_max, int(n))
    pts = tuple(branch_point(1.0 / ti, alpha) for ti in t)
    t.setflags(write=False)
    return DiagramTable(alpha=alpha, t=t, points=pts)
