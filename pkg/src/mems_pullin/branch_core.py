"""Closed-form solution branch of the one-dimensional Robin MEMS steady problem.

In the gap variable ``w = 1 - u`` a steady state on (-1, 1) solves::

    w'' = lam / (w**2 * (1 + alpha * Int_{-1}^{1} dy / w)**2),
    +-w'(+-1) = 1 - w(+-1).

Every solution is even in x, convex, and uniquely labelled by the ratio
``s = w(1) / w(0) > 1``.  The midpoint value ``a``, the edge value ``b``, the
rescaled load ``sigma`` and the applied load ``lam`` are explicit functions
of ``s`` (see :func:`branch_point`).  Profiles are recovered by inverting the
first integral ``phi(a, w(x)) = sqrt(2 sigma) * x`` (see :func:`invert_phi`).
"""
from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ConvergenceError, DomainError
from .rootfind import bisect

S_MIN = 1.0 + 1e-14
S_MAX = 1e12
SERIES_CUTOFF = 1e-8
INVERT_MAX_ITER = 200
INVERT_RTOL = 1e-13
CONSISTENCY_RTOL = 1e-9

# Fault injection for the verification battery; zero in normal operation.
_A_SHIFT: contextvars.ContextVar[float] = contextvars.ContextVar("_A_SHIFT", default=0.0)


@contextlib.contextmanager
def perturbed_A(delta: float):
    """Temporarily add ``delta`` to every :func:`big_A` evaluation.

    Test-only.  Used by ``verify --inject-fault`` to confirm that the
    independent checks notice a corrupted closed form.
    """
    token = _A_SHIFT.set(float(delta))
    try:
        yield
    finally:
        _A_SHIFT.reset(token)


def _check_real(name, x):
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {x!r}") from None
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def _check_s(s, *, clamp=True):
    s = _check_real("s", s)
    lo = S_MIN if clamp else 1.0
    if s < lo or (clamp and s > S_MAX):
        raise DomainError(f"s = {s!r} outside [{lo!r}, {S_MAX!r}]")
    return s


def big_A(s: float, sm1: float | None = None) -> float:
    """ln(sqrt(s) + sqrt(s - 1)).

    Evaluated as asinh(sqrt(s - 1)), which is the same function without the
    cancellation in the logarithm near s = 1.  ``sm1`` may carry ``s - 1``
    when the caller knows it more accurately than the subtraction would give.
    Below ``SERIES_CUTOFF`` the two-term series ``sqrt(s-1) (1 - (s-1)/6)``
    is used.
    """
    s = _check_real("s", s)
    if s < 1.0:
        raise DomainError(f"A(s) needs s >= 1, got {s!r}")
    if sm1 is None:
        sm1 = s - 1.0
    elif sm1 < 0.0:
        raise DomainError(f"s - 1 must be nonnegative, got {sm1!r}")
    if sm1 < SERIES_CUTOFF:
        val = math.sqrt(sm1) * (1.0 - sm1 / 6.0)
    else:
        val = math.asinh(math.sqrt(sm1))
    return val + _A_SHIFT.get()


@dataclass(frozen=True)
class BranchPoint:
    """One steady state, labelled by ``s``.  ``lam`` is the applied load."""

    s: float
    alpha: float
    a: float
    b: float
    sigma: float
    lam: float

    def compatibility_residual(self) -> float:
        """Relative defect of ``(1-b)^2 = 2 sigma (1/a - 1/b)``.

        Evaluated with the differences ``1 - b`` and ``1/a - 1/b`` rebuilt
        from ``s`` so that the check stays meaningful as ``s -> 1``.
        """
        s, sm1 = self.s, self.s - 1.0
        A = big_A(s, sm1)
        D = 1.0 / self.a
        one_minus_b = (sm1 + math.sqrt(sm1 / s) * A) / D
        inv_diff = D * sm1 / s
        lhs = one_minus_b ** 2
        rhs = 2.0 * self.sigma * inv_diff
        return abs(lhs - rhs) / lhs

    def as_dict(self) -> dict:
        return {"s": self.s, "alpha": self.alpha, "a": self.a, "b": self.b,
                "sigma": self.sigma, "lambda": self.lam}


def branch_point(s: float, alpha: float = 0.0) -> BranchPoint:
    """Evaluate the branch at ``s`` for capacitance ratio ``alpha``.

    With ``D(s) = 2s - 1 + sqrt((s-1)/s) A(s)``::

        a = 1/D,  b = s/D,
        sigma = (sqrt(s(s-1)) + A)^2 / (2 D^3),
        lam   = (sqrt(s(s-1)) + A + 4 alpha D A)^2 / (2 D^3).

    For ``alpha == 0`` the load is exactly ``sigma``.
    """
    s = _check_s(s)
    alpha = _check_real("alpha", alpha)
    if alpha < 0.0:
        raise DomainError(f"alpha must be >= 0, got {alpha!r}")

    sm1 = s - 1.0
    A = big_A(s, sm1)
    D = 2.0 * s - 1.0 + math.sqrt(sm1 / s) * A
    root = math.sqrt(s * sm1)
    D3 = D ** 3
    a = 1.0 / D
    b = s / D
    sigma = 0.5 * (root + A) ** 2 / D3
    if alpha == 0.0:
        lam = sigma
    else:
        lam = (root + A + 4.0 * alpha * D * A) ** 2 / (2.0 * D3)
    return BranchPoint(s=s, alpha=alpha, a=a, b=b, sigma=sigma, lam=lam)


def nonlocal_I(a: float, b: float) -> float:
    """Closed form of Int_{-1}^{1} dy / w(y) for the profile with w(0)=a, w(1)=b."""
    a = _check_real("a", a)
    b = _check_real("b", b)
    if not 0.0 < a < b < 1.0:
        raise DomainError(f"need 0 < a < b < 1, got a={a!r}, b={b!r}")
    d = b - a
    L = math.asinh(math.sqrt(d / a))  # ln((sqrt(b) + sqrt(b-a)) / sqrt(a))
    return 4.0 * L / (math.sqrt(b * d) + a * L)


def _phi_gap(a: float, d: float) -> float:
    # phi written in terms of d = w - a >= 0
    return math.sqrt(a) * (math.sqrt((a + d) * d) + a * math.asinh(math.sqrt(d / a)))


def phi(a: float, w: float) -> float:
    """sqrt(a) [sqrt(w(w-a)) + a ln((sqrt(w) + sqrt(w-a)) / sqrt(a))].

    Strictly increasing in ``w >= a`` with ``phi(a, a) = 0``; along a steady
    state ``phi(a, w(x)) = sqrt(2 sigma) |x|``.
    """
    a = _check_real("a", a)
    w = _check_real("w", w)
    if a <= 0.0:
        raise DomainError(f"a must be positive, got {a!r}")
    if w < a:
        raise DomainError(f"phi needs w >= a, got w={w!r} < a={a!r}")
    return _phi_gap(a, w - a)


def invert_phi(a: float, b: float, sigma: float, x: float) -> float:
    """Return w(x) on [0, 1], the unique w in [a, b] with phi(a, w) = sqrt(2 sigma) x."""
    a = _check_real("a", a)
    b = _check_real("b", b)
    sigma = _check_real("sigma", sigma)
    x = _check_real("x", x)
    if not 0.0 < a < b:
        raise DomainError(f"need 0 < a < b, got a={a!r}, b={b!r}")
    if sigma <= 0.0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    scale = math.sqrt(2.0 * sigma)
    span = b - a
    phi_b = _phi_gap(a, span)
    if abs(phi_b - scale) > CONSISTENCY_RTOL * scale:
        raise ConsistencyError(f"phi(a, b) = {phi_b!r} but sqrt(2 sigma) = {scale!r}")
    if x == 0.0:
        return a
    if x == 1.0:
        return b

    target = scale * x
    f_hi = phi_b - target
    if f_hi <= 0.0:
        return b
    # Bisect on the gap d = w - a so that small x keeps full relative accuracy.
    # Near d = 0, phi ~ 2 a sqrt(d); start from four times that estimate.
    hi = min(span, 4.0 * (target / (2.0 * a)) ** 2)
    if hi == 0.0:
        return a
    f_top = _phi_gap(a, hi) - target
    if f_top <= 0.0:
        hi, f_top = span, f_hi
    br = bisect(lambda d: _phi_gap(a, d) - target, 0.0, hi,
                f_lo=-target, f_hi=f_top, max_iter=INVERT_MAX_ITER)
    d = br.root
    if abs(_phi_gap(a, d) - target) > INVERT_RTOL * scale:
        raise ConvergenceError(f"phi residual above {INVERT_RTOL} * sqrt(2 sigma) at x={x!r}")
    # Rounding a + d to a float costs up to phi'(w) * ulp(w) in the residual;
    # phi'(w) = sqrt(a w / (w - a)) is large for small x or s close to 1.
    return a + d


def _readonly(arr):
    arr = np.asarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def symmetric_grid(n: int) -> np.ndarray:
    """Uniform grid of ``n`` (odd) nodes on [-1, 1], exactly symmetric about 0."""
    if int(n) != n or n < 3 or n % 2 == 0:
        raise DomainError(f"grid size must be an odd integer >= 3, got {n!r}")
    m = int(n) // 2
    half = np.arange(m + 1) / m
    return np.concatenate([-half[:0:-1], half])


@dataclass(frozen=True)
class SteadyProfile:
    """Steady state sampled on a symmetric uniform grid.  ``us = 1 - ws``."""

    s: float
    alpha: float
    lam: float
    a: float
    b: float
    sigma: float
    xs: np.ndarray
    ws: np.ndarray

    @property
    def us(self) -> np.ndarray:
        return 1.0 - self.ws

    @property
    def h(self) -> float:
        return float(self.xs[1] - self.xs[0])

    def robin_residual(self) -> float:
        """|w'(1) - (1 - w(1))| with a second-order one-sided w'(1)."""
        w = self.ws
        dw = (3.0 * w[-1] - 4.0 * w[-2] + w[-3]) / (2.0 * self.h)
        return abs(dw - (1.0 - w[-1]))


def reconstruct_profile(pt: BranchPoint, n: int = 1001) -> SteadyProfile:
    """Sample the steady state belonging to ``pt`` on ``n`` (odd) nodes.

    The right half is obtained node by node from :func:`invert_phi`; the left
    half is a mirror copy, so symmetry holds bit for bit.
    """
    xs = symmetric_grid(n)
    m = len(xs) // 2
    right = np.array([invert_phi(pt.a, pt.b, pt.sigma, x) for x in xs[m:]])
    ws = np.concatenate([right[:0:-1], right])
    return SteadyProfile(s=pt.s, alpha=pt.alpha, lam=pt.lam, a=pt.a, b=pt.b,
                         sigma=pt.sigma, xs=_readonly(xs), ws=_readonly(ws))
