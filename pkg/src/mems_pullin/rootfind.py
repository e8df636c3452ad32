"""Bisection for scalar monotone problems."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import BracketError, ConvergenceError


@dataclass(frozen=True)
class Bracket:
    root: float
    lo: float
    hi: float
    f_lo: float
    f_hi: float
    iterations: int


def bisect(f: Callable[[float], float], lo: float, hi: float, *,
           rtol: float = 0.0, max_iter: int = 200,
           f_lo: float | None = None, f_hi: float | None = None) -> Bracket:
    """Bisect ``f`` on ``[lo, hi]``, which must straddle a sign change.

    Stops once ``hi - lo <= rtol * max(|lo|, |hi|)``, when ``f`` vanishes
    exactly at a midpoint, or when the midpoint can no longer be separated
    from the endpoints in floating point.  ``rtol = 0`` therefore bisects to
    full working precision.  The returned ``root`` is the final midpoint.
    """
    if f_lo is None:
        f_lo = f(lo)
    if f_hi is None:
        f_hi = f(hi)
    if f_lo == 0.0:
        return Bracket(lo, lo, lo, f_lo, f_lo, 0)
    if f_hi == 0.0:
        return Bracket(hi, hi, hi, f_hi, f_hi, 0)
    if (f_lo < 0.0) == (f_hi < 0.0):
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: f = ({f_lo!r}, {f_hi!r})")

    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return Bracket(mid, lo, hi, f_lo, f_hi, it - 1)
        f_mid = f(mid)
        if f_mid == 0.0:
            return Bracket(mid, mid, mid, f_mid, f_mid, it)
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        if hi - lo <= rtol * max(abs(lo), abs(hi)):
            return Bracket(0.5 * (lo + hi), lo, hi, f_lo, f_hi, it)
    raise ConvergenceError(f"bisection did not converge in {max_iter} iterations "
                           f"(bracket [{lo!r}, {hi!r}])")
