"""Characteristic exponent of a recurrence measure.

The exponent p >= 0 is the unique root of

    phi(p) = sum_i a_i * b_i**(-p) = 1,

which exists because phi is continuous, strictly decreasing, phi(0) =
sum a_i >= 1 and phi(p) -> 0.  The solver brackets the root on [0, P]
with P = log_m(sum a_i) + 1, bisects, then polishes with Newton steps
(phi' is available in closed form), falling back to bisection whenever
a Newton step would leave the bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .model import AtomicMeasure, require_valid_measure

RESIDUAL_TOL = 1e-12     # |phi(p) - 1| at the returned exponent
BRACKET_TOL = 1e-13      # final bracket width, relative to max(1, p)


@dataclass(frozen=True)
class Exponent:
    """A solved characteristic exponent with solver evidence."""

    p: float
    residual: float            # phi(p) - 1 at the returned p
    iterations: int
    bracket: tuple[float, float]


def phi(measure: AtomicMeasure, p: float) -> float:
    """Evaluate phi(p) = sum_i a_i * b_i**(-p).

    Strictly decreasing in p for a valid measure; phi(0) = sum a_i.
    """
    require_valid_measure(measure)
    if p < 0:
        raise DomainError(f"phi needs p >= 0, got {p!r}")
    return _phi_raw(measure, p)


def _phi_raw(measure: AtomicMeasure, p: float) -> float:
    return sum(t.weight * t.divisor ** (-p) for t in measure.terms)


def _phi_prime(measure: AtomicMeasure, p: float) -> float:
    return -sum(t.weight * math.log(t.divisor) * t.divisor ** (-p)
                for t in measure.terms)


def initial_bracket(measure: AtomicMeasure) -> tuple[float, float]:
    """Bracket [0, P] with P = log_m(sum a_i) + 1, so phi(0) >= 1 >= phi(P)."""
    total = measure.total_weight
    return 0.0, math.log(total) / math.log(measure.m) + 1.0


def solve_p(measure: AtomicMeasure) -> Exponent:
    """Solve phi(p) = 1 for the unique non-negative exponent.

    Guarantees |phi(p) - 1| <= 1e-12 and a final bracket of width
    <= 1e-13 * max(1, p).  When phi(0) == 1 exactly (sum of weights is
    exactly 1) the root p = 0 is returned immediately with residual 0.
    """
    require_valid_measure(measure)

    phi0 = _phi_raw(measure, 0.0)
    if phi0 == 1.0:
        return Exponent(p=0.0, residual=0.0, iterations=0, bracket=(0.0, 0.0))

    lo, hi = initial_bracket(measure)
    f_lo = phi0 - 1.0
    f_hi = _phi_raw(measure, hi) - 1.0
    assert f_lo >= 0.0 >= f_hi, "initial bracket must straddle the root"

    iterations = 0
    best_p, best_f = (lo, f_lo) if abs(f_lo) <= abs(f_hi) else (hi, f_hi)

    def record(pt: float, ft: float) -> None:
        nonlocal best_p, best_f
        if abs(ft) < abs(best_f):
            best_p, best_f = pt, ft

    # Phase 1: bisect the bracket down to width 1e-6.
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        f_mid = _phi_raw(measure, mid) - 1.0
        iterations += 1
        record(mid, f_mid)
        if f_mid == 0.0:
            return Exponent(p=mid, residual=0.0, iterations=iterations,
                            bracket=(mid, mid))
        if f_mid > 0.0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

    # Phase 2: Newton polish inside the bracket.
    pt = best_p if lo <= best_p <= hi else 0.5 * (lo + hi)
    ft = _phi_raw(measure, pt) - 1.0
    record(pt, ft)
    for _ in range(60):
        if abs(best_f) <= RESIDUAL_TOL:
            break
        slope = _phi_prime(measure, pt)
        step_ok = slope != 0.0
        if step_ok:
            nxt = pt - ft / slope
            step_ok = lo <= nxt <= hi
        if not step_ok:
            nxt = 0.5 * (lo + hi)        # Newton left the bracket: bisect
        f_nxt = _phi_raw(measure, nxt) - 1.0
        iterations += 1
        record(nxt, f_nxt)
        if f_nxt == 0.0:
            return Exponent(p=nxt, residual=0.0, iterations=iterations,
                            bracket=(nxt, nxt))
        if f_nxt > 0.0:
            lo, f_lo = nxt, f_nxt
        else:
            hi, f_hi = nxt, f_nxt
        if nxt == pt:
            break
        pt, ft = nxt, f_nxt

    # Phase 3: tighten the bracket to its contractual width.
    while hi - lo > BRACKET_TOL * max(1.0, 0.5 * (lo + hi)):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break                        # at float resolution already
        f_mid = _phi_raw(measure, mid) - 1.0
        iterations += 1
        record(mid, f_mid)
        if f_mid == 0.0:
            return Exponent(p=mid, residual=0.0, iterations=iterations,
                            bracket=(mid, mid))
        if f_mid > 0.0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

    p = best_p if lo <= best_p <= hi else 0.5 * (lo + hi)
    residual = best_f if p == best_p else _phi_raw(measure, p) - 1.0
    return Exponent(p=p, residual=residual, iterations=iterations,
                    bracket=(lo, hi))
