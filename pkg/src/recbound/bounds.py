"""The Akra-Bazzi bound functional and growth classification.

Central object: Phi(x) = x**p * (1 + integral from x0 to x of
t**(-p) * g(t) dt/t).  Solutions of a valid recurrence grow as
Theta(Phi).  For polylog driving functions the integral has a symbolic
growth class; for anything evaluable it is computed by adaptive
quadrature after substituting u = ln t, which turns the integrand into
the smooth, well-conditioned exp((alpha-p)*u) * u**beta family.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, ModelError, NumericError, UnsupportedSymbolic
from .model import (AtomicMeasure, DrivingFunction, PolyLog, RecurrenceSpec,
                    SumFunction, TabulatedFunction, ZeroFunction,
                    require_valid)

EXPONENT_TOL = 1e-12           # growth-class exponent equality tolerance
QUAD_EPSREL = 1e-10
QUAD_EPSABS = 1e-12

DEFAULT_EPSILON_GRID = (1.0, 0.5, 0.25, 0.1, 0.05, 0.01, 0.001, 1e-6)


# ---------------------------------------------------------------------------
# default x0
# ---------------------------------------------------------------------------

def _min_shrunk_argument(spec: RecurrenceSpec, x: float) -> float:
    """Worst-case (smallest) recursive argument x*(1/b - lambda(x)) over terms."""
    worst = math.inf
    for term, pert in zip(spec.measure.terms, spec.perturbation):
        lam = pert.lambda_envelope.evaluate(x)
        worst = min(worst, x * (1.0 / term.divisor - lam))
    return worst


def default_x0(spec: RecurrenceSpec) -> float:
    """Deterministic default for a spec that omits x0.

    max(M*(1+1e-9), e**2, smallest x at which every perturbed recursive
    argument stays >= 1).  The last piece is found by doubling plus
    bisection on the monotone worst-case argument.
    """
    floor = max(spec.measure.M * (1.0 + 1e-9), math.e ** 2)
    if _min_shrunk_argument(spec, floor) >= 1.0:
        return floor
    lo, hi = floor, 2.0 * floor
    for _ in range(2000):
        if _min_shrunk_argument(spec, hi) >= 1.0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ModelError("perturbed recursive arguments never reach 1; "
                         "the perturbation exceeds the shrink budget")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _min_shrunk_argument(spec, mid) >= 1.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


def effective_x0(spec: RecurrenceSpec) -> float:
    """spec.x0 when present, else the deterministic default."""
    return spec.x0 if spec.x0 is not None else default_x0(spec)


# ---------------------------------------------------------------------------
# numeric Phi
# ---------------------------------------------------------------------------

def _log_integrand(g: DrivingFunction, p: float):
    def f(u):
        t = math.exp(u)
        return math.exp(-p * u) * g.evaluate(t)
    return f


def bound_integral(g: DrivingFunction, p: float, x0: float, x: float) -> float:
    """Integral from x0 to x of t**(-p) * g(t) dt/t by adaptive quadrature."""
    if isinstance(g, ZeroFunction) or x == x0:
        return 0.0
    u0, u1 = math.log(x0), math.log(x)
    points = None
    if isinstance(g, TabulatedFunction):
        points = [math.log(k) for k in g.xs if u0 < math.log(k) < u1]
    res = integrate.quad(_log_integrand(g, p), u0, u1,
                         epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                         limit=400, points=points, full_output=1)
    value, abserr = res[0], res[1]
    if len(res) > 3:
        raise NumericError(f"quadrature did not converge: {res[3]}",
                           estimate=abserr)
    if abserr > 1e-9 * max(1.0, abs(value)):
        raise NumericError("quadrature error estimate above tolerance",
                           estimate=abserr)
    return value


def phi_numeric(spec: RecurrenceSpec, p: float, x: float,
                x0: float | None = None) -> float:
    """Evaluate Phi(x) = x**p * (1 + integral_{x0}^{x} t**(-p) g(t) dt/t).

    The integration anchor is, in order of preference: the explicit x0
    argument, the spec's x0, the deterministic default.  Relative
    quadrature error <= 1e-9.
    """
    require_valid(spec)
    anchor = x0 if x0 is not None else effective_x0(spec)
    if x < anchor:
        raise DomainError(f"Phi needs x >= x0 = {anchor:g}, got {x:g}")
    return x ** p * (1.0 + bound_integral(spec.g, p, anchor, x))


# ---------------------------------------------------------------------------
# vectorized cumulative Phi (for dense ratio bands)
# ---------------------------------------------------------------------------

# 15-point Kronrod rule with embedded 7-point Gauss (standard constants).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327])

_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_WK = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_WGAUSS = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _WGAUSS[_i] = _WGAUSS[14 - _i] = _w
_WGAUSS[7] = _WG[3]


def _panel_integrals(g: DrivingFunction, p: float,
                     u_lo: np.ndarray, u_hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Kronrod 15 on each panel [u_lo[k], u_hi[k]] of the
    log-substituted integrand; returns (values, error estimates)."""
    centers = 0.5 * (u_lo + u_hi)
    halves = 0.5 * (u_hi - u_lo)
    u = centers[:, None] + halves[:, None] * _NODES[None, :]
    t = np.exp(u)
    vals = np.exp(-p * u) * g.evaluate_many(t.ravel()).reshape(u.shape)
    k15 = halves * (vals @ _WK)
    g7 = halves * (vals @ _WGAUSS)
    return k15, np.abs(k15 - g7)


def cumulative_bound_integral(g: DrivingFunction, p: float, x0: float,
                              xs: np.ndarray, chunk: int = 1 << 16) -> np.ndarray:
    """Integral from x0 to each of the (ascending, >= x0) points xs.

    One Gauss-Kronrod panel per consecutive pair, accumulated in a fixed
    ascending order, so the result is deterministic.  Cross-checked
    against the adaptive path in the tests.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return np.zeros(0)
    if np.any(np.diff(xs) < 0) or xs[0] < x0:
        raise DomainError("sample points must ascend and start at or after x0")
    if isinstance(g, ZeroFunction):
        return np.zeros(xs.size)
    knots = np.concatenate([[math.log(x0)], np.log(xs)])
    pieces = np.empty(xs.size)
    err_total = 0.0
    for start in range(0, xs.size, chunk):
        stop = min(start + chunk, xs.size)
        vals, errs = _panel_integrals(g, p, knots[start:stop], knots[start + 1:stop + 1])
        pieces[start:stop] = vals
        err_total += float(errs.sum())
    out = np.cumsum(pieces)
    if err_total > 1e-9 * max(1.0, float(out[-1])):
        raise NumericError("panel quadrature error above tolerance",
                           estimate=err_total)
    return out


def phi_numeric_many(spec: RecurrenceSpec, p: float, xs: np.ndarray,
                     x0: float | None = None) -> np.ndarray:
    """Phi at many ascending points; the dense companion of phi_numeric."""
    anchor = x0 if x0 is not None else effective_x0(spec)
    xs = np.asarray(xs, dtype=float)
    return xs ** p * (1.0 + cumulative_bound_integral(spec.g, p, anchor, xs))


# ---------------------------------------------------------------------------
# growth classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GrowthClass:
    """Canonical Theta(x^a * (ln x)^b * (ln ln x)^c) with c in {0, 1}.

    Equality compares the three exponents to within 1e-12.
    """

    power_of_x: float
    power_of_log: float
    power_of_log_log: float

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrowthClass):
            return NotImplemented
        return (abs(self.power_of_x - other.power_of_x) <= EXPONENT_TOL
                and abs(self.power_of_log - other.power_of_log) <= EXPONENT_TOL
                and abs(self.power_of_log_log - other.power_of_log_log) <= EXPONENT_TOL)

    __hash__ = None  # tolerance-based equality is not hashable

    @property
    def pretty(self) -> str:
        factors = []
        if abs(self.power_of_x) > EXPONENT_TOL:
            factors.append(f"x^{self.power_of_x:.6f}")
        if abs(self.power_of_log) > EXPONENT_TOL:
            factors.append(f"ln(x)^{self.power_of_log:.6f}")
        if abs(self.power_of_log_log) > EXPONENT_TOL:
            factors.append("lnln(x)")
        return "Theta(" + (" * ".join(factors) if factors else "1") + ")"

    def __str__(self) -> str:
        return self.pretty


def _leading_polylog(g: DrivingFunction) -> PolyLog:
    if isinstance(g, PolyLog):
        return g
    if isinstance(g, SumFunction):
        return max(g.parts, key=lambda part: (part.alpha, part.beta))
    if isinstance(g, TabulatedFunction):
        raise UnsupportedSymbolic(
            "tabulated driving functions have no symbolic growth class; "
            "use phi_numeric")
    raise UnsupportedSymbolic(f"no symbolic form for {type(g).__name__}")


def classify_theta(measure: AtomicMeasure, g: DrivingFunction,
                   p: float) -> GrowthClass:
    """Symbolic growth class of Phi for polylog (or zero) driving functions.

    With the leading driving term x^alpha * (ln x)^beta:

      alpha < p                 -> Theta(x^p)          (integral converges)
      alpha = p, beta > -1      -> Theta(x^p (ln x)^(beta+1))
      alpha = p, beta = -1      -> Theta(x^p ln ln x)
      alpha = p, beta < -1      -> Theta(x^p)
      alpha > p                 -> Theta(x^alpha (ln x)^beta)
    """
    if isinstance(g, ZeroFunction):
        return GrowthClass(p, 0.0, 0.0)
    lead = _leading_polylog(g)
    alpha, beta = lead.alpha, lead.beta
    if abs(alpha - p) <= EXPONENT_TOL:
        if abs(beta + 1.0) <= EXPONENT_TOL:
            return GrowthClass(p, 0.0, 1.0)
        if beta > -1.0:
            return GrowthClass(p, beta + 1.0, 0.0)
        return GrowthClass(p, 0.0, 0.0)
    if alpha < p:
        return GrowthClass(p, 0.0, 0.0)
    return GrowthClass(alpha, beta, 0.0)


# ---------------------------------------------------------------------------
# Master Theorem
# ---------------------------------------------------------------------------

class MasterCaseKind(enum.Enum):
    CASE_1 = "Case 1"
    CASE_2 = "Case 2"
    CASE_3 = "Case 3"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class MasterCase:
    case: MasterCaseKind
    reason: str | None = None
    epsilon_used: float | None = None
    regularity_holds: bool | None = None

    def describe(self) -> str:
        if self.case is MasterCaseKind.NOT_APPLICABLE:
            return f"NotApplicable({self.reason})"
        return self.case.value

    def __str__(self) -> str:
        return self.describe()


def _witness_epsilon(margin: float, boundary_ok: bool, grid) -> float:
    """Largest grid epsilon witnessing an O/Omega comparison with the given
    exponent margin; falls back to half the margin."""
    for eps in sorted(grid, reverse=True):
        if eps < margin or (eps == margin and boundary_ok):
            if eps > 0:
                return eps
    return margin / 2.0


def classify_master_theorem(a: float, b: float, g: DrivingFunction,
                            epsilon_grid=DEFAULT_EPSILON_GRID) -> MasterCase:
    """Three-case Master Theorem classification of T(n) = a T(n/b) + g(n).

    For a leading driving term x^alpha (ln x)^beta and L = log_b(a):
    Case 1 iff alpha < L; Case 2 iff alpha = L and beta = 0; Case 3 iff
    alpha > L and the regularity condition a g(n/b) <= c g(n) holds for
    some c < 1 (for polylogs: iff a * b**(-alpha) < 1).  Boundary
    functions (alpha = L, beta != 0) fall in the theorem's gaps.
    """
    if a < 1:
        raise DomainError(f"Master Theorem needs a >= 1, got {a!r}")
    if b <= 1:
        raise DomainError(f"Master Theorem needs b > 1, got {b!r}")
    lead = _leading_polylog(g)
    alpha, beta = lead.alpha, lead.beta
    L = math.log(a) / math.log(b)

    if abs(alpha - L) <= EXPONENT_TOL:
        if abs(beta) <= EXPONENT_TOL:
            return MasterCase(MasterCaseKind.CASE_2)
        return MasterCase(MasterCaseKind.NOT_APPLICABLE, reason="gap")
    if alpha < L:
        eps = _witness_epsilon(L - alpha, beta <= 0, epsilon_grid)
        return MasterCase(MasterCaseKind.CASE_1, epsilon_used=eps)
    ratio = a * b ** (-alpha)          # limit of a*g(x/b)/g(x)
    if ratio >= 1.0:
        return MasterCase(MasterCaseKind.NOT_APPLICABLE,
                          reason="regularity", regularity_holds=False)
    eps = _witness_epsilon(alpha - L, beta >= 0, epsilon_grid)
    return MasterCase(MasterCaseKind.CASE_3, epsilon_used=eps,
                      regularity_holds=True)


def master_predicted_class(a: float, b: float, g: DrivingFunction,
                           case: MasterCase) -> GrowthClass | None:
    """The growth class each Master Theorem case asserts, or None in gaps."""
    L = math.log(a) / math.log(b)
    if case.case is MasterCaseKind.CASE_1:
        return GrowthClass(L, 0.0, 0.0)
    if case.case is MasterCaseKind.CASE_2:
        return GrowthClass(L, 1.0, 0.0)
    if case.case is MasterCaseKind.CASE_3:
        lead = _leading_polylog(g)
        return GrowthClass(lead.alpha, lead.beta, 0.0)
    return None


# ---------------------------------------------------------------------------
# cross-check: symbolic class vs sampled numeric growth
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrossCheck:
    """Least-squares fit of ln Phi against [ln x, ln ln x, 1] compared to
    the symbolic growth class."""

    growth_class: GrowthClass
    x_exponent_fit: float
    log_exponent_fit: float

    @property
    def x_disagreement(self) -> float:
        return abs(self.x_exponent_fit - self.growth_class.power_of_x)

    @property
    def log_disagreement(self) -> float:
        return abs(self.log_exponent_fit - self.growth_class.power_of_log)


def cross_check(spec: RecurrenceSpec, p: float,
                sample_points: np.ndarray | None = None) -> CrossCheck:
    """Fit the sampled growth of Phi and report the disagreement with the
    symbolic class (contract: <= 0.05 absolute on the x-exponent over
    geometric samples in [1e3, 1e7])."""
    cls = classify_theta(spec.measure, spec.g, p)
    if sample_points is None:
        lo = max(1e3, effective_x0(spec) * (1.0 + 1e-9))
        sample_points = np.geomspace(lo, 1e7, 33)
    xs = np.asarray(sample_points, dtype=float)
    phis = phi_numeric_many(spec, p, xs)
    lx = np.log(xs)
    design = np.column_stack([lx, np.log(lx), np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(design, np.log(phis), rcond=None)
    return CrossCheck(growth_class=cls,
                      x_exponent_fit=float(coef[0]),
                      log_exponent_fit=float(coef[1]))
