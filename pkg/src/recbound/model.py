"""Data model for divide-and-conquer recurrences.

A recurrence is described by

    T(x) = sum_i a_i * T(x / b_i + h_i(x)) + g(x)      for x >= x0,

with T given on a base interval, the pairs (a_i, b_i) forming a finite
atomic measure, g a non-negative driving function, and the h_i optional
perturbations (floors/ceilings or envelope-bounded terms).

Structural requirements are *reported* by :func:`validate`, never raised
by constructors, so that malformed specs can be inspected as data.  All
model types are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import DomainError, SpecFormatError

E = math.e


# ---------------------------------------------------------------------------
# measure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureTerm:
    """One atom of the recurrence measure: weight a > 0 at divisor b > 1."""

    weight: float
    divisor: float


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite atomic measure sum_i a_i * delta(b_i), supported on [m, M]."""

    terms: tuple[MeasureTerm, ...]

    @property
    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms], dtype=float)

    @property
    def divisors(self) -> np.ndarray:
        return np.array([t.divisor for t in self.terms], dtype=float)

    @property
    def total_weight(self) -> float:
        return float(sum(t.weight for t in self.terms))

    @property
    def m(self) -> float:
        """Smallest divisor (left end of the support)."""
        return float(min(t.divisor for t in self.terms))

    @property
    def M(self) -> float:
        """Largest divisor (right end of the support)."""
        return float(max(t.divisor for t in self.terms))


def measure_of(pairs) -> AtomicMeasure:
    """Build an AtomicMeasure from (weight, divisor) pairs."""
    return AtomicMeasure(tuple(MeasureTerm(float(a), float(b)) for a, b in pairs))


# ---------------------------------------------------------------------------
# driving functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyLog:
    """g(x) = coeff * x**alpha * (ln x)**beta with coeff > 0.

    When beta != 0 the function is only evaluated for x >= e, so the log
    factor is >= 1 and stays bounded for negative beta.  With beta == 0
    there is no log factor and any x > 0 is allowed.
    """

    coeff: float
    alpha: float
    beta: float

    @property
    def domain_floor(self) -> float:
        return E if self.beta != 0.0 else 0.0

    def evaluate(self, x: float) -> float:
        if x < self.domain_floor or x <= 0.0:
            raise DomainError(
                f"PolyLog defined for x >= {max(self.domain_floor, np.nextafter(0, 1)):g}, got {x!r}")
        if self.beta == 0.0:
            return self.coeff * x ** self.alpha
        return self.coeff * x ** self.alpha * math.log(x) ** self.beta

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.size and (xs.min() < self.domain_floor or xs.min() <= 0.0):
            raise DomainError(
                f"PolyLog defined for x >= {max(self.domain_floor, 1e-300):g}, "
                f"got min {xs.min()!r}")
        if self.beta == 0.0:
            return self.coeff * xs ** self.alpha
        return self.coeff * xs ** self.alpha * np.log(xs) ** self.beta

    def describe(self) -> str:
        return f"{self.coeff:g}*x^{self.alpha:g}*(ln x)^{self.beta:g}"


@dataclass(frozen=True)
class SumFunction:
    """Finite sum of PolyLog terms."""

    parts: tuple[PolyLog, ...]

    @property
    def domain_floor(self) -> float:
        return max(p.domain_floor for p in self.parts)

    def evaluate(self, x: float) -> float:
        return sum(p.evaluate(x) for p in self.parts)

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = np.zeros_like(xs)
        for p in self.parts:
            out += p.evaluate_many(xs)
        return out

    def describe(self) -> str:
        return " + ".join(p.describe() for p in self.parts)


@dataclass(frozen=True)
class ZeroFunction:
    """g identically zero."""

    @property
    def domain_floor(self) -> float:
        return 0.0

    def evaluate(self, x: float) -> float:
        return 0.0

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(xs, dtype=float))

    def describe(self) -> str:
        return "0"


@dataclass(frozen=True)
class TabulatedFunction:
    """Sampled positive function, interpolated piecewise-linearly in log-log
    space (which preserves the polynomial-growth character between samples).

    Evaluation outside [xs[0], xs[-1]] is a DomainError; no extrapolation.
    """

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    @property
    def domain_floor(self) -> float:
        return self.xs[0]

    def evaluate(self, x: float) -> float:
        return float(self.evaluate_many(np.array([x]))[0])

    def evaluate_many(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xs = np.asarray(self.xs)
        if x.size and (x.min() < xs[0] or x.max() > xs[-1]):
            raise DomainError(
                f"tabulated function defined on [{xs[0]:g}, {xs[-1]:g}]")
        logy = np.interp(np.log(x), np.log(xs), np.log(np.asarray(self.ys)))
        return np.exp(logy)

    def describe(self) -> str:
        return f"tabulated[{self.xs[0]:g}..{self.xs[-1]:g}] ({len(self.xs)} points)"


DrivingFunction = Union[PolyLog, SumFunction, ZeroFunction, TabulatedFunction]


# ---------------------------------------------------------------------------
# perturbation envelopes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstEnvelope:
    """Envelope identically equal to value >= 0."""

    value: float

    def evaluate(self, x: float) -> float:
        return self.value

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        return np.full_like(np.asarray(xs, dtype=float), self.value)

    def describe(self) -> str:
        return f"const {self.value:g}"


@dataclass(frozen=True)
class InverseLogPow:
    """Envelope 1/(ln x)**alpha with alpha > 0; defined for x > 1."""

    alpha: float

    def evaluate(self, x: float) -> float:
        if x <= 1.0:
            raise DomainError(f"1/(ln x)^a needs x > 1, got {x!r}")
        return math.log(x) ** (-self.alpha)

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.size and xs.min() <= 1.0:
            raise DomainError("1/(ln x)^a needs x > 1")
        return np.log(xs) ** (-self.alpha)

    def describe(self) -> str:
        return f"1/(ln x)^{self.alpha:g}"


@dataclass(frozen=True)
class InverseX:
    """Envelope 1/x; the normal form of floor/ceiling perturbations."""

    def evaluate(self, x: float) -> float:
        if x <= 0.0:
            raise DomainError(f"1/x needs x > 0, got {x!r}")
        return 1.0 / x

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.size and xs.min() <= 0.0:
            raise DomainError("1/x needs x > 0")
        return 1.0 / xs

    def describe(self) -> str:
        return "1/x"


@dataclass(frozen=True)
class TabulatedEnvelope:
    """Sampled envelope, linear in ln x between knots, held flat past the
    last knot (a conservative extension for a non-increasing function)."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def evaluate(self, x: float) -> float:
        return float(self.evaluate_many(np.array([x]))[0])

    def evaluate_many(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xs = np.asarray(self.xs)
        if x.size and x.min() < xs[0]:
            raise DomainError(f"tabulated envelope defined from x = {xs[0]:g}")
        return np.interp(np.log(x), np.log(xs), np.asarray(self.ys))

    def describe(self) -> str:
        return f"tabulated[{self.xs[0]:g}..{self.xs[-1]:g}] ({len(self.xs)} points)"


EnvelopeFn = Union[ConstEnvelope, InverseLogPow, InverseX, TabulatedEnvelope]

ZERO_ENVELOPE = ConstEnvelope(0.0)


# ---------------------------------------------------------------------------
# perturbations
# ---------------------------------------------------------------------------

class PerturbKind(enum.Enum):
    NONE = "none"
    FLOOR = "floor"
    CEIL = "ceil"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class Perturbation:
    """Per-term perturbation h(x) of the recursive argument x/b + h(x).

    The envelopes bound h relative to x:  -lambda(x) <= h(x)/x <= mu(x).
    Floor and ceiling normalize to lambda = mu = 1/x, since |h| < 1 there.
    """

    kind: PerturbKind
    lam: EnvelopeFn | None = None
    mu: EnvelopeFn | None = None

    @staticmethod
    def none() -> "Perturbation":
        return Perturbation(PerturbKind.NONE)

    @staticmethod
    def floor() -> "Perturbation":
        return Perturbation(PerturbKind.FLOOR)

    @staticmethod
    def ceil() -> "Perturbation":
        return Perturbation(PerturbKind.CEIL)

    @staticmethod
    def bounded(lam: EnvelopeFn, mu: EnvelopeFn) -> "Perturbation":
        return Perturbation(PerturbKind.BOUNDED, lam=lam, mu=mu)

    @property
    def lambda_envelope(self) -> EnvelopeFn:
        if self.kind is PerturbKind.NONE:
            return ZERO_ENVELOPE
        if self.kind in (PerturbKind.FLOOR, PerturbKind.CEIL):
            return InverseX()
        return self.lam if self.lam is not None else ZERO_ENVELOPE

    @property
    def mu_envelope(self) -> EnvelopeFn:
        if self.kind is PerturbKind.NONE:
            return ZERO_ENVELOPE
        if self.kind in (PerturbKind.FLOOR, PerturbKind.CEIL):
            return InverseX()
        return self.mu if self.mu is not None else ZERO_ENVELOPE


@dataclass(frozen=True)
class PerturbationSpec:
    """Per-term perturbations, aligned with the measure's term order."""

    perturbations: tuple[Perturbation, ...]

    def __len__(self) -> int:
        return len(self.perturbations)

    def __iter__(self):
        return iter(self.perturbations)

    @property
    def is_unperturbed(self) -> bool:
        return all(p.kind is PerturbKind.NONE for p in self.perturbations)

    @property
    def integer_roundings_only(self) -> bool:
        return all(p.kind in (PerturbKind.FLOOR, PerturbKind.CEIL)
                   for p in self.perturbations)


# ---------------------------------------------------------------------------
# base cases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstBase:
    """T(x) = value on the whole base interval [1, m*x0]."""

    value: float


@dataclass(frozen=True)
class TableBase:
    """T given at the integers 1..K; the recursion takes over at K+1."""

    values: tuple[float, ...]  # values[i] is T(i + 1)

    @property
    def n_max(self) -> int:
        return len(self.values)

    def value_at(self, n: int) -> float:
        if not 1 <= n <= len(self.values):
            raise DomainError(f"base table covers 1..{len(self.values)}, got {n}")
        return self.values[n - 1]


BaseCase = Union[ConstBase, TableBase]


# ---------------------------------------------------------------------------
# the full spec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RecurrenceSpec:
    """A complete recurrence description.

    x0 is the point from which the recursion is taken to hold; ``None``
    means "use the deterministic default" (see bounds.default_x0).
    """

    measure: AtomicMeasure
    g: DrivingFunction
    perturbation: PerturbationSpec
    x0: float | None = None
    base: BaseCase = ConstBase(1.0)


def make_spec(terms, g: DrivingFunction = ZeroFunction(),
              perturbations=None, x0: float | None = None,
              base: BaseCase | float = 1.0) -> RecurrenceSpec:
    """Convenience constructor from (weight, divisor) pairs."""
    measure = measure_of(terms)
    if perturbations is None:
        perturbations = [Perturbation.none()] * len(measure.terms)
    if isinstance(base, (int, float)):
        base = ConstBase(float(base))
    return RecurrenceSpec(measure=measure, g=g,
                          perturbation=PerturbationSpec(tuple(perturbations)),
                          x0=x0, base=base)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

class ViolationCode(enum.Enum):
    EMPTY_MEASURE = "EmptyMeasure"
    WEIGHT_NOT_POSITIVE = "WeightNotPositive"
    DIVISOR_NOT_GREATER_THAN_ONE = "DivisorNotGreaterThanOne"
    WEIGHT_SUM_BELOW_ONE = "WeightSumBelowOne"
    X0_NOT_GREATER_THAN_M = "X0NotGreaterThanM"
    X0_BELOW_G_DOMAIN = "X0BelowDrivingFunctionDomain"
    COEFF_NOT_POSITIVE = "CoefficientNotPositive"
    TABULATED_NOT_SORTED = "TabulatedNotSorted"
    TABULATED_NOT_POSITIVE = "TabulatedNotPositive"
    ENVELOPE_NEGATIVE = "EnvelopeNegative"
    ENVELOPE_NOT_NONINCREASING = "EnvelopeNotNonIncreasing"
    ENVELOPE_EXCEEDS_SHRINK_BUDGET = "EnvelopeExceedsShrinkBudget"
    PERTURBATION_ARITY_MISMATCH = "PerturbationArityMismatch"
    BASE_EMPTY = "BaseEmpty"
    BASE_VALUE_NOT_POSITIVE = "BaseValueNotPositive"


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    message: str

    def __str__(self) -> str:
        return f"{self.code.value}: {self.message}"


def _validate_envelope(env: EnvelopeFn, where: str, out: list[Violation]) -> None:
    if isinstance(env, ConstEnvelope):
        if env.value < 0:
            out.append(Violation(ViolationCode.ENVELOPE_NEGATIVE,
                                 f"{where}: constant envelope {env.value} < 0"))
    elif isinstance(env, InverseLogPow):
        if env.alpha <= 0:
            out.append(Violation(ViolationCode.ENVELOPE_NOT_NONINCREASING,
                                 f"{where}: 1/(ln x)^a needs a > 0, got {env.alpha}"))
    elif isinstance(env, TabulatedEnvelope):
        xs, ys = np.asarray(env.xs), np.asarray(env.ys)
        if xs.size == 0 or np.any(np.diff(xs) <= 0):
            out.append(Violation(ViolationCode.TABULATED_NOT_SORTED,
                                 f"{where}: envelope knots must strictly increase"))
            return
        if np.any(ys < 0):
            out.append(Violation(ViolationCode.ENVELOPE_NEGATIVE,
                                 f"{where}: envelope takes a negative value"))
        if np.any(np.diff(ys) > 0):
            out.append(Violation(ViolationCode.ENVELOPE_NOT_NONINCREASING,
                                 f"{where}: envelope increases between knots"))
    # InverseX is non-negative and non-increasing by construction


def validate(spec: RecurrenceSpec) -> list[Violation]:
    """Check every structural requirement; return all violations found.

    An empty list means the spec satisfies the structural hypotheses of
    the Akra-Bazzi theorem and is accepted by every downstream analysis.
    Pure and deterministic.
    """
    out: list[Violation] = []
    terms = spec.measure.terms

    if not terms:
        out.append(Violation(ViolationCode.EMPTY_MEASURE, "measure has no terms"))
        return out

    for i, t in enumerate(terms):
        if not t.weight > 0:
            out.append(Violation(ViolationCode.WEIGHT_NOT_POSITIVE,
                                 f"term {i}: weight {t.weight} must be > 0"))
        if not t.divisor > 1:
            out.append(Violation(ViolationCode.DIVISOR_NOT_GREATER_THAN_ONE,
                                 f"term {i}: divisor {t.divisor} must be > 1"))
    if spec.measure.total_weight < 1:
        out.append(Violation(ViolationCode.WEIGHT_SUM_BELOW_ONE,
                             f"sum of weights {spec.measure.total_weight:g} < 1"))

    # driving function
    polylogs: tuple[PolyLog, ...] = ()
    if isinstance(spec.g, PolyLog):
        polylogs = (spec.g,)
    elif isinstance(spec.g, SumFunction):
        polylogs = spec.g.parts
    for p in polylogs:
        if not p.coeff > 0:
            out.append(Violation(ViolationCode.COEFF_NOT_POSITIVE,
                                 f"driving term {p.describe()}: coefficient must be > 0"))
    if isinstance(spec.g, TabulatedFunction):
        xs, ys = np.asarray(spec.g.xs), np.asarray(spec.g.ys)
        if xs.size == 0 or np.any(np.diff(xs) <= 0):
            out.append(Violation(ViolationCode.TABULATED_NOT_SORTED,
                                 "tabulated g: sample points must strictly increase"))
        if np.any(ys <= 0):
            out.append(Violation(ViolationCode.TABULATED_NOT_POSITIVE,
                                 "tabulated g: values must be positive "
                                 "(log-log interpolation)"))

    # perturbations
    if len(spec.perturbation) != len(terms):
        out.append(Violation(
            ViolationCode.PERTURBATION_ARITY_MISMATCH,
            f"{len(spec.perturbation)} perturbations for {len(terms)} terms"))
    else:
        for i, (term, pert) in enumerate(zip(terms, spec.perturbation)):
            if pert.kind is PerturbKind.BOUNDED:
                _validate_envelope(pert.lambda_envelope, f"term {i} lambda", out)
                _validate_envelope(pert.mu_envelope, f"term {i} mu", out)
                lam = pert.lambda_envelope
                if (isinstance(lam, ConstEnvelope) and term.divisor > 1
                        and lam.value >= 1.0 / term.divisor):
                    out.append(Violation(
                        ViolationCode.ENVELOPE_EXCEEDS_SHRINK_BUDGET,
                        f"term {i}: constant lambda {lam.value:g} >= 1/b = "
                        f"{1.0 / term.divisor:g}; argument can leave (0, x)"))

    # x0
    divisors_ok = all(t.divisor > 1 for t in terms)
    if spec.x0 is not None and divisors_ok:
        if not spec.x0 > spec.measure.M:
            out.append(Violation(ViolationCode.X0_NOT_GREATER_THAN_M,
                                 f"x0 = {spec.x0:g} must exceed M = {spec.measure.M:g}"))
        if spec.x0 < spec.g.domain_floor:
            out.append(Violation(ViolationCode.X0_BELOW_G_DOMAIN,
                                 f"x0 = {spec.x0:g} below the driving function's "
                                 f"domain floor {spec.g.domain_floor:g}"))

    # base
    if isinstance(spec.base, ConstBase):
        if not spec.base.value > 0 or not math.isfinite(spec.base.value):
            out.append(Violation(ViolationCode.BASE_VALUE_NOT_POSITIVE,
                                 f"base constant {spec.base.value} must be in (0, inf)"))
    else:
        if len(spec.base.values) == 0:
            out.append(Violation(ViolationCode.BASE_EMPTY, "base table is empty"))
        elif any(not (v > 0 and math.isfinite(v)) for v in spec.base.values):
            out.append(Violation(ViolationCode.BASE_VALUE_NOT_POSITIVE,
                                 "base table values must be in (0, inf)"))

    return out


def require_valid(spec: RecurrenceSpec) -> None:
    """Raise PreconditionError if the spec does not validate cleanly."""
    from .errors import PreconditionError

    violations = validate(spec)
    if violations:
        raise PreconditionError(
            "invalid recurrence spec: " + "; ".join(str(v) for v in violations))


def require_valid_measure(measure: AtomicMeasure) -> None:
    """Raise PreconditionError if the measure alone is invalid."""
    from .errors import PreconditionError

    probe = make_spec([(t.weight, t.divisor) for t in measure.terms]) \
        if measure.terms else make_spec([])
    violations = [v for v in validate(probe)
                  if v.code in (ViolationCode.EMPTY_MEASURE,
                                ViolationCode.WEIGHT_NOT_POSITIVE,
                                ViolationCode.DIVISOR_NOT_GREATER_THAN_ONE,
                                ViolationCode.WEIGHT_SUM_BELOW_ONE)]
    if violations:
        raise PreconditionError(
            "invalid measure: " + "; ".join(str(v) for v in violations))


# ---------------------------------------------------------------------------
# JSON spec files (strict schema)
# ---------------------------------------------------------------------------

_ENVELOPE_HELP = 'expected "invx", "invlog:A", "const:V", or [[x, y], ...]'


def _expect_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise SpecFormatError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise SpecFormatError(f"{where}: missing field(s) {sorted(missing)}")


def _num(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecFormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def parse_envelope(value, where: str = "envelope") -> EnvelopeFn:
    """Parse an envelope from its spec-file form.

    Accepted forms: "invx", "invlog:A" (meaning 1/(ln x)^A),
    "const:V", or a [[x, y], ...] table.
    """
    if isinstance(value, str):
        if value == "invx":
            return InverseX()
        if value.startswith("invlog:"):
            return InverseLogPow(_num_str(value[7:], where))
        if value.startswith("const:"):
            return ConstEnvelope(_num_str(value[6:], where))
        raise SpecFormatError(f"{where}: bad envelope {value!r}; {_ENVELOPE_HELP}")
    if isinstance(value, list):
        return TabulatedEnvelope(*_parse_table(value, where))
    raise SpecFormatError(f"{where}: bad envelope {value!r}; {_ENVELOPE_HELP}")


def _num_str(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise SpecFormatError(f"{where}: bad numeric suffix {text!r}") from None


def _parse_table(rows, where: str) -> tuple[tuple[float, ...], tuple[float, ...]]:
    xs, ys = [], []
    for k, row in enumerate(rows):
        if not (isinstance(row, list) and len(row) == 2):
            raise SpecFormatError(f"{where}[{k}]: expected a [x, y] pair")
        xs.append(_num(row[0], f"{where}[{k}].x"))
        ys.append(_num(row[1], f"{where}[{k}].y"))
    if not xs:
        raise SpecFormatError(f"{where}: table must be non-empty")
    return tuple(xs), tuple(ys)


def _parse_perturb(value, where: str) -> Perturbation:
    if value is None or value == "none":
        return Perturbation.none()
    if value == "floor":
        return Perturbation.floor()
    if value == "ceil":
        return Perturbation.ceil()
    if isinstance(value, dict):
        _expect_keys(value, {"lambda", "mu"}, {"lambda", "mu"}, where)
        return Perturbation.bounded(parse_envelope(value["lambda"], where + ".lambda"),
                                    parse_envelope(value["mu"], where + ".mu"))
    raise SpecFormatError(
        f'{where}: expected "none", "floor", "ceil" or {{"lambda":..., "mu":...}}')


def _parse_polylog(obj: dict, where: str) -> PolyLog:
    _expect_keys(obj, {"c", "alpha", "beta"}, {"c", "alpha", "beta"}, where)
    return PolyLog(_num(obj["c"], where + ".c"),
                   _num(obj["alpha"], where + ".alpha"),
                   _num(obj["beta"], where + ".beta"))


def _parse_g(obj, where: str = "g") -> DrivingFunction:
    if not isinstance(obj, dict):
        raise SpecFormatError(f"{where}: expected an object")
    if "zero" in obj:
        _expect_keys(obj, {"zero"}, {"zero"}, where)
        if obj["zero"] is not True:
            raise SpecFormatError(f'{where}.zero: must be true')
        return ZeroFunction()
    if "sum" in obj:
        _expect_keys(obj, {"sum"}, {"sum"}, where)
        if not isinstance(obj["sum"], list) or not obj["sum"]:
            raise SpecFormatError(f"{where}.sum: expected a non-empty list")
        return SumFunction(tuple(
            _parse_polylog(part, f"{where}.sum[{k}]")
            for k, part in enumerate(obj["sum"])))
    return _parse_polylog(obj, where)


def _parse_base(obj, where: str = "base") -> BaseCase:
    if not isinstance(obj, dict):
        raise SpecFormatError(f"{where}: expected an object")
    if "const" in obj:
        _expect_keys(obj, {"const"}, {"const"}, where)
        return ConstBase(_num(obj["const"], where + ".const"))
    if "table" in obj:
        _expect_keys(obj, {"table"}, {"table"}, where)
        rows = obj["table"]
        if not isinstance(rows, list) or not rows:
            raise SpecFormatError(f"{where}.table: expected a non-empty list")
        pairs = {}
        for k, row in enumerate(rows):
            if not (isinstance(row, list) and len(row) == 2):
                raise SpecFormatError(f"{where}.table[{k}]: expected a [n, value] pair")
            n = row[0]
            if isinstance(n, bool) or not isinstance(n, int):
                raise SpecFormatError(f"{where}.table[{k}]: n must be an integer")
            pairs[n] = _num(row[1], f"{where}.table[{k}].value")
        n_max = max(pairs)
        if set(pairs) != set(range(1, n_max + 1)):
            raise SpecFormatError(
                f"{where}.table: must cover the integers 1..{n_max} without gaps")
        return TableBase(tuple(pairs[n] for n in range(1, n_max + 1)))
    raise SpecFormatError(f'{where}: expected {{"const": v}} or {{"table": [[n, v], ...]}}')


def parse_spec(data: dict) -> RecurrenceSpec:
    """Build a RecurrenceSpec from a parsed JSON document (strict schema)."""
    if not isinstance(data, dict):
        raise SpecFormatError("spec: expected a JSON object at top level")
    _expect_keys(data, {"terms", "g", "x0", "base"}, {"terms", "g", "base"}, "spec")

    if not isinstance(data["terms"], list) or not data["terms"]:
        raise SpecFormatError("spec.terms: expected a non-empty list")
    measure_terms = []
    perturbations = []
    for k, entry in enumerate(data["terms"]):
        where = f"spec.terms[{k}]"
        if not isinstance(entry, dict):
            raise SpecFormatError(f"{where}: expected an object")
        _expect_keys(entry, {"a", "b", "perturb"}, {"a", "b"}, where)
        measure_terms.append(MeasureTerm(_num(entry["a"], where + ".a"),
                                         _num(entry["b"], where + ".b")))
        perturbations.append(_parse_perturb(entry.get("perturb"), where + ".perturb"))

    x0 = None
    if "x0" in data:
        x0 = _num(data["x0"], "spec.x0")

    return RecurrenceSpec(measure=AtomicMeasure(tuple(measure_terms)),
                          g=_parse_g(data["g"]),
                          perturbation=PerturbationSpec(tuple(perturbations)),
                          x0=x0,
                          base=_parse_base(data["base"]))


def load_spec(path: str | Path) -> RecurrenceSpec:
    """Load and parse a recurrence spec file.

    json.JSONDecodeError (with line/column) propagates for malformed JSON;
    schema problems raise SpecFormatError.
    """
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return parse_spec(data)
