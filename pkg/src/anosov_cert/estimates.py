"""Explicit bounds for regular segments, Weyl cones and zeta-angles.

Each function evaluates one closed-form bound.  Bounds with hypotheses return
a :class:`BoundResult` whose value is computed even when a hypothesis fails;
the failed :class:`Condition` tells the caller the number is advisory only.
Exponentials are evaluated as :class:`LogScalar` so nothing underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from anosov_cert.logscalar import CancellationError, LogScalar, log_sinh

Number = Union[float, LogScalar]

_RELATIONS = ("<=", "<", ">=", ">")


@dataclass(frozen=True)
class Condition:
    """One inequality ``lhs <relation> rhs`` and whether it holds exactly."""

    name: str
    lhs: Number
    relation: str
    rhs: Number
    passed: bool
    margin: float

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "relation": self.relation,
            "rhs": self.rhs,
            "margin": self.margin,
            "pass": self.passed,
        }


def _finite_logscalar(x: Number):
    if isinstance(x, LogScalar):
        return x
    if math.isfinite(x):
        return LogScalar.from_float(x)
    return None


def check(name: str, lhs: Number, relation: str, rhs: Number) -> Condition:
    """Evaluate ``lhs <relation> rhs`` with no slack.

    The margin is positive when the inequality holds with room to spare
    (``rhs - lhs`` for ``<=``/``<``, ``lhs - rhs`` for ``>=``/``>``).
    """
    if relation not in _RELATIONS:
        raise ValueError(f"unknown relation {relation!r}")
    if isinstance(lhs, float) and math.isnan(lhs) or isinstance(rhs, float) and math.isnan(rhs):
        return Condition(name, lhs, relation, rhs, False, math.nan)
    a, b = _finite_logscalar(lhs), _finite_logscalar(rhs)
    if a is not None and b is not None:
        cmp = (a > b) - (a < b)
        big, small = (b, a) if relation in ("<=", "<") else (a, b)
        try:
            margin = (big - small).to_float()
        except CancellationError:
            margin = 0.0
    else:
        x = lhs.to_float() if isinstance(lhs, LogScalar) else float(lhs)
        y = rhs.to_float() if isinstance(rhs, LogScalar) else float(rhs)
        cmp = (x > y) - (x < y)
        margin = (y - x) if relation in ("<=", "<") else (x - y)
    passed = {"<=": cmp <= 0, "<": cmp < 0, ">=": cmp >= 0, ">": cmp > 0}[relation]
    return Condition(name, lhs, relation, rhs, passed, margin)


@dataclass(frozen=True)
class BoundResult:
    value: LogScalar
    preconditions: tuple[Condition, ...] = ()

    @property
    def ok(self) -> bool:
        """True iff every hypothesis holds, so ``value`` is a valid bound."""
        return all(c.passed for c in self.preconditions)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "ok": self.ok,
            "preconditions": [c.to_json() for c in self.preconditions],
        }


def _expm1_log(x: float) -> LogScalar:
    """e**x - 1 for x >= 0 as a LogScalar."""
    if x < 700.0:
        return LogScalar.from_float(math.expm1(x))
    return LogScalar.exp(x) * LogScalar.from_float(-math.expm1(-x))


def _inv_sinh_sq(x: float) -> Number:
    """sinh(x)**-2, or +inf when x <= 0."""
    if x <= 0:
        return math.inf
    return LogScalar.exp(-2.0 * log_sinh(x))


def _decay(coefficient: float, growth: float, decay: float) -> LogScalar:
    """coefficient * exp(growth - decay) in log domain."""
    if coefficient == 0:
        return LogScalar.zero()
    return LogScalar.from_float(coefficient) * LogScalar.exp(growth - decay)


def _ratio(num: float, den: float) -> float:
    """num/den, or +inf when the denominator is not positive."""
    return num / den if den > 0 else math.inf


# -- perturbations of regular segments ----------------------------------------


def regular_projection_alpha(alpha0: float, kappa0: float, delta_x: float, delta_y: float, l: float) -> float:
    """Regularity retained when both ends of an l-long segment move by delta_x, delta_y.

    Any alpha0' at or below the returned value makes the perturbed segment
    (alpha0', tau_mod)-regular.
    """
    spread = delta_x + delta_y
    if l <= spread:
        raise ValueError(f"segment length {l} must exceed the total perturbation {spread}")
    return alpha0 - spread * (alpha0 + kappa0) / (l - spread)


def strong_asymptote_bound(D: float, l: float, alpha0: float, kappa0: float) -> LogScalar:
    """Distance D * exp(kappa0 D - alpha0 l) between strongly asymptotic rays at time l."""
    if D < 0 or l < 0:
        raise ValueError("D and l must be nonnegative")
    return _decay(D, kappa0 * D, alpha0 * l)


def cone_rotation_bound(D: float, l: float, alpha0: float, alpha0_prime: float, kappa0: float) -> BoundResult:
    """Rotation 2 D exp(kappa0 D - alpha0 l) moving a midpoint into a nearby Weyl cone."""
    regularity = alpha0 - D * (kappa0 + alpha0) / (2 * l - D) if 2 * l - D > 0 else -math.inf
    growth = _expm1_log(2 * kappa0 * D)
    inv_sq = _inv_sinh_sq(alpha0_prime * (2 * l - D))
    if growth.is_zero:
        curvature_lhs: Number = LogScalar.zero()
    elif isinstance(inv_sq, LogScalar):
        curvature_lhs = LogScalar.from_float(0.5) * growth * inv_sq
    else:
        curvature_lhs = inv_sq
    pre = (
        check("(i) regularity", regularity, ">=", alpha0_prime),
        check("(i) positivity", alpha0_prime, ">", 0.0),
        check("(ii) curvature", curvature_lhs, "<=", LogScalar.from_float(3.0) * LogScalar.exp(2 * kappa0 * D)),
    )
    return BoundResult(_decay(2 * D, kappa0 * D, alpha0 * l), pre)


def weyl_cone_attraction_bound(
    D: float, l: float, alpha0: float, alpha0_prime: float, kappa0: float, zeta0: float
) -> BoundResult:
    """Distance D exp(kappa0 D - alpha0 l) from a far point to a shifted Weyl cone."""
    regularity = alpha0 - D * (alpha0 + kappa0) / (l - D) if l - D > 0 else -math.inf
    pre = (
        check("regularity", regularity, ">=", alpha0_prime),
        check("antipodality", _ratio(D, alpha0_prime * zeta0 * l), "<=", zeta0**2 / kappa0**2),
    )
    return BoundResult(_decay(D, kappa0 * D, alpha0 * l), pre)


def midpoint_projection_bound(
    D: float, l: float, alpha0: float, alpha0_prime: float, kappa0: float, zeta0: float
) -> BoundResult:
    """Distance 5 D exp(2 kappa0 D - alpha0 l) from a segment midpoint to a Weyl cone."""
    regularity = alpha0 - 2 * D * (alpha0 + kappa0) / (l - 2 * D) if l - 2 * D > 0 else -math.inf
    growth = _expm1_log(4 * kappa0 * D)
    inv_sq = _inv_sinh_sq(alpha0_prime * (2 * l - 2 * D))
    if growth.is_zero:
        curvature_lhs: Number = LogScalar.zero()
    elif isinstance(inv_sq, LogScalar):
        curvature_lhs = LogScalar.from_float(0.5) * growth * inv_sq
    else:
        curvature_lhs = inv_sq
    pre = (
        check("(1) regularity", regularity, ">=", alpha0_prime),
        check("(1) positivity", alpha0_prime, ">", 0.0),
        check("(2) curvature", curvature_lhs, "<=", LogScalar.from_float(3.0) * LogScalar.exp(4 * kappa0 * D)),
        check("(3) antipodality", _ratio(2 * D, alpha0_prime * zeta0 * l), "<=", zeta0**2 / kappa0**2),
    )
    return BoundResult(_decay(5 * D, 2 * kappa0 * D, alpha0 * l), pre)


# -- zeta-angles --------------------------------------------------------------


def simplex_displacement_bound(transvection_norm: float, kappa0: float) -> float:
    """Upper bound on the zeta-angle a simplex moves under a transvection of the given length."""
    if transvection_norm < 0:
        raise ValueError("transvection norm must be nonnegative")
    return 2.0 * math.asin(min(1.0, kappa0 * transvection_norm / 2.0))


def distance_to_angle(dist: float, kappa0: float) -> float:
    """Lower bound pi - 4 asin(kappa0 dist / 2) on the zeta-angle seen from near a parallel set.

    The raw value is returned; anything <= 0 carries no information.
    """
    if dist < 0:
        raise ValueError("distance must be nonnegative")
    if dist > 2.0 / kappa0:
        raise ValueError(f"distance {dist} exceeds 2/kappa0 = {2.0 / kappa0}")
    return math.pi - 4.0 * math.asin(min(1.0, kappa0 * dist / 2.0))


def angle_to_distance(delta: float, zeta0: float, kappa0: float) -> BoundResult:
    """Distance delta/zeta0 to the parallel set when the zeta-angle is at least pi - delta."""
    if delta < 0:
        raise ValueError("angle gap must be nonnegative")
    pre = (check("antipodality", delta, "<=", zeta0**2 / (2 * kappa0**2)),)
    return BoundResult(LogScalar.from_float(delta / zeta0), pre)


def zeta_projection_lipschitz(alpha0: float, zeta0: float) -> float:
    """Lipschitz constant 1/(alpha0 zeta0) of the projection X -> zeta(X) on regular unit vectors."""
    if alpha0 <= 0 or zeta0 <= 0:
        raise ValueError("alpha0 and zeta0 must be positive")
    return 1.0 / (alpha0 * zeta0)
