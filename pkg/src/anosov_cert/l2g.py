"""Local-to-global machinery for Morse quasigeodesics.

Two condition checkers and a parameter solver:

* :func:`check_straight_spaced` evaluates the five hypotheses under which
  straight and spaced sequences are Morse quasigeodesics;
* :func:`check_quadruple` evaluates the hypotheses under which a Morse
  quasigeodesic has straight and spaced midpoint quadruples;
* :func:`solve_local_scale` chains them and returns the local scale ``L = 3k``
  together with the global Morse and quasi-isometry constants.

Alpha naming along the chain ``alpha_out < alpha_mid < alpha_int < alpha0``:
the midpoint theorem runs with regularity ``alpha0``, auxiliary ``alpha_int``
and output ``alpha_mid``; the straight-and-spaced theorem then takes
``alpha_mid`` to ``alpha_out``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from anosov_cert.estimates import Condition, check
from anosov_cert.logscalar import LogScalar, log_sinh
from anosov_cert.symspace import ModelConstants


class InfeasibleError(RuntimeError):
    """No parameter value up to the search cap satisfies a theorem's hypotheses."""

    def __init__(self, stage: str, blocking: list[Condition], cap: float):
        names = ", ".join(c.name for c in blocking) or "unknown"
        super().__init__(f"{stage}: infeasible up to {cap:g}; blocking condition(s): {names}")
        self.stage = stage
        self.blocking = blocking
        self.cap = cap


@dataclass(frozen=True)
class MorseQIParams:
    """(alpha0, tau_mod, D)-Morse (c1, c2, c3, c4)-quasigeodesic constants."""

    alpha0: float
    D: float
    c1: float
    c2: float
    c3: float
    c4: float

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise ValueError("alpha0 must be positive")
        if self.D < 0 or self.c2 < 0 or self.c4 < 0:
            raise ValueError("D, c2 and c4 must be nonnegative")
        if not self.c1 > 0:
            raise ValueError(f"c1 must be positive, got {self.c1}")
        if not self.c3 > 0:
            raise ValueError("c3 must be positive")
        if 1.0 / self.c1 > self.c3:
            raise ValueError("lower slope 1/c1 exceeds upper slope c3")

    def to_json(self) -> dict:
        return {"alpha0": self.alpha0, "D": self.D, "c1": self.c1, "c2": self.c2, "c3": self.c3, "c4": self.c4}


@dataclass(frozen=True)
class StraightSpacedParams:
    alpha_in: float
    alpha_out: float
    delta: float
    epsilon: float
    s: float

    def __post_init__(self):
        if not 0 < self.alpha_out < self.alpha_in:
            raise ValueError("need 0 < alpha_out < alpha_in")
        if self.delta <= 0 or self.s <= 0 or self.epsilon < 0:
            raise ValueError("delta and s must be positive, epsilon nonnegative")

    def to_json(self) -> dict:
        return {
            "alpha_in": self.alpha_in,
            "alpha_out": self.alpha_out,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "s": self.s,
        }


@dataclass(frozen=True)
class QuadrupleParams:
    alpha0: float
    alpha_int: float
    alpha_out: float
    D: float
    epsilon: float
    c1: float
    c2: float
    s: float
    l: float
    delta_aux: float
    k: int

    def __post_init__(self):
        if not 0 < self.alpha_out < self.alpha_int < self.alpha0:
            raise ValueError("need 0 < alpha_out < alpha_int < alpha0")
        if self.D < 0 or self.delta_aux < 0 or self.epsilon <= 0:
            raise ValueError("D and delta_aux must be nonnegative, epsilon positive")

    def to_json(self) -> dict:
        return {
            "alpha0": self.alpha0,
            "alpha_int": self.alpha_int,
            "alpha_out": self.alpha_out,
            "D": self.D,
            "epsilon": self.epsilon,
            "c1": self.c1,
            "c2": self.c2,
            "s": self.s,
            "l": self.l,
            "delta_aux": self.delta_aux,
            "k": self.k,
        }


@dataclass(frozen=True)
class ConditionReport:
    theorem: str
    conditions: tuple[Condition, ...]
    degenerate: bool = False
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failed(self) -> list[Condition]:
        return [c for c in self.conditions if not c.passed]

    def to_json(self) -> dict:
        out = {
            "theorem": self.theorem,
            "pass": self.passed,
            "degenerate": self.degenerate,
            "conditions": [c.to_json() for c in self.conditions],
        }
        out.update(self.extras)
        return out


def _positive_ratio(num: float, den: float) -> float:
    return num / den if den > 0 else math.inf


def check_straight_spaced(mc: ModelConstants, p: StraightSpacedParams) -> ConditionReport:
    """Hypotheses 1-5 for (alpha_in, eps)-straight s-spaced sequences to be alpha_out-Morse.

    Hypothesis 5 is checked against the lower bound zeta0^2/kappa0^2 of the
    antipodality gap, non-strictly; the strict inequality against the true
    gap then follows.
    """
    k0, z0 = mc.kappa0, mc.zeta0
    a, eps, delta, s = p.alpha_in, p.epsilon, p.delta, p.s
    if s <= 2 * delta:
        raise ValueError(f"spacing s={s} must exceed 2*delta={2 * delta}")

    angle_lhs = (
        LogScalar.zero()
        if eps == 0
        else LogScalar.from_float(eps * k0 / z0) * LogScalar.exp(2 * k0 * eps / z0 - a * s)
    )
    asin_arg = 2 * delta / (a * z0 * s)
    antipodal_lhs = 2 * eps + math.asin(asin_arg) if asin_arg <= 1 else math.inf
    conditions = (
        check("1 angle-to-distance", 5 * eps, "<=", z0**2 / (2 * k0**2)),
        check("2 distance-to-angle", angle_lhs, "<=", math.sin(eps / 4)),
        check("3 parallel-set proximity", 5 * eps / z0, "<=", delta),
        check("4 projected regularity", a - 2 * delta * (a + k0) / (s - 2 * delta), ">=", p.alpha_out),
        check("5 antipodality", antipodal_lhs, "<=", mc.antipodal_threshold),
    )
    return ConditionReport(
        theorem="straight-spaced",
        conditions=conditions,
        degenerate=eps == 0,
        extras={"spacing_constant": spacing_constant(mc, p.alpha_out, s, delta)},
    )


def spacing_constant(mc: ModelConstants, alpha_out: float, s: float, delta: float) -> float:
    """Linear rate 2 alpha_out zeta0 c0 (s - 2 delta) of the coarse spacing conclusion."""
    return 2 * alpha_out * mc.zeta0 * mc.c0 * (s - 2 * delta)


def check_quadruple(mc: ModelConstants, p: QuadrupleParams) -> ConditionReport:
    """Hypotheses 1-5 for Morse quasigeodesics to satisfy the midpoint quadruple condition."""
    k0, z0 = mc.kappa0, mc.zeta0
    a0, ai, ao = p.alpha0, p.alpha_int, p.alpha_out
    D, l, dl, eps = p.D, p.l, p.delta_aux, p.epsilon

    x = ai * (2 * l - 2 * D)
    sinh_rhs = LogScalar.from_float(6.0) * LogScalar.exp(2 * log_sinh(x)) if x > 0 else 0.0
    diamond_lhs = LogScalar.zero() if D == 0 else LogScalar.from_float(5 * D) * LogScalar.exp(2 * k0 * D - a0 * l)

    reg_a = _positive_ratio(a0 * dl + 3 * a0 * D + 2 * k0 * D, l - dl - 2 * D)
    reg_b = _positive_ratio(2 * k0 * dl * (ai + k0), 2 * ai * (l - dl - D) - 2 * k0 * dl)

    terms = (
        _positive_ratio(D, ai * z0 * l),
        _positive_ratio(k0 * dl, ao * z0 * (2 * ai * (l - dl - D) - dl * k0)),
        _positive_ratio(dl, 2 * ai * z0 * (l - D)),
        _positive_ratio(dl, 2 * ao * z0 * (l - dl)),
        2 * k0 * dl,
    )
    conditions = (
        check("1 k from l", float(p.k), ">=", p.c1 * (2 * l + p.c2)),
        check("2a sinh", 1.0, "<=", sinh_rhs),
        check("2b antipodality", _positive_ratio(D, ai * z0 * l), "<=", z0**2 / k0**2),
        check("2c diamond proximity", diamond_lhs, "<=", dl),
        check("3 midpoint spacing", (2 * ai / k0) * (l - dl - D), ">=", p.s),
        check("4a outer regularity", reg_a, "<=", a0 - ai),
        check("4b inner regularity", reg_b, "<=", ai - ao),
        check("5 straightness", math.fsum(terms), "<=", eps / math.pi),
    )
    return ConditionReport(
        theorem="quadruple",
        conditions=conditions,
        degenerate=D == 0 and dl == 0,
        extras={"straightness_terms": list(terms)},
    )


# -- the solver ----------------------------------------------------------------


@dataclass(frozen=True)
class AuxPolicy:
    """How the auxiliary parameters are fixed before the s and l searches.

    alpha_mid = mid_weight * alpha0 + (1 - mid_weight) * alpha_out
    alpha_int = int_weight * alpha0 + (1 - int_weight) * alpha_mid
    epsilon   = epsilon_factor * zeta0^2 / kappa0^2
    delta     = delta_factor * zeta0 / kappa0^2
    delta_aux = epsilon / (delta_aux_divisor * pi * kappa0)

    ``wiring`` picks the regularities handed to the straight-spaced check:
    ``"chain"`` uses alpha_mid -> alpha_out, as in the local-to-global proof;
    ``"literal"`` uses alpha0 -> alpha_mid, as in the worked free-group example.
    """

    name: str
    mid_weight: float = 0.5
    int_weight: float = 0.8
    epsilon_factor: float = 0.1
    delta_factor: float = 0.5
    delta_aux_divisor: float = 20.0
    s_step: float = 0.01
    l_step: float = 0.25
    cap: float = 1e9
    wiring: str = "chain"

    def __post_init__(self):
        if self.wiring not in ("chain", "literal"):
            raise ValueError(f"wiring must be 'chain' or 'literal', got {self.wiring!r}")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "mid_weight": self.mid_weight,
            "int_weight": self.int_weight,
            "epsilon_factor": self.epsilon_factor,
            "delta_factor": self.delta_factor,
            "delta_aux_divisor": self.delta_aux_divisor,
            "s_step": self.s_step,
            "l_step": self.l_step,
            "cap": self.cap,
            "wiring": self.wiring,
        }


# The 0.5/0.8 weights, epsilon = zeta0^2/(10 kappa0^2), delta = zeta0/(2 kappa0^2)
# and delta_aux = epsilon/(20 pi kappa0) are the published choices; the two
# presets share them and differ in the straight-spaced wiring.
POLICIES = {
    "default": AuxPolicy("default"),
    "paper-5.2": AuxPolicy("paper-5.2", wiring="literal"),
}


def get_policy(policy: "str | AuxPolicy | None") -> AuxPolicy:
    if policy is None:
        return POLICIES["default"]
    if isinstance(policy, AuxPolicy):
        return policy
    try:
        return POLICIES[policy]
    except KeyError:
        raise ValueError(f"unknown policy {policy!r}; choose from {sorted(POLICIES)}") from None


@dataclass(frozen=True)
class GlobalParams:
    D_prime: float
    c1_prime: float
    c2_prime: float
    c3_prime: float
    c4_prime: float

    def to_json(self) -> dict:
        return {
            "D_prime": self.D_prime,
            "c1_prime": self.c1_prime,
            "c1_prime_inverse": 1.0 / self.c1_prime,
            "c2_prime": self.c2_prime,
            "c3_prime": self.c3_prime,
            "c4_prime": self.c4_prime,
        }


def global_params(
    k: int, s: float, delta: float, alpha_out: float, mc: ModelConstants, morse: MorseQIParams
) -> GlobalParams:
    """Global Morse and quasi-isometry constants at local scale L = 3k."""
    if k <= 0 or s <= 0 or delta <= 0 or alpha_out <= 0:
        raise ValueError("k, s, delta and alpha_out must be positive")
    L = 3 * k
    rate = spacing_constant(mc, alpha_out, s, delta)
    return GlobalParams(
        D_prime=morse.c3 * k + 1.5 * morse.c4 + delta,
        c1_prime=k / rate,
        c2_prime=rate + 2 * delta + 2 * morse.c3 * k + 3 * morse.c4,
        c3_prime=morse.c3 + morse.c4 / L,
        c4_prime=morse.c4,
    )


@dataclass(frozen=True)
class L2GSolution:
    policy: AuxPolicy
    alpha_out: float
    alpha_mid: float
    alpha_int: float
    epsilon: float
    delta: float
    delta_aux: float
    s: float
    l: float
    k: int
    L: int
    global_: GlobalParams
    straight: ConditionReport
    quadruple: ConditionReport

    @property
    def condition_report(self) -> list[Condition]:
        return [*self.straight.conditions, *self.quadruple.conditions]

    @property
    def word_radius(self) -> int:
        return word_radius_for_scale(self.L)

    def to_json(self) -> dict:
        return {
            "policy": self.policy.to_json(),
            "auxiliary": {
                "alpha_out": self.alpha_out,
                "alpha_mid": self.alpha_mid,
                "alpha_int": self.alpha_int,
                "epsilon": self.epsilon,
                "delta": self.delta,
                "delta_aux": self.delta_aux,
                "s": self.s,
                "l": self.l,
                "k": self.k,
            },
            "L": self.L,
            "word_radius": self.word_radius,
            "global": self.global_.to_json(),
            "straight_spaced": self.straight.to_json(),
            "quadruple": self.quadruple.to_json(),
        }


def word_radius_for_scale(L: int) -> int:
    """Smallest word radius k_w whose 2k_w-local conclusion covers scale L."""
    return -(-int(L) // 2)


def _grid_up(x: float, step: float) -> float:
    return round(math.ceil(x / step) * step, 10)


def _minimal_feasible(feasible, lo: float, step: float, cap: float, stage: str, probe) -> float:
    """Smallest grid value above ``lo`` accepted by the monotone predicate ``feasible``."""
    hi = max(2 * lo, 1.0)
    while not feasible(hi):
        if hi >= cap:
            raise InfeasibleError(stage, probe(cap).failed(), cap)
        lo, hi = hi, min(2 * hi, cap)
    while hi - lo > step:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    value = _grid_up(hi, step)
    while not feasible(value):  # guard against rounding at the grid
        value = round(value + step, 10)
    return value


def straight_params(mc: ModelConstants, alpha_mid: float, alpha_out: float, policy: AuxPolicy, s: float):
    eps = policy.epsilon_factor * mc.zeta0**2 / mc.kappa0**2
    delta = policy.delta_factor * mc.zeta0 / mc.kappa0**2
    return StraightSpacedParams(alpha_in=alpha_mid, alpha_out=alpha_out, delta=delta, epsilon=eps, s=s)


def solve_local_scale(
    mc: ModelConstants,
    morse: MorseQIParams,
    alpha_out: float,
    policy: "str | AuxPolicy | None" = None,
) -> L2GSolution:
    """Find a local scale L = 3k certifying L-local Morse quasigeodesics as global ones.

    Fixes the alpha chain, epsilon, delta and delta_aux from ``policy``, then
    searches for the smallest grid value of s passing the straight-spaced
    hypotheses and of l passing the quadruple hypotheses.  Both reports are
    re-evaluated at the returned values.
    """
    pol = get_policy(policy)
    if morse.c1 < 1:
        raise ValueError(f"the local-to-global solver needs c1 >= 1, got {morse.c1}; relax c1 to 1 first")
    a0 = morse.alpha0
    if not 0 < alpha_out < a0:
        raise ValueError(f"need 0 < alpha_out < alpha0, got alpha_out={alpha_out}, alpha0={a0}")
    alpha_mid = pol.mid_weight * a0 + (1 - pol.mid_weight) * alpha_out
    alpha_int = pol.int_weight * a0 + (1 - pol.int_weight) * alpha_mid

    if pol.wiring == "chain":
        base = straight_params(mc, alpha_mid, alpha_out, pol, s=1.0)
    else:
        base = straight_params(mc, a0, alpha_mid, pol, s=1.0)
    eps, delta = base.epsilon, base.delta
    delta_aux = eps / (pol.delta_aux_divisor * math.pi * mc.kappa0)

    def straight_at(s: float) -> ConditionReport:
        return check_straight_spaced(mc, replace(base, s=s))

    s = _minimal_feasible(
        lambda v: straight_at(v).passed, 2 * delta, pol.s_step, pol.cap, "straight-spaced", straight_at
    )

    def quad_at(l: float) -> ConditionReport:
        k = math.ceil(morse.c1 * (2 * l + morse.c2))
        q = QuadrupleParams(
            alpha0=a0, alpha_int=alpha_int, alpha_out=alpha_mid, D=morse.D, epsilon=eps,
            c1=morse.c1, c2=morse.c2, s=s, l=l, delta_aux=delta_aux, k=k,
        )
        return check_quadruple(mc, q)

    l = _minimal_feasible(
        lambda v: quad_at(v).passed, delta_aux + 2 * morse.D, pol.l_step, pol.cap, "quadruple", quad_at
    )
    k = math.ceil(morse.c1 * (2 * l + morse.c2))

    straight, quad = straight_at(s), quad_at(l)
    if not (straight.passed and quad.passed):
        raise AssertionError("solver returned values that fail re-verification")
    return L2GSolution(
        policy=pol, alpha_out=alpha_out, alpha_mid=alpha_mid, alpha_int=alpha_int,
        epsilon=eps, delta=delta, delta_aux=delta_aux, s=s, l=l, k=k, L=3 * k,
        global_=global_params(k, s, delta, base.alpha_out, mc, morse),
        straight=straight, quadruple=quad,
    )
