"""Matrix perturbation estimates in log-domain arithmetic.

Bounds how far the orbit of a long word moves when every generator of a
linear representation is perturbed in Frobenius norm, and inverts that bound
into an explicit neighborhood radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from anosov_cert.estimates import BoundResult, check
from anosov_cert.l2g import MorseQIParams
from anosov_cert.logscalar import LogScalar, Operand


@dataclass(frozen=True)
class PerturbationScenario:
    d: int
    A: float
    k: int
    eps: LogScalar
    target_disp: float = 0.0

    def __post_init__(self):
        if self.k < 3:
            raise ValueError(f"word radius k must be at least 3, got {self.k}")
        if self.A < 1:
            raise ValueError(f"generator norm bound A must be at least 1, got {self.A}")
        object.__setattr__(self, "eps", LogScalar.coerce(self.eps))


def _word_preconditions(A: float, eps: LogScalar, k: int) -> tuple:
    return (
        check("k >= 3", float(k), ">=", 3.0),
        check("(k-1) eps / (2A) <= 1", LogScalar.from_float((k - 1) / (2 * A)) * eps, "<=", 1.0),
    )


def word_perturbation_bound(A: float, eps: Operand, k: int) -> BoundResult:
    """|w' - w| <= 2 k A^(k-1) eps for a product of k generators each moved by at most eps."""
    eps = LogScalar.coerce(eps)
    value = LogScalar.from_float(2 * k) * LogScalar.from_float(A) ** (k - 1) * eps
    return BoundResult(value, _word_preconditions(A, eps, k))


def frob_to_distance(d: int, frob_diff: Operand) -> LogScalar:
    """Bound on d(gp, p) from the Frobenius distance |g - 1| at p = identity.

    The Killing-form norm at the identity is sqrt(2d) times the Frobenius
    norm, so the factor is sqrt(d) (d - 1) sqrt(2d).
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    return LogScalar.from_float(math.sqrt(d) * (d - 1) * math.sqrt(2 * d)) * LogScalar.coerce(frob_diff)


def _orbit_factor(d: int, A: float, k: int) -> LogScalar:
    return LogScalar.from_float(math.sqrt(8) * d * (d - 1) * k) * LogScalar.from_float(A) ** (2 * k - 1)


def orbit_displacement_bound_checked(sc: PerturbationScenario) -> BoundResult:
    """sqrt(8) d (d-1) k A^(2k-1) eps, with the long-word hypotheses attached."""
    return BoundResult(_orbit_factor(sc.d, sc.A, sc.k) * sc.eps, _word_preconditions(sc.A, sc.eps, sc.k))


def orbit_displacement_bound(sc: PerturbationScenario) -> LogScalar:
    """Largest orbit displacement d(rho'(w)p, rho(w)p) over words of length <= k.

    Raises when the long-word hypotheses fail, since the bound is then void.
    """
    res = orbit_displacement_bound_checked(sc)
    if not res.ok:
        failed = ", ".join(c.name for c in res.preconditions if not c.passed)
        raise ValueError(f"perturbation hypotheses fail: {failed}")
    return res.value


def neighborhood_radius(d: int, A: float, k: int, target_disp: float) -> LogScalar:
    """Largest generator perturbation eps whose orbit displacement bound equals ``target_disp``."""
    if k < 3:
        raise ValueError("word radius k must be at least 3")
    if target_disp <= 0:
        raise ValueError("target displacement must be positive")
    eps = LogScalar.from_float(target_disp) / _orbit_factor(d, A, k)
    sc = PerturbationScenario(d=d, A=A, k=k, eps=eps, target_disp=target_disp)
    res = orbit_displacement_bound_checked(sc)
    if not res.ok:
        raise AssertionError("long-word hypotheses fail at the computed radius")
    return eps


def generator_frob_bound(d: int, two_R_plus_1: float) -> float:
    """The bound exp((2R+1)/sqrt(2d)) on |g|_Fr for g with d(p, gp) <= 2R+1.

    This is exp of the largest possible operator-norm exponent; it is not a
    Frobenius bound near the identity (|I|_Fr = sqrt(d)), so callers compare
    it against the actual norms of their generators.
    """
    if d < 2 or two_R_plus_1 < 0:
        raise ValueError("need d >= 2 and a nonnegative radius")
    return math.exp(two_R_plus_1 / math.sqrt(2 * d))


def local_morse_transfer(base: MorseQIParams, eps_disp: float, k_w: int) -> tuple[int, MorseQIParams]:
    """Local Morse constants of a perturbation moving every k_w-ball orbit point by <= eps_disp.

    Returns the locality scale 2 k_w and (alpha0, D + eps, c1, c2 + eps, c3, c4 + eps).
    """
    if eps_disp < 0:
        raise ValueError("displacement must be nonnegative")
    if k_w < 1:
        raise ValueError("word radius must be positive")
    relaxed = MorseQIParams(
        alpha0=base.alpha0,
        D=base.D + eps_disp,
        c1=base.c1,
        c2=base.c2 + eps_disp,
        c3=base.c3,
        c4=base.c4 + eps_disp,
    )
    return 2 * k_w, relaxed
