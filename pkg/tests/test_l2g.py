import dataclasses
import math

import mpmath as mp
import pytest

from anosov_cert.l2g import (
    POLICIES,
    AuxPolicy,
    InfeasibleError,
    MorseQIParams,
    QuadrupleParams,
    StraightSpacedParams,
    check_quadruple,
    check_straight_spaced,
    get_policy,
    global_params,
    solve_local_scale,
    word_radius_for_scale,
)
from anosov_cert.symspace import model_constants

MC = model_constants(3)
Z0, K0 = MC.zeta0, MC.kappa0

# The published free-group pipeline, with the auxiliary values at their exact
# derived settings (the 7-digit delta sits 1.9e-9 below 5 eps / zeta0).
ALPHA_OUT = 0.95 * Z0
ALPHA_MID = 0.5 * Z0 + 0.5 * ALPHA_OUT
ALPHA_INT = 0.8 * Z0 + 0.2 * ALPHA_MID
EPS = Z0**2 / (10 * K0**2)
DELTA = Z0 / (2 * K0**2)
DELTA_AUX = EPS / (20 * math.pi * K0)
FREE_MORSE = MorseQIParams(alpha0=Z0, D=3.28, c1=1, c2=0.1, c3=3.38, c4=0.1)
SURFACE_MORSE = MorseQIParams(alpha0=Z0, D=173, c1=1, c2=11, c3=9.5, c4=10)

# 40-digit mpmath evaluation of the five-term straightness sum at the instance.
Q5_SUM = 0.007862120762857853


def straight(**kw):
    base = dict(alpha_in=ALPHA_MID, alpha_out=ALPHA_OUT, delta=DELTA, epsilon=EPS, s=255.0)
    base.update(kw)
    return StraightSpacedParams(**base)


def quad(**kw):
    base = dict(
        alpha0=Z0, alpha_int=ALPHA_INT, alpha_out=ALPHA_MID, D=3.28, epsilon=EPS,
        c1=1.0, c2=0.1, s=255.0, l=5600.45, delta_aux=DELTA_AUX, k=11201,
    )
    base.update(kw)
    return QuadrupleParams(**base)


def test_derived_values_match_rounded_literals():
    assert ALPHA_MID == pytest.approx(0.2814583, abs=1e-7)
    assert ALPHA_INT == pytest.approx(0.287235, abs=5e-6)
    assert EPS == pytest.approx(0.025, abs=1e-15)
    assert DELTA == pytest.approx(0.4330127, abs=1e-7)
    assert DELTA_AUX == pytest.approx(0.000688663, abs=1e-6)


class TestParams:
    def test_morse_validation(self):
        with pytest.raises(ValueError):
            MorseQIParams(alpha0=0.2, D=1, c1=0.5, c2=0, c3=1.5, c4=0)
        with pytest.raises(ValueError):
            MorseQIParams(alpha0=0.2, D=1, c1=0.0, c2=0, c3=1, c4=0)
        MorseQIParams(alpha0=0.2, D=1, c1=1 / 1.28, c2=0, c3=3.38, c4=0)
        with pytest.raises(ValueError):
            MorseQIParams(alpha0=0.2, D=1, c1=1, c2=0, c3=0.5, c4=0)

    def test_straight_validation(self):
        with pytest.raises(ValueError):
            straight(alpha_out=ALPHA_MID)

    def test_quadruple_validation(self):
        with pytest.raises(ValueError):
            quad(alpha_int=Z0)


class TestStraightSpaced:
    def test_pipeline_instance_passes(self):
        rep = check_straight_spaced(MC, straight())
        assert rep.passed, rep.failed()
        assert all(c.margin >= 0 for c in rep.conditions)

    def test_spec_literal_instance(self):
        rep = check_straight_spaced(MC, straight(alpha_in=0.2815, alpha_out=0.27424))
        assert rep.passed

    def test_rounded_delta_fails_only_condition_3(self):
        rep = check_straight_spaced(MC, straight(delta=0.4330127))
        assert [c.name for c in rep.failed()] == ["3 parallel-set proximity"]
        assert rep.failed()[0].margin == pytest.approx(-1.9e-9, abs=1e-10)

    def test_small_spacing_fails_condition_4(self):
        rep = check_straight_spaced(MC, straight(alpha_in=0.2815, alpha_out=0.27424, s=50))
        failed = {c.name: c for c in rep.failed()}
        assert "4 projected regularity" in failed
        assert failed["4 projected regularity"].lhs == pytest.approx(0.26636, abs=1e-5)

    def test_degenerate_epsilon(self):
        rep = check_straight_spaced(MC, straight(epsilon=0.0))
        assert rep.degenerate
        names = {c.name: c.passed for c in rep.conditions}
        assert names["1 angle-to-distance"] and names["2 distance-to-angle"] and names["3 parallel-set proximity"]

    def test_rejects_tight_spacing(self):
        with pytest.raises(ValueError):
            check_straight_spaced(MC, straight(s=2 * DELTA))

    def test_spacing_constant(self):
        rep = check_straight_spaced(MC, straight())
        assert rep.extras["spacing_constant"] == pytest.approx(2 * ALPHA_OUT * Z0 * 3 * (255 - 2 * DELTA))

    def test_monotone_in_s(self):
        verdicts = [check_straight_spaced(MC, straight(s=s)).passed for s in range(2, 400, 3)]
        first = verdicts.index(True)
        assert all(verdicts[first:])


class TestQuadruple:
    def test_pipeline_instance_passes(self):
        rep = check_quadruple(MC, quad())
        assert rep.passed, rep.failed()
        assert all(c.margin >= 0 for c in rep.conditions)
        c5 = rep.conditions[-1]
        assert c5.lhs == pytest.approx(Q5_SUM, rel=1e-12)
        assert c5.rhs == pytest.approx(0.0079577, abs=1e-7)

    def test_q5_oracle(self):
        mp.mp.dps = 40
        k0, z0 = 1 / mp.sqrt(3), 1 / (2 * mp.sqrt(3))
        ao = mp.mpf("0.95") * z0
        am = (z0 + ao) / 2
        ai = mp.mpf("0.8") * z0 + mp.mpf("0.2") * am
        dl = (z0**2 / (10 * k0**2)) / (20 * mp.pi * k0)
        D, l = mp.mpf("3.28"), mp.mpf("5600.45")
        total = (
            D / (ai * z0 * l)
            + k0 * dl / (am * z0 * (2 * ai * (l - dl - D) - dl * k0))
            + dl / (2 * ai * z0 * (l - D))
            + dl / (2 * am * z0 * (l - dl))
            + 2 * k0 * dl
        )
        assert float(total) == pytest.approx(Q5_SUM, rel=1e-14)

    def test_short_l_fails_condition_5(self):
        rep = check_quadruple(MC, quad(l=1000, k=2001, alpha_int=0.287235, alpha_out=0.2815))
        failed = [c.name for c in rep.failed()]
        assert "5 straightness" in failed
        assert rep.extras["straightness_terms"][0] == pytest.approx(0.03957, abs=5e-5)

    def test_k_condition(self):
        rep = check_quadruple(MC, quad(k=11200))
        assert [c.name for c in rep.failed()] == ["1 k from l"]

    def test_degenerate(self):
        rep = check_quadruple(MC, quad(D=0.0, delta_aux=0.0))
        assert rep.degenerate
        names = {c.name: c.passed for c in rep.conditions}
        assert names["2c diamond proximity"] and names["5 straightness"]

    def test_degenerate_denominator_reported_as_failure(self):
        rep = check_quadruple(MC, quad(l=5.0, k=11))
        assert not rep.passed

    def test_monotone_in_l(self):
        verdicts = []
        for l in range(1000, 9000, 250):
            verdicts.append(check_quadruple(MC, quad(l=l, k=math.ceil(2 * l + 0.1))).passed)
        first = verdicts.index(True)
        assert all(verdicts[first:])


class TestGlobalParams:
    def test_published_instance(self):
        g = global_params(11201, 255, 0.4330127, ALPHA_OUT, MC, FREE_MORSE)
        assert g.D_prime == pytest.approx(3.38 * 11201 + 0.15 + 0.4330127, rel=1e-15)
        assert g.D_prime == pytest.approx(37860, abs=3)
        assert g.c2_prime == pytest.approx(75841, abs=10)
        assert g.c3_prime == pytest.approx(3.38 + 0.1 / 33603)
        assert g.c4_prime == 0.1
        assert 1 / g.c1_prime == pytest.approx(2 * ALPHA_OUT * Z0 * 3 * (255 - 2 * 0.4330127) / 11201)

    def test_c4_zero(self):
        m = dataclasses.replace(FREE_MORSE, c4=0.0)
        assert global_params(100, 255, DELTA, ALPHA_OUT, MC, m).c3_prime == m.c3

    def test_linear_in_k(self):
        a = global_params(1000, 255, DELTA, ALPHA_OUT, MC, FREE_MORSE)
        b = global_params(2000, 255, DELTA, ALPHA_OUT, MC, FREE_MORSE)
        offset = 1.5 * 0.1 + DELTA
        assert b.D_prime - offset == pytest.approx(2 * (a.D_prime - offset), rel=1e-14)


class TestSolver:
    def test_free_group_inputs(self):
        sol = solve_local_scale(MC, FREE_MORSE, ALPHA_OUT)
        assert sol.L == 3 * sol.k
        assert sol.L <= 33602 and sol.k <= 11201
        assert sol.global_.D_prime <= 37859
        assert sol.straight.passed and sol.quadruple.passed
        assert all(c.margin >= 0 for c in sol.condition_report)
        assert sol.k == math.ceil(FREE_MORSE.c1 * (2 * sol.l + FREE_MORSE.c2))

    def test_surface_inputs(self):
        sol = solve_local_scale(MC, SURFACE_MORSE, Z0 / 2)
        assert sol.L <= 2.2e6
        assert sol.global_.D_prime <= 6.8e6

    def test_grid_and_minimality(self):
        sol = solve_local_scale(MC, FREE_MORSE, ALPHA_OUT)
        assert round(sol.s / 0.01) * 0.01 == pytest.approx(sol.s)
        assert round(sol.l / 0.25) * 0.25 == pytest.approx(sol.l)
        assert not check_straight_spaced(MC, straight(alpha_in=sol.alpha_mid, s=sol.s - 0.01)).passed

    def test_determinism(self):
        a = solve_local_scale(MC, FREE_MORSE, ALPHA_OUT)
        b = solve_local_scale(MC, FREE_MORSE, ALPHA_OUT)
        assert a.to_json() == b.to_json()

    def test_monotone_in_D_and_c2(self):
        ks = [solve_local_scale(MC, dataclasses.replace(FREE_MORSE, D=D), ALPHA_OUT).k for D in (1, 3.28, 10, 40)]
        assert ks == sorted(ks)
        ks = [solve_local_scale(MC, dataclasses.replace(FREE_MORSE, c2=c2), ALPHA_OUT).k for c2 in (0, 0.1, 5, 50)]
        assert ks == sorted(ks)

    def test_solver_needs_c1_at_least_one(self):
        with pytest.raises(ValueError, match="c1"):
            solve_local_scale(MC, dataclasses.replace(FREE_MORSE, c1=1 / 1.28), ALPHA_OUT)

    def test_empty_alpha_chain(self):
        with pytest.raises(ValueError):
            solve_local_scale(MC, FREE_MORSE, Z0)

    def test_infeasible_reports_blocking_condition(self):
        bad = AuxPolicy("wide-eps", epsilon_factor=0.2)
        with pytest.raises(InfeasibleError) as err:
            solve_local_scale(MC, FREE_MORSE, ALPHA_OUT, bad)
        assert err.value.stage == "straight-spaced"
        assert "1 angle-to-distance" in [c.name for c in err.value.blocking]

    def test_policies(self):
        assert set(POLICIES) == {"default", "paper-5.2"}
        a = solve_local_scale(MC, FREE_MORSE, ALPHA_OUT, "default")
        b = solve_local_scale(MC, FREE_MORSE, ALPHA_OUT, "paper-5.2")
        assert a.policy.wiring == "chain" and b.policy.wiring == "literal"
        assert (a.alpha_mid, a.alpha_int, a.epsilon, a.delta) == (b.alpha_mid, b.alpha_int, b.epsilon, b.delta)
        # Same alpha chain, different roles in the straight-spaced check.
        assert a.straight.conditions != b.straight.conditions and a.s != b.s
        assert b.L <= 33602 and b.straight.passed and b.quadruple.passed
        assert b.to_json()["policy"]["name"] == "paper-5.2"
        with pytest.raises(ValueError):
            get_policy("nope")
        with pytest.raises(ValueError):
            AuxPolicy("x", wiring="sideways")

    def test_literal_wiring_checks_alpha0_to_alpha_mid(self):
        b = solve_local_scale(MC, FREE_MORSE, ALPHA_OUT, "paper-5.2")
        assert check_straight_spaced(MC, straight(alpha_in=Z0, alpha_out=ALPHA_MID, s=b.s)).passed
        assert not check_straight_spaced(MC, straight(alpha_in=Z0, alpha_out=ALPHA_MID, s=b.s - 0.01)).passed
        assert b.global_ == global_params(b.k, b.s, DELTA, ALPHA_MID, MC, FREE_MORSE)

    def test_word_radius(self):
        assert word_radius_for_scale(33602) == 16801
        assert word_radius_for_scale(33603) == 16802
        sol = solve_local_scale(MC, FREE_MORSE, ALPHA_OUT)
        assert 2 * sol.word_radius >= sol.L
