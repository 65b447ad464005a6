import math

import mpmath as mp
import pytest

from anosov_cert.l2g import MorseQIParams
from anosov_cert.logscalar import LogScalar
from anosov_cert.perturb import (
    PerturbationScenario,
    frob_to_distance,
    generator_frob_bound,
    local_morse_transfer,
    neighborhood_radius,
    orbit_displacement_bound,
    orbit_displacement_bound_checked,
    word_perturbation_bound,
)

A_FREE = 2.8536
A_SURFACE = 47.987


def mp_orbit_log10(d, A, k, log10_eps):
    mp.mp.dps = 40
    return float(mp.log10(mp.sqrt(8) * d * (d - 1) * k) + (2 * k - 1) * mp.log10(mp.mpf(A)) + log10_eps)


def scenario(A, k, log10_eps, d=3):
    return PerturbationScenario(d=d, A=A, k=k, eps=LogScalar.from_log10(log10_eps))


class TestWordBound:
    def test_small(self):
        res = word_perturbation_bound(2, 0.001, 3)
        assert res.ok
        assert res.value.to_float() == pytest.approx(0.024, rel=1e-12)
        assert res.preconditions[1].lhs.to_float() == pytest.approx(0.0005, rel=1e-12)

    def test_zero(self):
        assert word_perturbation_bound(2, 0.0, 3).value.is_zero

    def test_long_free_word(self):
        res = word_perturbation_bound(A_FREE, LogScalar.from_log10(-15309), 16801)
        assert res.ok
        mp.mp.dps = 40
        want = mp.log10(2 * 16801) + 16800 * mp.log10(mp.mpf(A_FREE)) - 15309
        assert res.value.log10() == pytest.approx(float(want), abs=1e-8)

    def test_preconditions(self):
        assert not word_perturbation_bound(2, 0.001, 2).ok
        assert not word_perturbation_bound(1.0, 1.0, 10).ok


class TestFrobToDistance:
    def test_values(self):
        assert frob_to_distance(3, 1.0).to_float() == pytest.approx(2 * math.sqrt(18), rel=1e-14)
        assert frob_to_distance(3, 1.0).to_float() == pytest.approx(8.4853, abs=1e-4)
        assert frob_to_distance(2, 1.0).to_float() == pytest.approx(2.8284, abs=1e-4)
        assert frob_to_distance(3, 0.0).is_zero
        with pytest.raises(ValueError):
            frob_to_distance(1, 1.0)


class TestOrbitBound:
    def test_free_published_radius(self):
        value = orbit_displacement_bound(scenario(A_FREE, 16801, -15309))
        assert value.log10() == pytest.approx(mp_orbit_log10(3, A_FREE, 16801, -15309), abs=1e-8)
        assert value <= 0.1

    def test_surface_published_radius_with_exact_A(self):
        A = generator_frob_bound(3, 2 * (math.sqrt(3) * math.acosh(1 / math.tan(math.pi / 8) ** 2)) + 1)
        value = orbit_displacement_bound(scenario(A, 1_100_000, -3698433))
        assert value <= 10
        assert value.log10() == pytest.approx(mp_orbit_log10(3, A, 1_100_000, -3698433), abs=1e-6)

    def test_surface_published_radius_with_rounded_A(self):
        # A rounded up to 47.987 costs 2.2e6 * log10(47.987/47.9847) ~ 47 decades
        value = orbit_displacement_bound(scenario(A_SURFACE, 1_100_000, -3698433))
        assert value.log10() == pytest.approx(mp_orbit_log10(3, A_SURFACE, 1_100_000, -3698433), abs=1e-6)
        assert value.log10() == pytest.approx(44.51, abs=0.01)

    def test_zero(self):
        sc = PerturbationScenario(d=3, A=A_FREE, k=10, eps=LogScalar.zero())
        assert orbit_displacement_bound(sc).is_zero

    def test_failed_hypotheses_raise(self):
        sc = PerturbationScenario(d=3, A=1.0, k=10, eps=LogScalar.from_float(1.0))
        assert not orbit_displacement_bound_checked(sc).ok
        with pytest.raises(ValueError):
            orbit_displacement_bound(sc)

    def test_scenario_validation(self):
        with pytest.raises(ValueError):
            PerturbationScenario(d=3, A=2.0, k=2, eps=LogScalar.from_float(1e-9))
        with pytest.raises(ValueError):
            PerturbationScenario(d=3, A=0.5, k=5, eps=LogScalar.from_float(1e-9))

    def test_monotone(self):
        base = orbit_displacement_bound(scenario(3.0, 100, -80))
        assert orbit_displacement_bound(scenario(3.1, 100, -80)) > base
        assert orbit_displacement_bound(scenario(3.0, 101, -80)) > base
        assert orbit_displacement_bound(scenario(3.0, 100, -79.9)) > base


class TestNeighborhoodRadius:
    def test_free(self):
        eps = neighborhood_radius(3, A_FREE, 16801, 0.1)
        assert eps.log10() == pytest.approx(-1 - mp_orbit_log10(3, A_FREE, 16801, 0), abs=1e-8)
        assert eps.log10() >= -15309

    def test_surface(self):
        eps = neighborhood_radius(3, A_SURFACE, 1_100_000, 10)
        assert eps.log10() == pytest.approx(1 - mp_orbit_log10(3, A_SURFACE, 1_100_000, 0), abs=1e-6)
        assert eps.log10() == pytest.approx(-3698476.51, abs=0.01)

    def test_doubling_target(self):
        a = neighborhood_radius(3, A_FREE, 500, 0.1)
        b = neighborhood_radius(3, A_FREE, 500, 0.2)
        assert b.log10() - a.log10() == pytest.approx(math.log10(2), abs=1e-12)

    @pytest.mark.parametrize(
        "A,k,target", [(A_FREE, 16801, 0.1), (A_SURFACE, 1_100_000, 10.0), (5.0, 3, 1.0), (48.3, 915387, 10.0)]
    )
    def test_round_trip(self, A, k, target):
        eps = neighborhood_radius(3, A, k, target)
        back = orbit_displacement_bound(PerturbationScenario(d=3, A=A, k=k, eps=eps))
        # exact up to the last bit of the exponent
        assert abs(back.log10() - math.log10(target)) <= 1e-12 * max(1.0, abs(eps.log10()))

    def test_validation(self):
        with pytest.raises(ValueError):
            neighborhood_radius(3, A_FREE, 2, 0.1)
        with pytest.raises(ValueError):
            neighborhood_radius(3, A_FREE, 10, 0.0)


class TestGeneratorBound:
    def test_values(self):
        assert generator_frob_bound(3, 9.5) == pytest.approx(48.3448, abs=1e-4)
        assert generator_frob_bound(3, 9.481688078589611) == pytest.approx(47.9847, abs=1e-4)
        assert generator_frob_bound(5, 0.0) == 1.0

    def test_holds_on_the_published_generating_sets(self):
        import numpy as np

        from anosov_cert.groups import ball_generating_set, displacement, free_group_generators, surface_group_model

        for g in free_group_generators(0.75).generators:
            e = g.element.entries
            assert np.linalg.norm(e) <= generator_frob_bound(3, displacement(e))
        ball = ball_generating_set(surface_group_model(), 9.5)
        assert ball.max_frobenius() <= generator_frob_bound(3, 9.5)

    def test_not_a_bound_near_the_identity(self):
        # |I|_Fr = sqrt(d) while the formula gives 1, so callers must confirm
        # the bound against direct norms
        import numpy as np

        assert np.linalg.norm(np.eye(3)) > generator_frob_bound(3, 0.0)


class TestTransfer:
    def test_identity(self):
        base = MorseQIParams(alpha0=0.3, D=3.18, c1=1, c2=0, c3=3.38, c4=0)
        scale, p = local_morse_transfer(base, 0.0, 16801)
        assert scale == 33602 and p == base

    def test_free_relaxation(self):
        base = MorseQIParams(alpha0=0.2886751, D=3.18, c1=1, c2=0, c3=3.38, c4=0)
        scale, p = local_morse_transfer(base, 0.1, 16801)
        assert scale == 33602
        assert (p.D, p.c1, p.c2, p.c3, p.c4) == pytest.approx((3.28, 1, 0.1, 3.38, 0.1))

    def test_surface_relaxation(self):
        base = MorseQIParams(alpha0=1 / (2 * math.sqrt(3)), D=163, c1=1, c2=1, c3=9.5, c4=0)
        scale, p = local_morse_transfer(base, 10, 1_100_000)
        assert scale == 2_200_000
        assert (p.D, p.c2, p.c4) == (173, 11, 10)

    def test_validation(self):
        base = MorseQIParams(alpha0=0.3, D=3.18, c1=1, c2=0, c3=3.38, c4=0)
        with pytest.raises(ValueError):
            local_morse_transfer(base, -1, 5)
        with pytest.raises(ValueError):
            local_morse_transfer(base, 1, 0)
