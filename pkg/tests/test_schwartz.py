import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from nclab.schwartz import (EUCLIDEAN, MINKOWSKI, GaussianPacket, boundary_limit_probe,
                            fourier, greens_check, kg_annihilation_check, smear_two_point)

from conftest import random_packet
from oracles import radial_smear_at_rest

ETA = np.array([1.0, 0.0, 0.0, 0.0])
T_LIST = (0.04, 0.02, 0.01, 0.005)


def axis_transform_by_quadrature(g, mu, k, sign):
    f = lambda x: g.axis_factor(mu, x) * np.exp(1j * sign * k * x)
    lo, hi = g.center[mu] - 12 * g.width[mu], g.center[mu] + 12 * g.width[mu]
    # near-cancelling oscillatory parts trip QUADPACK's roundoff warning at this tolerance
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re = integrate.quad(lambda x: f(x).real, lo, hi, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
        im = integrate.quad(lambda x: f(x).imag, lo, hi, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
    return complex(re, im)


class TestPacket:
    def test_validation(self):
        with pytest.raises(ValueError):
            GaussianPacket(1.0, width=[1, 1, 0, 1])
        with pytest.raises(ValueError):
            GaussianPacket(1.0, center=[0, 0, 0])

    def test_evaluation(self):
        g = GaussianPacket(2.0, center=[1, 0, 0, 0], width=[1, 1, 1, 1], wave=[0, 1, 0, 0])
        x = np.array([1.0, 0.5, 0.0, 0.0])
        assert g(x) == pytest.approx(2 * math.exp(-0.125) * np.exp(0.5j), rel=1e-15)

    def test_arrays_read_only(self):
        g = GaussianPacket(1.0)
        with pytest.raises(ValueError):
            g.center[0] = 1.0

    def test_integral_of_unit_gaussian(self):
        assert GaussianPacket(1.0).integral() == pytest.approx((2 * math.pi) ** 2, rel=1e-15)

    @pytest.mark.parametrize("convention, signs", [(EUCLIDEAN, (1, 1, 1, 1)), (MINKOWSKI, (-1, 1, 1, 1))])
    def test_transform_matches_axis_quadrature(self, rng, convention, signs):
        for _ in range(3):
            g = random_packet(rng)
            k = rng.normal(size=4)
            expected = g.amplitude * np.prod([axis_transform_by_quadrature(g, mu, k[mu], signs[mu])
                                              for mu in range(4)])
            assert fourier(g, convention)(k) == pytest.approx(expected, rel=1e-11)

    @pytest.mark.parametrize("convention", [EUCLIDEAN, MINKOWSKI])
    def test_round_trip(self, rng, convention):
        g = random_packet(rng)
        back = fourier(fourier(g, convention), convention, inverse=True)
        x = rng.normal(size=(20, 4))
        np.testing.assert_allclose(back(x), g(x), rtol=1e-12, atol=1e-14)

    def test_sum_algebra(self, rng):
        a, b = random_packet(rng), random_packet(rng)
        s = 2.0 * a + b * (1j)
        x = rng.normal(size=(5, 4))
        np.testing.assert_allclose(s(x), 2 * a(x) + 1j * b(x), rtol=1e-14)
        k = rng.normal(size=(5, 4))
        np.testing.assert_allclose(fourier(s)(k), 2 * fourier(a)(k) + 1j * fourier(b)(k), rtol=1e-13)


class TestTwoPointPairing:
    @pytest.mark.parametrize("sigma, sigma0", [(1.0, 1.0), (0.5, 2.0), (2.0, 0.7)])
    def test_at_rest_matches_radial_oracle(self, sigma, sigma0):
        m = 1.3
        g = GaussianPacket(1.0, width=[sigma0, sigma, sigma, sigma], wave=[m, 0, 0, 0])
        expected = (2 * math.pi) ** 2 * sigma0 * sigma ** 3 * radial_smear_at_rest(sigma, sigma0, m)
        assert smear_two_point(g, m).value == pytest.approx(expected, rel=1e-9)

    def test_linearity(self, rng):
        a, b = random_packet(rng), random_packet(rng)
        lhs = smear_two_point(0.5 * a + (2 - 1j) * b, 1.0).value
        rhs = 0.5 * smear_two_point(a, 1.0).value + (2 - 1j) * smear_two_point(b, 1.0).value
        assert lhs == pytest.approx(rhs, rel=1e-8)


class TestBoundaryProbe:
    def test_limit_matches_pairing(self, rng):
        for _ in range(2):
            g = random_packet(rng)
            probe = boundary_limit_probe(g, ETA, T_LIST, 1.0)
            exact = smear_two_point(g, 1.0).value
            assert abs(probe.limit - exact) <= 1e-6 * abs(exact)
            assert probe.order == pytest.approx(1.0, abs=0.1)
            assert probe.limit_error >= 0

    def test_homogeneous_in_t_eta(self, rng):
        g = random_packet(rng)
        a = boundary_limit_probe(g, ETA, (0.04, 0.02), 1.0)
        b = boundary_limit_probe(g, 2 * ETA, (0.02, 0.01), 1.0)
        np.testing.assert_allclose(a.values, b.values, rtol=1e-13)

    def test_tilted_eta(self, rng):
        g = random_packet(rng)
        eta = np.array([1.0, 0.3, -0.2, 0.1])
        probe = boundary_limit_probe(g, eta, T_LIST, 1.0)
        exact = smear_two_point(g, 1.0).value
        assert abs(probe.limit - exact) <= 1e-6 * abs(exact)

    def test_argument_checks(self, rng):
        g = random_packet(rng)
        with pytest.raises(ValueError):
            boundary_limit_probe(g, [1, 1, 0, 0], T_LIST, 1.0)
        with pytest.raises(ValueError):
            boundary_limit_probe(g, ETA, (0.01, 0.02), 1.0)
        with pytest.raises(ValueError):
            boundary_limit_probe(g, ETA, (0.01, 1e-4), 1.0)
        with pytest.raises(ValueError):
            boundary_limit_probe(g, ETA, T_LIST, 0.0)


class TestKleinGordon:
    def test_annihilation(self, rng):
        for _ in range(3):
            check = kg_annihilation_check(random_packet(rng), 1.0)
            assert check.defect <= 1e-8 * check.scale

    def test_wrong_mass_detected(self, rng):
        g = random_packet(rng)
        check = kg_annihilation_check(g, 1.0, operator_mass=2.0)
        expected = 3.0 * abs(smear_two_point(g, 1.0).value)
        assert check.defect == pytest.approx(expected, rel=1e-6)

    def test_packet_sum(self, rng):
        g = random_packet(rng) + random_packet(rng)
        check = kg_annihilation_check(g, 0.7)
        assert check.defect <= 1e-8 * check.scale


class TestGreens:
    def test_identity(self, rng):
        g = random_packet(rng)
        check = greens_check(g, 1.0)
        assert abs(check.momentum_route + check.g0) <= 1e-12 * abs(check.g0)
        assert check.defect <= 1e-4 * abs(check.g0)

    def test_packet_vanishing_at_origin(self):
        c = np.array([0.4, -0.3, 0.2, 0.5])
        w = np.array([0.8, 1.0, 1.2, 0.9])
        g = GaussianPacket(1.0, c, w) + GaussianPacket(-1.0, -c, w)
        check = greens_check(g, 1.0)
        assert abs(check.g0) == 0.0
        assert abs(check.momentum_route) <= 1e-13
        assert abs(check.position_route) <= 1e-4

    def test_massive_operator(self):
        g = GaussianPacket(1.0, [0.2, 0.1, 0, 0], [0.7, 0.7, 0.7, 0.7], [0.5, 0, 0, 0])
        check = greens_check(g, 2.0)
        assert check.defect <= 1e-4 * abs(check.g0)


@given(st.floats(-5, 5), st.floats(0.2, 3), st.floats(-3, 3))
def test_fourier_parseval_single_axis(c, s, q):
    # int |g|^2 dx = (2 pi)^-4 int |g^|^2 dk, separable so one axis suffices
    g = GaussianPacket(1.0, [c, 0, 0, 0], [s, 1, 1, 1], [q, 0, 0, 0])
    gh = fourier(g)
    lhs = np.prod(math.sqrt(math.pi) * g.width)
    rhs = abs(gh.amplitude) ** 2 * np.prod(math.sqrt(math.pi) * gh.width) / (2 * math.pi) ** 4
    assert rhs == pytest.approx(lhs, rel=1e-12)
