import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from nclab.core import FourVector, ThetaMatrix, theta_standard
from nclab.kernels import TwistKind, schwinger2_theta_ft
from nclab.loops import (ScanGrid, bubble_p4_reduced, gaussian_regulator_bias, offshell_p4_integral,
                         richardson_cutoff, tadpole_closed_form, tadpole_extrapolated,
                         tadpole_offshell_convolution, tadpole_one_propagator, tadpole_onshell_convolution,
                         tadpole_onshell_one_propagator, uvir_scan)
from nclab.quadrature import Box, QuadratureSpec, integrate_nd

from oracles import p4_bubble, p4_twisted, tadpole_gaussian, tadpole_limit

THETA = theta_standard(1.0, 1.0)
ZERO = ThetaMatrix(np.zeros((4, 4)))

# Gaussian-regulated tadpole at cutoff 40, m = 1 (proper-time oracle, 30 digits)
REGULATED_40 = {0.5: 130.869116187606964, 1.0: 23.7772011004790833, 2.0: 2.76256791096989037}
LIMITS = {0.5: 130.787348545039719, 1.0: 23.7623449928085282, 2.0: 2.76084184547718769}


def along_x4(r):
    return FourVector.euclidean(0, 0, 0, r)


class TestTadpole:
    @pytest.mark.parametrize("r", sorted(LIMITS))
    def test_closed_form(self, r):
        assert tadpole_closed_form(along_x4(r), 1.0) == pytest.approx(LIMITS[r], rel=1e-14)
        assert tadpole_closed_form(along_x4(r), 1.0) == pytest.approx(tadpole_limit(r, 1.0), rel=1e-14)

    @pytest.mark.parametrize("r", sorted(REGULATED_40))
    def test_gaussian_matches_proper_time_oracle(self, r):
        res = tadpole_one_propagator(along_x4(r), 1.0, 40.0)
        assert res.converged and not res.divergent
        assert res.value == pytest.approx(tadpole_gaussian(r, 1.0, 40.0), rel=1e-8)
        assert res.value == pytest.approx(REGULATED_40[r], rel=1e-9)

    def test_direction_independent(self):
        a = tadpole_one_propagator(FourVector.euclidean(0.6, 0, 0.8, 0), 1.0, 20.0).value
        b = tadpole_one_propagator(along_x4(1.0), 1.0, 20.0).value
        assert a == pytest.approx(b, rel=1e-12)

    @pytest.mark.parametrize("r", sorted(LIMITS))
    def test_regulator_bias_is_m_over_cutoff_squared(self, r):
        # the Gaussian regulator sits m^2/L^2 above the limit, 6.25e-4 at L = 40
        dev = REGULATED_40[r] / LIMITS[r] - 1
        assert dev == pytest.approx(gaussian_regulator_bias(along_x4(r), 1.0, 40.0), rel=0.05)

    @pytest.mark.parametrize("r", sorted(LIMITS))
    def test_extrapolation(self, r):
        limit, err = tadpole_extrapolated(along_x4(r), 1.0, (20.0, 40.0, 80.0, 160.0))
        assert abs(limit - LIMITS[r]) <= 1e-8 * LIMITS[r]
        assert err <= 1e-6 * LIMITS[r]

    def test_sharp_zero_shift(self):
        res = tadpole_one_propagator(along_x4(0.0), 1.0, 10.0, regulator="sharp")
        assert res.divergent
        assert res.value == pytest.approx(math.pi ** 2 * (100 - math.log(101)), rel=1e-10)
        assert res.value == pytest.approx(941.411026344361572, rel=1e-10)

    def test_zero_shift_grows_quadratically(self):
        v = [tadpole_one_propagator(along_x4(0.0), 1.0, c, "sharp").value for c in (100.0, 200.0)]
        assert v[1] / v[0] == pytest.approx(4.0, rel=2e-3)

    def test_sharp_regulator_against_truncated_integral(self):
        # the sharp cutoff leaves an oscillating tail of size ~ L^{-1/2}, so compare at fixed L
        L, r = 40.0, 1.0
        from scipy import special
        direct = integrate.quad(lambda p: p * p * special.j1(p * r) / (p * p + 1), 0, L,
                                epsabs=0, epsrel=1e-12, limit=500)[0] * 4 * math.pi ** 2 / r
        res = tadpole_one_propagator(along_x4(r), 1.0, L, regulator="sharp")
        assert res.value == pytest.approx(direct, rel=1e-9)

    def test_small_shift_exponent(self):
        rs = np.array([0.05, 0.1, 0.2])
        vals = [tadpole_extrapolated(along_x4(r), 1.0, (80.0, 160.0, 320.0))[0] for r in rs]
        fit = stats.linregress(np.log(rs), np.log(vals))
        assert fit.slope == pytest.approx(-2.0, abs=0.2)

    def test_cutoff_below_mass_rejected(self):
        with pytest.raises(ValueError):
            tadpole_one_propagator(along_x4(1.0), 2.0, 1.5)
        with pytest.raises(ValueError):
            tadpole_one_propagator(FourVector.minkowski(0, 0, 0, 1.0), 1.0, 10.0)

    def test_richardson_on_known_series(self):
        cs = [5.0, 10.0, 20.0]
        vals = [3.0 + 2 / c ** 2 - 7 / c ** 4 for c in cs]
        limit, err = richardson_cutoff(cs, vals)
        assert limit == pytest.approx(3.0, abs=1e-12)
        with pytest.raises(ValueError):
            richardson_cutoff([10.0], [1.0])


class TestP4Integrals:
    def test_rest_value(self):
        assert bubble_p4_reduced(np.zeros(3), 0.0, np.zeros(3), 1.0) == pytest.approx(math.pi / 2, rel=1e-15)

    def test_against_quadrature(self, rng):
        for _ in range(100):
            kvec, pvec = rng.normal(size=(2, 3)) * 2
            k4 = rng.normal() * 2
            m = rng.uniform(0.3, 3)
            A = math.sqrt(pvec @ pvec + m * m)
            B = math.sqrt((kvec - pvec) @ (kvec - pvec) + m * m)
            assert bubble_p4_reduced(kvec, k4, pvec, m) == pytest.approx(p4_bubble(k4, A, B), rel=1e-8)

    @given(st.lists(st.floats(-10, 10), min_size=6, max_size=6))
    def test_swap_symmetry(self, c):
        kvec, pvec = np.array(c[:3]), np.array(c[3:])
        a = bubble_p4_reduced(kvec, 0.0, pvec, 1.0)
        b = bubble_p4_reduced(kvec, 0.0, kvec - pvec, 1.0)
        assert a == pytest.approx(b, rel=1e-14)

    def test_vectorised(self, rng):
        p = rng.normal(size=(7, 3))
        vals = bubble_p4_reduced(np.ones(3), 0.5, p, 1.0)
        assert vals.shape == (7,)
        assert vals[3] == bubble_p4_reduced(np.ones(3), 0.5, p[3], 1.0)

    def test_twisted_against_fourier_quadrature(self, rng):
        for _ in range(30):
            u, k4 = rng.normal(size=2) * 2
            A, B = rng.uniform(0.5, 3, size=2)
            assert offshell_p4_integral(u, k4, A, B) == pytest.approx(p4_twisted(u, k4, A, B), rel=1e-6, abs=1e-9)

    def test_twisted_high_precision_point(self):
        u, k4, A, B = 1.3, 0.7, 1.1, 1.6
        mpmath.mp.dps = 30
        try:
            ref = mpmath.quadosc(lambda p: mpmath.exp(-1j * p * u) / ((p * p + A * A) * ((k4 - p) ** 2 + B * B)),
                                 [-mpmath.inf, mpmath.inf], omega=u)
        finally:
            mpmath.mp.dps = 15
        assert abs(offshell_p4_integral(u, k4, A, B) - complex(ref)) <= 1e-14

    def test_twisted_zero_phase_and_reflection(self):
        assert offshell_p4_integral(0.0, 0.4, 1.2, 1.5) == pytest.approx(p4_bubble(0.4, 1.2, 1.5), rel=1e-13)
        a = offshell_p4_integral(-0.8, 0.4, 1.2, 1.5)
        b = offshell_p4_integral(0.8, -0.4, 1.2, 1.5)
        assert a == b

    def test_coincident_poles_continuous(self):
        # k4 = 0, A = B merges the two poles; the Taylor branch must join smoothly
        u = 0.9
        at = offshell_p4_integral(u, 0.0, 1.0, 1.0)
        near = offshell_p4_integral(u, 0.0, 1.0, 1.0 + 1e-2)
        assert at == pytest.approx(p4_twisted(u, 0.0, 1.0, 1.0), rel=1e-6)
        assert near == pytest.approx(p4_twisted(u, 0.0, 1.0, 1.0 + 1e-2), rel=1e-6)
        for eps in (1e-5, 1e-4, 2e-3):
            assert offshell_p4_integral(u, 0.0, 1.0, 1.0 + eps) == pytest.approx(
                p4_twisted(u, 0.0, 1.0, 1.0 + eps), rel=1e-6)


class TestConvolutions:
    def test_zero_theta_routes_agree(self):
        k = [0.3, 0.5, -0.2, 0.1]
        a = tadpole_onshell_convolution(k, ZERO, 1.0, 10.0)
        b = tadpole_offshell_convolution(k, ZERO, 1.0, 10.0)
        assert abs(a.value - b.value) <= a.error + b.error + 1e-12 * abs(a.value)

    def test_untwisted_radial_oracle(self):
        L = 10.0
        radial = integrate.quad(lambda p: 4 * math.pi * p * p * math.pi / (2 * (p * p + 1) ** 1.5)
                                * math.exp(-(p / L) ** 2), 0, np.inf, epsabs=0, epsrel=1e-12)[0]
        res = tadpole_onshell_convolution(np.zeros(4), ZERO, 1.0, L)
        assert res.value.real == pytest.approx(radial, rel=1e-4)

    def test_untwisted_grows_logarithmically(self):
        vals = [tadpole_offshell_convolution(np.zeros(4), ZERO, 1.0, c).value.real for c in (20.0, 40.0)]
        slope = (vals[1] - vals[0]) / math.log(2)
        assert slope == pytest.approx(2 * math.pi ** 2, rel=0.1)

    def test_offshell_plateau_at_nonzero_momentum(self):
        k = [0.0, 1.0, 0.0, 0.0]
        vals = [tadpole_offshell_convolution(k, THETA, 1.0, c).value.real for c in (20.0, 40.0)]
        slope = (vals[1] - vals[0]) / math.log(2)
        assert abs(slope) <= 0.05 * 2 * math.pi ** 2

    def test_offshell_zero_momentum_is_untwisted(self):
        a = tadpole_offshell_convolution(np.zeros(4), THETA, 1.0, 10.0).value
        b = tadpole_offshell_convolution(np.zeros(4), ZERO, 1.0, 10.0).value
        assert a == b

    def test_onshell_real_at_zero_spatial_momentum(self):
        # the phase is odd in p1, so the imaginary part integrates to zero
        res = tadpole_onshell_convolution([0.7, 0, 0, 0], theta_standard(0.3, 0.0), 1.0, 3.0,
                                          QuadratureSpec(rel_tol=1e-6, max_evals=4e6))
        assert abs(res.value.imag) <= 10 * res.error + 1e-8 * abs(res.value)

    @pytest.mark.parametrize("k4", [0.0, 1.5])
    def test_onshell_matches_four_dimensional_kernel(self, k4):
        # integrate the twisted two-propagator kernel over all four components directly;
        # agreement confirms the closed-form p4 step, legitimate because the phase has no p4
        theta, L, m = theta_standard(0.3, 0.2), 2.0, 1.0
        k = np.array([k4, 0.4, -0.3, 0.2])
        tw = TwistKind.on_shell(theta)

        def f(y):
            t, pv = y[:, 0], y[:, 1:]
            p4 = np.tan(t)
            p = np.column_stack([p4, pv])
            val = schwinger2_theta_ft(k - p, p, tw, m)
            return val * np.exp(-np.sum(pv * pv, axis=1) / L ** 2) / np.cos(t) ** 2

        R = L * math.sqrt(math.log(1e8))
        box = Box([-math.pi / 2] + [-R] * 3, [math.pi / 2] + [R] * 3)
        direct = integrate_nd(f, 4, box, QuadratureSpec(rel_tol=1e-5, max_evals=2e7)).value
        reduced = tadpole_onshell_convolution(k, theta, m, L, QuadratureSpec(rel_tol=1e-7)).value
        assert reduced == pytest.approx(direct, rel=1e-4)

    def test_onshell_one_propagator_zero_theta(self):
        L = 5.0
        radial = integrate.quad(lambda p: 4 * math.pi * p * p * math.pi / math.sqrt(p * p + 1)
                                * math.exp(-(p / L) ** 2), 0, np.inf, epsabs=0, epsrel=1e-12)[0]
        res = tadpole_onshell_one_propagator([0, 1, 0, 0], ZERO, 1.0, L)
        assert res.value.real == pytest.approx(radial, rel=1e-4)

    def test_sharp_regulator_route(self):
        L = 6.0
        radial = integrate.quad(lambda p: 4 * math.pi * p * p * math.pi / (2 * (p * p + 1) ** 1.5),
                                0, L, epsabs=0, epsrel=1e-12)[0]
        res = tadpole_onshell_convolution(np.zeros(4), ZERO, 1.0, L, regulator="sharp")
        assert res.value.real == pytest.approx(radial, rel=1e-4)


class TestScan:
    def test_grid_validation(self):
        tw = TwistKind.off_shell(THETA)
        with pytest.raises(ValueError):
            ScanGrid(((0, 1, 0, 0),), (20.0, 10.0), tw, 1.0)
        with pytest.raises(ValueError):
            ScanGrid(((0, 1, 0, 0),), (0.5, 10.0), tw, 1.0)
        with pytest.raises(ValueError):
            ScanGrid((), (10.0,), tw, 1.0)
        with pytest.raises(ValueError):
            ScanGrid(((0, 1, 0, 0),), (10.0,), tw, 1.0, graph="sunset")

    def test_tadpole_scan(self):
        ks = [(0.0, r, 0.0, 0.0) for r in (0.1, 0.2, 0.5, 1.0)]
        grid = ScanGrid(ks, (10.0, 20.0, 40.0), TwistKind.off_shell(THETA), 1.0, graph="tadpole")
        res = uvir_scan(grid)
        assert len(res.rows) == 12
        csv_lines = [l for l in res.to_csv().splitlines() if not l.startswith("#")]
        assert len(csv_lines) == 1 + 12
        for row in res.rows:
            a = np.array(row.k) @ THETA.entries.T
            if gaussian_regulator_bias(a, 1.0, row.cutoff) <= 5e-4:
                assert abs(row.value - row.reference) <= 1e-3 * row.reference
        assert res.k_exponents[40.0].slope == pytest.approx(-2.0, abs=0.2)

    def test_bubble_scan_slopes(self):
        ks = [(0.0, 0.0, 0.0, 0.0), (0.0, 1.0, 0.0, 0.0)]
        grid = ScanGrid(ks, (10.0, 20.0, 40.0), TwistKind.off_shell(THETA), 1.0)
        res = uvir_scan(grid)
        assert res.log_slopes[ks[0]].slope == pytest.approx(2 * math.pi ** 2, rel=0.1)
        assert abs(res.log_slopes[ks[1]].slope) < 0.05 * 2 * math.pi ** 2
        assert all(r.converged for r in res.rows)

    def test_failed_cells_recorded(self):
        grid = ScanGrid(((0.0, 1.0, 0.0, 0.0),), (10.0, 20.0), TwistKind.on_shell(THETA), 1.0,
                        spec=QuadratureSpec(rel_tol=1e-5, max_evals=2000))
        res = uvir_scan(grid)
        assert len(res.rows) == 2
        assert not any(r.converged for r in res.rows)
