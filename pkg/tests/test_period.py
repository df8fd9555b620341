import math

import numpy as np
import pytest

from dghwaves import params, period
from dghwaves.errors import (
    DomainError,
    NoOrbitError,
    OutOfRangeError,
    QZeroError,
)
from dghwaves.params import ReducedParams
from dghwaves.period import Verdict

R21 = ReducedParams(2.0, 1.0)


def random_interior_point(rng, r, u_range=(0.05, 0.95), v_range=(0.05, 0.9)):
    c3 = rng.uniform(*u_range) * params.c3_critical(r)
    bm, bp = params.boundary_b(r, c3)
    b = bm + rng.uniform(*v_range) * (bp - bm)
    return c3, b


def random_reduced(rng, quadrant=None):
    # quadrants of the (C1, C2) plane under 2*C1+C2 > 0
    q = quadrant if quadrant is not None else rng.integers(0, 4)
    if q == 0:  # C1 > C2 > 0
        c1 = rng.uniform(0.5, 3.0)
        c2 = rng.uniform(0.05, 0.95) * c1
    elif q == 1:  # C1 > 0 >= C2
        c1 = rng.uniform(0.5, 3.0)
        c2 = -rng.uniform(0.0, 0.9) * 2.0 * c1
    elif q == 2:  # C2 >= C1 > 0
        c1 = rng.uniform(0.3, 2.0)
        c2 = c1 * rng.uniform(1.0, 3.0)
    else:  # C1 <= 0 < C2, 2*C1 + C2 > 0
        c2 = rng.uniform(0.5, 3.0)
        c1 = -rng.uniform(0.0, 0.45) * c2
    return ReducedParams(c1, c2)


class TestFactorization:
    def test_energy_factorization(self):
        # 2*(b - U(phi)) == (phi-phi_minus)(phi_plus-phi)(phi-t3)/(C1-phi)
        rng = np.random.default_rng(11)
        for _ in range(20):
            r = random_reduced(rng)
            c3, b = random_interior_point(rng, r)
            pm, pp, t3 = period.orbit_geometry(r, c3, b)
            phis = np.linspace(pm + 1e-6, pp - 1e-6, 7)
            lhs = 2.0 * (b - params.potential_u(phis, r, c3))
            rhs = (phis - pm) * (pp - phis) * (phis - t3) / (r.c1 - phis)
            assert np.allclose(lhs, rhs, rtol=1e-8, atol=1e-10)


class TestPeriod:
    def test_center_limit_value(self):
        res = period.period(R21, 3.0, -0.5 + 1e-8)
        assert res.L == pytest.approx(math.pi * math.sqrt(2.0), rel=1e-7)

    def test_peaked_limit_value(self):
        res = period.period(R21, 1e-12, -2.1874)
        assert res.L == pytest.approx(2.0, abs=1e-3)

    def test_matches_shooting_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            r = random_reduced(rng)
            c3, b = random_interior_point(rng, r)
            lq = period.period(r, c3, b, tol=1e-12).L
            ls = period.period_by_shooting(r, c3, b)
            assert lq == pytest.approx(ls, rel=1e-8)

    def test_requires_interior(self):
        with pytest.raises(NoOrbitError):
            period.period(R21, 6.0, 0.0)
        with pytest.raises(NoOrbitError):
            period.period(R21, 0.0, -2.0)  # peaked boundary is not interior

    def test_divergence_toward_solitary(self):
        _, bp = params.boundary_b(R21, 2.0)
        values = [
            period.period(R21, 2.0, bp - 10.0**-k, tol=1e-9).L for k in range(2, 7)
        ]
        assert all(x < y for x, y in zip(values, values[1:]))


class TestCenterLimit:
    def test_exact_case(self):
        assert period.center_limit_period(R21, 3.0) == pytest.approx(
            math.pi * math.sqrt(2.0), rel=1e-14
        )

    def test_limits(self):
        # L_- ~ C3^(1/4) near zero, and diverges at the critical level
        assert period.center_limit_period(R21, 1e-12) < 2e-3
        crit = params.c3_critical(R21)
        assert period.center_limit_period(R21, crit * (1 - 1e-10)) > 1e2

    def test_extrapolated_period_limit(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            r = random_reduced(rng)
            c3 = rng.uniform(0.2, 0.8) * params.c3_critical(r)
            bm, _ = params.boundary_b(r, c3)
            deltas = np.array([1e-4, 1e-5, 1e-6])
            ls = [period.period(r, c3, bm + d, tol=1e-12).L for d in deltas]
            coeff = np.polyfit(deltas, ls, 2)
            assert coeff[-1] == pytest.approx(
                period.center_limit_period(r, c3), rel=1e-6
            )


class TestPeakedFamily:
    def test_b_of_L_value(self):
        assert period.peaked_b_of_L(R21, 2.0) == pytest.approx(-2.18742, abs=1e-4)

    def test_b_of_L_limits(self):
        assert period.peaked_b_of_L(R21, 1e-8) == pytest.approx(-4.0, abs=1e-10)
        assert period.peaked_b_of_L(R21, 200.0) == pytest.approx(-7.0 / 8.0, abs=1e-12)
        assert period.peaked_b_of_L(R21, 2000.0) == pytest.approx(-7.0 / 8.0, abs=1e-15)

    def test_slope_positive_and_matches_fd(self):
        for L in (0.5, 2.0, 8.0):
            slope = period.peaked_db_dL(R21, L)
            assert slope > 0
            h = 1e-6
            fd = (period.peaked_b_of_L(R21, L + h) - period.peaked_b_of_L(R21, L - h)) / (
                2 * h
            )
            assert slope == pytest.approx(fd, rel=1e-8)

    def test_inverse_round_trip_and_closed_form(self):
        for L in (0.3, 1.0, 2.0, 10.0):
            b = period.peaked_b_of_L(R21, L)
            assert period.peaked_L_of_b(R21, b) == pytest.approx(L, rel=1e-10)
            # closed-form inversion oracle via sech^2
            s2 = -(8.0 * b + (4 * 2.0 - 1.0) * 1.0) / (2 * 2.0 + 1.0) ** 2
            L_closed = 2.0 * math.acosh(1.0 / math.sqrt(s2))
            assert period.peaked_L_of_b(R21, b) == pytest.approx(L_closed, rel=1e-10)

    def test_inverse_range_check(self):
        with pytest.raises(OutOfRangeError):
            period.peaked_L_of_b(R21, -4.5)
        with pytest.raises(OutOfRangeError):
            period.peaked_L_of_b(R21, 0.0)

    def test_period_approaches_peaked_family(self):
        for b in (-3.0, -2.0, -1.2):
            L_exp = period.peaked_L_of_b(R21, b)
            L_num = period.period(R21, 1e-10, b, tol=1e-12).L
            assert L_num == pytest.approx(L_exp, abs=1e-3)


class TestPartials:
    def test_theorem2_sign(self):
        dl_db, _ = period.period_partials(R21, 2.0, -1.0)
        assert dl_db > 0

    def test_theorem3_signs(self):
        # b = -3 < b1: increasing in C3 (interior C3 below 0.2088)
        _, dl_dc3 = period.period_partials(R21, 0.1, -3.0)
        assert dl_dc3 > 0
        # b = -0.8 in ( (C2^2-4C1C2)/8, (C1-C2)^2/6 ): decreasing in C3
        _, dl_dc3 = period.period_partials(R21, 1.4, -0.8)
        assert dl_dc3 < 0

    def test_against_plain_difference(self):
        c3, b = 2.0, -1.0
        dl_db, dl_dc3 = period.period_partials(R21, c3, b)
        h = 1e-6
        fd_b = (
            period.period(R21, c3, b + h, tol=1e-13).L
            - period.period(R21, c3, b - h, tol=1e-13).L
        ) / (2 * h)
        fd_c3 = (
            period.period(R21, c3 + h, b, tol=1e-13).L
            - period.period(R21, c3 - h, b, tol=1e-13).L
        ) / (2 * h)
        assert dl_db == pytest.approx(fd_b, rel=1e-5)
        assert dl_dc3 == pytest.approx(fd_c3, rel=1e-5)

    def test_stencil_leaves_region(self):
        from dghwaves.errors import StencilLeavesRegionError

        with pytest.raises(StencilLeavesRegionError):
            period.period_partials(R21, 1.0, -3.0)  # outside entirely


class TestB1Threshold:
    def test_values(self):
        assert period.b1_threshold(R21) == pytest.approx(-2.02190, abs=1e-5)
        assert period.b1_threshold(ReducedParams(1.0, 0.0)) == pytest.approx(
            -1.0 + math.sqrt(6.0) / 3.0, rel=1e-15
        )
        assert period.b1_threshold(ReducedParams(0.0, 1.0)) == pytest.approx(
            -0.125 + math.sqrt(6.0) / 12.0, rel=1e-15
        )


class TestChicone:
    def test_reference_point(self):
        w = period.chicone_witness(R21, 3.0)
        assert w.q == pytest.approx(1.0, abs=1e-12)
        assert w.beta == pytest.approx(1.0, abs=1e-12)
        assert w.eta == pytest.approx(1.0, abs=1e-12)
        assert w.x1 < 0 < w.x2 < w.eta < w.x3
        assert w.min_r_on_range > 0
        assert w.min_wpp_on_range > 0
        assert w.s_value > 0
        assert w.n_value > 0

    def test_r_at_eta(self):
        # R(eta) = (2+beta)^2 * eta^2
        for beta, eta in ((1.0, 1.0), (0.4, 2.2), (3.0, 0.7)):
            assert period.chicone_R(eta, beta, eta) == pytest.approx(
                (2 + beta) ** 2 * eta**2, rel=1e-12
            )

    def test_degenerate_leading_coefficient(self):
        # at 4*eta - beta - 2 = 0 the cubic collapses to 8*eta^2*(2x^2-3*eta*x+3*eta^2)
        eta = 1.3
        beta = 4 * eta - 2
        xs = np.linspace(-2, 2, 9)
        expected = 8 * eta**2 * (2 * xs**2 - 3 * eta * xs + 3 * eta**2) / 8.0 / eta**2
        got = period.chicone_R(xs, beta, eta) / (8.0 * eta**2)
        assert np.allclose(got, expected, rtol=1e-12)
        assert np.all(period.chicone_R(xs, beta, eta) > 0)

    def test_wpp_matches_finite_difference(self):
        beta, eta = 1.0, 1.0
        G = lambda x: period._chicone_G(x, beta, eta)
        # exact G' so only the outer second difference carries FD error
        Gp = lambda x: -0.5 * (2 * x + (beta + 2) - (beta + 2) * eta**2 / (x - eta) ** 2)
        W = lambda x: G(x) / Gp(x) ** 2
        for x in (0.2, 0.5, 0.7):
            h = 1e-5
            wpp_fd = (W(x + h) - 2 * W(x) + W(x - h)) / h**2
            assert period.chicone_Wpp(x, beta, eta) == pytest.approx(wpp_fd, rel=1e-4)

    def test_random_quadrant_one(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            r = random_reduced(rng, quadrant=0)
            c3 = rng.uniform(0.1, 0.9) * params.c3_critical(r)
            w = period.chicone_witness(r, c3, n_samples=512)
            assert w.min_r_on_range > 0
            assert w.min_wpp_on_range > 0

    def test_qzero_raises(self):
        # middle root exactly at 0  <=>  f(0) = C3, needs C2 > 0 and the root
        # 0 to be the middle one: 0 in ((C1-C2)/3, C1) => C2 > C1 > 0.
        r = ReducedParams(1.0, 2.0)
        c3 = params.f_eval(0.0, r)
        assert 0.0 < c3 < params.c3_critical(r)
        with pytest.raises(QZeroError):
            period.chicone_witness(r, c3)


class TestMonotonicityScan:
    def test_theorem2_scan(self):
        bm, bp = params.boundary_b(R21, 2.0)
        grid = np.linspace(bm + 0.02 * (bp - bm), bp - 0.02 * (bp - bm), 25)
        tab = period.monotonicity_scan(R21, "b", 2.0, grid)
        assert tab.verdict == Verdict.INCREASING
        assert tab.samples.shape == (25, 2)

    def test_theorem3_bands(self):
        tab = period.monotonicity_scan(R21, "C3", -3.0, np.linspace(0.01, 0.2, 15))
        assert tab.verdict == Verdict.INCREASING
        # the interior maximum at b = -1.5 sits near C3 = 0.077
        tab = period.monotonicity_scan(R21, "C3", -1.5, np.linspace(0.01, 1.38, 30))
        assert tab.verdict == Verdict.SINGLE_MAX
        tab = period.monotonicity_scan(R21, "C3", -0.8, np.linspace(0.42, 2.39, 15))
        assert tab.verdict == Verdict.DECREASING

    def test_requires_three_points(self):
        with pytest.raises(DomainError):
            period.monotonicity_scan(R21, "b", 2.0, [-1.0])
        with pytest.raises(DomainError):
            period.monotonicity_scan(R21, "b", 2.0, [-1.0, -0.9])

    def test_bad_axis(self):
        with pytest.raises(DomainError):
            period.monotonicity_scan(R21, "q", 2.0, [-1.0, -0.9, -0.8])
