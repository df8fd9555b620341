import math

import numpy as np
import pytest
from scipy.optimize import brentq

from dghwaves import fourier, params, period, profiles, spectral
from dghwaves.errors import (
    DomainError,
    NotSymmetricError,
    ParamMismatchError,
    PeakedProfileError,
    PeriodUnreachableError,
    SingularWeightError,
)
from dghwaves.params import PhysicalParams, ReducedParams
from dghwaves.profiles import Profile, Provenance

R21 = ReducedParams(2.0, 1.0)
PHYS21 = params.expand(R21, alpha=1.0, gamma=0.0)


@pytest.fixture(scope="module")
def wave_neg_slope():
    # dL/dC3 < 0 here (upper b-band)
    return profiles.solve_profile(R21, 2.0, -1.0, 256)


@pytest.fixture(scope="module")
def wave_pos_slope():
    # dL/dC3 > 0 here (b = -3 < b1)
    return profiles.solve_profile(R21, 0.1, -3.0, 256)


def random_wave(rng, n=128):
    c1 = rng.uniform(1.0, 3.0)
    c2 = rng.uniform(0.1, 0.9) * c1
    r = ReducedParams(c1, c2)
    c3 = rng.uniform(0.15, 0.8) * params.c3_critical(r)
    bm, bp = params.boundary_b(r, c3)
    b = bm + rng.uniform(0.15, 0.8) * (bp - bm)
    return profiles.solve_profile(r, c3, b, n)


class TestBuildL:
    def test_self_duality_before_symmetrization(self, wave_neg_slope):
        assert spectral.build_L_raw_asymmetry(wave_neg_slope) <= 1e-10

    def test_kernel_residual(self, wave_neg_slope):
        lop = spectral.build_L(wave_neg_slope)
        resid = np.max(np.abs(lop.matrix @ wave_neg_slope.dphi))
        assert resid <= 1e-6 * np.max(np.abs(wave_neg_slope.dphi))

    def test_constant_coefficient_symbol(self):
        p = profiles.solve_profile(R21, 3.0, -0.5, 64)  # phi == 1
        lop = spectral.build_L(p)
        ks = 2 * np.pi * np.fft.fftfreq(64, 1 / 64) / p.period_z
        symbol = (R21.c1 - 1.0) * ks**2 + (R21.c1 - R21.c2 - 3.0)
        got = np.sort(np.linalg.eigvalsh(lop.matrix))
        assert np.allclose(got, np.sort(symbol), atol=1e-10)

    def test_peaked_rejected(self):
        p = profiles.peaked_profile(R21, 2.0, 64)
        with pytest.raises(PeakedProfileError):
            spectral.build_L(p)


class TestKernelIdentities:
    def test_variational_identities(self):
        fam = spectral.variational_derivatives(R21, 5.0, 1.0, 256)
        lop = spectral.build_L(fam.profile)
        assert np.max(np.abs(lop.matrix @ fam.dbphi - 1.0)) <= 1e-4
        q2 = fam.profile.phi - fourier.diff_values(
            fam.profile.phi, fam.profile.period_z, 2
        )
        assert np.max(np.abs(lop.matrix @ fam.dcphi + q2)) <= 1e-4

    def test_db_mass_consistency(self):
        # <dbphi, 1> equals an independent finite difference of the mass
        # along the same fixed-period family at half the step.
        fam = spectral.variational_derivatives(R21, 5.0, 2.0, 128)
        dz = fam.profile.period_z / fam.profile.n
        lhs = dz * np.sum(fam.dbphi)
        db = 0.5 * fam.delta_b
        masses = []
        for bb in (fam.b0 + db, fam.b0 - db):
            c3b = spectral._solve_c3_for_period(R21, bb, 5.0, 2.0)
            prof = profiles.solve_profile(R21, c3b, bb, 128)
            masses.append(dz * np.sum(prof.phi))
        rhs = (masses[0] - masses[1]) / (2 * db)
        assert lhs == pytest.approx(rhs, rel=1e-5)


class TestInertia:
    def test_trichotomy_negative_slope(self, wave_neg_slope):
        _, dl_dc3 = period.period_partials(R21, 2.0, -1.0)
        assert dl_dc3 < 0
        counts = spectral.inertia(spectral.build_L(wave_neg_slope))
        assert counts.pair == (1, 1)

    def test_trichotomy_positive_slope(self, wave_pos_slope):
        _, dl_dc3 = period.period_partials(R21, 0.1, -3.0)
        assert dl_dc3 > 0
        counts = spectral.inertia(spectral.build_L(wave_pos_slope))
        assert counts.pair == (2, 1)

    def test_rest_of_spectrum_positive(self, wave_neg_slope):
        lop = spectral.build_L(wave_neg_slope)
        counts = spectral.inertia(lop)
        vals = np.sort(np.linalg.eigvalsh(lop.matrix))
        assert vals[3] > counts.zero_tol

    def test_jl_rejected(self, wave_neg_slope):
        jl = spectral.build_JL(wave_neg_slope)
        with pytest.raises(NotSymmetricError):
            spectral.inertia(jl)

    def test_counts_sum(self, wave_neg_slope):
        counts = spectral.inertia(spectral.build_L(wave_neg_slope))
        assert counts.n_neg + counts.n_zero + counts.n_pos == wave_neg_slope.n


class TestSchrodinger:
    def test_constant_potential(self):
        p = profiles.solve_profile(R21, 3.0, -0.5, 64)
        mop = spectral.schrodinger_transform(p)
        q_expected = (R21.c1 - R21.c2 - 3.0) / (R21.c1 - 1.0)
        off = mop.matrix + fourier.diff2_matrix(64, p.period_z)
        assert np.allclose(np.diag(off), q_expected, atol=1e-12)

    def test_kernel_contains_transformed_phi_prime(self, wave_neg_slope):
        mop = spectral.schrodinger_transform(wave_neg_slope)
        counts = spectral.inertia(mop)
        assert counts.n_zero >= 1

    def test_inertia_equivalence_random(self):
        rng = np.random.default_rng(17)
        for _ in range(6):
            p = random_wave(rng)
            cl = spectral.inertia(spectral.build_L(p))
            cm = spectral.inertia(spectral.schrodinger_transform(p))
            assert cl.pair == cm.pair

    def test_singular_weight(self):
        n = 64
        grid = np.arange(n) * (2.0 / n)
        bad = Profile(
            params=R21,
            c3=2.0,
            b=-1.0,
            period_z=2.0,
            grid=grid,
            phi=np.full(n, R21.c1 + 0.5),
            dphi=np.zeros(n),
            provenance=Provenance.NUMERIC,
        )
        with pytest.raises(SingularWeightError):
            spectral.schrodinger_transform(bad)


class TestTheta:
    def test_sign_law_random(self):
        rng = np.random.default_rng(23)
        for _ in range(5):
            p = random_wave(rng, n=128)
            th = spectral.theta_index(p)
            _, dl_dc3 = period.period_partials(p.params, p.c3, p.b)
            assert math.copysign(1, th) == -math.copysign(1, dl_dc3)

    def test_two_routes_agree(self, wave_neg_slope):
        th_ode = spectral.theta_index(wave_neg_slope)
        th_formula = spectral.theta_by_formula(wave_neg_slope)
        assert th_ode == pytest.approx(th_formula, rel=1e-4)

    def test_small_at_period_extremum(self):
        b = -1.5
        c3_star = brentq(
            lambda c3: period.period_partials(R21, c3, b)[1], 0.01, 0.3, xtol=1e-10
        )
        p = profiles.solve_profile(R21, c3_star, b, 256)
        assert abs(spectral.theta_index(p)) <= 1e-3

    def test_constant_rejected(self):
        p = profiles.solve_profile(R21, 3.0, -0.5, 64)
        with pytest.raises(DomainError):
            spectral.theta_index(p)


class TestJOperator:
    def test_j_annihilates_constants(self, wave_neg_slope):
        j = spectral.build_J(wave_neg_slope.n, wave_neg_slope.period_z)
        assert np.max(np.abs(j @ np.ones(wave_neg_slope.n))) <= 1e-12

    def test_j_skew(self, wave_neg_slope):
        j = spectral.build_J(wave_neg_slope.n, wave_neg_slope.period_z)
        assert np.max(np.abs(j + j.T)) <= 1e-10

    def test_constant_profile_spectrum_imaginary(self):
        p = profiles.solve_profile(R21, 3.0, -0.5, 64)
        jl = spectral.build_JL(p)
        vals = np.linalg.eigvals(jl.matrix)
        assert np.max(np.abs(vals.real)) <= 1e-10
        # constant-coefficient oracle: symbol product
        ks = 2 * np.pi * np.fft.fftfreq(64, 1 / 64) / p.period_z
        sym = (-1j * ks / (1 + ks**2)) * ((R21.c1 - 1.0) * ks**2 + (R21.c1 - R21.c2 - 3.0))
        sym[64 // 2] = 0.0
        assert np.allclose(
            np.sort(vals.imag), np.sort(sym.imag), atol=1e-9
        )

    def test_spectrum_check_requires_jl(self, wave_neg_slope):
        lop = spectral.build_L(wave_neg_slope)
        with pytest.raises(DomainError):
            spectral.jl_spectrum_check(lop)

    def test_stable_wave(self, wave_neg_slope):
        jl = spectral.build_JL(wave_neg_slope)
        max_re, stable = spectral.jl_spectrum_check(jl)
        assert stable
        assert max_re <= 1e-6 * spectral.jl_norm(jl)


class TestFixedPeriodCurve:
    def test_reference_solve(self):
        b, prof = spectral.fixed_period_curve(R21, 5.0, 3.0)
        assert -0.5 < b < -0.238
        assert abs(period.period(R21, 3.0, b, tol=1e-12).L - 5.0) <= 1e-8
        assert prof.period_z == pytest.approx(5.0, abs=1e-9)

    def test_center_boundary_limit(self):
        l_min = period.center_limit_period(R21, 3.0)
        bm, _ = params.boundary_b(R21, 3.0)
        b, _ = spectral.fixed_period_curve(R21, l_min * (1 + 1e-5), 3.0, n=64)
        assert b == pytest.approx(bm, abs=1e-4)

    def test_unreachable(self):
        l_min = period.center_limit_period(R21, 3.0)
        with pytest.raises(PeriodUnreachableError):
            spectral.fixed_period_curve(R21, 0.5 * l_min, 3.0)

    def test_curve_slope_is_c1(self):
        # implicit-function slope: b'(C3) = -dL/dC3 / dL/db
        c3 = 3.0
        b0, _ = spectral.fixed_period_curve(R21, 5.0, c3, n=64)
        h = 1e-5
        bp, _ = spectral.fixed_period_curve(R21, 5.0, c3 + h, n=64)
        bm_, _ = spectral.fixed_period_curve(R21, 5.0, c3 - h, n=64)
        fd_slope = (bp - bm_) / (2 * h)
        dl_db, dl_dc3 = period.period_partials(R21, c3, b0)
        assert fd_slope == pytest.approx(-dl_dc3 / dl_db, rel=1e-4)


class TestConstraintInvariance:
    def test_random_vectors(self, wave_neg_slope):
        assert spectral.constraint_invariance_check(wave_neg_slope, 10) <= 1e-8

    def test_phi_prime_in_kernel_of_jl(self, wave_neg_slope):
        jl = spectral.build_JL(wave_neg_slope)
        resid = np.max(np.abs(jl.matrix @ wave_neg_slope.dphi))
        assert resid <= 1e-6 * max(np.max(np.abs(wave_neg_slope.dphi)), 1e-300)

    def test_constant_profile_machine_level(self):
        p = profiles.solve_profile(R21, 3.0, -0.5, 64)
        assert spectral.constraint_invariance_check(p, 5) <= 1e-12


class TestOrbital:
    def test_matrix_vs_closed_form(self, wave_neg_slope):
        check = spectral.orbital_check(wave_neg_slope, PHYS21)
        assert check.ly_max_diff <= 1e-6
        assert check.lyy == pytest.approx(check.lyy_closed_form, rel=1e-6)

    def test_admissible_wave(self, wave_neg_slope):
        check = spectral.orbital_check(wave_neg_slope, PHYS21)
        assert check.cond_b and check.cond_sign and check.cond_m and check.cond_period
        assert check.lyy < 0
        assert check.verdict

    def test_c2_zero_fails_sign_condition(self):
        r = ReducedParams(2.0, 0.0)
        phys = params.expand(r, alpha=1.0, gamma=0.0)
        c3 = 0.5 * params.c3_critical(r)
        bm, bp = params.boundary_b(r, c3)
        p = profiles.solve_profile(r, c3, bm + 0.7 * (bp - bm), 128)
        check = spectral.orbital_check(p, phys)
        assert not check.cond_sign
        assert not check.verdict


@pytest.fixture(scope="module")
def report():
    return spectral.stability_indices(R21, PHYS21, 5.0, 3.0, n=256)


class TestStabilityIndices:

    def test_theorem4_counting(self, report):
        assert report.dl_dc3 < 0
        assert report.dfm3_dc3 < 0
        assert report.inertia_l.pair == (1, 1)
        assert (report.n0, report.z0) == (1, 0)
        assert (report.n_constrained, report.z_constrained) == (0, 1)
        assert report.spectral_verdict

    def test_jl_cross_check(self, report):
        assert report.max_re_jl <= 1e-6 * report.jl_norm

    def test_s_matrix_symmetric(self, report):
        s = report.s_matrix
        assert abs(s[0, 1] - s[1, 0]) <= 1e-6 * np.max(np.abs(s))

    def test_det_s_sign_matches_counting(self, report):
        # n0 = 1, z0 = 0 for a 2x2 with one negative eigenvalue => detS < 0
        assert report.det_s < 0

    def test_param_mismatch(self):
        with pytest.raises(ParamMismatchError):
            spectral.stability_indices(
                R21,
                PhysicalParams(alpha=1.0, omega=0.1, gamma=0.0, c=2.0),
                5.0,
                3.0,
            )

    def test_serialization(self, report):
        d = report.to_dict()
        assert d["spectral_verdict"] is True
        assert d["inertiaL"]["n_neg"] == 1
        assert d["orbital"]["verdict"] is True
