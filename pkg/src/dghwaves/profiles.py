"""Reconstruction of the periodic wave profiles and their conserved quantities.

A profile is stored on a uniform z-grid over one period with the wave maximum
at z = 0, so that Fourier collocation applies directly.  The half-profile
comes from inverting

    z(phi) = integral from phi to phi_plus of dphi' / sqrt(2*(b - U(phi')))

with the same singularity-removing sine substitution used for the period;
the full period follows by even reflection.  The derivative samples are
computed from phi through the first integral (in the stable factored form),
so the first-integral residual is zero to rounding by construction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import fourier
from . import params as _p
from . import period as _period
from .errors import DomainError, NoOrbitError, ParamMismatchError
from .params import PhysicalParams, ReducedParams, RegionClass


class Provenance(str, enum.Enum):
    NUMERIC = "Numeric"
    PEAKED_CLOSED_FORM = "PeakedClosedForm"
    CONSTANT = "Constant"


@dataclass(frozen=True)
class Profile:
    params: ReducedParams
    c3: float
    b: float
    period_z: float
    grid: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    provenance: Provenance

    @property
    def n(self) -> int:
        return len(self.grid)

    def to_dict(self) -> dict:
        return {
            "params": {"c1": self.params.c1, "c2": self.params.c2},
            "C3": self.c3,
            "b": self.b,
            "period_z": self.period_z,
            "grid_n": self.n,
            "phi": list(map(float, self.phi)),
            "dphi": list(map(float, self.dphi)),
            "provenance": self.provenance.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Profile":
        n = int(d["grid_n"])
        period_z = float(d["period_z"])
        return cls(
            params=ReducedParams(float(d["params"]["c1"]), float(d["params"]["c2"])),
            c3=float(d["C3"]),
            b=float(d["b"]),
            period_z=period_z,
            grid=np.arange(n) * (period_z / n),
            phi=np.asarray(d["phi"], dtype=float),
            dphi=np.asarray(d["dphi"], dtype=float),
            provenance=Provenance(d["provenance"]),
        )


@dataclass(frozen=True)
class ConservedQuantities:
    """Mass M, H1-energy E and the Hamiltonian F over one physical period."""

    mass: float
    energy: float
    hamiltonian: float
    physical: PhysicalParams


@dataclass(frozen=True)
class ResidualReport:
    """Max-norm residuals of the second-order equation and the first integral."""

    res2: float
    res1: float
    res2_samples: np.ndarray = field(repr=False)
    res1_samples: np.ndarray = field(repr=False)


def _validate_n(n: int):
    if n < 16 or n % 2 != 0:
        raise DomainError(f"grid size must be even and >= 16, got {n}")


class _HalfOrbitInversion:
    """Invertible map z <-> s for the descending half-orbit z in [0, L/2].

    Dense cumulative Gauss-Legendre panels give z(s) to rounding accuracy;
    evaluation at arbitrary z uses a monotone cubic interpolant for the
    initial guess followed by two Newton corrections (dz/ds = -g(s) is
    analytic), so placement error is at the rounding level rather than the
    interpolation level.
    """

    _GL12 = np.polynomial.legendre.leggauss(12)

    def __init__(self, r: ReducedParams, c3: float, b: float, panels: int):
        self.r = r
        g, pm, pp, t3 = _period.period_integrand(r, c3, b)
        self.g = g
        self.phi_minus, self.phi_plus, self.t3 = pm, pp, t3
        self.m = 0.5 * (pp + pm)
        self.rho = 0.5 * (pp - pm)
        self.knots = np.linspace(-0.5 * math.pi, 0.5 * math.pi, panels + 1)
        xg, wg = self._GL12
        h = self.knots[1] - self.knots[0]
        mids = 0.5 * (self.knots[:-1] + self.knots[1:])
        nodes = mids[None, :] + 0.5 * h * xg[:, None]
        panel_vals = 0.5 * h * (wg @ self.g(nodes))
        # z decreases as s increases: z(knot_j) = sum of panels above knot_j
        self.z_knots = np.concatenate([[0.0], np.cumsum(panel_vals[::-1])])[::-1]
        self.half_period = float(self.z_knots[0])
        # monotone interpolant of s as a function of z (z ascending)
        self._s_of_z = PchipInterpolator(self.z_knots[::-1], self.knots[::-1])

    def _z_of_s(self, s: np.ndarray) -> np.ndarray:
        # z(s) = z(knot below s) - integral from that knot to s
        idx = np.clip(
            np.searchsorted(self.knots, s, side="right") - 1, 0, len(self.knots) - 2
        )
        a = self.knots[idx]
        xg, wg = self._GL12
        halfw = 0.5 * (s - a)
        nodes = (a + halfw)[None, :] + halfw[None, :] * xg[:, None]
        seg = (wg @ self.g(nodes)) * halfw
        return self.z_knots[idx] - seg

    def s_of_z(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        s = np.asarray(self._s_of_z(np.clip(z, 0.0, self.half_period)), dtype=float)
        for _ in range(2):
            s = np.clip(s + (self._z_of_s(s) - z) / self.g(s), *self.knots[[0, -1]])
        return s

    def eval(self, z):
        """(phi, dphi) at arbitrary z (full period, even reflection applied)."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        L = 2.0 * self.half_period
        zf = np.mod(z, L)
        upper = zf > self.half_period
        zh = np.where(upper, L - zf, zf)
        s = self.s_of_z(zh)
        phi = self.m + self.rho * np.sin(s)
        with np.errstate(invalid="ignore"):
            speed = (
                self.rho
                * np.cos(s)
                * np.sqrt((phi - self.t3) / (self.r.c1 - phi))
            )
        dphi = np.where(upper, speed, -speed)
        return phi, dphi


def _constant_profile(r: ReducedParams, c3: float, n: int) -> Profile:
    phi2 = _p.critical_roots(r, c3).phi2
    period_z = _period.center_limit_period(r, c3)
    grid = np.arange(n) * (period_z / n)
    b_center = float(_p.potential_u(phi2, r, c3))
    return Profile(
        params=r,
        c3=c3,
        b=b_center,
        period_z=period_z,
        grid=grid,
        phi=np.full(n, phi2),
        dphi=np.zeros(n),
        provenance=Provenance.CONSTANT,
    )


def solve_profile(r: ReducedParams, c3: float, b: float, n: int = 256) -> Profile:
    """Sample the periodic wave at (C3, b) on a uniform n-point grid.

    The center boundary returns the constant state phi2 (provenance
    Constant); interior points are solved numerically with the maximum at
    z = 0, dphi(0) = 0 and even symmetry exact by reflection.
    """
    _validate_n(n)
    cls = _p.region_classify(r, c3, b)
    if cls == RegionClass.BOUNDARY_CENTER:
        return _constant_profile(r, c3, n)
    if cls != RegionClass.INTERIOR_PERIODIC:
        raise NoOrbitError(
            f"no smooth periodic profile at C3={c3!r}, b={b!r} ({cls.value})"
        )
    inv = _HalfOrbitInversion(r, c3, b, panels=max(4096, 8 * n))
    L = 2.0 * inv.half_period
    half = n // 2
    z_half = np.arange(half + 1) * (L / n)
    s = inv.s_of_z(z_half)
    phi_half = inv.m + inv.rho * np.sin(s)
    phi_half[0] = inv.phi_plus
    phi_half[-1] = inv.phi_minus
    with np.errstate(invalid="ignore"):
        speed = inv.rho * np.cos(s) * np.sqrt((phi_half - inv.t3) / (r.c1 - phi_half))
    speed[0] = 0.0
    speed[-1] = 0.0

    phi = np.concatenate([phi_half, phi_half[-2:0:-1]])
    dphi = np.concatenate([-speed, speed[-2:0:-1]])
    grid = np.arange(n) * (L / n)
    return Profile(
        params=r,
        c3=c3,
        b=b,
        period_z=L,
        grid=grid,
        phi=phi,
        dphi=dphi,
        provenance=Provenance.NUMERIC,
    )


def sample_wave(r: ReducedParams, c3: float, b: float, z) -> tuple[np.ndarray, np.ndarray]:
    """(phi, dphi) of the interior wave at arbitrary z positions."""
    cls = _p.region_classify(r, c3, b)
    if cls != RegionClass.INTERIOR_PERIODIC:
        raise NoOrbitError(f"sampling requires an interior wave, got {cls.value}")
    inv = _HalfOrbitInversion(r, c3, b, panels=4096)
    return inv.eval(z)


def peaked_profile(r: ReducedParams, L: float, n: int = 256) -> Profile:
    """Closed-form peaked wave on the C3 = 0 boundary with period L.

    phi(z) = (C1 + C2/2)*cosh(L/2 - |z|)/cosh(L/2) - C2/2 with the corner at
    z = 0 where phi(0) = C1, and a smooth minimum at z = L/2.
    """
    _validate_n(n)
    from .errors import OutOfRangeError

    if not L > 0:
        raise OutOfRangeError(f"period must be positive, got {L!r}")
    amp = r.c1 + 0.5 * r.c2
    grid = np.arange(n) * (L / n)
    dist = np.minimum(grid, L - grid)  # |z| to the nearest peak
    cosh_half = math.cosh(0.5 * L)
    phi = amp * np.cosh(0.5 * L - dist) / cosh_half - 0.5 * r.c2
    slope = amp * np.sinh(0.5 * L - dist) / cosh_half
    dphi = np.where(grid <= 0.5 * L, -slope, slope)
    dphi[0] = 0.0  # symmetric convention at the corner
    b = _period.peaked_b_of_L(r, L)
    return Profile(
        params=r,
        c3=0.0,
        b=b,
        period_z=L,
        grid=grid,
        phi=phi,
        dphi=dphi,
        provenance=Provenance.PEAKED_CLOSED_FORM,
    )


def conserved_quantities(p: Profile, phys: PhysicalParams) -> ConservedQuantities:
    """Trapezoidal (spectrally accurate) M, E, F over one x-period.

    The physical parameters must reduce to the profile's (C1, C2); the
    x-period is alpha times the z-period and u_x = dphi/alpha.
    """
    red = _p.reduce(phys)
    if abs(red.c1 - p.params.c1) > 1e-12 or abs(red.c2 - p.params.c2) > 1e-12:
        raise ParamMismatchError(
            f"physical params reduce to (C1={red.c1!r}, C2={red.c2!r}) but the "
            f"profile has (C1={p.params.c1!r}, C2={p.params.c2!r})"
        )
    a = phys.alpha
    dx = a * p.period_z / p.n
    phi, dphi = p.phi, p.dphi
    mass = dx * float(np.sum(phi))
    energy = 0.5 * dx * float(np.sum(phi**2 + dphi**2))
    hamiltonian = 0.5 * dx * float(
        np.sum(
            phi**3
            + phi * dphi**2
            + 2.0 * phys.omega * phi**2
            - (phys.gamma / a**2) * dphi**2
        )
    )
    return ConservedQuantities(
        mass=mass, energy=energy, hamiltonian=hamiltonian, physical=phys
    )


def residual_check(p: Profile) -> ResidualReport:
    """Pointwise residuals of the travelling-wave equations on the grid.

    res1 uses the stored dphi against the first integral; res2 differentiates
    the phi samples (spectrally for smooth profiles, five-point stencils for
    the peaked family whose corner would poison a global Fourier derivative)
    and evaluates the second-order equation.
    """
    r, c3, b = p.params, p.c3, p.b
    res1_samples = np.abs(
        _p.first_integral_residual(p.phi, p.dphi, r, c3, b)
    )
    if p.provenance == Provenance.PEAKED_CLOSED_FORM:
        h = p.period_z / p.n
        pm2, pm1 = np.roll(p.phi, 2), np.roll(p.phi, 1)
        pp1, pp2 = np.roll(p.phi, -1), np.roll(p.phi, -2)
        dphi = (pm2 - 8.0 * pm1 + 8.0 * pp1 - pp2) / (12.0 * h)
        ddphi = (-pm2 + 16.0 * pm1 - 30.0 * p.phi + 16.0 * pp1 - pp2) / (12.0 * h**2)
    else:
        dphi = fourier.diff_values(p.phi, p.period_z, 1)
        ddphi = fourier.diff_values(p.phi, p.period_z, 2)
    res2_samples = np.abs(
        (p.phi - r.c1) * ddphi
        + 0.5 * dphi**2
        + (r.c1 - r.c2 - 1.5 * p.phi) * p.phi
        - b
    )
    return ResidualReport(
        res2=float(np.max(res2_samples)),
        res1=float(np.max(res1_samples)),
        res2_samples=res2_samples,
        res1_samples=res1_samples,
    )
