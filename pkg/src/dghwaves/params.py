"""Parameter algebra and existence-region geometry for DGH travelling waves.

The travelling-wave reduction collapses the four physical constants
(alpha, omega, gamma, c) to two reduced ones,

    C1 = c + gamma/alpha**2,      C2 = 2*omega + gamma/alpha**2,

and a periodic wave is then selected by the first-integral level C3 and the
energy level b of the Newton system  b = phi_z**2/2 + U(phi).  Everything in
this module works in the z-normalized variable (alpha scaled out); physical
lengths are alpha * (z-lengths).

Throughout, the standing assumption is 2*C1 + C2 > 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ComplexBranchError,
    EmptyLevelSetError,
    NoOrbitError,
    OutOfRangeError,
    PoleAtC1Error,
)

# Absolute half-width of the band around the b-direction boundaries inside
# which a point is tagged as boundary rather than interior/outside.  The
# C3=0 (peaked) edge is matched exactly: arbitrarily small positive C3 still
# yields a genuine periodic orbit.
BOUNDARY_TOL = 1e-10


@dataclass(frozen=True)
class PhysicalParams:
    """Physical constants of the equation plus the wave speed."""

    alpha: float
    omega: float
    gamma: float
    c: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise OutOfRangeError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class ReducedParams:
    """Reduced parameter pair (C1, C2) with 2*C1 + C2 > 0."""

    c1: float
    c2: float

    def __post_init__(self):
        if not 2.0 * self.c1 + self.c2 > 0:
            raise OutOfRangeError(
                f"need 2*C1 + C2 > 0, got C1={self.c1}, C2={self.c2}"
            )


@dataclass(frozen=True)
class WavePoint:
    """A point (C3, b) in the existence plane."""

    c3: float
    b: float


@dataclass(frozen=True)
class CubicRoots:
    """The three roots of f(phi) = C3, ordered phi1 < phi2 < phi3."""

    phi1: float
    phi2: float
    phi3: float


@dataclass(frozen=True)
class TurningPoints:
    """Orbit extrema: the two roots of U(phi) = b with phi_minus <= phi_plus."""

    phi_minus: float
    phi_plus: float


class RegionClass(str, enum.Enum):
    INTERIOR_PERIODIC = "InteriorPeriodic"
    BOUNDARY_CENTER = "BoundaryCenter"
    BOUNDARY_SOLITARY = "BoundarySolitary"
    BOUNDARY_PEAKED = "BoundaryPeaked"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class GridSpec:
    """Rectangular window and resolution for level-set sampling."""

    phi_min: float
    phi_max: float
    phidot_min: float
    phidot_max: float
    n_phi: int = 400

    def __post_init__(self):
        vals = (self.phi_min, self.phi_max, self.phidot_min, self.phidot_max)
        if not all(math.isfinite(v) for v in vals):
            raise OutOfRangeError("grid bounds must be finite")
        if not (self.phi_min < self.phi_max and self.phidot_min < self.phidot_max):
            raise OutOfRangeError("grid window is empty")
        if self.n_phi < 2:
            raise OutOfRangeError("n_phi must be at least 2")


def reduce(p: PhysicalParams) -> ReducedParams:
    """Collapse (alpha, omega, gamma, c) to (C1, C2)."""
    ratio = p.gamma / p.alpha**2
    return ReducedParams(c1=p.c + ratio, c2=2.0 * p.omega + ratio)


def expand(r: ReducedParams, alpha: float, gamma: float) -> PhysicalParams:
    """Invert the reduction for caller-fixed alpha and gamma.

    The reduction is 2->4 under-determined, so alpha and gamma pin the
    remaining freedom.  reduce(expand(r, alpha, gamma)) == r exactly.
    """
    if not alpha > 0:
        raise OutOfRangeError(f"alpha must be positive, got {alpha}")
    ratio = gamma / alpha**2
    return PhysicalParams(
        alpha=alpha, omega=(r.c2 - ratio) / 2.0, gamma=gamma, c=r.c1 - ratio
    )


def f_eval(phi, r: ReducedParams):
    """The cubic structure f(phi) = 2*(phi - C1)^2*(phi + C2/2).

    Critical points of U(phi) are the roots of f(phi) = C3.  Accepts scalars
    or arrays.
    """
    phi = np.asarray(phi, dtype=float)
    out = 2.0 * (phi - r.c1) ** 2 * (phi + 0.5 * r.c2)
    return float(out) if out.ndim == 0 else out


def f_prime(phi, r: ReducedParams):
    """Derivative of f: 2*(phi - C1)*(3*phi + C2 - C1)."""
    phi = np.asarray(phi, dtype=float)
    out = 2.0 * (phi - r.c1) * (3.0 * phi + r.c2 - r.c1)
    return float(out) if out.ndim == 0 else out


def c3_critical(r: ReducedParams) -> float:
    """Largest C3 admitting three roots of f(phi) = C3: (2*C1+C2)^3/27."""
    return (2.0 * r.c1 + r.c2) ** 3 / 27.0


def _solve_cubic_three_real(a2: float, a1: float, a0: float) -> np.ndarray:
    """Real roots of x^3 + a2 x^2 + a1 x + a0 with all roots real.

    Trigonometric form, branch-stable near double roots; returns the roots
    sorted ascending without polishing.
    """
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0
    if p >= 0.0:
        # Degenerate triple-root neighbourhood: fall back to the real part
        # of the general solver (ordering callers validate afterwards).
        roots = np.roots([1.0, a2, a1, a0])
        return np.sort(roots.real)
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    arg = min(1.0, max(-1.0, arg))
    theta = math.acos(arg) / 3.0
    ts = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
    return np.sort(np.array(ts) - a2 / 3.0)


def critical_roots(r: ReducedParams, c3: float) -> CubicRoots:
    """Solve f(phi) = C3 for the three ordered roots.

    Valid only for 0 < C3 < c3_critical(r), where the ordering
    -C2/2 < phi1 < (C1-C2)/3 < phi2 < C1 < phi3 holds.  One-root regimes
    (C3 outside that interval) raise OutOfRangeError.
    """
    crit = c3_critical(r)
    if not 0.0 < c3 < crit:
        raise OutOfRangeError(
            f"C3 must lie in (0, {crit!r}) for three roots, got {c3!r}"
        )
    # Expanded monic form of 2*(phi-C1)^2*(phi+C2/2) - C3 = 0.
    a2 = (r.c2 - 4.0 * r.c1) / 2.0
    a1 = r.c1 * (r.c1 - r.c2)
    a0 = (r.c1**2 * r.c2 - c3) / 2.0
    roots = _solve_cubic_three_real(a2, a1, a0)
    # One Newton step per root on the factored residual restores full
    # precision for the simple-root cases without disturbing near-double ones.
    for _ in range(2):
        fp = f_prime(roots, r)
        resid = f_eval(roots, r) - c3
        safe = np.abs(fp) > 1e-13 * max(1.0, abs(c3))
        roots = np.where(safe, roots - resid / np.where(safe, fp, 1.0), roots)
    roots = np.sort(roots)
    return CubicRoots(phi1=float(roots[0]), phi2=float(roots[1]), phi3=float(roots[2]))


def potential_u(phi, r: ReducedParams, c3: float):
    """Newton potential U(phi) = -phi^2/2 - C2 phi/2 - C1 C2/2 - C3/(2(phi-C1))."""
    phi_arr = np.asarray(phi, dtype=float)
    if c3 != 0.0 and np.any(phi_arr == r.c1):
        raise PoleAtC1Error("U has a pole at phi = C1 when C3 != 0")
    with np.errstate(divide="ignore"):
        tail = 0.0 if c3 == 0.0 else c3 / (2.0 * (phi_arr - r.c1))
    out = -0.5 * phi_arr**2 - 0.5 * r.c2 * phi_arr - 0.5 * r.c1 * r.c2 - tail
    return float(out) if out.ndim == 0 else out


def potential_u_prime(phi, r: ReducedParams, c3: float):
    """dU/dphi = (C3 - f(phi)) / (2*(phi - C1)^2)."""
    phi_arr = np.asarray(phi, dtype=float)
    if np.any(phi_arr == r.c1):
        if c3 != 0.0:
            raise PoleAtC1Error("dU/dphi has a pole at phi = C1 when C3 != 0")
        # C3 = 0: the factor (phi-C1)^2 cancels, dU/dphi = -(phi + C2/2).
        out = -(phi_arr + 0.5 * r.c2)
        return float(out) if out.ndim == 0 else out
    out = (c3 - f_eval(phi_arr, r)) / (2.0 * (phi_arr - r.c1) ** 2)
    return float(out) if out.ndim == 0 else out


def _turning_cubic_coeffs(r: ReducedParams, c3: float, b: float):
    """Monic coefficients of the turning-point cubic.

    U(phi) = b is equivalent to (C1-phi)(2b + phi^2 + C2 phi + C1 C2) = C3,
    i.e. phi^3 + (C2-C1) phi^2 + 2b phi + (C3 - 2b C1 - C1^2 C2) = 0.
    """
    return (r.c2 - r.c1, 2.0 * b, c3 - 2.0 * b * r.c1 - r.c1**2 * r.c2)


def _turning_cubic_eval(phi, r: ReducedParams, c3: float, b: float):
    return (phi - r.c1) * (phi**2 + r.c2 * phi + 2.0 * b + r.c1 * r.c2) + c3


def _turning_cubic_prime(phi, r: ReducedParams, c3: float, b: float):
    return (phi**2 + r.c2 * phi + 2.0 * b + r.c1 * r.c2) + (phi - r.c1) * (
        2.0 * phi + r.c2
    )


def turning_points(r: ReducedParams, c3: float, b: float) -> TurningPoints:
    """Orbit extrema phi_minus <= phi_plus solving U(phi) = b.

    Requires the point to classify as InteriorPeriodic, BoundaryCenter or
    BoundaryPeaked; outside the orbit range raises NoOrbitError.
    """
    cls = region_classify(r, c3, b)
    if cls == RegionClass.BOUNDARY_CENTER:
        phi2 = critical_roots(r, c3).phi2
        return TurningPoints(phi_minus=phi2, phi_plus=phi2)
    if cls == RegionClass.BOUNDARY_PEAKED:
        disc = r.c2**2 - 4.0 * (2.0 * b + r.c1 * r.c2)
        phi_minus = 0.5 * (-r.c2 + math.sqrt(disc))
        return TurningPoints(phi_minus=phi_minus, phi_plus=r.c1)
    if cls != RegionClass.INTERIOR_PERIODIC:
        raise NoOrbitError(
            f"no periodic orbit at C3={c3!r}, b={b!r} (classified {cls.value})"
        )
    a2, a1, a0 = _turning_cubic_coeffs(r, c3, b)
    roots = _solve_cubic_three_real(a2, a1, a0)
    for _ in range(2):
        fp = _turning_cubic_prime(roots, r, c3, b)
        resid = _turning_cubic_eval(roots, r, c3, b)
        safe = np.abs(fp) > 1e-14 * max(1.0, abs(c3), abs(b))
        roots = np.where(safe, roots - resid / np.where(safe, fp, 1.0), roots)
    roots = np.sort(roots)
    # Smallest root lies below the orbit; the upper two are the extrema.
    return TurningPoints(phi_minus=float(roots[1]), phi_plus=float(roots[2]))


def boundary_b(r: ReducedParams, c3: float) -> tuple[float, float]:
    """Boundary energies (b_minus, b_plus) = (U(phi2), U(phi1)) at level C3.

    Closed forms at the endpoints: C3=0 gives (-C1^2/2 - C1 C2,
    (C2^2 - 4 C1 C2)/8); C3 = C3_critical gives both equal to (C1-C2)^2/6.
    In between, phi1 and phi2 are found by bisection on the monotone
    branches of f.
    """
    crit = c3_critical(r)
    if not 0.0 <= c3 <= crit:
        raise OutOfRangeError(f"C3 must lie in [0, {crit!r}], got {c3!r}")
    if c3 == 0.0:
        return (-0.5 * r.c1**2 - r.c1 * r.c2, (r.c2**2 - 4.0 * r.c1 * r.c2) / 8.0)
    if c3 == crit:
        corner = (r.c1 - r.c2) ** 2 / 6.0
        return (corner, corner)
    from scipy.optimize import brentq

    peak = (r.c1 - r.c2) / 3.0
    # f increases from 0 to C3_critical on (-C2/2, peak) and decreases back
    # to 0 on (peak, C1); both brackets are strict for interior C3.
    phi1 = brentq(
        lambda p: f_eval(p, r) - c3, -0.5 * r.c2, peak, xtol=1e-15, rtol=8.9e-16
    )
    phi2 = brentq(
        lambda p: f_eval(p, r) - c3, peak, r.c1, xtol=1e-15, rtol=8.9e-16
    )
    return (float(potential_u(phi2, r, c3)), float(potential_u(phi1, r, c3)))


def region_classify(r: ReducedParams, c3: float, b: float) -> RegionClass:
    """Locate (C3, b) relative to the existence region.

    InteriorPeriodic for 0 < C3 < C3_critical with b_minus < b < b_plus;
    boundary tags within BOUNDARY_TOL of the center/solitary curves; the
    peaked edge requires C3 == 0 exactly; everything else is Outside.  The
    corner points are excluded from the boundary tags.
    """
    crit = c3_critical(r)
    if c3 < 0.0 or c3 > crit - BOUNDARY_TOL:
        return RegionClass.OUTSIDE
    if c3 == 0.0:
        lo, hi = boundary_b(r, 0.0)
        if lo + BOUNDARY_TOL < b < hi - BOUNDARY_TOL:
            return RegionClass.BOUNDARY_PEAKED
        return RegionClass.OUTSIDE
    b_minus, b_plus = boundary_b(r, c3)
    if abs(b - b_minus) < BOUNDARY_TOL:
        return RegionClass.BOUNDARY_CENTER
    if abs(b - b_plus) < BOUNDARY_TOL:
        return RegionClass.BOUNDARY_SOLITARY
    if b_minus < b < b_plus:
        return RegionClass.INTERIOR_PERIODIC
    return RegionClass.OUTSIDE


def g_classifier(r: ReducedParams, b: float) -> float:
    """Phase-portrait classifier g(C1, C2, b); its sign separates the cases.

    g = 12b + 2C1^2 - C2^2 + 8C1C2 - (2C1+C2)*sqrt((C1-C2)^2 - 6b).
    """
    disc = (r.c1 - r.c2) ** 2 - 6.0 * b
    if disc < 0.0:
        raise ComplexBranchError(
            f"(C1-C2)^2 - 6b = {disc!r} < 0: classifier undefined"
        )
    return (
        12.0 * b
        + 2.0 * r.c1**2
        - r.c2**2
        + 8.0 * r.c1 * r.c2
        - (2.0 * r.c1 + r.c2) * math.sqrt(disc)
    )


def first_integral_residual(phi, phidot, r: ReducedParams, c3: float, b: float):
    """Residual of the planar first integral at (phi, phidot)."""
    phi = np.asarray(phi, dtype=float)
    phidot = np.asarray(phidot, dtype=float)
    out = (
        (phi - r.c1) * phidot**2
        + (r.c1 - r.c2) * phi**2
        - phi**3
        - 2.0 * b * phi
        + r.c1 * (2.0 * b + r.c1 * r.c2)
        - c3
    )
    return float(out) if out.ndim == 0 else out


def level_set(r: ReducedParams, c3: float, b: float, grid: GridSpec) -> np.ndarray:
    """Sample the level curve of the first integral inside a window.

    Returns an (n, 2) array of (phi, phidot) pairs.  The degenerate center
    level collapses to the single point (phi2, 0); the C3 = 0 level contains
    the vertical line phi = C1 in addition to the quadratic branch.
    """
    cls = region_classify(r, c3, b)
    samples: list[tuple[float, float]] = []
    if cls == RegionClass.BOUNDARY_CENTER:
        phi2 = critical_roots(r, c3).phi2
        if (
            grid.phi_min <= phi2 <= grid.phi_max
            and grid.phidot_min <= 0.0 <= grid.phidot_max
        ):
            samples.append((phi2, 0.0))
        if not samples:
            raise EmptyLevelSetError("center point lies outside the window")
        return np.array(samples)

    phis = np.linspace(grid.phi_min, grid.phi_max, grid.n_phi)
    if c3 != 0.0:
        phis = phis[phis != r.c1]
    # phidot^2 = 2*(b - U(phi)) wherever the right side is nonnegative.
    vsq = 2.0 * (b - potential_u(phis, r, c3))
    ok = vsq >= 0.0
    roots = np.sqrt(vsq[ok])
    for phi, v in zip(phis[ok], roots):
        for s in (v, -v) if v > 0.0 else (0.0,):
            if grid.phidot_min <= s <= grid.phidot_max:
                samples.append((float(phi), float(s)))
    if c3 == 0.0 and grid.phi_min <= r.c1 <= grid.phi_max:
        for s in np.linspace(grid.phidot_min, grid.phidot_max, grid.n_phi):
            samples.append((float(r.c1), float(s)))
    if not samples:
        raise EmptyLevelSetError("no branch of the level set meets the window")
    return np.array(samples)
