"""The period function of the periodic travelling waves and its structure.

The z-period of the orbit through (C3, b) is

    L = 2 * integral over [phi_minus, phi_plus] of dphi / sqrt(2*(b - U(phi))).

Writing the turning-point cubic as (phi - t3)(phi - phi_minus)(phi - phi_plus)
with t3 = C1 - C2 - phi_minus - phi_plus gives the exact factorisation

    2*(b - U(phi)) = (phi - phi_minus)*(phi_plus - phi)*(phi - t3)/(C1 - phi),

so the substitution phi = m + rho*sin(s) (m the midpoint, rho the half-width)
absorbs both inverse-square-root endpoint singularities and leaves the
analytic integrand sqrt((C1 - phi(s))/(phi(s) - t3)) on [-pi/2, pi/2], which
Gauss-Legendre resolves geometrically fast.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import params as _p
from .errors import (
    DomainError,
    IntegrationFailureError,
    NonConvergentError,
    NumericalError,
    OutOfRangeError,
    QZeroError,
    StencilLeavesRegionError,
)
from .params import RegionClass, ReducedParams

MAX_NODES = 2**14


@dataclass(frozen=True)
class PeriodResult:
    """Converged period value with its doubling-based error estimate."""

    L: float
    est_error: float
    nodes_used: int


@dataclass(frozen=True)
class ChiconeWitness:
    """Sampled positivity certificate for the period-monotonicity criterion.

    q is the middle root phi2 of f(phi) = C3; beta = C2/q and
    eta = (C1 - q)/q are the normalized parameters; x1 < 0 < x2 < eta < x3
    frame the relevant range; min_r_on_range and min_wpp_on_range are the
    sampled minima of the cubic R(x) and of W''(x) on [x1, x2].
    """

    q: float
    beta: float
    eta: float
    x1: float
    x2: float
    x3: float
    min_r_on_range: float
    min_wpp_on_range: float
    s_value: float
    n_value: float


class Verdict(str, enum.Enum):
    INCREASING = "Increasing"
    DECREASING = "Decreasing"
    SINGLE_MAX = "SingleMax"
    VIOLATED = "Violated"


@dataclass(frozen=True)
class MonotonicityTable:
    axis: str
    samples: np.ndarray  # (n, 2) columns: parameter, L
    verdict: Verdict


@lru_cache(maxsize=32)
def _gl_rule(n: int):
    return np.polynomial.legendre.leggauss(n)


def orbit_geometry(r: ReducedParams, c3: float, b: float):
    """Turning points and the third cubic root (phi_minus, phi_plus, t3)."""
    tp = _p.turning_points(r, c3, b)
    t3 = (r.c1 - r.c2) - tp.phi_minus - tp.phi_plus
    return tp.phi_minus, tp.phi_plus, t3


def period_integrand(r: ReducedParams, c3: float, b: float):
    """Analytic integrand g(s) with L = 2*int_{-pi/2}^{pi/2} g(s) ds.

    Returns (g, phi_minus, phi_plus, t3).
    """
    phi_minus, phi_plus, t3 = orbit_geometry(r, c3, b)
    m = 0.5 * (phi_plus + phi_minus)
    rho = 0.5 * (phi_plus - phi_minus)

    def g(s):
        phi = m + rho * np.sin(s)
        return np.sqrt((r.c1 - phi) / (phi - t3))

    return g, phi_minus, phi_plus, t3


def period(r: ReducedParams, c3: float, b: float, tol: float = 1e-10) -> PeriodResult:
    """Period of the interior orbit at (C3, b) by Gauss-Legendre doubling.

    Doubles the node count until two successive evaluations agree within
    tol*max(1, L); est_error is the last doubling difference.
    """
    cls = _p.region_classify(r, c3, b)
    if cls != RegionClass.INTERIOR_PERIODIC:
        from .errors import NoOrbitError

        raise NoOrbitError(
            f"period defined on interior points only, got {cls.value} "
            f"at C3={c3!r}, b={b!r}"
        )
    g, *_ = period_integrand(r, c3, b)
    prev = None
    n = 16
    while n <= MAX_NODES:
        x, w = _gl_rule(n)
        s = 0.5 * math.pi * x
        val = 2.0 * 0.5 * math.pi * float(np.dot(w, g(s)))
        if prev is not None:
            err = abs(val - prev)
            if err <= tol * max(1.0, abs(val)):
                return PeriodResult(L=val, est_error=err, nodes_used=n)
        prev = val
        n *= 2
    raise NonConvergentError(
        f"period quadrature did not converge below tol={tol!r} within "
        f"{MAX_NODES} nodes at C3={c3!r}, b={b!r}"
    )


def period_by_shooting(
    r: ReducedParams, c3: float, b: float, rtol: float = 1e-11, atol: float = 1e-13
) -> float:
    """Independent period oracle: integrate the planar ODE between turning points.

    Starts at (phi_plus, 0) and measures the z-time until the velocity
    crosses zero again at phi_minus; the period is twice that time.  Shares
    no code path with the quadrature route.
    """
    tp = _p.turning_points(r, c3, b)
    if not tp.phi_minus < tp.phi_plus:
        from .errors import NoOrbitError

        raise NoOrbitError("degenerate orbit has no shooting period")

    def rhs(_, y):
        return [y[1], -_p.potential_u_prime(y[0], r, c3)]

    def at_bottom(_, y):
        return y[1]

    at_bottom.terminal = True
    at_bottom.direction = 1.0

    sol = solve_ivp(
        rhs,
        (0.0, 1e6),
        [tp.phi_plus, 0.0],
        method="DOP853",
        events=at_bottom,
        rtol=rtol,
        atol=atol,
        dense_output=False,
    )
    if not sol.success or len(sol.t_events[0]) == 0:
        raise IntegrationFailureError(f"shooting failed: {sol.message}")
    return 2.0 * float(sol.t_events[0][0])


def _interior_or_raise(r: ReducedParams, c3: float, b: float):
    if _p.region_classify(r, c3, b) != RegionClass.INTERIOR_PERIODIC:
        raise StencilLeavesRegionError(
            f"stencil point (C3={c3!r}, b={b!r}) left the existence region"
        )


def _period_value(r, c3, b, tol=1e-12):
    return period(r, c3, b, tol=tol).L


def period_partials(
    r: ReducedParams, c3: float, b: float, tol: float = 1e-12
) -> tuple[float, float]:
    """(dL/db, dL/dC3) by Richardson-extrapolated central differences.

    Step 1e-5*max(1, |coordinate|); if the four-point stencil leaves the
    region the step shrinks once by 10 before giving up.
    """
    _interior_or_raise(r, c3, b)

    def richardson(eval_at, center, h0):
        for h in (h0, h0 / 10.0):
            try:
                for off in (h, -h, h / 2.0, -h / 2.0):
                    _interior_or_raise(r, *eval_at(center + off)[:2])
            except StencilLeavesRegionError:
                if h == h0:
                    continue
                raise
            lp, lm = (
                _period_value(r, *eval_at(center + h)[:2], tol=tol),
                _period_value(r, *eval_at(center - h)[:2], tol=tol),
            )
            lp2, lm2 = (
                _period_value(r, *eval_at(center + h / 2.0)[:2], tol=tol),
                _period_value(r, *eval_at(center - h / 2.0)[:2], tol=tol),
            )
            d1 = (lp - lm) / (2.0 * h)
            d2 = (lp2 - lm2) / h
            return (4.0 * d2 - d1) / 3.0
        raise StencilLeavesRegionError("stencil leaves region even after shrink")

    hb = 1e-5 * max(1.0, abs(b))
    hc = 1e-5 * max(1.0, abs(c3))
    dl_db = richardson(lambda bb: (c3, bb), b, hb)
    dl_dc3 = richardson(lambda cc: (cc, b), c3, hc)
    return dl_db, dl_dc3


def b1_threshold(r: ReducedParams) -> float:
    """Band separator b1 of the C3-monotonicity trichotomy."""
    s6 = math.sqrt(6.0)
    return (
        (-1.0 + s6 / 3.0) * r.c1**2
        + (-1.5 + s6 / 3.0) * r.c1 * r.c2
        + (-0.125 + s6 / 12.0) * r.c2**2
    )


def center_limit_period(r: ReducedParams, c3: float) -> float:
    """Limiting period 2*pi/omega as b approaches the center boundary.

    omega^2 = C3/(C1-phi2)^3 - 1, cross-checked against the equivalent
    omega^2 = (3*phi2 - C1 + C2)/(C1 - phi2) to 1e-12.
    """
    phi2 = _p.critical_roots(r, c3).phi2
    gap = r.c1 - phi2
    w2_a = c3 / gap**3 - 1.0
    w2_b = (3.0 * phi2 - r.c1 + r.c2) / gap
    # The two forms are algebraically identical given f(phi2) = C3; in floats
    # the first cubes the root gap, so allow the provable rounding budget
    # (root residual plus eps-level phi2 noise) on top of 1e-12 relative.
    resid = abs(_p.f_eval(phi2, r) - c3)
    eps_phi = 8.0 * np.finfo(float).eps * max(1.0, abs(phi2))
    allowed = (
        1e-12 * max(1.0, abs(w2_a))
        + resid / gap**3
        + eps_phi * (abs(w2_a) + abs(w2_b) + 6.0) / gap
    )
    if abs(w2_a - w2_b) > allowed:
        raise NumericalError(
            f"omega^2 cross-check failed: {w2_a!r} vs {w2_b!r} at C3={c3!r}"
        )
    if w2_a <= 0.0:
        raise OutOfRangeError(f"degenerate center frequency at C3={c3!r}")
    return 2.0 * math.pi / math.sqrt(w2_a)


def _sech(x: float) -> float:
    # overflow-safe 1/cosh
    ax = abs(x)
    e = math.exp(-ax)
    return 2.0 * e / (1.0 + e * e)


def peaked_b_of_L(r: ReducedParams, L: float) -> float:
    """Energy level b of the C3=0 peaked wave with period L.

    Equivalent overflow-safe form of the cosh expression:
    b = -[(2C1+C2)^2 * sech(L/2)^2 + (4C1-C2)*C2] / 8.
    """
    if not L > 0:
        raise OutOfRangeError(f"peaked period must be positive, got {L!r}")
    s = _sech(0.5 * L)
    return -((2.0 * r.c1 + r.c2) ** 2 * s * s + (4.0 * r.c1 - r.c2) * r.c2) / 8.0


def peaked_db_dL(r: ReducedParams, L: float) -> float:
    """Slope db/dL = (2C1+C2)^2 * sinh(L/2)^4 / sinh(L)^3 > 0."""
    if not L > 0:
        raise OutOfRangeError(f"peaked period must be positive, got {L!r}")
    # sinh(L)^3 = 8 sinh(L/2)^3 cosh(L/2)^3, so the ratio is tanh(L/2)*sech(L/2)^2/8.
    ratio = math.tanh(0.5 * L) * _sech(0.5 * L) ** 2 / 8.0
    return (2.0 * r.c1 + r.c2) ** 2 * ratio


def peaked_L_of_b(r: ReducedParams, b: float) -> float:
    """Invert the peaked family b(L) by bisection (db/dL > 0)."""
    lo_b = -0.5 * r.c1**2 - r.c1 * r.c2
    hi_b = (r.c2**2 - 4.0 * r.c1 * r.c2) / 8.0
    if not lo_b < b < hi_b:
        raise OutOfRangeError(
            f"b must lie in ({lo_b!r}, {hi_b!r}) on the peaked boundary, got {b!r}"
        )
    lo, hi = 1e-12, 1.0
    while peaked_b_of_L(r, hi) < b:
        hi *= 2.0
        if hi > 1e4:
            raise OutOfRangeError(f"b={b!r} too close to the solitary limit")
    return float(brentq(lambda L: peaked_b_of_L(r, L) - b, lo, hi, xtol=1e-13))


def _chicone_G(x, beta, eta):
    return -0.5 * (
        x**2 + (beta + 2.0) * x + (beta + 2.0) * eta**2 / (x - eta) + (beta + 2.0) * eta
    )


def chicone_R(x, beta, eta):
    """Cubic R(x) whose positivity on [x1, x2] certifies W'' > 0."""
    coeffs = [
        4.0 * eta - beta - 2.0,
        eta * (14.0 + 7.0 * beta - 12.0 * eta),
        3.0 * eta**2 * (4.0 * eta - 6.0 - 3.0 * beta),
        eta**2 * (beta**2 + 6.0 * eta - 4.0 * eta**2 + 4.0 * beta + 3.0 * beta * eta + 4.0),
    ]
    return np.polyval(coeffs, x)


def chicone_Wpp(x, beta, eta):
    """W''(x) = -12*(beta+2)*(x-eta)*R(x) / [G'-bracket]^4."""
    bracket = 2.0 * x**2 + (beta + 2.0 - 4.0 * eta) * x + 2.0 * eta * (eta - beta - 2.0)
    with np.errstate(divide="ignore", over="ignore"):
        return -12.0 * (beta + 2.0) * (x - eta) * chicone_R(x, beta, eta) / bracket**4


def chicone_S(eta: float, beta: float) -> float:
    return (
        27.0 * beta**3
        + 2.0 * (81.0 + 92.0 * eta) * beta**2
        + (324.0 + 736.0 * eta - 240.0 * eta**2) * beta
        + 8.0 * (27.0 + 92.0 * eta - 60.0 * eta**2 + 16.0 * eta**3)
    )


def chicone_N(beta: float, eta: float) -> float:
    root = math.sqrt((beta + 2.0) * (beta + 2.0 + 8.0 * eta))
    return (beta + 2.0) * (beta + 2.0 + 2.0 * eta) + (beta + 2.0 - 2.0 * eta) * root


def chicone_witness(
    r: ReducedParams, c3: float, n_samples: int = 2048
) -> ChiconeWitness:
    """Sample the positivity quantities behind the b-monotonicity proof.

    Defined for the quadrant with Q = phi2 > 0 (the normalized potential has
    the x1 < 0 < x2 < eta < x3 frame there); |Q| below 1e-12 degenerates the
    x = (phi - Q)/Q transformation and raises QZeroError.
    """
    q = _p.critical_roots(r, c3).phi2
    if abs(q) < 1e-12:
        raise QZeroError("phi2 = 0 degenerates the normalizing transformation")
    beta = r.c2 / q
    eta = (r.c1 - q) / q
    if eta <= 0.0 or beta + 2.0 <= 0.0:
        raise OutOfRangeError(
            f"witness ranges require the Q > 0 quadrant geometry, got "
            f"beta={beta!r}, eta={eta!r}"
        )
    disc = (beta + 2.0) * (beta + 2.0 + 8.0 * eta)
    root = math.sqrt(disc)
    x1 = 0.25 * (4.0 * eta - beta - 2.0 - root)
    x3 = 0.25 * (4.0 * eta - beta - 2.0 + root)
    h_star = _chicone_G(x1, beta, eta)
    x2 = float(
        brentq(
            lambda x: _chicone_G(x, beta, eta) - h_star,
            0.0,
            eta * (1.0 - 1e-14),
            xtol=1e-14,
        )
    )
    xs = np.linspace(x1, x2, n_samples)
    rvals = chicone_R(xs, beta, eta)
    wvals = chicone_Wpp(xs, beta, eta)
    wvals = np.where(np.isfinite(wvals), wvals, np.inf)
    return ChiconeWitness(
        q=q,
        beta=beta,
        eta=eta,
        x1=x1,
        x2=x2,
        x3=x3,
        min_r_on_range=float(np.min(rvals)),
        min_wpp_on_range=float(np.min(wvals)),
        s_value=chicone_S(eta, beta),
        n_value=chicone_N(beta, eta),
    )


def monotonicity_scan(
    r: ReducedParams,
    axis: str,
    fixed: float,
    grid,
    tol: float = 1e-10,
) -> MonotonicityTable:
    """Classify the period trend along a parameter grid.

    axis "b" scans b at fixed C3; axis "C3" scans C3 at fixed b.  Successive
    differences only count when they exceed 10x the summed quadrature error
    estimates; the surviving sign pattern must be all +, all -, or + then -
    (SingleMax), anything else is Violated.
    """
    key = axis.lower()
    if key not in ("b", "c3"):
        raise DomainError(f"axis must be 'b' or 'C3', got {axis!r}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 3:
        raise DomainError("monotonicity verdict requires a grid of at least 3 points")
    if not np.all(np.diff(grid) > 0):
        raise DomainError("grid must be strictly increasing")

    ls = np.empty(len(grid))
    errs = np.empty(len(grid))
    for i, gval in enumerate(grid):
        c3, b = (fixed, gval) if key == "b" else (gval, fixed)
        res = period(r, c3, b, tol=tol)
        ls[i] = res.L
        errs[i] = res.est_error

    diffs = np.diff(ls)
    thr = 10.0 * (errs[:-1] + errs[1:])
    signs = np.zeros(len(diffs), dtype=int)
    signs[diffs > thr] = 1
    signs[diffs < -thr] = -1

    nonzero = signs[signs != 0]
    pattern: list[int] = []
    for s in nonzero:
        if not pattern or pattern[-1] != s:
            pattern.append(int(s))

    if pattern == [1] and np.all(signs == 1):
        verdict = Verdict.INCREASING
    elif pattern == [-1] and np.all(signs == -1):
        verdict = Verdict.DECREASING
    elif pattern == [1, -1]:
        verdict = Verdict.SINGLE_MAX
    else:
        verdict = Verdict.VIOLATED

    samples = np.column_stack([grid, ls])
    return MonotonicityTable(axis="b" if key == "b" else "C3", samples=samples, verdict=verdict)
