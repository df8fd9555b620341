"""Linearized operators, eigenvalue counts and stability classification.

The linearization of the travelling-wave equation around a smooth profile is

    L = -d/dz (C1 - phi) d/dz + (C1 - C2 - 3*phi + phi''),

self-adjoint on the periodic grid; J = -(1 - d^2/dz^2)^{-1} d/dz is the
skew-adjoint symplectic operator, and the wave is spectrally stable when the
spectrum of J*L stays on the imaginary axis.  The route to a verdict follows
the constrained-eigenvalue counting: inertia of L, the 2x2 projection matrix
S assembled from the variational derivatives of the profile along the
fixed-period curve, and the counting formulas

    n(L|X0) = n(L) - n0 - z0,     z(L|X0) = z(L) + z0.

All operators are assembled by Fourier collocation on the profile grid
(alpha = 1 normalization; the matrices equal the physical-x operators for
any alpha, while quadrature weights carry the alpha factor).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import fourier
from . import params as _p
from . import period as _period
from . import profiles as _profiles
from .errors import (
    DomainError,
    EigensolverFailureError,
    IntegrationFailureError,
    NotSymmetricError,
    NumericalError,
    ParamMismatchError,
    PeakedProfileError,
    PeriodUnreachableError,
    SingularWeightError,
    StencilLeavesCurveError,
)
from .params import PhysicalParams, ReducedParams, RegionClass
from .profiles import Profile, Provenance


class OperatorKind(str, enum.Enum):
    LINEARIZED_L = "LinearizedL"
    SCHRODINGER_M = "SchrodingerM"
    JL = "JL"


@dataclass(frozen=True)
class SpectralOperator:
    kind: OperatorKind
    n: int
    matrix: np.ndarray = field(repr=False)
    period_x: float
    kernel_hint: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class InertiaCounts:
    n_neg: int
    n_zero: int
    n_pos: int
    zero_tol: float

    @property
    def pair(self) -> tuple[int, int]:
        return (self.n_neg, self.n_zero)


@dataclass(frozen=True)
class OrbitalCheck:
    """Hypotheses and certificate of the orbital-stability theorem.

    verdict requires b <= 0, (C2/2)*(2b + (C2/2)*(C1-C2)) < 0, M(phi) > 0,
    dL/dC3 < 0 and <LY, Y> < 0 for Y = phi + C2/2.
    """

    cond_b: bool
    cond_sign: bool
    cond_m: bool
    cond_period: bool
    lyy: float
    lyy_closed_form: float
    ly_max_diff: float
    verdict: bool

    def to_dict(self) -> dict:
        return {
            "cond_b": self.cond_b,
            "cond_sign": self.cond_sign,
            "cond_M": self.cond_m,
            "cond_period": self.cond_period,
            "LYY": self.lyy,
            "LYY_closed_form": self.lyy_closed_form,
            "LY_max_diff": self.ly_max_diff,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class StabilityReport:
    c3: float
    b: float
    l_target: float
    n: int
    theta: float
    dl_dc3: float
    inertia_l: InertiaCounts
    inertia_m: InertiaCounts
    s_matrix: np.ndarray = field(repr=False)
    det_s: float = 0.0
    n0: int = 0
    z0: int = 0
    n_constrained: int = 0
    z_constrained: int = 0
    mass_l: float = 0.0
    energy_l: float = 0.0
    hamiltonian_l: float = 0.0
    dfm3_dc3: float = 0.0
    max_re_jl: float = float("nan")
    jl_norm: float = float("nan")
    spectral_verdict: bool = False
    orbital: OrbitalCheck | None = None

    def to_dict(self) -> dict:
        return {
            "C3": self.c3,
            "b": self.b,
            "L_target": self.l_target,
            "grid_n": self.n,
            "theta": self.theta,
            "dL_dC3": self.dl_dc3,
            "inertiaL": {
                "n_neg": self.inertia_l.n_neg,
                "n_zero": self.inertia_l.n_zero,
                "n_pos": self.inertia_l.n_pos,
                "zero_tol": self.inertia_l.zero_tol,
            },
            "inertiaM": {
                "n_neg": self.inertia_m.n_neg,
                "n_zero": self.inertia_m.n_zero,
                "n_pos": self.inertia_m.n_pos,
                "zero_tol": self.inertia_m.zero_tol,
            },
            "S_matrix": [[float(x) for x in row] for row in self.s_matrix],
            "detS": self.det_s,
            "n0": self.n0,
            "z0": self.z0,
            "n_constrained": self.n_constrained,
            "z_constrained": self.z_constrained,
            "M_L": self.mass_l,
            "E_L": self.energy_l,
            "F_L": self.hamiltonian_l,
            "dFM3_dC3": self.dfm3_dc3,
            "max_re_JL": self.max_re_jl,
            "JL_norm": self.jl_norm,
            "spectral_verdict": self.spectral_verdict,
            "orbital": None if self.orbital is None else self.orbital.to_dict(),
        }


def _require_smooth(p: Profile):
    if p.provenance == Provenance.PEAKED_CLOSED_FORM:
        raise PeakedProfileError(
            "spectral differentiation is invalid for the peaked (non-smooth) family"
        )


def build_L(p: Profile) -> SpectralOperator:
    """Fourier-collocation matrix of the linearized operator on the profile grid.

    The product D*diag(C1-phi)*D is symmetric in exact arithmetic (D is
    antisymmetric); averaging with its transpose removes rounding skew.  The
    odd-derivative matrix D annihilates the Nyquist sawtooth, which would
    hand that mode the (typically negative) diagonal mean instead of its
    physical stiffness and corrupt every inertia count; the rank-one
    completion below restores the Galerkin value -mean(w)*k_nyq^2 on the
    sawtooth while leaving resolved modes untouched.
    """
    _require_smooth(p)
    n, L = p.n, p.period_z
    D = fourier.diff_matrix(n, L)
    weight = p.params.c1 - p.phi
    A = D @ (weight[:, None] * D)
    sawtooth = (-1.0) ** np.arange(n)
    k_nyq = math.pi * n / L
    A -= (float(np.mean(weight)) * k_nyq**2 / n) * np.outer(sawtooth, sawtooth)
    ddphi = fourier.diff_values(p.phi, L, 2)
    diag = p.params.c1 - p.params.c2 - 3.0 * p.phi + ddphi
    mat = -0.5 * (A + A.T) + np.diag(diag)
    hint = p.dphi if p.provenance == Provenance.NUMERIC else None
    return SpectralOperator(
        kind=OperatorKind.LINEARIZED_L, n=n, matrix=mat, period_x=L, kernel_hint=hint
    )


def build_L_raw_asymmetry(p: Profile) -> float:
    """Rounding-level asymmetry of the unsymmetrized product form.

    Both the product D*diag(w)*D and the rank-one Nyquist completion are
    exactly symmetric, so this quantifies pure floating-point skew.
    """
    _require_smooth(p)
    n, L = p.n, p.period_z
    D = fourier.diff_matrix(n, L)
    weight = p.params.c1 - p.phi
    A = D @ (weight[:, None] * D)
    sawtooth = (-1.0) ** np.arange(n)
    k_nyq = math.pi * n / L
    A -= (float(np.mean(weight)) * k_nyq**2 / n) * np.outer(sawtooth, sawtooth)
    ddphi = fourier.diff_values(p.phi, L, 2)
    raw = -A + np.diag(p.params.c1 - p.params.c2 - 3.0 * p.phi + ddphi)
    return float(
        np.max(np.abs(raw - raw.T)) / max(np.max(np.abs(raw)), 1e-300)
    )


def schrodinger_transform(p: Profile) -> SpectralOperator:
    """Equivalent Schrodinger operator M = -d^2/dx^2 + Q(x).

    The Liouville substitution v = w*sqrt((C1-phi(0))/(C1-phi)) turns the
    generalized problem for L into M, whose inertia matches L's by
    congruence.  Requires C1 - phi > 0 everywhere.
    """
    _require_smooth(p)
    weight = p.params.c1 - p.phi
    if np.any(weight <= 0.0):
        raise SingularWeightError("C1 - phi must stay positive for the transform")
    n, L = p.n, p.period_z
    dphi = fourier.diff_values(p.phi, L, 1)
    ddphi = fourier.diff_values(p.phi, L, 2)
    q = (
        (p.params.c1 - p.params.c2 - 3.0 * p.phi) / weight
        + ddphi / (2.0 * weight)
        - 0.25 * (dphi / weight) ** 2
    )
    mat = -fourier.diff2_matrix(n, L) + np.diag(q)
    hint = (
        p.dphi * np.sqrt(weight) if p.provenance == Provenance.NUMERIC else None
    )
    return SpectralOperator(
        kind=OperatorKind.SCHRODINGER_M, n=n, matrix=mat, period_x=L, kernel_hint=hint
    )


def inertia(op: SpectralOperator, zero_tol: float | None = None) -> InertiaCounts:
    """Count negative/zero/positive eigenvalues of a symmetric operator.

    zero_tol defaults to 1e-6 times the largest eigenvalue magnitude.  When a
    kernel hint is attached (the discrete phi' direction) the eigenvalue
    whose eigenvector overlaps it most is pinned into the zero count, since
    discrete kernels never land exactly on zero.
    """
    if op.kind == OperatorKind.JL:
        raise NotSymmetricError("inertia requires a symmetric operator kind")
    try:
        vals, vecs = scipy.linalg.eigh(op.matrix)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigensolverFailureError(str(exc)) from exc
    scale = float(np.max(np.abs(vals))) if len(vals) else 0.0
    tol = 1e-6 * scale if zero_tol is None else zero_tol
    pinned = -1
    if op.kernel_hint is not None:
        norm = float(np.linalg.norm(op.kernel_hint))
        if norm > 0.0:
            overlaps = np.abs(vecs.T @ (op.kernel_hint / norm))
            pinned = int(np.argmax(overlaps))
    n_neg = n_zero = n_pos = 0
    for i, lam in enumerate(vals):
        if i == pinned or abs(lam) <= tol:
            n_zero += 1
        elif lam < 0.0:
            n_neg += 1
        else:
            n_pos += 1
    return InertiaCounts(n_neg=n_neg, n_zero=n_zero, n_pos=n_pos, zero_tol=tol)


def theta_index(p: Profile, rtol: float = 1e-10, atol: float = 1e-12) -> float:
    """Shear coefficient theta between the fundamental kernel solutions.

    Integrates L v = 0 as an ODE over one period together with the profile
    itself, starting from y1(0) = 1, y1'(0) = 0 and y2(0) = 0, y2'(0) = 1;
    theta = y1'(L) normalized by y2'(L) (which returns to 1 for an exact
    integration).
    """
    if p.provenance != Provenance.NUMERIC:
        raise DomainError("theta is defined for smooth non-constant waves")
    r, c3 = p.params, p.c3

    def rhs(_, y):
        phi, psi, y1, dy1, y2, dy2 = y
        ddphi = -_p.potential_u_prime(phi, r, c3)
        coef = (r.c1 - r.c2 - 3.0 * phi + ddphi) / (r.c1 - phi)
        grad = psi / (r.c1 - phi)
        return [
            psi,
            ddphi,
            dy1,
            grad * dy1 + coef * y1,
            dy2,
            grad * dy2 + coef * y2,
        ]

    y0 = [p.phi[0], 0.0, 1.0, 0.0, 0.0, 1.0]
    sol = solve_ivp(
        rhs,
        (0.0, p.period_z),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=atol,
        dense_output=False,
    )
    if not sol.success:
        raise IntegrationFailureError(f"theta integration failed: {sol.message}")
    yT = sol.y[:, -1]
    if abs(yT[5] - 1.0) > 1e-4:
        raise IntegrationFailureError(
            f"monodromy normalization drifted: y2'(L) = {yT[5]!r}"
        )
    return float(yT[3] / yT[5])


def theta_by_formula(p: Profile, dl_dc3: float | None = None) -> float:
    """theta from -dL/dC3 / dphi_plus/dC3 * phi''(0), all by closed forms/FD.

    Independent of the ODE shooting route; dphi_plus/dC3 at fixed b follows
    from implicit differentiation of U(phi_plus) = b.
    """
    r, c3, b = p.params, p.c3, p.b
    if dl_dc3 is None:
        _, dl_dc3 = _period.period_partials(r, c3, b)
    tp = _p.turning_points(r, c3, b)
    up = _p.potential_u_prime(tp.phi_plus, r, c3)
    dphiplus_dc3 = -1.0 / (2.0 * (r.c1 - tp.phi_plus)) / up
    ddphi0 = -up
    return -dl_dc3 / dphiplus_dc3 * ddphi0


def build_J(n: int, period: float) -> np.ndarray:
    """Collocation matrix of J = -(1 - d^2/dz^2)^{-1} d/dz (real, antisymmetric)."""
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n) / period
    symbol = -1j * k / (1.0 + k**2)
    symbol[n // 2] = 0.0
    return fourier.operator_matrix_from_symbol(symbol, n)


def build_JL(p: Profile) -> SpectralOperator:
    """The (non-symmetric) product J*L on the profile grid."""
    lop = build_L(p)
    jmat = build_J(p.n, p.period_z)
    return SpectralOperator(
        kind=OperatorKind.JL,
        n=p.n,
        matrix=jmat @ lop.matrix,
        period_x=p.period_z,
        kernel_hint=None,
    )


def jl_spectrum_check(
    op: SpectralOperator, tol: float | None = None
) -> tuple[float, bool]:
    """Largest |Re lambda| over the J*L spectrum and the stability flag.

    tol defaults to 1e-6 times the spectral norm of the matrix.
    """
    if op.kind != OperatorKind.JL:
        raise DomainError("jl_spectrum_check expects a JL operator")
    try:
        vals = scipy.linalg.eigvals(op.matrix)
    except scipy.linalg.LinAlgError as exc:
        raise EigensolverFailureError(str(exc)) from exc
    max_abs_real = float(np.max(np.abs(vals.real)))
    if tol is None:
        tol = 1e-6 * float(scipy.linalg.norm(op.matrix, 2))
    return max_abs_real, max_abs_real <= tol


def jl_norm(op: SpectralOperator) -> float:
    return float(scipy.linalg.norm(op.matrix, 2))


def fixed_period_curve(
    r: ReducedParams,
    l_target: float,
    c3: float,
    n: int = 256,
    quad_tol: float = 1e-12,
) -> tuple[float, Profile]:
    """Solve the period constraint L(C3, b) = l_target for b at fixed C3.

    Valid for C3 below the level where the center limit already exceeds the
    target; the period grows strictly in b, so bisection is safe.
    """
    l_min = _period.center_limit_period(r, c3)
    if l_target <= l_min:
        raise PeriodUnreachableError(
            f"target period {l_target!r} not above the center limit {l_min!r} "
            f"at C3={c3!r}"
        )
    bm, bp = _p.boundary_b(r, c3)
    width = bp - bm
    lo = bm + max(2e-10, 1e-9 * width)
    if _period.period(r, c3, lo, tol=quad_tol).L >= l_target:
        raise PeriodUnreachableError(
            f"target period {l_target!r} lies inside the center boundary layer"
        )
    hi = bp - 1e-3 * width
    while _period.period(r, c3, hi, tol=quad_tol).L < l_target:
        gap = bp - hi
        if gap < 1e-11 * max(1.0, width):
            raise NumericalError("period target unreachable below the solitary layer")
        hi = bp - 0.1 * gap
    b = float(
        brentq(
            lambda bb: _period.period(r, c3, bb, tol=quad_tol).L - l_target,
            lo,
            hi,
            xtol=1e-14,
            rtol=8.9e-16,
        )
    )
    resid = abs(_period.period(r, c3, b, tol=quad_tol).L - l_target)
    if resid > 1e-8:
        raise NumericalError(f"period solve residual {resid!r} above 1e-8")
    return b, _profiles.solve_profile(r, c3, b, n)


def _solve_c3_for_period(
    r: ReducedParams,
    b: float,
    l_target: float,
    guess: float,
    quad_tol: float = 1e-12,
) -> float:
    """Solve L(C3, b) = l_target for C3 near a guess (stencil helper)."""

    def h(c3):
        return _period.period(r, c3, b, tol=quad_tol).L - l_target

    crit = _p.c3_critical(r)

    def interior(c3):
        return (
            0.0 < c3 < crit
            and _p.region_classify(r, c3, b) == RegionClass.INTERIOR_PERIODIC
        )

    if not interior(guess):
        raise StencilLeavesCurveError(
            f"stencil base (C3={guess!r}, b={b!r}) is not interior"
        )
    h0 = h(guess)
    if h0 == 0.0:
        return guess
    scale = max(abs(guess), 1e-2 * crit)
    for w in (1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.4):
        for sign in (1.0, -1.0):
            c3_try = guess + sign * w * scale
            if not interior(c3_try):
                continue
            if h(c3_try) * h0 < 0.0:
                a, bb = sorted((guess, c3_try))
                return float(
                    brentq(h, a, bb, xtol=1e-14, rtol=8.9e-16)
                )
    raise StencilLeavesCurveError(
        f"no fixed-period neighbour found in C3 around {guess!r} at b={b!r}"
    )


@dataclass(frozen=True)
class VariationalFamily:
    """Profile and its b- and c-derivatives along the fixed-period manifold."""

    b0: float
    profile: Profile
    dbphi: np.ndarray
    dcphi: np.ndarray
    delta_b: float
    delta_c: float


def variational_derivatives(
    r: ReducedParams,
    l_target: float,
    c3: float,
    n: int = 256,
    step_scale: float = 1e-5,
) -> VariationalFamily:
    """Central differences of the wave along period-preserving families.

    For d/db the wave speed is held fixed and C3 re-solved so every stencil
    profile has exactly the target period (a fixed-C3 family would not be
    periodic-in-z after differencing); for d/dc the reduced C1 moves with c
    at fixed C2, gamma, alpha while b is held and C3 re-solved likewise.
    """
    b0, prof0 = fixed_period_curve(r, l_target, c3, n)
    db = step_scale * max(1.0, abs(b0))
    phis_b = []
    for bb in (b0 + db, b0 - db):
        c3_b = _solve_c3_for_period(r, bb, l_target, c3)
        phis_b.append(_profiles.solve_profile(r, c3_b, bb, n).phi)
    dbphi = (phis_b[0] - phis_b[1]) / (2.0 * db)

    dc = step_scale * max(1.0, abs(r.c1))
    phis_c = []
    for cc in (r.c1 + dc, r.c1 - dc):
        r_c = ReducedParams(cc, r.c2)
        c3_c = _solve_c3_for_period(r_c, b0, l_target, c3)
        phis_c.append(_profiles.solve_profile(r_c, c3_c, b0, n).phi)
    dcphi = (phis_c[0] - phis_c[1]) / (2.0 * dc)

    return VariationalFamily(
        b0=b0, profile=prof0, dbphi=dbphi, dcphi=dcphi, delta_b=db, delta_c=dc
    )


def constraint_invariance_check(
    p: Profile, trials: int = 10, seed: int = 0
) -> float:
    """Largest scaled violation of the two linearized invariants.

    For random w, both <1, J L w> and <phi - phi'', J L w> must vanish; the
    returned value is max |<q, J L w>| / (||w|| * ||L w||) over the trials
    and both constraint vectors (L^2 norms with the grid weight).
    """
    lop = build_L(p)
    jmat = build_J(p.n, p.period_z)
    dz = p.period_z / p.n
    q2 = p.phi - fourier.diff_values(p.phi, p.period_z, 2)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        w = rng.standard_normal(p.n)
        lw = lop.matrix @ w
        jlw = jmat @ lw
        scale = math.sqrt(dz * np.dot(w, w)) * math.sqrt(dz * np.dot(lw, lw))
        v1 = abs(dz * np.sum(jlw))
        v2 = abs(dz * np.dot(q2, jlw))
        worst = max(worst, max(v1, v2) / max(scale, 1e-300))
    return worst


def orbital_check(
    p: Profile, phys: PhysicalParams, dl_dc3: float | None = None
) -> OrbitalCheck:
    """Evaluate the orbital-stability hypotheses and the <LY, Y> certificate.

    Y = phi + C2/2; LY is applied both through the collocation matrix and
    through its closed form, and <LY, Y> both by quadrature and by the
    expansion in M, E and the period (energy term carries the factor 2 from
    E's one-half normalization).
    """
    _require_smooth(p)
    if p.provenance != Provenance.NUMERIC:
        raise DomainError("orbital certificate applies to non-constant smooth waves")
    r, c3, b = p.params, p.c3, p.b
    cond_b = b <= 0.0
    sign_quantity = 0.5 * r.c2 * (2.0 * b + 0.5 * r.c2 * (r.c1 - r.c2))
    cond_sign = sign_quantity < 0.0
    q = _profiles.conserved_quantities(p, phys)
    cond_m = q.mass > 0.0
    if dl_dc3 is None:
        _, dl_dc3 = _period.period_partials(r, c3, b)
    cond_period = dl_dc3 < 0.0

    lop = build_L(p)
    y = p.phi + 0.5 * r.c2
    ly_matrix = lop.matrix @ y
    ddphi = fourier.diff_values(p.phi, p.period_z, 2)
    amp = r.c1 + 0.5 * r.c2
    ly_closed = (
        2.0 * b + 0.5 * r.c2 * (r.c1 - r.c2) - amp * p.phi + amp * ddphi
    )
    ly_max_diff = float(np.max(np.abs(ly_matrix - ly_closed)))

    dx = phys.alpha * p.period_z / p.n
    lyy = float(dx * np.dot(ly_matrix, y))
    lx = phys.alpha * p.period_z
    lyy_closed = (
        (2.0 * b - 0.75 * r.c2**2) * q.mass
        + 0.5 * r.c2 * (2.0 * b + 0.5 * r.c2 * (r.c1 - r.c2)) * lx
        - 2.0 * amp * q.energy
    )
    verdict = bool(cond_b and cond_sign and cond_m and cond_period and lyy < 0.0)
    return OrbitalCheck(
        cond_b=cond_b,
        cond_sign=cond_sign,
        cond_m=cond_m,
        cond_period=cond_period,
        lyy=lyy,
        lyy_closed_form=lyy_closed,
        ly_max_diff=ly_max_diff,
        verdict=verdict,
    )


def stability_indices(
    r: ReducedParams,
    phys: PhysicalParams,
    l_target: float,
    c3: float,
    n: int = 256,
    with_jl: bool = True,
    with_orbital: bool = True,
    c3_step: float | None = None,
) -> StabilityReport:
    """Full stability classification of the L-periodic wave at level C3.

    Assembles the projection matrix S from the fixed-period variational
    derivatives, applies the counting formulas, differentiates F_L/M_L^3
    along the curve, and (optionally) cross-checks with the direct J*L
    eigenvalue sweep and the orbital certificate.
    """
    red = _p.reduce(phys)
    if abs(red.c1 - r.c1) > 1e-12 or abs(red.c2 - r.c2) > 1e-12:
        raise ParamMismatchError(
            f"physical params reduce to ({red.c1!r}, {red.c2!r}), expected "
            f"({r.c1!r}, {r.c2!r})"
        )
    fam = variational_derivatives(r, l_target, c3, n)
    prof0, b0 = fam.profile, fam.b0
    theta = theta_index(prof0)
    _, dl_dc3 = _period.period_partials(r, c3, b0)

    lop = build_L(prof0)
    inertia_l = inertia(lop)
    mop = schrodinger_transform(prof0)
    inertia_m = inertia(mop)

    dx = phys.alpha * prof0.period_z / n
    q2 = prof0.phi - fourier.diff_values(prof0.phi, prof0.period_z, 2)
    ones = np.ones(n)
    s = np.array(
        [
            [dx * np.dot(fam.dbphi, ones), -dx * np.dot(fam.dcphi, ones)],
            [dx * np.dot(fam.dbphi, q2), -dx * np.dot(fam.dcphi, q2)],
        ]
    )
    det_s = float(np.linalg.det(s))
    s_sym = 0.5 * (s + s.T)
    s_vals = np.linalg.eigvalsh(s_sym)
    s_tol = 1e-8 * float(np.max(np.abs(s_vals)))
    n0 = int(np.sum(s_vals < -s_tol))
    z0 = int(np.sum(np.abs(s_vals) <= s_tol))

    n_constrained = inertia_l.n_neg - n0 - z0
    z_constrained = inertia_l.n_zero + z0

    q0 = _profiles.conserved_quantities(prof0, phys)
    d3 = c3_step if c3_step is not None else max(1e-4 * abs(c3), 1e-6)
    ratios = []
    for cc in (c3 + d3, c3 - d3):
        try:
            _, prof_cc = fixed_period_curve(r, l_target, cc, n)
        except (PeriodUnreachableError, NumericalError) as exc:
            raise StencilLeavesCurveError(
                f"C3 stencil point {cc!r} left the fixed-period curve: {exc}"
            ) from exc
        qcc = _profiles.conserved_quantities(prof_cc, phys)
        ratios.append(qcc.hamiltonian / qcc.mass**3)
    dfm3_dc3 = (ratios[0] - ratios[1]) / (2.0 * d3)

    spectral_verdict = bool(n_constrained == 0 and z_constrained == 1)

    max_re = float("nan")
    norm_jl = float("nan")
    if with_jl:
        jl = build_JL(prof0)
        norm_jl = jl_norm(jl)
        max_re, _ = jl_spectrum_check(jl, tol=1e-6 * norm_jl)

    orbital = None
    if with_orbital:
        orbital = orbital_check(prof0, phys, dl_dc3=dl_dc3)

    return StabilityReport(
        c3=c3,
        b=b0,
        l_target=l_target,
        n=n,
        theta=theta,
        dl_dc3=dl_dc3,
        inertia_l=inertia_l,
        inertia_m=inertia_m,
        s_matrix=s,
        det_s=det_s,
        n0=n0,
        z0=z0,
        n_constrained=n_constrained,
        z_constrained=z_constrained,
        mass_l=q0.mass,
        energy_l=q0.energy,
        hamiltonian_l=q0.hamiltonian,
        dfm3_dc3=dfm3_dc3,
        max_re_jl=max_re,
        jl_norm=norm_jl,
        spectral_verdict=spectral_verdict,
        orbital=orbital,
    )
