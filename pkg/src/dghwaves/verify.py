"""Verification suites: every advertised guarantee as an executable check.

Each suite exercises one guarantee end to end (printed classifier values,
existence-region corners, oracle equivalences, monotonicity theorems,
eigenvalue-count laws, the spectral and orbital criteria) and reports the
measured quantities together with a pass/fail flag and its runtime budget.
The CLI `verify` command and the acceptance test module both run these.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import fourier
from . import params as _p
from . import period as _period
from . import profiles as _profiles
from . import spectral as _spectral
from .params import PhysicalParams, ReducedParams, RegionClass
from .period import Verdict

R21 = ReducedParams(2.0, 1.0)
PHYS21 = PhysicalParams(alpha=1.0, omega=0.5, gamma=0.0, c=2.0)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    runtime_s: float
    limit_s: float
    details: dict = field(default_factory=dict)

    @property
    def within_budget(self) -> bool:
        return self.runtime_s < self.limit_s

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name} ({self.runtime_s:.2f}s < {self.limit_s:g}s)"

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "runtime_s": self.runtime_s,
            "runtime_limit_s": self.limit_s,
            "details": self.details,
        }


def _sig_digit_tol(ref: float, digits: int = 5) -> float:
    if ref == 0.0:
        return 1e-9
    return 0.5 * 10.0 ** (math.floor(math.log10(abs(ref))) - digits + 1)


def _time_call(fn, reps: int = 200) -> float:
    fn()  # warm up
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def _random_reduced(rng, quadrant):
    if quadrant == 0:  # C1 > C2 > 0
        c1 = rng.uniform(0.5, 3.0)
        c2 = rng.uniform(0.05, 0.95) * c1
    elif quadrant == 1:  # C1 > 0 >= C2, 2C1 + C2 > 0
        c1 = rng.uniform(0.5, 3.0)
        c2 = -rng.uniform(0.0, 0.9) * 2.0 * c1
    elif quadrant == 2:  # C2 >= C1 > 0
        c1 = rng.uniform(0.3, 2.0)
        c2 = c1 * rng.uniform(1.0, 3.0)
    else:  # C1 <= 0 < C2, 2C1 + C2 > 0
        c2 = rng.uniform(0.5, 3.0)
        c1 = -rng.uniform(0.0, 0.45) * c2
    return ReducedParams(c1, c2)


def _random_interior(rng, r, u=(0.05, 0.95), v=(0.05, 0.9)):
    c3 = rng.uniform(*u) * _p.c3_critical(r)
    bm, bp = _p.boundary_b(r, c3)
    b = bm + rng.uniform(*v) * (bp - bm)
    return c3, b


def suite_g_classifier() -> dict:
    cases = [
        (ReducedParams(3.0, 1.02), -1.0, 7.32894),
        (ReducedParams(2.01, 0.03), -1.0, -16.1944),
        (ReducedParams(3.0, 3.0), -27.0 / 8.0, 0.0),
    ]
    values, ok = [], True
    for r, b, ref in cases:
        g = _p.g_classifier(r, b)
        values.append(g)
        ok &= abs(g - ref) <= _sig_digit_tol(ref)
    per_call = _time_call(lambda: _p.g_classifier(cases[0][0], -1.0))
    return {
        "passed": ok and per_call < 1e-3,
        "values": values,
        "per_call_s": per_call,
    }


def suite_region_corners() -> dict:
    crit = _p.c3_critical(R21)
    bm0, bp0 = _p.boundary_b(R21, 0.0)
    bmc, bpc = _p.boundary_b(R21, crit)
    ok = (
        abs(bm0 + 4.0) <= 1e-12
        and abs(bp0 + 0.875) <= 1e-12
        and abs(crit - 125.0 / 27.0) <= 1e-12
        and abs(bmc - 1.0 / 6.0) <= 1e-12
        and abs(bpc - 1.0 / 6.0) <= 1e-12
    )
    per_call = _time_call(lambda: _p.boundary_b(R21, 0.0))
    return {
        "passed": ok and per_call < 1e-3,
        "corners": [[0.0, bm0], [0.0, bp0], [crit, bmc]],
        "per_call_s": per_call,
    }


def suite_root_ordering(count: int = 10_000) -> dict:
    rng = np.random.default_rng(101)
    worst_resid = 0.0
    for i in range(count):
        r = _random_reduced(rng, i % 4)
        c3 = rng.uniform(1e-3, 1.0 - 1e-3) * _p.c3_critical(r)
        roots = _p.critical_roots(r, c3)
        mid = (r.c1 - r.c2) / 3.0
        if not (-0.5 * r.c2 < roots.phi1 < mid < roots.phi2 < r.c1 < roots.phi3):
            return {"passed": False, "failed_at": {"c1": r.c1, "c2": r.c2, "c3": c3}}
        for phi in (roots.phi1, roots.phi2, roots.phi3):
            resid = abs(_p.f_eval(phi, r) - c3) / max(1.0, abs(c3))
            worst_resid = max(worst_resid, resid)
            if resid > 1e-12:
                return {
                    "passed": False,
                    "failed_at": {"c1": r.c1, "c2": r.c2, "c3": c3, "resid": resid},
                }
    return {"passed": True, "count": count, "worst_scaled_residual": worst_resid}


def suite_period_oracle(count: int = 100) -> dict:
    rng = np.random.default_rng(202)
    worst = 0.0
    for i in range(count):
        r = _random_reduced(rng, i % 4)
        c3, b = _random_interior(rng, r)
        lq = _period.period(r, c3, b, tol=1e-12).L
        ls = _period.period_by_shooting(r, c3, b)
        worst = max(worst, abs(lq - ls) / lq)
    return {"passed": worst <= 1e-8, "count": count, "worst_relative": worst}


def suite_center_limit(count: int = 20) -> dict:
    rng = np.random.default_rng(303)
    deltas = np.array([1e-4, 1e-5, 1e-6])
    worst = 0.0
    for _ in range(count):
        c3 = rng.uniform(0.05, 0.8) * _p.c3_critical(R21)
        bm, _ = _p.boundary_b(R21, c3)
        ls = [_period.period(R21, c3, bm + d, tol=1e-12).L for d in deltas]
        limit = float(np.polyfit(deltas, ls, 2)[-1])
        ref = _period.center_limit_period(R21, c3)
        worst = max(worst, abs(limit - ref) / ref)
    exact = _period.center_limit_period(R21, 3.0)
    exact_ok = abs(exact - math.pi * math.sqrt(2.0)) <= 1e-12
    return {
        "passed": worst <= 1e-6 and exact_ok,
        "worst_relative": worst,
        "exact_case": exact,
    }


def suite_peaked_limit(count: int = 10) -> dict:
    rng = np.random.default_rng(404)
    bm, bp = _p.boundary_b(R21, 0.0)
    worst = 0.0
    for _ in range(count):
        b = bm + rng.uniform(0.1, 0.9) * (bp - bm)
        l_exp = _period.peaked_L_of_b(R21, b)
        l_num = _period.period(R21, 1e-10, b, tol=1e-12).L
        worst = max(worst, abs(l_num - l_exp))
    b_ref = _period.peaked_b_of_L(R21, 2.0)
    point_ok = abs(b_ref - (-2.18741)) <= 1e-4
    return {
        "passed": worst <= 1e-3 and point_ok,
        "worst_abs": worst,
        "b_of_L2": b_ref,
    }


def suite_theorem2(configs: int = 10, grid_points: int = 50) -> dict:
    rng = np.random.default_rng(505)
    verdicts = []
    for i in range(configs):
        r = _random_reduced(rng, i % 4)
        c3 = rng.uniform(0.1, 0.9) * _p.c3_critical(r)
        bm, bp = _p.boundary_b(r, c3)
        width = bp - bm
        grid = np.linspace(bm + 0.02 * width, bp - 0.02 * width, grid_points)
        tab = _period.monotonicity_scan(r, "b", c3, grid)
        verdicts.append(tab.verdict.value)
    ok = all(v == "Increasing" for v in verdicts)
    return {"passed": ok, "verdicts": verdicts}


def _c3_interval_at_b(r, b):
    crit = _p.c3_critical(r)
    hi = brentq(lambda c3: _p.boundary_b(r, c3)[0] - b, 1e-9, crit - 1e-9)
    f_top = lambda c3: _p.boundary_b(r, c3)[1] - b
    lo = 0.0
    if f_top(1e-9) < 0.0 < f_top(crit - 1e-9):
        lo = brentq(f_top, 1e-9, crit - 1e-9)
    return lo, hi


def _band_grid(lo: float, hi: float) -> np.ndarray:
    """C3 grid clustered at both ends (the period maximum hides there)."""
    width = hi - lo
    left = lo + width * 0.003 * 2.0 ** np.arange(0, 6)  # 0.3% .. 9.6%
    mid = lo + width * np.linspace(0.15, 0.85, 8)
    right = hi - width * 0.1 * 0.5 ** np.arange(0, 9)  # 90% .. 99.98%
    return np.unique(np.concatenate([left, mid, right]))


def _verdict_at_b(r, b) -> Verdict:
    lo, hi = _c3_interval_at_b(r, b)
    return _period.monotonicity_scan(r, "C3", b, _band_grid(lo, hi)).verdict


def suite_theorem3() -> dict:
    b1 = _period.b1_threshold(R21)
    b1_ok = abs(b1 - (-2.0219)) <= 1e-4
    v_inc = _verdict_at_b(R21, -3.0)
    v_max = _verdict_at_b(R21, -1.5)
    v_dec = _verdict_at_b(R21, -0.8)
    # bisect the Increasing/SingleMax boundary to 1e-2
    lo_b, hi_b = -2.5, -1.5
    assert _verdict_at_b(R21, lo_b) == Verdict.INCREASING
    while hi_b - lo_b > 1e-2:
        mid = 0.5 * (lo_b + hi_b)
        if _verdict_at_b(R21, mid) == Verdict.INCREASING:
            lo_b = mid
        else:
            hi_b = mid
    boundary = 0.5 * (lo_b + hi_b)
    ok = (
        v_inc == Verdict.INCREASING
        and v_max == Verdict.SINGLE_MAX
        and v_dec == Verdict.DECREASING
        and b1_ok
        and abs(boundary - b1) <= 1e-2
    )
    return {
        "passed": ok,
        "verdicts": [v_inc.value, v_max.value, v_dec.value],
        "b1": b1,
        "bisected_boundary": boundary,
    }


def suite_chicone(count: int = 20, n_samples: int = 2048) -> dict:
    rng = np.random.default_rng(606)
    min_r = min_w = float("inf")
    for _ in range(count):
        r = _random_reduced(rng, 0)  # C1 > C2 > 0 has Q > 0
        c3 = rng.uniform(0.05, 0.95) * _p.c3_critical(r)
        w = _period.chicone_witness(r, c3, n_samples=n_samples)
        min_r = min(min_r, w.min_r_on_range)
        min_w = min(min_w, w.min_wpp_on_range)
        if w.min_r_on_range <= 0 or w.min_wpp_on_range <= 0:
            return {
                "passed": False,
                "failed_at": {"c1": r.c1, "c2": r.c2, "c3": c3},
            }
    return {"passed": True, "count": count, "min_R": min_r, "min_Wpp": min_w}


def suite_kernel_identities() -> dict:
    configs = [(5.0, 1.0), (5.0, 3.0), (6.0, 2.0)]
    rows = []
    ok = True
    for l_target, c3 in configs:
        fam = _spectral.variational_derivatives(R21, l_target, c3, 256)
        lop = _spectral.build_L(fam.profile)
        r_kernel = float(
            np.max(np.abs(lop.matrix @ fam.profile.dphi))
            / np.max(np.abs(fam.profile.dphi))
        )
        r_db = float(np.max(np.abs(lop.matrix @ fam.dbphi - 1.0)))
        q2 = fam.profile.phi - fourier.diff_values(
            fam.profile.phi, fam.profile.period_z, 2
        )
        r_dc = float(np.max(np.abs(lop.matrix @ fam.dcphi + q2)))
        rows.append(
            {"L": l_target, "C3": c3, "kernel": r_kernel, "db": r_db, "dc": r_dc}
        )
        ok &= r_kernel <= 1e-6 and r_db <= 1e-4 and r_dc <= 1e-4
    return {"passed": ok, "residuals": rows}


def suite_spectral_trichotomy(n: int = 192) -> dict:
    b = -1.5
    c3_star = brentq(
        lambda c3: _period.period_partials(R21, c3, b)[1], 0.01, 0.3, xtol=1e-8
    )
    grid = np.linspace(0.02, 0.25, 13)
    rows, ok = [], True
    switch_cells = []
    prev = None
    for c3 in grid:
        prof = _profiles.solve_profile(R21, c3, b, n)
        counts = _spectral.inertia(_spectral.build_L(prof)).pair
        _, dl_dc3 = _period.period_partials(R21, c3, b)
        expected = (2, 1) if dl_dc3 > 0 else (1, 1)
        ok &= counts == expected
        rows.append({"C3": c3, "counts": list(counts), "dL_dC3": dl_dc3})
        if prev is not None and prev != counts:
            switch_cells.append((prev_c3, c3))
        prev, prev_c3 = counts, c3
    located = any(a <= c3_star <= b_ for a, b_ in switch_cells)
    return {
        "passed": ok and located,
        "extremum_C3": c3_star,
        "switch_cells": switch_cells,
        "scan": rows,
    }


def suite_inertia_equivalence(count: int = 20, n: int = 128) -> dict:
    rng = np.random.default_rng(707)
    pairs = []
    for _ in range(count):
        r = _random_reduced(rng, 0)
        c3, b = _random_interior(rng, r, u=(0.15, 0.85), v=(0.15, 0.8))
        prof = _profiles.solve_profile(r, c3, b, n)
        cl = _spectral.inertia(_spectral.build_L(prof)).pair
        cm = _spectral.inertia(_spectral.schrodinger_transform(prof)).pair
        pairs.append([list(cl), list(cm)])
        if cl != cm:
            return {"passed": False, "failed_at": {"c1": r.c1, "c2": r.c2, "c3": c3, "b": b}}
    return {"passed": True, "count": count, "pairs": pairs[:5]}


def suite_theta_sign(count: int = 20, n: int = 128) -> dict:
    rng = np.random.default_rng(808)
    checked = 0
    for _ in range(count):
        r = _random_reduced(rng, 0)
        c3, b = _random_interior(rng, r, u=(0.15, 0.85), v=(0.15, 0.8))
        prof = _profiles.solve_profile(r, c3, b, n)
        theta = _spectral.theta_index(prof)
        _, dl_dc3 = _period.period_partials(r, c3, b)
        if math.copysign(1.0, theta) != -math.copysign(1.0, dl_dc3):
            return {
                "passed": False,
                "failed_at": {"c1": r.c1, "c2": r.c2, "c3": c3, "b": b, "theta": theta},
            }
        checked += 1
    return {"passed": True, "count": checked}


def suite_theorem4(l_target: float = 5.0) -> dict:
    candidates = [2.0, 2.5, 3.0, 3.5]
    rows, qualified, ok = [], 0, True
    refined_done = False
    for c3 in candidates:
        try:
            rep = _spectral.stability_indices(
                R21, PHYS21, l_target, c3, n=256, with_orbital=False
            )
        except Exception as exc:
            rows.append({"C3": c3, "skipped": str(exc)})
            continue
        row = {
            "C3": c3,
            "b": rep.b,
            "dL_dC3": rep.dl_dc3,
            "dFM3_dC3": rep.dfm3_dc3,
            "counts": [rep.n_constrained, rep.z_constrained],
            "max_re_JL_256": rep.max_re_jl,
            "JL_norm_256": rep.jl_norm,
        }
        if rep.dl_dc3 < 0 and rep.dfm3_dc3 < 0:
            qualified += 1
            ok &= (rep.n_constrained, rep.z_constrained) == (0, 1)
            ok &= rep.spectral_verdict
            ok &= rep.max_re_jl <= 1e-6 * rep.jl_norm
            if not refined_done:
                _, prof512 = _spectral.fixed_period_curve(R21, l_target, c3, n=512)
                jl512 = _spectral.build_JL(prof512)
                norm512 = _spectral.jl_norm(jl512)
                max_re_512, _ = _spectral.jl_spectrum_check(jl512, tol=1e-6 * norm512)
                row["max_re_JL_512"] = max_re_512
                row["JL_norm_512"] = norm512
                ok &= max_re_512 <= 1e-6 * norm512
                refined_done = True
        rows.append(row)
    return {
        "passed": ok and qualified >= 2 and refined_done,
        "qualified_points": qualified,
        "rows": rows,
    }


def suite_orbital() -> dict:
    prof = _profiles.solve_profile(R21, 2.0, -1.0, 256)
    check = _spectral.orbital_check(prof, PHYS21)
    agreement = abs(check.lyy - check.lyy_closed_form) / abs(check.lyy)
    ok = agreement <= 1e-6 and check.verdict
    return {"passed": ok, "agreement_rel": agreement, "check": check.to_dict()}


_SUITES = {
    "g-classifier": (suite_g_classifier, 1.0),
    "region-corners": (suite_region_corners, 1.0),
    "root-ordering": (suite_root_ordering, 5.0),
    "period-oracle": (suite_period_oracle, 60.0),
    "center-limit": (suite_center_limit, 30.0),
    "peaked-limit": (suite_peaked_limit, 30.0),
    "theorem2": (suite_theorem2, 60.0),
    "theorem3": (suite_theorem3, 120.0),
    "chicone": (suite_chicone, 30.0),
    "kernel-identities": (suite_kernel_identities, 90.0),
    "spectral-trichotomy": (suite_spectral_trichotomy, 300.0),
    "inertia-equivalence": (suite_inertia_equivalence, 120.0),
    "theta-sign": (suite_theta_sign, 120.0),
    "theorem4": (suite_theorem4, 600.0),
    "orbital": (suite_orbital, 120.0),
}


def suite_names() -> list[str]:
    return list(_SUITES)


def run_suite(name: str, **overrides) -> SuiteResult:
    if name not in _SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(_SUITES)}")
    fn, limit = _SUITES[name]
    t0 = time.perf_counter()
    details = fn(**overrides)
    runtime = time.perf_counter() - t0
    passed = bool(details.pop("passed")) and runtime < limit
    return SuiteResult(
        name=name, passed=passed, runtime_s=runtime, limit_s=limit, details=details
    )


def run_all(names=None, verbose: bool = True) -> list[SuiteResult]:
    results = []
    for name in names or suite_names():
        res = run_suite(name)
        if verbose:
            print(res.line(), flush=True)
        results.append(res)
    return results
