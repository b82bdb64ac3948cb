"""Reference-value verification: recomputes every published benchmark number
of the model and compares at fixed tolerances.

The checks are data-driven: expected values live in EXPECTED so a harness
can perturb one and confirm the suite notices. Lines marked INFO are
reported but not gated (they depend on inputs printed elsewhere at too few
digits to be reproduced tighter; see the repository notes).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from . import cycles, phase
from .errors import NoRootInBracket, PtcycleError
from .numerics import DEFAULT_CONFIG, derivative_central, integrate_adaptive
from .spectrum import (
    GapKind,
    ModelParams,
    SpectralSplit,
    TimeDependence,
    static_split,
)
from .thermo import (
    EvalDomain,
    entropy,
    free_energy,
    internal_energy,
    log_partition_function,
    partition_function,
    pressure,
    thermo_point,
)

__all__ = ["EXPECTED", "REFERENCE", "run_all", "build_context", "CheckResult"]

# model configurations the published numbers refer to
REFERENCE = {
    "broken": dict(N=160, nu=12.0, lam1=-24.0, T1=5.53240, T2=5.91528,
                   c1=4.75),
    "symmetric": dict(N=120, nu=25.0, lam=4.5, T1=35.5489, T2=88.4576,
                      c1=6.0, S1=4.7726, S2=6.0),
}

EXPECTED = {
    "S1": -2.51338,
    "S2": 3.16977,
    "U_corners": (-14.0513, 17.4488, 17.5543, -14.0937),
    # (dW, dQ, dU) per step
    "table_tlambda": ((2.1172, 33.6174, 31.5002),
                      (0.0, 0.1054, 0.1054),
                      (0.2065, -31.4415, -31.6480),
                      (0.0, 0.0424, 0.0424)),
    "table_carnot": ((2.1172, 33.6174, 31.5002),
                     (-0.1054, 0.0, 0.1054),
                     (0.2065, -31.4415, -31.6480),
                     (-0.0424, 0.0, 0.0424)),
    "loop_W_tlambda": 2.3238,
    "eta_tlambda": 0.0688,
    "loop_W_carnot": 2.1760,
    "eta_carnot": 0.06473,
    "eta_stirling_air": 0.05503,
    "cv_matching": -0.4516,
    "t1": 0.0023241,
    "t2": 0.0023532,
    "delta_t": 2.91e-5,
    "t1_symmetric": 0.0025630,
}


@dataclass
class CheckResult:
    criterion: str
    name: str
    computed: float
    expected: float
    tol: float
    ok: bool
    info_only: bool = False

    def line(self) -> str:
        status = "INFO" if self.info_only else ("PASS" if self.ok else "FAIL")
        return (f"{status:4s}  [{self.criterion}] {self.name}: "
                f"computed={self.computed:.9g} expected={self.expected:.9g} "
                f"tol={self.tol:.3g}")


@dataclass
class Report:
    results: List[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results if not r.info_only)

    @property
    def lines(self) -> List[str]:
        return [r.line() for r in self.results]

    @property
    def summary(self) -> str:
        gated = [r for r in self.results if not r.info_only]
        n_fail = sum(1 for r in gated if not r.ok)
        return (f"{len(gated) - n_fail}/{len(gated)} checks passed"
                + (f", {n_fail} FAILED" if n_fail else ""))


def _S(T, lam, nu, N):
    return entropy(EvalDomain(static_split(ModelParams(N, nu, lam)), T))


def _U(T, lam, nu, N):
    return internal_energy(EvalDomain(static_split(ModelParams(N, nu, lam)), T))


def _z_double_sum(split: SpectralSplit, T: float, tail: float = 1e-12) -> float:
    """Literal truncated ladder sum over both oscillator quantum numbers.

    Real splitting: geometric tails bound the cutoff per factor. Imaginary
    splitting: conjugate pairing makes each (n+, n-) + (n-, n+) pair real;
    |e^{-W/T}| = e^{-nu/T} bounds the tail.
    """
    nu, gap = split.nu, split.gap
    if split.gap_kind is GapKind.REAL:
        wm, wp = nu - gap, nu + gap
        cut = []
        for w in (wp, wm):
            r = math.exp(-w / T)
            cut.append(int(math.ceil(math.log(tail * (1.0 - r)) / math.log(r))) + 1)
        total = 0.0
        for np_ in range(cut[0]):
            for nm in range(cut[1]):
                total += math.exp(-(np_ * wp + nm * wm) / T)
        return total
    q = math.exp(-nu / T)
    cut = int(math.ceil(math.log(tail * (1.0 - q) ** 2) / math.log(q))) + 2
    total = 0.0
    for np_ in range(cut):
        for nm in range(cut):
            # e^{-(np W+ + nm W-)/T} + conjugate partner, summed as real part
            total += math.exp(-(np_ + nm) * nu / T) * math.cos((np_ - nm) * gap / T)
    return total


class Context:
    """Everything computed once and shared by the checks."""

    def __init__(self):
        cfg = DEFAULT_CONFIG
        rb = REFERENCE["broken"]
        self.N, self.nu = rb["N"], rb["nu"]
        self.lam1, self.T1, self.T2 = rb["lam1"], rb["T1"], rb["T2"]
        self.td = TimeDependence(c1=rb["c1"])
        self.model1 = ModelParams(self.N, self.nu, self.lam1)

        self.lam2, self.S2_common = cycles.entropy_match_lambda(
            self.T1, self.T2, self.nu, self.N, (-45.0, -30.0),
            target_S=EXPECTED["S2"], cfg=cfg)

        self.tl = cycles.build_cycle(
            cycles.CycleKind.T_LAMBDA, T1=self.T1, T2=self.T2, nu=self.nu,
            N=self.N, lam1=self.lam1, lam2=self.lam2, cfg=cfg)
        self.carnot = cycles.build_cycle(
            cycles.CycleKind.CARNOT_BROKEN, T1=self.T1, T2=self.T2, nu=self.nu,
            N=self.N, lam1=self.lam1, lam2=self.lam2, cfg=cfg)

        # time-plane solves on the S1 contour (brackets isolate the branch)
        S1 = EXPECTED["S1"]
        self.t1 = cycles.time_isentrope_solve(S1, self.T1, self.model1,
                                              self.td, (0.00225, 0.00235), cfg)
        self.t2 = cycles.time_isentrope_solve(S1, self.T2, self.model1,
                                              self.td, (0.00230, 0.00240), cfg)

        rs = REFERENCE["symmetric"]
        self.sym_model = ModelParams(rs["N"], rs["nu"], rs["lam"])
        self.sym_td = TimeDependence(c1=rs["c1"])
        self.t1_sym = cycles.time_isentrope_solve(
            rs["S1"], rs["T1"], self.sym_model, self.sym_td, (0.0023, 0.0030), cfg)
        self.t2_sym = cycles.time_isentrope_solve(
            rs["S1"], rs["T2"], self.sym_model, self.sym_td, (0.0045, 0.0070), cfg)


def build_context() -> Context:
    return Context()


def _abs_check(criterion, name, computed, expected, tol, info_only=False):
    return CheckResult(criterion, name, computed, expected, tol,
                       abs(computed - expected) <= tol, info_only)


def _flag_check(criterion, name, ok, note_value=1.0):
    return CheckResult(criterion, name, note_value if ok else 0.0, note_value,
                       0.0, ok)


# --- the individual criteria -------------------------------------------------


def _c01(ctx) -> List[CheckResult]:
    out = []
    for T, tag in ((ctx.T1, "T1"), (ctx.T2, "T2")):
        s = _S(T, ctx.lam1, ctx.nu, ctx.N)
        out.append(_abs_check("c01", f"S({tag}, lam1)", s, EXPECTED["S1"], 5e-4))
    return out


def _c02(ctx) -> List[CheckResult]:
    return [_abs_check("c02", f"U corner {p.label}", p.U, exp, 5e-4)
            for p, exp in zip(ctx.tl.points, EXPECTED["U_corners"])]


def _c03(ctx) -> List[CheckResult]:
    out = [_abs_check("c03", "common entropy at lam2", ctx.S2_common,
                      EXPECTED["S2"], 1e-3)]
    eta_air = cycles.stirling_reference_efficiency(
        ctx.T1, ctx.T2, ctx.lam1, ctx.lam2, 1.25)
    out.append(_abs_check("c03", "Stirling efficiency (c_v = 5/4 R)", eta_air,
                          EXPECTED["eta_stirling_air"], 5e-5))
    # the published matching value corresponds to loop work over the
    # isothermal heat input (Carnot-convention denominator)
    eta_ref = ctx.tl.loop_W / ctx.tl.steps[0].dQ
    cv = cycles.stirling_matching_cv(ctx.T1, ctx.T2, ctx.lam1, ctx.lam2, eta_ref)
    out.append(_abs_check("c03", "c_v matching the T-lam cycle", cv,
                          EXPECTED["cv_matching"], 5e-4))
    return out


def _table_checks(criterion, report, expected_table) -> List[CheckResult]:
    out = []
    for step, (ew, eq, eu) in zip(report.steps, expected_table):
        tag = f"{step.from_label}->{step.to_label}"
        out.append(_abs_check(criterion, f"dW {tag}", step.dW, ew, 1e-3))
        out.append(_abs_check(criterion, f"dQ {tag}", step.dQ, eq, 1e-3))
        out.append(_abs_check(criterion, f"dU {tag}", step.dU, eu, 1e-3))
    return out


def _c04(ctx) -> List[CheckResult]:
    out = _table_checks("c04", ctx.tl, EXPECTED["table_tlambda"])
    out.append(_abs_check("c04", "T-lam loop work", ctx.tl.loop_W,
                          EXPECTED["loop_W_tlambda"], 1e-3))
    out.append(_abs_check("c04", "T-lam efficiency", ctx.tl.efficiency,
                          EXPECTED["eta_tlambda"], 5e-4))
    return out


def _c05(ctx) -> List[CheckResult]:
    out = _table_checks("c05", ctx.carnot, EXPECTED["table_carnot"])
    out.append(_abs_check("c05", "Carnot loop work", ctx.carnot.loop_W,
                          EXPECTED["loop_W_carnot"], 1e-3))
    out.append(_abs_check("c05", "Carnot efficiency", ctx.carnot.efficiency,
                          EXPECTED["eta_carnot"], 5e-5))
    out.append(_abs_check("c05", "Carnot efficiency = 1 - T1/T2",
                          ctx.carnot.efficiency, 1.0 - ctx.T1 / ctx.T2, 1e-12))
    return out


def _c06(ctx) -> List[CheckResult]:
    out = []
    for rep, tag in ((ctx.tl, "T-lam"), (ctx.carnot, "Carnot")):
        worst = max(abs(s.dW - (s.dQ - s.dU)) for s in rep.steps)
        out.append(_abs_check("c06", f"{tag} first law residual", worst, 0.0, 1e-9))
        scale = max(abs(s.dU) for s in rep.steps)
        out.append(_abs_check("c06", f"{tag} loop dU", rep.loop_U, 0.0,
                              1e-9 * scale))
        out.append(_abs_check("c06", f"{tag} loop dW - dQ",
                              rep.loop_W - rep.loop_Q, 0.0, 1e-9 * scale))
    return out


def _c07(ctx) -> List[CheckResult]:
    rs = REFERENCE["symmetric"]
    out = [
        _abs_check("c07", "solved t1", ctx.t1, EXPECTED["t1"], 5e-7),
        _abs_check("c07", "solved t2", ctx.t2, EXPECTED["t2"], 5e-7),
        _abs_check("c07", "t2 - t1", ctx.t2 - ctx.t1, EXPECTED["delta_t"], 1e-7),
    ]
    # the contour level is reproduced exactly at the solved times
    from .spectrum import split_at_time
    for t, T, tag in ((ctx.t1, ctx.T1, "t1"), (ctx.t2, ctx.T2, "t2")):
        s = entropy(EvalDomain(split_at_time(t, ctx.model1, ctx.td), T))
        out.append(_abs_check("c07", f"S at solved {tag}", s, EXPECTED["S1"], 1e-3))
    # forward evaluation at the 5-digit published times cannot beat the
    # printed precision: dS/dt ~ 3e4 makes a half-ulp of t worth ~2e-3 in S
    for t, T, tag in ((EXPECTED["t1"], ctx.T1, "t1"), (EXPECTED["t2"], ctx.T2, "t2")):
        s = entropy(EvalDomain(split_at_time(t, ctx.model1, ctx.td), T))
        out.append(_abs_check("c07", f"S at published {tag} (precision-limited)",
                              s, EXPECTED["S1"], 1e-3, info_only=True))
    out.append(_abs_check("c07", "solved symmetric t1", ctx.t1_sym,
                          EXPECTED["t1_symmetric"], 5e-7))
    s_sym = entropy(EvalDomain(
        split_at_time(EXPECTED["t1_symmetric"], ctx.sym_model, ctx.sym_td),
        rs["T1"]))
    out.append(_abs_check("c07", "S at published symmetric t1", s_sym,
                          rs["S1"], 1e-3))
    return out


def _c08(ctx) -> List[CheckResult]:
    rs = REFERENCE["symmetric"]
    out = []
    window = (1e-3, rs["nu"] ** 2 / rs["N"] - 1e-6)
    for level, tag in ((rs["S2"], "S2"), (rs["S1"], "S1")):
        try:
            path = cycles.trace_isentrope_lambda(
                level, rs["nu"], rs["N"], rs["T2"], rs["T1"], 33, window)
            ok = len(path.samples) == 33
        except PtcycleError:
            ok = False
        out.append(_flag_check("c08", f"single-valued lam trace at {tag}", ok))
    try:
        cycles.entropy_match_lambda(rs["T1"], rs["T2"], rs["nu"], rs["N"], window)
        no_root = False
    except NoRootInBracket:
        no_root = True
    out.append(_flag_check("c08", "no equal-entropy pair in unbroken window",
                           no_root))
    out.append(_flag_check("c08", "time evolution raises T along the contour",
                           ctx.t2_sym > ctx.t1_sym))
    return out


def _c09(ctx) -> List[CheckResult]:
    out = []
    # ladder-sum oracle, normalizable unbroken point
    split = static_split(ModelParams(160, 12.0, 0.5))
    d = EvalDomain(split, 5.0)
    z = partition_function(d)
    z_sum = _z_double_sum(split, 5.0)
    out.append(_abs_check("c09", "Z vs ladder sum (rel)", abs(z - z_sum) / z_sum,
                          0.0, 1e-8))
    # broken-regime F against the conjugate-paired sum
    split_b = static_split(ModelParams(160, 12.0, -24.0))
    db = EvalDomain(split_b, 5.0)
    f_sum = -5.0 * math.log(_z_double_sum(split_b, 5.0))
    out.append(_abs_check("c09", "F vs paired ladder sum (rel)",
                          abs(free_energy(db) - f_sum) / abs(f_sum), 0.0, 1e-8))
    # finite-difference identities on a (T, lam, nu) grid spanning both regimes
    worst_u = worst_s = worst_p = 0.0
    cfg = DEFAULT_CONFIG
    for T in (1.0, 3.0, 5.0, 10.0, 40.0):
        for lam in (-24.0, -10.0, -1.0, 0.2, 0.5):
            for nu in (10.0, 12.0, 16.0):
                m = ModelParams(160, nu, lam)
                pt = thermo_point(T, m)
                du = derivative_central(
                    lambda Tx: log_partition_function(
                        EvalDomain(static_split(m), Tx)), T, cfg)
                worst_u = max(worst_u, abs(T * T * du - pt.U) / (1.0 + abs(pt.U)))
                ds = -derivative_central(
                    lambda Tx: -Tx * log_partition_function(
                        EvalDomain(static_split(m), Tx)), T, cfg)
                worst_s = max(worst_s, abs(ds - pt.S) / (1.0 + abs(pt.S)))
                dp = -derivative_central(
                    lambda lx: free_energy(
                        EvalDomain(static_split(ModelParams(160, nu, lx)), T)),
                    lam, cfg)
                worst_p = max(worst_p, abs(dp - pt.p) / (1.0 + abs(pt.p)))
    out.append(_abs_check("c09", "U vs T^2 dlnZ/dT worst rel", worst_u, 0.0, 1e-6))
    out.append(_abs_check("c09", "S vs -dF/dT worst rel", worst_s, 0.0, 1e-6))
    out.append(_abs_check("c09", "p vs -dF/dlam worst rel", worst_p, 0.0, 1e-6))
    # exceptional-point two-sided limits
    worst = 0.0
    for T in (2.0, 5.0, 20.0):
        for get in (lambda tp: tp.Z, lambda tp: tp.U, lambda tp: tp.S,
                    lambda tp: tp.p):
            plus = get(thermo_point(T, ModelParams(160, 12.0, 1e-9)))
            minus = get(thermo_point(T, ModelParams(160, 12.0, -1e-9)))
            worst = max(worst, abs(plus - minus) / (1.0 + abs(plus)))
    out.append(_abs_check("c09", "two-sided limits at lam = 0", worst, 0.0, 1e-8))
    return out


def _c10(ctx) -> List[CheckResult]:
    out = []
    T, nu, N = 5.0, 12.0, 160
    zeros = phase.pressure_zeros(T, N, 6, nu)
    worst = max(abs(z - (-(n * n) * math.pi ** 2 * T * T / N)) / abs(z)
                for n, z in enumerate(zeros, start=1))
    out.append(_abs_check("c10", "pressure zeros vs closed form (rel)",
                          worst, 0.0, 1e-10))
    worst_pair = max(abs(phase.isotherm_area(n, T, nu, N)
                         + phase.isotherm_area(n + 1, T, nu, N))
                     for n in range(1, 6))
    out.append(_abs_check("c10", "area(n) + area(n+1)", worst_pair, 0.0, 1e-9))
    worst_quad = 0.0
    from .thermo import _pressure_lambda
    for n in range(1, 4):
        lo = -(n * n) * math.pi ** 2 * T * T / N
        hi = -((n - 1) ** 2) * math.pi ** 2 * T * T / N
        quad = -integrate_adaptive(lambda lam: _pressure_lambda(T, lam, nu, N),
                                   lo, hi)
        closed = phase.isotherm_area(n, T, nu, N)
        worst_quad = max(worst_quad, abs(quad - closed) / abs(closed))
    out.append(_abs_check("c10", "area closed form vs quadrature (rel)",
                          worst_quad, 0.0, 1e-6))
    lo, hi = phase.binodal_interval(T, N, 1)
    f1 = free_energy(EvalDomain(static_split(ModelParams(N, nu, hi)), T))
    f2 = free_energy(EvalDomain(static_split(ModelParams(N, nu, lo)), T))
    out.append(_abs_check("c10", "F(lam1) - F(lam2)", f1 - f2, 0.0, 1e-9))
    worst_gap = 0.0
    n_below = 0
    for lam in np.linspace(lo, hi, 101):
        fhet = phase.heterogeneous_free_energy(float(lam), T, nu, N, 1)
        fhom = free_energy(EvalDomain(static_split(ModelParams(N, nu, float(lam))), T))
        if fhet <= fhom + 1e-12:
            n_below += 1
    out.append(_flag_check("c10", "F_het <= F on 101 binodal samples",
                           n_below == 101, 101.0))
    s_lo, s_hi = phase.spinodal_interval(T, nu, N, 1)
    out.append(_flag_check("c10", "spinodal strictly inside binodal",
                           lo < s_lo < s_hi < hi))
    widths = [(Tx, phase.pressure_zeros(Tx, N, 4, nu)) for Tx in (2.0, 4.0, 8.0)]
    ratios = [(zs[1] - zs[3]) / Tx ** 2 for Tx, zs in widths]
    out.append(_abs_check("c10", "binodal width / T^2 spread (rel)",
                          (max(ratios) - min(ratios)) / abs(ratios[0]), 0.0, 1e-6))
    ds = derivative_central(
        lambda lam: entropy(EvalDomain(static_split(ModelParams(N, nu, lam)), T)),
        -10.0)
    dp = derivative_central(
        lambda Tx: pressure(Tx, ModelParams(N, nu, -10.0)), T)
    out.append(_abs_check("c10", "Maxwell relation dS/dlam vs dp/dT",
                          ds - dp, 0.0, 1e-6 * (1.0 + abs(dp))))
    return out


def _c11(ctx) -> List[CheckResult]:
    out = []
    nu = 12.0
    big = thermo_point(1e4 * nu, ModelParams(160, nu, -24.0))
    out.append(_abs_check("c11", "U/(2T) at T = 1e4 nu", big.U / (2e4 * nu),
                          1.0, 0.01))
    cold = entropy(EvalDomain(static_split(ModelParams(160, nu, 0.5)), nu / 100.0))
    out.append(_abs_check("c11", "S(T -> 0), unbroken", cold, 0.0, 1e-8))
    m = ModelParams(160, nu, -24.0)
    has_negative = any(
        derivative_central(
            lambda Tx: entropy(EvalDomain(static_split(m), Tx)), float(T)) < 0.0
        for T in np.arange(0.5, 6.01, 0.25))
    out.append(_flag_check("c11", "dS/dT < 0 somewhere in (0, 6]", has_negative))
    return out


_CRITERIA = [_c01, _c02, _c03, _c04, _c05, _c06, _c07, _c08, _c09, _c10, _c11]


def run_all(ctx: Optional[Context] = None) -> Report:
    """Run every check; returns the full report (gated + informational)."""
    if ctx is None:
        ctx = build_context()
    report = Report()
    for fn in _CRITERIA:
        report.results.extend(fn(ctx))
    return report
