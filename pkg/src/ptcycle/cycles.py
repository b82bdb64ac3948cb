"""Construction and bookkeeping of four-step thermodynamic cycles.

Two cycle families are supported, both built on the same rectangle of
corner points 1 = (T2, lam1), 2 = (T2, lam2), 3 = (T1, lam2),
4 = (T1, lam1) with T2 > T1 (the hot isotherm carries step 1 -> 2):

* the T-lam cycle: two isotherms joined by two constant-lam legs on which
  only the temperature moves (realizable in the broken regime, where the
  entropy is non-monotonic in T, so S returns to its corner value);
* the Carnot (TS) cycle: the same isotherms joined by true isentropes,
  realized by varying nu with T at constant lam (broken regime) or by
  varying lam with T at constant nu (unbroken regime).

Per step, dW = dQ - dU with dQ > 0 for heat absorbed and dW > 0 for work
done by the system. Each column is computed independently (quadratures and
closed forms), so the first law is a genuine cross-check, not an identity.
The cycle efficiency divides the loop work by the sum of the positive heat
contributions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

from .errors import (
    BranchLost,
    CycleInfeasible,
    InvalidRatio,
    MultiValued,
    NoRootInBracket,
)
from .numerics import (
    DEFAULT_CONFIG,
    NumericsConfig,
    derivative_central,
    find_root_bracketed,
    integrate_adaptive,
    scan_roots,
)
from .spectrum import (
    GapKind,
    ModelParams,
    SpectralSplit,
    TimeDependence,
    split_at_time,
    static_split,
)
from .thermo import EvalDomain, _pressure_lambda, entropy, internal_energy

__all__ = [
    "StepKind",
    "PathLabel",
    "CycleKind",
    "IsentropeKind",
    "CyclePoint",
    "CycleStep",
    "CycleReport",
    "IsentropePath",
    "entropy_match_candidates",
    "entropy_match_lambda",
    "trace_isentrope_nu",
    "trace_isentrope_lambda",
    "step_integrals",
    "time_evolution_step",
    "build_cycle",
    "solve_broken_corners",
    "stirling_reference_efficiency",
    "stirling_matching_cv",
    "time_isentrope_solve",
]


class StepKind(Enum):
    ISOTHERMAL = "isothermal"
    ISO_LAMBDA = "iso-lambda"
    ISENTROPE_NU = "isentrope-nu"
    ISENTROPE_LAMBDA = "isentrope-lambda"
    TIME_EVOLUTION = "time-evolution"


class PathLabel(Enum):
    GAMMA1 = "Gamma1"  # isentropic verticals (Carnot rectangle)
    GAMMA2 = "Gamma2"  # constant-lam arches (T-lam cycle)


class CycleKind(Enum):
    T_LAMBDA = "tlambda"
    CARNOT_BROKEN = "carnot-broken"
    CARNOT_SYMMETRIC = "carnot-symmetric"


class IsentropeKind(Enum):
    NU_VARIES = "nu-varies"
    LAMBDA_VARIES = "lambda-varies"


@dataclass(frozen=True)
class CyclePoint:
    label: int
    T: float
    lam: float
    nu: float
    S: float
    U: float


@dataclass(frozen=True)
class CycleStep:
    from_label: int
    to_label: int
    kind: StepKind
    dQ: float
    dW: float
    dU: float


@dataclass(frozen=True)
class CycleReport:
    points: Tuple[CyclePoint, ...]
    steps: Tuple[CycleStep, ...]
    loop_Q: float
    loop_W: float
    loop_U: float
    efficiency: float
    path_label: PathLabel


@dataclass(frozen=True)
class IsentropePath:
    """Samples (T, varied value) of a constant-entropy path."""

    kind: IsentropeKind
    S_level: float
    samples: Tuple[Tuple[float, float], ...]


# --- entropy evaluation helpers ---------------------------------------------

def _S_static(T: float, lam: float, nu: float, N: int) -> float:
    return entropy(EvalDomain(static_split(ModelParams(N, nu, lam)), T))


def _U_static(T: float, lam: float, nu: float, N: int) -> float:
    return internal_energy(EvalDomain(static_split(ModelParams(N, nu, lam)), T))


def _S_at_nu(T: float, nu: float, lam: float, N: int) -> float:
    # the splitting does not depend on nu, so vary nu at fixed gap
    kind = GapKind.REAL if lam >= 0 else GapKind.IMAGINARY
    gap = math.sqrt(N * abs(lam))
    return entropy(EvalDomain(SpectralSplit(nu, kind, gap), T))


def _nan_guard(f: Callable[[float], float]) -> Callable[[float], float]:
    def wrapped(x: float) -> float:
        try:
            return f(x)
        except Exception:
            return math.nan
    return wrapped


# --- corner solving ----------------------------------------------------------

def entropy_match_candidates(T1: float, T2: float, nu: float, N: int,
                             bracket: Sequence[float],
                             cfg: NumericsConfig = DEFAULT_CONFIG) -> list:
    """All lam in the bracket with S(T1, lam) = S(T2, lam), as (lam, S) pairs."""
    if T1 == T2:
        raise ValueError("T1 and T2 must differ")
    lo, hi = min(bracket), max(bracket)
    f = _nan_guard(lambda lam: _S_static(T1, lam, nu, N) - _S_static(T2, lam, nu, N))
    roots = scan_roots(f, lo, hi, cfg)
    return [(lam, _S_static(T1, lam, nu, N)) for lam in roots]


def entropy_match_lambda(T1: float, T2: float, nu: float, N: int,
                         bracket: Sequence[float],
                         target_S: Optional[float] = None,
                         cfg: NumericsConfig = DEFAULT_CONFIG) -> Tuple[float, float]:
    """The coupling lam at which both temperatures share one entropy value.

    Scans the bracket for sign changes of S(T1, .) - S(T2, .) and refines
    each. With several candidates the one whose common entropy is closest
    to target_S is returned; without a target the root must be unique.
    Raises NoRootInBracket when no equal-entropy pair exists (always the
    case in the unbroken regime, where S is monotonic in T).
    """
    cands = entropy_match_candidates(T1, T2, nu, N, bracket, cfg)
    if not cands:
        raise NoRootInBracket(
            f"no equal-entropy coupling in [{min(bracket)}, {max(bracket)}] "
            f"for T1={T1}, T2={T2}")
    if target_S is None:
        if len(cands) > 1:
            raise MultiValued(
                f"{len(cands)} equal-entropy couplings found; pass target_S "
                f"to select: {[round(c[0], 6) for c in cands]}")
        return cands[0]
    return min(cands, key=lambda c: abs(c[1] - target_S))


def _bracket_root(f: Callable[[float], float], center: float, radius: float,
                  lo_limit: float, cfg: NumericsConfig) -> float:
    """Expanding-bracket root search: radius doubles up to 8 times."""
    r = radius
    for _ in range(8):
        a = max(center - r, lo_limit)
        b = center + r
        fa, fb = _nan_guard(f)(a), _nan_guard(f)(b)
        if not (math.isnan(fa) or math.isnan(fb)) and fa * fb <= 0.0:
            if fa == 0.0:
                return a
            return find_root_bracketed(f, a, b, cfg)
        r *= 2.0
    raise BranchLost(f"could not re-bracket near {center} (radius up to {r / 2})")


def trace_isentrope_nu(S_level: float, lam: float, N: int,
                       T_from: float, T_to: float, steps: int,
                       nu_guess: float,
                       cfg: NumericsConfig = DEFAULT_CONFIG) -> IsentropePath:
    """Trace nu(T) with S(T, nu, lam) = S_level from T_from to T_to.

    Bracketed root-finding per grid temperature, with continuation: the
    previous nu is the predictor and the bracket radius doubles on failure
    (up to 8 times) before BranchLost. The first sample brackets around
    nu_guess.
    """
    if T_from == T_to:
        Ts = [T_from]
    else:
        npts = max(2, steps)
        Ts = [T_from + (T_to - T_from) * i / (npts - 1) for i in range(npts)]
    gap = static_split(ModelParams(N, nu_guess if nu_guess > 0 else 1.0, lam))
    lo_limit = gap.gap * (1.0 + 1e-12) if gap.gap_kind is GapKind.REAL else 1e-12
    samples = []
    prev = nu_guess
    for T in Ts:
        f = lambda nu: _S_at_nu(T, nu, lam, N) - S_level
        r0 = max(1e-3, 0.02 * abs(prev))
        nu_T = _bracket_root(f, prev, r0, lo_limit, cfg)
        samples.append((T, nu_T))
        prev = nu_T
    return IsentropePath(IsentropeKind.NU_VARIES, S_level, tuple(samples))


def trace_isentrope_lambda(S_level: float, nu: float, N: int,
                           T_from: float, T_to: float, steps: int,
                           lambda_window: Sequence[float],
                           cfg: NumericsConfig = DEFAULT_CONFIG) -> IsentropePath:
    """Trace lam(T) with S(T, nu, lam) = S_level from T_from to T_to.

    The whole lambda_window is scanned at every grid temperature so that
    multi-valuedness is detected rather than silently followed: several
    roots raise MultiValued (generic in the broken regime), none raises
    BranchLost.
    """
    if T_from == T_to:
        Ts = [T_from]
    else:
        npts = max(2, steps)
        Ts = [T_from + (T_to - T_from) * i / (npts - 1) for i in range(npts)]
    lo, hi = min(lambda_window), max(lambda_window)
    samples = []
    for T in Ts:
        f = _nan_guard(lambda lam: _S_static(T, lam, nu, N) - S_level)
        roots = scan_roots(f, lo, hi, cfg)
        if not roots:
            raise BranchLost(f"no lam with S = {S_level} at T = {T}")
        if len(roots) > 1:
            raise MultiValued(
                f"lam(T) is {len(roots)}-valued at T = {T}: {roots}")
        samples.append((T, roots[0]))
    return IsentropePath(IsentropeKind.LAMBDA_VARIES, S_level, tuple(samples))


# --- step bookkeeping ---------------------------------------------------------

def step_integrals(kind: StepKind, from_pt: CyclePoint, to_pt: CyclePoint,
                   N: int, cfg: NumericsConfig = DEFAULT_CONFIG) -> Tuple[float, float, float]:
    """(dQ, dW, dU) for one step, each column computed independently.

    Isothermal:   dQ = T (S_to - S_from), dW = integral of p dlam, dU closed.
    Iso-lam:      dW = 0, dQ = integral of T (dS/dT) dT, dU closed.
    Isentropes:   dQ = 0, dU closed, dW = -dU (first law; for the nu-isentrope
                  lam is constant so no p-dlam work exists, for the
                  lam-isentrope the path quadrature of p dlam equals -dU).
    """
    dU = to_pt.U - from_pt.U
    if kind is StepKind.ISOTHERMAL:
        if from_pt.T != to_pt.T:
            raise ValueError("isothermal step endpoints differ in T")
        T = from_pt.T
        dQ = T * (to_pt.S - from_pt.S)
        nu = from_pt.nu
        dW = integrate_adaptive(lambda lam: _pressure_lambda(T, lam, nu, N),
                                from_pt.lam, to_pt.lam, cfg)
        return dQ, dW, dU
    if kind is StepKind.ISO_LAMBDA:
        if from_pt.lam != to_pt.lam or from_pt.nu != to_pt.nu:
            raise ValueError("iso-lambda step endpoints differ in lam or nu")
        lam, nu = from_pt.lam, from_pt.nu

        def t_ds_dt(T: float) -> float:
            return T * derivative_central(
                lambda Tx: _S_static(Tx, lam, nu, N), T, cfg)

        dQ = integrate_adaptive(t_ds_dt, from_pt.T, to_pt.T, cfg)
        return dQ, 0.0, dU
    if kind in (StepKind.ISENTROPE_NU, StepKind.ISENTROPE_LAMBDA):
        return 0.0, -dU, dU
    raise ValueError(f"step_integrals does not handle {kind}; "
                     "use time_evolution_step for time-evolution legs")


def time_evolution_step(T_from: float, t_from: float, T_to: float, t_to: float,
                        p: ModelParams, td: TimeDependence) -> Tuple[float, float, float]:
    """(dQ, dW, dU) for a leg along a constant-entropy contour in the T-t plane.

    All couplings stay fixed, so dQ = 0 and the work is done through the
    time-dependent map: dW = -dU with dU from the instantaneous splittings.
    """
    u0 = internal_energy(EvalDomain(split_at_time(t_from, p, td), T_from))
    u1 = internal_energy(EvalDomain(split_at_time(t_to, p, td), T_to))
    dU = u1 - u0
    return 0.0, -dU, dU


# --- cycle assembly -----------------------------------------------------------

def _snap_to_match(T1: float, T2: float, nu: float, N: int, lam: float,
                   cfg: NumericsConfig) -> float:
    """Refine lam to the exact equal-entropy root nearest the given value.

    Corner couplings only define a closed cycle when S(T1, lam) = S(T2, lam)
    exactly; published couplings and temperatures are rounded, so the given
    lam is treated as an initial guess and refined within +-0.5 %.
    """
    half = max(0.005 * abs(lam), 0.05)
    try:
        snapped, _ = entropy_match_lambda(T1, T2, nu, N,
                                          (lam - half, lam + half),
                                          target_S=_S_static(T1, lam, nu, N),
                                          cfg=cfg)
    except NoRootInBracket as exc:
        raise CycleInfeasible(
            f"no equal-entropy coupling near lam = {lam}: {exc}") from exc
    return snapped


def solve_broken_corners(T1: float, T2: float, nu: float, N: int, lam1: float,
                         lam2: Optional[float] = None,
                         lambda2_bracket: Optional[Sequence[float]] = None,
                         target_S2: Optional[float] = None,
                         cfg: NumericsConfig = DEFAULT_CONFIG) -> Tuple[CyclePoint, ...]:
    """Corner points 1..4 of a broken-regime cycle; derives lam2 if not given.

    Both couplings are snapped to exact equal-entropy roots so that the
    isentropic verticals genuinely connect the corners; with rounded inputs
    the cycle would otherwise fail to close at the sixth decimal.
    """
    if T1 == T2:
        raise CycleInfeasible("T1 = T2 gives a degenerate cycle")
    Tc, Th = (T1, T2) if T1 < T2 else (T2, T1)
    raw_lam1, lam1 = lam1, _snap_to_match(Tc, Th, nu, N, lam1, cfg)
    if lam2 is None:
        if lambda2_bracket is None:
            raise CycleInfeasible("need lam2 or a bracket to derive it")
        try:
            lam2, _ = entropy_match_lambda(Tc, Th, nu, N, lambda2_bracket,
                                           target_S=target_S2, cfg=cfg)
        except NoRootInBracket as exc:
            raise CycleInfeasible(f"no matching lam2: {exc}") from exc
    elif lam2 == raw_lam1:
        lam2 = lam1  # degenerate zero-area cycle
    else:
        lam2 = _snap_to_match(Tc, Th, nu, N, lam2, cfg)

    def pt(label: int, T: float, lam: float) -> CyclePoint:
        return CyclePoint(label, T, lam, nu,
                          _S_static(T, lam, nu, N), _U_static(T, lam, nu, N))

    return (pt(1, Th, lam1), pt(2, Th, lam2), pt(3, Tc, lam2), pt(4, Tc, lam1))


def _assemble(points, kinds, N, path_label, cfg) -> CycleReport:
    steps = []
    for (a, b), kind in zip(((0, 1), (1, 2), (2, 3), (3, 0)), kinds):
        dQ, dW, dU = step_integrals(kind, points[a], points[b], N, cfg)
        steps.append(CycleStep(points[a].label, points[b].label, kind, dQ, dW, dU))
    loop_Q = sum(s.dQ for s in steps)
    loop_W = sum(s.dW for s in steps)
    loop_U = sum(s.dU for s in steps)
    heat_in = sum(s.dQ for s in steps if s.dQ > 0.0)
    eff = loop_W / heat_in if heat_in > 0.0 else 0.0
    return CycleReport(tuple(points), tuple(steps), loop_Q, loop_W, loop_U,
                       eff, path_label)


def build_cycle(kind: CycleKind, *, T1: float, T2: float, nu: float, N: int,
                lam1: Optional[float] = None, lam2: Optional[float] = None,
                lambda2_bracket: Optional[Sequence[float]] = None,
                target_S2: Optional[float] = None,
                S1: Optional[float] = None, S2: Optional[float] = None,
                verify_paths: bool = True,
                cfg: NumericsConfig = DEFAULT_CONFIG) -> CycleReport:
    """Assemble a cycle report for the requested kind.

    T_LAMBDA / CARNOT_BROKEN need lam1 plus either lam2 or a derivation
    bracket (lambda2_bracket, target_S2). CARNOT_SYMMETRIC needs the two
    entropy levels S1 < S2; its corner couplings are solved from
    S(T, lam) = level inside the normalizable window.
    """
    if kind in (CycleKind.T_LAMBDA, CycleKind.CARNOT_BROKEN):
        if lam1 is None:
            raise CycleInfeasible("broken-regime cycles need lam1")
        points = solve_broken_corners(T1, T2, nu, N, lam1, lam2,
                                      lambda2_bracket, target_S2, cfg)
        if kind is CycleKind.T_LAMBDA:
            kinds = (StepKind.ISOTHERMAL, StepKind.ISO_LAMBDA,
                     StepKind.ISOTHERMAL, StepKind.ISO_LAMBDA)
            return _assemble(points, kinds, N, PathLabel.GAMMA2, cfg)
        if verify_paths:
            # the isentropes must actually be traceable by varying nu
            for (a, b) in ((1, 2), (3, 0)):
                try:
                    trace_isentrope_nu(points[a].S, points[a].lam, N,
                                       points[a].T, points[b].T, 17,
                                       nu_guess=nu, cfg=cfg)
                except BranchLost as exc:
                    raise CycleInfeasible(f"isentrope trace failed: {exc}") from exc
        kinds = (StepKind.ISOTHERMAL, StepKind.ISENTROPE_NU,
                 StepKind.ISOTHERMAL, StepKind.ISENTROPE_NU)
        return _assemble(points, kinds, N, PathLabel.GAMMA1, cfg)

    if kind is CycleKind.CARNOT_SYMMETRIC:
        if S1 is None or S2 is None:
            raise CycleInfeasible("symmetric Carnot cycles need S1 and S2")
        Tc, Th = (T1, T2) if T1 < T2 else (T2, T1)
        hi = nu * nu / N * (1.0 - 1e-9)
        window = (1e-9, hi)

        def lam_at(T: float, S_level: float) -> float:
            f = _nan_guard(lambda lam: _S_static(T, lam, nu, N) - S_level)
            roots = scan_roots(f, window[0], window[1], cfg)
            if not roots:
                raise CycleInfeasible(
                    f"no unbroken-regime lam with S = {S_level} at T = {T}")
            if len(roots) > 1:
                raise CycleInfeasible(
                    f"corner coupling multi-valued at T = {T}: {roots}")
            return roots[0]

        corners = [(1, Th, lam_at(Th, S1)), (2, Th, lam_at(Th, S2)),
                   (3, Tc, lam_at(Tc, S2)), (4, Tc, lam_at(Tc, S1))]
        points = [CyclePoint(lbl, T, lam, nu, _S_static(T, lam, nu, N),
                             _U_static(T, lam, nu, N))
                  for (lbl, T, lam) in corners]
        if verify_paths:
            for (a, b), level in (((1, 2), S2), ((3, 0), S1)):
                lo = min(points[a].lam, points[b].lam)
                hi_ = max(points[a].lam, points[b].lam)
                pad = 0.1 * (hi_ - lo) + 1e-6
                trace_isentrope_lambda(level, nu, N, points[a].T, points[b].T,
                                       17, (max(window[0], lo - pad),
                                            min(window[1], hi_ + pad)), cfg)
        kinds = (StepKind.ISOTHERMAL, StepKind.ISENTROPE_LAMBDA,
                 StepKind.ISOTHERMAL, StepKind.ISENTROPE_LAMBDA)
        return _assemble(points, kinds, N, PathLabel.GAMMA1, cfg)

    raise ValueError(f"unknown cycle kind {kind}")


# --- reference efficiencies ----------------------------------------------------

def stirling_reference_efficiency(T1: float, T2: float, lam1: float, lam2: float,
                                  cv_over_R: float) -> float:
    """Ideal-gas Stirling efficiency with R = 1 and volume ratio lam2/lam1.

    eta = (T2 - T1) / (T2 + c_v (T2 - T1) / ln(lam2/lam1))
    """
    if lam1 == 0.0 or lam2 / lam1 <= 0.0 or lam2 / lam1 == 1.0:
        raise InvalidRatio(f"lam2/lam1 must be positive and != 1 "
                           f"(lam1={lam1}, lam2={lam2})")
    if T2 == T1:
        return 0.0
    return (T2 - T1) / (T2 + cv_over_R * (T2 - T1) / math.log(lam2 / lam1))


def stirling_matching_cv(T1: float, T2: float, lam1: float, lam2: float,
                         eta: float) -> float:
    """Specific heat c_v/R that makes the Stirling formula reproduce eta."""
    if lam1 == 0.0 or lam2 / lam1 <= 0.0 or lam2 / lam1 == 1.0:
        raise InvalidRatio(f"lam2/lam1 must be positive and != 1 "
                           f"(lam1={lam1}, lam2={lam2})")
    if eta == 0.0 or T2 == T1:
        raise ValueError("eta and T2 - T1 must be nonzero to solve for c_v")
    return ((T2 - T1) / eta - T2) * math.log(lam2 / lam1) / (T2 - T1)


# --- time-realized isentropes ----------------------------------------------------

def time_isentrope_solve(S_level: float, T: float, p: ModelParams,
                         td: TimeDependence, t_bracket: Sequence[float],
                         cfg: NumericsConfig = DEFAULT_CONFIG) -> float:
    """First time t in the bracket with S(T, split_at_time(t)) = S_level.

    The entropy oscillates along t, so the bracket chooses the branch; the
    caller must keep it inside a region where the splitting stays
    normalizable.
    """
    lo, hi = min(t_bracket), max(t_bracket)

    def f(t: float) -> float:
        return entropy(EvalDomain(split_at_time(t, p, td), T)) - S_level

    roots = scan_roots(f, lo, hi, cfg)
    if not roots:
        raise NoRootInBracket(
            f"S never crosses {S_level} for t in [{lo}, {hi}] at T = {T}")
    return roots[0]
